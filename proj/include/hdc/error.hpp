#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdc {

enum class ErrorCode {
  kInvalidDimension,
  kDimensionMismatch,
  kFormMismatch,
  kInvalidArgument,
  kInvalidInput,
  kEmptyInput,
  kNotFitted,
  kUnknownNode,
  kSelfLoop,
  kStratification,
  kDestructiveCancellation,
  kIo,
  kParse,
  kChecksum,
  kUnsupportedVersion,
  kUnknownModelKind,
};

// Stable lowercase identifier, used in CLI error lines.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hdc
