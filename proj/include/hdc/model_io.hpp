#pragma once

// Versioned binary model files.
//
//   "HDCMODEL" | u32 version | u32 kind | u64 payload length | payload | u32 crc32
//
// Integers are little-endian regardless of host, doubles are stored as their
// IEEE-754 bit patterns, and the CRC covers everything between the magic and
// the checksum. Accumulators are stored as exact integers, so a loaded model
// reproduces every prediction of the saved one bit for bit.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <variant>

#include "hdc/classification.hpp"
#include "hdc/clustering.hpp"
#include "hdc/graph.hpp"
#include "hdc/quantum.hpp"
#include "hdc/regression.hpp"

namespace hdc {

inline constexpr std::uint32_t kModelFormatVersion = 1;

enum class ModelKind : std::uint32_t {
  kClassification = 1,
  kQuantumClassification = 2,
  kClustering = 3,
  kRegression = 4,
  kGraph = 5,
};

std::string_view to_string(ModelKind kind) noexcept;

// A clustering model together with the encoder that maps raw rows to points.
struct ClusteringArtifact {
  FeatureEncoder encoder;
  ClusteringModel model;
};

using AnyModel = std::variant<ClassificationModel, QuantumClassificationModel, ClusteringArtifact,
                              RegressionModel, GraphModel>;

ModelKind kind_of(const AnyModel& model) noexcept;

void save_model(const AnyModel& model, std::ostream& out);
void save_model(const AnyModel& model, const std::filesystem::path& path);

// Throws kParse (not a model file), kUnsupportedVersion, kChecksum (truncated
// or corrupted), kUnknownModelKind, or kIo.
AnyModel load_model(std::istream& in);
AnyModel load_model(const std::filesystem::path& path);

}  // namespace hdc
