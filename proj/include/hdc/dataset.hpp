#pragma once

// Delimited-text datasets: a header row, sample ID in the first column,
// numeric features, and (unless unlabeled) the target in the last column.
// The delimiter is a tab if the header contains one, otherwise a comma.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hdc/encoding.hpp"

namespace hdc {

enum class DatasetKind { kClassification, kRegression, kUnlabeled };

struct Dataset {
  DatasetKind kind = DatasetKind::kClassification;
  std::vector<std::string> sample_ids;
  std::vector<std::string> feature_names;
  Matrix matrix;
  std::vector<std::string> labels;  // kClassification
  std::vector<double> targets;      // kRegression

  std::size_t rows() const noexcept { return matrix.size(); }
  std::size_t features() const noexcept { return feature_names.size(); }

  // Subset of rows, preserving order.
  Dataset select(const std::vector<std::size_t>& rows) const;
  // Throws kInvalidInput when the shape invariants do not hold.
  void validate() const;
};

Dataset load_dataset(const std::filesystem::path& path, DatasetKind kind);
// `source` names the input in error messages.
Dataset parse_dataset(std::istream& in, DatasetKind kind, const std::string& source = "<input>");

// Writes the same layout load_dataset reads (tab-delimited).
void write_dataset(std::ostream& out, const Dataset& data);

}  // namespace hdc
