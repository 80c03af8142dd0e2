#include "hdc/dataset.hpp"

#include <cstdlib>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hdc/error.hpp"

namespace hdc {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \r\n");
  return s.substr(first, last - first + 1);
}

bool parse_real(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

}  // namespace

Dataset Dataset::select(const std::vector<std::size_t>& rows) const {
  Dataset out;
  out.kind = kind;
  out.feature_names = feature_names;
  for (const std::size_t r : rows) {
    out.sample_ids.push_back(sample_ids.at(r));
    out.matrix.push_back(matrix.at(r));
    if (kind == DatasetKind::kClassification) out.labels.push_back(labels.at(r));
    if (kind == DatasetKind::kRegression) out.targets.push_back(targets.at(r));
  }
  return out;
}

void Dataset::validate() const {
  if (sample_ids.size() != matrix.size()) {
    throw Error(ErrorCode::kInvalidInput, "sample ID count differs from row count");
  }
  for (const auto& row : matrix) {
    if (row.size() != feature_names.size()) throw Error(ErrorCode::kInvalidInput, "ragged matrix");
  }
  if (kind == DatasetKind::kClassification && labels.size() != matrix.size()) {
    throw Error(ErrorCode::kInvalidInput, "label count differs from row count");
  }
  if (kind == DatasetKind::kRegression && targets.size() != matrix.size()) {
    throw Error(ErrorCode::kInvalidInput, "target count differs from row count");
  }
}

Dataset parse_dataset(std::istream& in, DatasetKind kind, const std::string& source) {
  std::string header;
  if (!std::getline(in, header)) {
    throw Error(ErrorCode::kEmptyInput, source + ": empty file");
  }
  const char delim = header.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> columns = split(header, delim);
  for (auto& c : columns) c = trim(c);
  const std::size_t min_columns = kind == DatasetKind::kUnlabeled ? 2 : 3;
  if (columns.size() < min_columns) {
    throw Error(ErrorCode::kParse, source + ":1: expected at least " +
                                       std::to_string(min_columns) + " columns");
  }

  Dataset data;
  data.kind = kind;
  const std::size_t last_feature = kind == DatasetKind::kUnlabeled ? columns.size()
                                                                   : columns.size() - 1;
  data.feature_names.assign(columns.begin() + 1, columns.begin() + last_feature);

  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, delim);
    if (cells.size() != columns.size()) {
      throw Error(ErrorCode::kParse, source + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(columns.size()) + " columns, found " +
                                         std::to_string(cells.size()));
    }
    for (auto& c : cells) c = trim(c);
    data.sample_ids.push_back(cells.front());
    std::vector<double> row;
    row.reserve(data.feature_names.size());
    for (std::size_t c = 1; c < last_feature; ++c) {
      double v = 0;
      if (!parse_real(cells[c], v)) {
        throw Error(ErrorCode::kParse, source + ":" + std::to_string(line_no) + ": column '" +
                                           columns[c] + "' is not a finite number: '" + cells[c] +
                                           "'");
      }
      row.push_back(v);
    }
    data.matrix.push_back(std::move(row));
    if (kind == DatasetKind::kClassification) {
      data.labels.push_back(cells.back());
    } else if (kind == DatasetKind::kRegression) {
      double y = 0;
      if (!parse_real(cells.back(), y)) {
        throw Error(ErrorCode::kParse, source + ":" + std::to_string(line_no) +
                                           ": target is not a finite number: '" + cells.back() +
                                           "'");
      }
      data.targets.push_back(y);
    }
  }
  if (data.matrix.empty()) throw Error(ErrorCode::kEmptyInput, source + ": no data rows");
  return data;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return parse_dataset(in, kind, path.string());
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << "id";
  for (const auto& f : data.feature_names) out << '\t' << f;
  if (data.kind != DatasetKind::kUnlabeled) out << "\ttarget";
  out << '\n';
  out.precision(17);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    out << data.sample_ids[r];
    for (const double v : data.matrix[r]) out << '\t' << v;
    if (data.kind == DatasetKind::kClassification) out << '\t' << data.labels[r];
    if (data.kind == DatasetKind::kRegression) out << '\t' << data.targets[r];
    out << '\n';
  }
}

}  // namespace hdc
