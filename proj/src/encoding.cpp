#include "hdc/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hdc/error.hpp"
#include "hdc/parallel.hpp"

namespace hdc {

LevelEncoding LevelEncoding::build(std::size_t levels, std::size_t dim, ValueRange range,
                                   Rng& rng) {
  if (levels < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "level count must be at least 2, got " + std::to_string(levels));
  }
  if (!(range.min < range.max) || !std::isfinite(range.min) || !std::isfinite(range.max)) {
    throw Error(ErrorCode::kInvalidArgument, "degenerate level range");
  }
  const std::size_t flips = dim / (2 * (levels - 1));
  if (flips == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "dimension " + std::to_string(dim) + " too small for " + std::to_string(levels) +
                    " levels");
  }

  Hypervector base = random_hypervector(dim, rng);
  std::vector<std::size_t> order(dim);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));

  LevelEncoding enc;
  enc.range_ = range;
  enc.levels_.reserve(levels);
  std::vector<std::int32_t> current(base.values().begin(), base.values().end());
  enc.levels_.push_back(std::move(base));
  for (std::size_t l = 1; l < levels; ++l) {
    for (std::size_t j = (l - 1) * flips; j < l * flips; ++j) current[order[j]] *= -1;
    enc.levels_.push_back(Hypervector::bipolar(current));
  }
  return enc;
}

LevelEncoding LevelEncoding::from_parts(std::vector<Hypervector> levels, ValueRange range) {
  if (levels.size() < 2) throw Error(ErrorCode::kInvalidArgument, "level count must be >= 2");
  LevelEncoding enc;
  enc.levels_ = std::move(levels);
  enc.range_ = range;
  return enc;
}

std::size_t LevelEncoding::quantize(double value, ValueRange range, std::size_t levels) {
  const double v = std::clamp(value, range.min, range.max);
  const double t = (v - range.min) / (range.max - range.min);
  const auto idx = static_cast<std::size_t>(std::floor(t * static_cast<double>(levels)));
  return std::min(idx, levels - 1);
}

namespace {

ValueRange widen(double lo, double hi) {
  if (!(lo < hi)) return {lo, lo + 1.0};
  return {lo, hi};
}

}  // namespace

FeatureEncoder FeatureEncoder::fit(const Matrix& rows, std::vector<std::string> feature_names,
                                   const EncoderConfig& config) {
  if (rows.empty()) throw Error(ErrorCode::kEmptyInput, "cannot fit an encoder on zero rows");
  const std::size_t features = feature_names.size();
  if (features == 0) throw Error(ErrorCode::kEmptyInput, "no features");

  std::vector<double> lo(features, std::numeric_limits<double>::infinity());
  std::vector<double> hi(features, -std::numeric_limits<double>::infinity());
  for (const auto& row : rows) {
    if (row.size() != features) {
      throw Error(ErrorCode::kInvalidInput, "row length " + std::to_string(row.size()) +
                                                " does not match " + std::to_string(features) +
                                                " features");
    }
    for (std::size_t f = 0; f < features; ++f) {
      if (!std::isfinite(row[f])) throw Error(ErrorCode::kInvalidInput, "non-finite feature value");
      lo[f] = std::min(lo[f], row[f]);
      hi[f] = std::max(hi[f], row[f]);
    }
  }
  const ValueRange global =
      widen(*std::min_element(lo.begin(), lo.end()), *std::max_element(hi.begin(), hi.end()));

  Rng id_rng(derive_seed(config.seed, streams::kFeatureIds));
  std::vector<Hypervector> ids;
  ids.reserve(features);
  for (std::size_t f = 0; f < features; ++f) {
    ids.push_back(random_hypervector(config.dim, id_rng));
    ids.back().set_name(feature_names[f]);
  }
  Rng level_rng(derive_seed(config.seed, streams::kLevels));
  LevelEncoding levels = LevelEncoding::build(config.levels, config.dim, global, level_rng);

  std::vector<ValueRange> ranges;
  if (config.per_feature_ranges) {
    for (std::size_t f = 0; f < features; ++f) ranges.push_back(widen(lo[f], hi[f]));
  }
  return from_parts(std::move(feature_names), std::move(ids), std::move(levels),
                    std::move(ranges), derive_seed(config.seed, streams::kTies));
}

FeatureEncoder FeatureEncoder::from_parts(std::vector<std::string> feature_names,
                                          std::vector<Hypervector> feature_ids,
                                          LevelEncoding levels,
                                          std::vector<ValueRange> feature_ranges,
                                          std::uint64_t tie_seed) {
  if (feature_names.size() != feature_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "feature name and ID counts differ");
  }
  if (!feature_ranges.empty() && feature_ranges.size() != feature_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "per-feature range count differs from features");
  }
  for (const auto& id : feature_ids) {
    if (id.dim() != levels.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "feature ID dimension differs from levels");
    }
  }
  FeatureEncoder enc;
  enc.feature_names_ = std::move(feature_names);
  enc.feature_ids_ = std::move(feature_ids);
  enc.levels_ = std::move(levels);
  enc.feature_ranges_ = std::move(feature_ranges);
  enc.tie_seed_ = tie_seed;
  return enc;
}

std::size_t FeatureEncoder::quantize(std::size_t feature, double value) const {
  if (feature_ranges_.empty()) return levels_.quantize(value);
  return LevelEncoding::quantize(value, feature_ranges_.at(feature), levels_.count());
}

Hypervector FeatureEncoder::encode(std::span<const double> x, const FeatureMask& mask) const {
  return encode(x, mask, tie_seed_);
}

Hypervector FeatureEncoder::encode(std::span<const double> x, const FeatureMask& mask,
                                   std::uint64_t tie_seed) const {
  if (x.size() != feature_count()) {
    throw Error(ErrorCode::kInvalidInput, "record has " + std::to_string(x.size()) +
                                              " values, encoder expects " +
                                              std::to_string(feature_count()));
  }
  if (!mask.empty() && mask.size() != feature_count()) {
    throw Error(ErrorCode::kInvalidInput, "feature mask length mismatch");
  }
  Hypervector acc = Hypervector::zeros(dim());
  bool any = false;
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (!std::isfinite(x[f])) {
      throw Error(ErrorCode::kInvalidInput,
                  "non-finite value for feature '" + feature_names_[f] + "'");
    }
    if (!mask.empty() && !mask[f]) continue;
    acc.add_product(feature_ids_[f], levels_.level(quantize(f, x[f])));
    any = true;
  }
  if (!any) throw Error(ErrorCode::kInvalidInput, "feature mask selects no feature");
  return normalize(acc, tie_seed);
}

std::vector<Hypervector> FeatureEncoder::encode_rows(const Matrix& rows,
                                                     const FeatureMask& mask) const {
  std::vector<Hypervector> out(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) { out[i] = encode(rows[i], mask); });
  return out;
}

}  // namespace hdc
