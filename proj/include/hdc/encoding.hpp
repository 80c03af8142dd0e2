#pragma once

// Level vectors and record encoding of numeric feature rows.
//
// A row x is encoded as normalize( sum_f bind(ID_f, level(q(x_f))) ), where
// ID_f is a random per-feature vector and level(q) is the level vector for the
// quantized value. Level vectors form a chain: each step flips a fresh block
// of floor(D / (2(L-1))) positions of the previous level, so similarity to
// level 0 decreases monotonically and the endpoints differ in about D/2
// positions.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdc/core.hpp"

namespace hdc {

using Matrix = std::vector<std::vector<double>>;

// Which features take part in an encoding; empty means all.
using FeatureMask = std::vector<bool>;

struct ValueRange {
  double min = 0.0;
  double max = 1.0;
  friend bool operator==(const ValueRange&, const ValueRange&) = default;
};

class LevelEncoding {
 public:
  // levels >= 2, range.min < range.max, and D / (2(levels-1)) >= 1.
  static LevelEncoding build(std::size_t levels, std::size_t dim, ValueRange range, Rng& rng);
  static LevelEncoding from_parts(std::vector<Hypervector> levels, ValueRange range);

  std::size_t count() const noexcept { return levels_.size(); }
  std::size_t dim() const noexcept { return levels_.front().dim(); }
  ValueRange range() const noexcept { return range_; }
  const Hypervector& level(std::size_t i) const { return levels_.at(i); }
  const std::vector<Hypervector>& levels() const noexcept { return levels_; }

  std::size_t quantize(double value) const { return quantize(value, range_, count()); }

  // floor((clamp(v) - min) / (max - min) * L), clamped to [0, L-1].
  static std::size_t quantize(double value, ValueRange range, std::size_t levels);

 private:
  std::vector<Hypervector> levels_;
  ValueRange range_;
};

struct EncoderConfig {
  std::size_t dim = kDefaultDim;
  std::size_t levels = 10;
  bool per_feature_ranges = false;
  std::uint64_t seed = 0;
};

class FeatureEncoder {
 public:
  // Ranges are taken from `rows`: one global [min, max] over every feature, or
  // one range per feature when config.per_feature_ranges is set. A constant
  // range [m, m] is widened to [m, m + 1].
  static FeatureEncoder fit(const Matrix& rows, std::vector<std::string> feature_names,
                            const EncoderConfig& config);

  static FeatureEncoder from_parts(std::vector<std::string> feature_names,
                                   std::vector<Hypervector> feature_ids, LevelEncoding levels,
                                   std::vector<ValueRange> feature_ranges,
                                   std::uint64_t tie_seed);

  std::size_t dim() const noexcept { return levels_.dim(); }
  std::size_t feature_count() const noexcept { return feature_ids_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<Hypervector>& feature_ids() const noexcept { return feature_ids_; }
  const LevelEncoding& level_encoding() const noexcept { return levels_; }
  // Empty unless per-feature ranges are in use.
  const std::vector<ValueRange>& feature_ranges() const noexcept { return feature_ranges_; }
  std::uint64_t tie_seed() const noexcept { return tie_seed_; }

  std::size_t quantize(std::size_t feature, double value) const;

  // Throws kInvalidInput on length mismatch, non-finite values, or a mask
  // that selects no feature.
  Hypervector encode(std::span<const double> x, const FeatureMask& mask = {}) const;
  Hypervector encode(std::span<const double> x, const FeatureMask& mask,
                     std::uint64_t tie_seed) const;

  // Rows encoded in parallel; output order matches input.
  std::vector<Hypervector> encode_rows(const Matrix& rows, const FeatureMask& mask = {}) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<Hypervector> feature_ids_;
  LevelEncoding levels_;
  std::vector<ValueRange> feature_ranges_;
  std::uint64_t tie_seed_ = 0;
};

}  // namespace hdc
