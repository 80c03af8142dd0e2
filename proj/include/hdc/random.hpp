#pragma once

// Seeded randomness with platform-independent output. The engine is
// std::mt19937_64 (fully specified by the standard); the conversions to
// uniform reals, normals, and bounded integers are done here because the
// standard distributions are implementation-defined and model files must be
// reproducible across toolchains.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace hdc {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent child seed for a named sub-stream of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

// Sub-stream identifiers. Values are part of the model-file contract.
namespace streams {
inline constexpr std::uint64_t kFeatureIds = 1;
inline constexpr std::uint64_t kLevels = 2;
inline constexpr std::uint64_t kTies = 3;
inline constexpr std::uint64_t kFolds = 4;
inline constexpr std::uint64_t kClusterInit = 5;
inline constexpr std::uint64_t kRegressionBases = 6;
inline constexpr std::uint64_t kRegressionShuffle = 7;
inline constexpr std::uint64_t kGraphNodes = 8;
inline constexpr std::uint64_t kGraphWeights = 9;
inline constexpr std::uint64_t kGraphNonEdges = 10;
inline constexpr std::uint64_t kShots = 11;
inline constexpr std::uint64_t kSample = 12;
}  // namespace streams

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin() { return (next() >> 63) != 0; }

  // Uniform integer in [0, bound); bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (limit == 0 || r < limit) return r % bound;
    }
  }

  // Standard normal via Box-Muller (one value per call).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

}  // namespace hdc
