#pragma once

// Hypervector and Space types with the VSA arithmetic every model builds on:
// bind (componentwise product), bundle (componentwise integer sum),
// normalize (sign with seeded tie flips), permute (cyclic rotation), and the
// cosine / Hamming similarity measures.
//
// Values are stored as int32 in both forms. A bipolar vector holds only -1/+1;
// an accumulator holds exact integer sums of bipolar constituents, so bundling
// is order-independent and safe to partition across threads.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hdc/random.hpp"

namespace hdc {

inline constexpr std::size_t kDefaultDim = 10000;

enum class Form : std::uint8_t { kBipolar = 0, kAccumulator = 1 };

class Hypervector {
 public:
  Hypervector() = default;

  // Throws kFormMismatch if any entry is not -1/+1, kInvalidDimension if empty.
  static Hypervector bipolar(std::vector<std::int32_t> values);
  static Hypervector accumulator(std::vector<std::int32_t> values);
  // All-zero accumulator of the given dimension.
  static Hypervector zeros(std::size_t dim);

  std::size_t dim() const noexcept { return values_.size(); }
  Form form() const noexcept { return form_; }
  bool is_bipolar() const noexcept { return form_ == Form::kBipolar; }

  std::span<const std::int32_t> values() const noexcept { return values_; }
  std::int32_t operator[](std::size_t i) const { return values_[i]; }

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  // Seed of the generator that produced this vector, when it was drawn randomly.
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }

  // In-place accumulation; the result is always accumulator form.
  void add(const Hypervector& x);
  void subtract(const Hypervector& x);
  // this += a * b (componentwise).
  void add_product(const Hypervector& a, const Hypervector& b);
  void scale(std::int32_t factor);

  bool is_zero() const noexcept;

  // Value equality: form and components. Names and seeds are metadata.
  friend bool operator==(const Hypervector& a, const Hypervector& b) {
    return a.form_ == b.form_ && a.values_ == b.values_;
  }

 private:
  Hypervector(std::vector<std::int32_t> values, Form form)
      : values_(std::move(values)), form_(form) {}

  std::vector<std::int32_t> values_;
  Form form_ = Form::kBipolar;
  std::string name_;
  std::optional<std::uint64_t> seed_;
};

// Each component independently -1/+1 with probability 1/2. dim >= 2.
Hypervector random_hypervector(std::size_t dim, Rng& rng);

// Componentwise product of two bipolar vectors.
Hypervector bind(const Hypervector& a, const Hypervector& b);

// Componentwise integer sum. Operands must share dimension and all be bipolar
// or all be accumulators.
Hypervector bundle(std::span<const Hypervector> vs);
Hypervector bundle(std::initializer_list<Hypervector> vs);

// The +1/-1 chosen for a zero component at `position` under `tie_seed`.
std::int32_t tie_flip(std::uint64_t tie_seed, std::size_t position) noexcept;

// Sign of each component; zeros become tie_flip(tie_seed, i). A bipolar
// input is returned unchanged.
Hypervector normalize(const Hypervector& acc, std::uint64_t tie_seed);

// Component i moves to (i + k) mod D. k may be negative.
Hypervector permute(const Hypervector& a, std::int64_t k);

Hypervector negate(const Hypervector& a);

std::int64_t dot(const Hypervector& a, const Hypervector& b);

// dot(a,b) / (|a| |b|). Throws kInvalidInput for a zero-norm operand.
double cosine_similarity(const Hypervector& a, const Hypervector& b);

// Count of disagreeing positions between bipolar vectors.
std::size_t hamming_distance(const Hypervector& a, const Hypervector& b);

// Named collection of same-dimension hypervectors with tag sets.
class Space {
 public:
  explicit Space(std::size_t dim = kDefaultDim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool contains(const std::string& name) const { return members_.count(name) != 0; }

  // Throws kDimensionMismatch or kInvalidArgument (duplicate name).
  void insert(const std::string& name, Hypervector v);
  // Draws a fresh random member.
  const Hypervector& insert_random(const std::string& name, Rng& rng);
  const Hypervector& at(const std::string& name) const;
  void remove(const std::string& name);

  void add_tag(const std::string& name, const std::string& tag);
  std::set<std::string> with_tag(const std::string& tag) const;

  std::vector<std::string> names() const;

  // Member with the highest cosine to `query`; ties resolve to the first name
  // in lexicographic order.
  std::pair<std::string, double> nearest(const Hypervector& query) const;

 private:
  std::size_t dim_;
  std::map<std::string, Hypervector> members_;
  std::map<std::string, std::set<std::string>> tags_;
};

}  // namespace hdc
