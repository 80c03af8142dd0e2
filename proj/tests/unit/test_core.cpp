#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdc/core.hpp"
#include "hdc/error.hpp"

using namespace hdc;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an hdc::Error");
  return ErrorCode::kInvalidArgument;
}

Hypervector hv(std::vector<std::int32_t> v) { return Hypervector::bipolar(std::move(v)); }

}  // namespace

TEST_CASE("bipolar factory validates components") {
  CHECK(code_of([] { hv({1, 0, -1}); }) == ErrorCode::kFormMismatch);
  CHECK(code_of([] { hv({}); }) == ErrorCode::kInvalidDimension);
  CHECK(hv({1, -1}).is_bipolar());
  CHECK(Hypervector::zeros(4).form() == Form::kAccumulator);
}

TEST_CASE("random hypervectors are reproducible and balanced") {
  Rng r1(5), r2(5);
  const Hypervector a = random_hypervector(kDefaultDim, r1);
  CHECK(a == random_hypervector(kDefaultDim, r2));
  const auto plus = std::count(a.values().begin(), a.values().end(), 1);
  CHECK(std::abs(plus - 5000) < 300);
  Rng r3(5);
  CHECK(code_of([&] { random_hypervector(1, r3); }) == ErrorCode::kInvalidDimension);
}

TEST_CASE("bind is componentwise product and self-inverse") {
  const Hypervector a = hv({1, -1, 1, -1});
  const Hypervector b = hv({1, 1, -1, -1});
  CHECK(bind(a, b) == hv({1, -1, -1, 1}));
  CHECK(bind(bind(a, b), b) == a);
  CHECK(code_of([&] { bind(a, hv({1, 1})); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([&] { bind(a, bundle({a, b})); }) == ErrorCode::kFormMismatch);
}

TEST_CASE("bundle sums exactly and rejects bad input") {
  const Hypervector a = hv({1, -1, 1, -1});
  const Hypervector b = hv({1, 1, -1, -1});
  const Hypervector s = bundle({a, b, b});
  CHECK(s.form() == Form::kAccumulator);
  CHECK(std::vector<std::int32_t>(s.values().begin(), s.values().end()) ==
        std::vector<std::int32_t>{3, 1, -1, -3});
  CHECK(bundle({a, b}) == bundle({b, a}));
  CHECK(code_of([] { bundle(std::span<const Hypervector>{}); }) == ErrorCode::kEmptyInput);
  CHECK(code_of([&] { bundle({a, s}); }) == ErrorCode::kFormMismatch);
}

TEST_CASE("normalize takes signs and flips ties by seeded position rule") {
  const Hypervector acc = Hypervector::accumulator({3, -2, 0, 0, 0, 0, 0, 0});
  const Hypervector n = normalize(acc, 77);
  CHECK(n.is_bipolar());
  CHECK(n[0] == 1);
  CHECK(n[1] == -1);
  for (std::size_t i = 2; i < 8; ++i) CHECK(n[i] == tie_flip(77, i));
  CHECK(normalize(acc, 77) == n);
  // The tie rule is mix64(seed ^ mix64(i)) & 1, mapped to +1 / -1.
  for (std::size_t i = 0; i < 64; ++i) {
    const std::int32_t want = (mix64(77 ^ mix64(i)) & 1U) != 0 ? 1 : -1;
    CHECK(tie_flip(77, i) == want);
  }
  const Hypervector a = hv({1, -1, -1, 1});
  CHECK(normalize(a, 1) == a);
  CHECK(normalize(bundle({a}), 1) == a);
}

TEST_CASE("normalize is invariant under positive scaling") {
  Rng rng(9);
  Hypervector acc = bundle({random_hypervector(1000, rng), random_hypervector(1000, rng),
                            random_hypervector(1000, rng)});
  Hypervector scaled = acc;
  scaled.scale(7);
  CHECK(normalize(acc, 3) == normalize(scaled, 3));
}

TEST_CASE("permute moves component i to i + k") {
  const Hypervector a = hv({1, 1, -1, -1, 1});
  CHECK(permute(a, 1) == hv({1, 1, 1, -1, -1}));
  CHECK(permute(a, -1) == hv({1, -1, -1, 1, 1}));
  CHECK(permute(a, 5) == a);
  CHECK(permute(a, 0) == a);
  CHECK(permute(permute(a, 3), -3) == a);
  CHECK(permute(a, 7) == permute(a, 2));
}

TEST_CASE("cosine and Hamming agree on bipolar vectors") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const Hypervector a = random_hypervector(999, rng);
    const Hypervector b = random_hypervector(999, rng);
    const double h = static_cast<double>(hamming_distance(a, b));
    CHECK(cosine_similarity(a, b) == doctest::Approx(1.0 - 2.0 * h / 999.0).epsilon(1e-15));
  }
  const Hypervector a = hv({1, -1, 1, 1});
  CHECK(cosine_similarity(a, a) == 1.0);
  CHECK(cosine_similarity(a, negate(a)) == -1.0);
  CHECK(dot(a, negate(a)) == -4);
  CHECK(code_of([&] { cosine_similarity(a, Hypervector::zeros(4)); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("cosine on accumulators uses their real norms") {
  const Hypervector x = Hypervector::accumulator({3, 4, 0});
  const Hypervector y = Hypervector::accumulator({3, 4, 0});
  CHECK(cosine_similarity(x, y) == doctest::Approx(1.0));
  const Hypervector z = Hypervector::accumulator({4, -3, 0});
  CHECK(cosine_similarity(x, z) == doctest::Approx(0.0));
}

TEST_CASE("bind preserves similarity and permute is an isometry") {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const Hypervector a = random_hypervector(2048, rng);
    const Hypervector b = random_hypervector(2048, rng);
    const Hypervector k = random_hypervector(2048, rng);
    CHECK(dot(bind(a, k), bind(b, k)) == dot(a, b));
    CHECK(dot(permute(a, i), permute(b, i)) == dot(a, b));
    CHECK(hamming_distance(permute(a, -i), permute(b, -i)) == hamming_distance(a, b));
  }
}

TEST_CASE("bundle of bound pairs retrieves its members") {
  Rng rng(13);
  const Hypervector k1 = random_hypervector(kDefaultDim, rng);
  const Hypervector v1 = random_hypervector(kDefaultDim, rng);
  const Hypervector k2 = random_hypervector(kDefaultDim, rng);
  const Hypervector v2 = random_hypervector(kDefaultDim, rng);
  const Hypervector record = normalize(bundle({bind(k1, v1), bind(k2, v2)}), 1);
  CHECK(cosine_similarity(bind(record, k1), v1) > 0.4);
  CHECK(std::abs(cosine_similarity(bind(record, k1), v2)) < 0.06);
}

TEST_CASE("space stores, tags, and searches members") {
  Space space(256);
  Rng rng(14);
  const Hypervector& a = space.insert_random("a", rng);
  space.insert_random("b", rng);
  CHECK(space.size() == 2);
  CHECK(code_of([&] { space.insert("a", random_hypervector(256, rng)); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { space.insert("c", random_hypervector(128, rng)); }) ==
        ErrorCode::kDimensionMismatch);
  space.add_tag("a", "fruit");
  CHECK(space.with_tag("fruit") == std::set<std::string>{"a"});
  const auto [name, sim] = space.nearest(a);
  CHECK(name == "a");
  CHECK(sim == 1.0);
  space.insert("a2", space.at("a"));
  CHECK(space.nearest(space.at("a")).first == "a");  // lexicographic tie-break
  space.remove("b");
  CHECK_FALSE(space.contains("b"));
  CHECK(space.names() == std::vector<std::string>{"a", "a2"});
}

TEST_CASE("error codes have stable identifiers") {
  CHECK(to_string(ErrorCode::kChecksum) == "checksum");
  CHECK(to_string(ErrorCode::kUnknownNode) == "unknown_node");
  CHECK(to_string(ErrorCode::kUnsupportedVersion) == "unsupported_version");
}

TEST_CASE("small worked examples") {
  const Hypervector s = bundle({hv({1, -1}), hv({1, 1})});
  CHECK(std::vector<std::int32_t>(s.values().begin(), s.values().end()) == std::vector<std::int32_t>{2, 0});
  const Hypervector n = normalize(Hypervector::accumulator({2, 0, -3}), 5);
  CHECK(n == hv({1, tie_flip(5, 1), -1}));
  CHECK(permute(hv({1, -1, 1}), 1) == hv({1, 1, -1}));
  CHECK(cosine_similarity(hv({1, 1, -1, -1}), hv({1, -1, 1, -1})) == 0.0);
  const Hypervector a = hv({1, -1, 1, 1});
  CHECK(bind(a, a) == hv({1, 1, 1, 1}));
  CHECK(hamming_distance(a, a) == 0);
  CHECK(hamming_distance(a, negate(a)) == 4);
}

TEST_CASE("majority of three keeps the agreeing components") {
  Rng rng(13);
  const Hypervector a = random_hypervector(1000, rng);
  const Hypervector b = random_hypervector(1000, rng);
  const Hypervector m = normalize(bundle({a, a, b}), 0);
  CHECK(m == a);
}

TEST_CASE("independent draws, bindings, and rotations are quasi-orthogonal") {
  Rng rng(14);
  double sum = 0, sq = 0, worst = 0;
  const int pairs = 1000;
  for (int i = 0; i < pairs; ++i) {
    const Hypervector a = random_hypervector(kDefaultDim, rng);
    const Hypervector b = random_hypervector(kDefaultDim, rng);
    const double c = cosine_similarity(a, b);
    sum += c;
    sq += c * c;
    worst = std::max(worst, std::abs(c));
    if (i < 20) {
      CHECK(cosine_similarity(bind(a, b), a) < 0.05);
      CHECK(std::abs(cosine_similarity(permute(a, 1), a)) < 0.05);
    }
  }
  const double mean = sum / pairs;
  const double sd = std::sqrt((sq - pairs * mean * mean) / (pairs - 1));
  CHECK(worst < 0.06);
  CHECK(sd >= 0.008);
  CHECK(sd <= 0.012);
}

TEST_CASE("a heavily repeated member dominates a noisy bundle") {
  Rng rng(15);
  const Hypervector a = random_hypervector(kDefaultDim, rng);
  Hypervector acc = Hypervector::zeros(kDefaultDim);
  for (int i = 0; i < 101; ++i) acc.add(a);
  for (int i = 0; i < 100; ++i) acc.add(random_hypervector(kDefaultDim, rng));
  CHECK(cosine_similarity(normalize(acc, 1), a) > 0.3);
}

TEST_CASE("bundle grouping and order do not matter") {
  Rng rng(16);
  std::vector<Hypervector> vs;
  for (int i = 0; i < 5; ++i) vs.push_back(random_hypervector(500, rng));
  const Hypervector whole = bundle(vs);
  std::vector<Hypervector> reversed(vs.rbegin(), vs.rend());
  CHECK(bundle(reversed) == whole);
  Hypervector grouped = bundle({vs[0], vs[1]});
  grouped.add(bundle({vs[2], vs[3], vs[4]}));
  CHECK(grouped == whole);
  CHECK(normalize(bundle({vs[0]}), 0) == vs[0]);
}
