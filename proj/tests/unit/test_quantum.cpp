#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>

#include "../support/synthetic.hpp"
#include "doctest.h"
#include "hdc/classification.hpp"
#include "hdc/error.hpp"
#include "hdc/quantum.hpp"

using namespace hdc;
using namespace hdc::testing;

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

double max_diff(const PhaseState& a, const PhaseState& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.amplitudes[i] - b.amplitudes[i]));
  return worst;
}

// Naive O(N^2) DFT-based rotation, independent of the library's FFT path.
std::vector<std::complex<double>> dft_shift(const std::vector<std::complex<double>>& x, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(x.size());
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::complex<double>> freq(x.size()), out(x.size());
  for (std::int64_t f = 0; f < n; ++f) {
    for (std::int64_t j = 0; j < n; ++j) {
      freq[f] += x[j] * std::polar(1.0, -two_pi * static_cast<double>(f * j % n) / static_cast<double>(n));
    }
    freq[f] *= std::polar(1.0, -two_pi * static_cast<double>(((k % n + n) % n) * f % n) / static_cast<double>(n));
  }
  for (std::int64_t j = 0; j < n; ++j) {
    for (std::int64_t f = 0; f < n; ++f) {
      out[j] += freq[f] * std::polar(1.0, two_pi * static_cast<double>(f * j % n) / static_cast<double>(n));
    }
    out[j] /= static_cast<double>(n);
  }
  return out;
}

PhaseState random_state(std::size_t n, Rng& rng) {
  PhaseState s;
  s.n_qubits = static_cast<std::size_t>(std::countr_zero(n));
  s.original_dim = n;
  double norm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.amplitudes.emplace_back(rng.normal(), rng.normal());
    norm += std::norm(s.amplitudes.back());
  }
  for (auto& a : s.amplitudes) a /= std::sqrt(norm);
  return s;
}

}  // namespace

TEST_CASE("qencode maps signs to phases of a uniform superposition") {
  const PhaseState ones = qencode(Hypervector::bipolar({1, 1, 1, 1}));
  CHECK(ones.n_qubits == 2);
  for (const auto& a : ones.amplitudes) CHECK(a == std::complex<double>(0.5, 0.0));

  const PhaseState alt = qencode(Hypervector::bipolar({1, -1, 1, -1}));
  CHECK(alt.amplitudes[0].real() == 0.5);
  CHECK(alt.amplitudes[1].real() == -0.5);
  CHECK(alt.amplitudes[3].real() == -0.5);

  Rng rng(1);
  const PhaseState s = qencode(random_hypervector(1024, rng));
  CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  for (const auto& a : s.amplitudes) CHECK(std::abs(std::abs(a) - 1.0 / 32.0) < 1e-15);
}

TEST_CASE("non-power-of-two vectors are padded and stripped on decode") {
  CHECK(padded_dim(1) == 1);
  CHECK(padded_dim(5) == 8);
  CHECK(padded_dim(1024) == 1024);
  CHECK(padded_dim(1025) == 2048);

  Rng rng(2);
  const Hypervector v = random_hypervector(1000, rng);
  const PhaseState s = qencode(v);
  CHECK(s.size() == 1024);
  CHECK(s.n_qubits == 10);
  CHECK(s.original_dim == 1000);
  for (std::size_t i = 1000; i < 1024; ++i) CHECK(s.amplitudes[i].real() > 0);
  CHECK(qdecode(s) == v);
  CHECK(std::abs(s.norm() - 1.0) < 1e-12);
}

TEST_CASE("qencode rejects accumulators") {
  CHECK(code_of([] { qencode(Hypervector::accumulator({2, 0, -1, 1})); }) == ErrorCode::kFormMismatch);
}

TEST_CASE("binding commutes with phase encoding and is an involution") {
  Rng rng(3);
  const Hypervector a = random_hypervector(1024, rng);
  const Hypervector b = random_hypervector(1024, rng);
  const PhaseState pa = qencode(a);
  CHECK(max_diff(qbind(pa, b), qencode(bind(a, b))) < 1e-12);
  CHECK(max_diff(qbind(qbind(pa, b), b), pa) < 1e-12);
  CHECK(max_diff(qbind(pa, Hypervector::bipolar(std::vector<std::int32_t>(1024, 1))), pa) == 0.0);
  CHECK(std::abs(qbind(pa, b).norm() - 1.0) < 1e-12);
  CHECK(qbind(pa, b).provenance.size() > pa.provenance.size());

  CHECK(code_of([&] { qbind(pa, random_hypervector(512, rng)); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("binding a padded state accepts the original or padded dimension") {
  Rng rng(4);
  const Hypervector a = random_hypervector(100, rng);
  const Hypervector b = random_hypervector(100, rng);
  const PhaseState bound = qbind(qencode(a), b);
  CHECK(qdecode(bound) == bind(a, b));
  std::vector<std::int32_t> padded(b.values().begin(), b.values().end());
  padded.resize(128, 1);
  CHECK(max_diff(qbind(qencode(a), Hypervector::bipolar(padded)), bound) == 0.0);
}

TEST_CASE("permutation commutes with phase encoding") {
  Rng rng(5);
  const Hypervector a = random_hypervector(1024, rng);
  const PhaseState pa = qencode(a);
  for (std::int64_t k : {0, 1, 7, -3, 1023, 1024, 5000}) {
    CAPTURE(k);
    CHECK(max_diff(qpermute(pa, k), qencode(permute(a, k))) < 1e-12);
    CHECK(std::abs(qpermute(pa, k).norm() - 1.0) < 1e-12);
  }
  CHECK(max_diff(qpermute(pa, 0), pa) == 0.0);
  CHECK(max_diff(qpermute(pa, 1024), pa) == 0.0);
}

TEST_CASE("spectral permutation matches index rotation for every shift up to 256") {
  Rng rng(6);
  for (std::size_t n = 1; n <= 256; n *= 2) {
    const PhaseState s = random_state(n, rng);
    double worst = 0;
    for (std::size_t k = 0; k < n; ++k) {
      worst = std::max(worst, max_diff(qpermute(s, static_cast<std::int64_t>(k)),
                                       qpermute_spectral(s, static_cast<std::int64_t>(k))));
    }
    CAPTURE(n);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("spectral permutation agrees with a naive DFT construction") {
  Rng rng(7);
  const PhaseState s = random_state(32, rng);
  for (std::int64_t k : {1, 5, -2, 31}) {
    const auto ref = dft_shift(s.amplitudes, k);
    const PhaseState got = qpermute_spectral(s, k);
    double worst = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(ref[i] - got.amplitudes[i]));
    CAPTURE(k);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("exact similarity equals cosine similarity") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Hypervector a = random_hypervector(1024, rng);
    const Hypervector b = random_hypervector(1024, rng);
    CHECK(std::abs(qsimilarity(qencode(a), qencode(b)) - cosine_similarity(a, b)) < 1e-12);
  }
  const PhaseState s = qencode(random_hypervector(256, rng));
  CHECK(qsimilarity(s, s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(code_of([&] { qsimilarity(s, qencode(random_hypervector(512, rng))); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("bundling identical states returns that state with certainty") {
  Rng rng(9);
  const PhaseState s = qencode(random_hypervector(256, rng));
  const std::vector<PhaseState> copies(4, s);
  const BundleResult r = qbundle(copies);
  CHECK(max_diff(r.state, s) < 1e-12);
  CHECK(r.success_probability == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bundle success probability is the squared norm of the raw average") {
  Rng rng(10);
  std::vector<PhaseState> states;
  for (int i = 0; i < 3; ++i) states.push_back(qencode(random_hypervector(512, rng)));
  // Oracle: average and norm computed directly.
  double norm2 = 0;
  for (std::size_t j = 0; j < 512; ++j) {
    std::complex<double> sum = 0;
    for (const auto& s : states) sum += s.amplitudes[j];
    norm2 += std::norm(sum / 3.0);
  }
  const BundleResult r = qbundle(states);
  CHECK(r.success_probability == doctest::Approx(norm2).epsilon(1e-12));
  CHECK(std::abs(r.state.norm() - 1.0) < 1e-12);
}

TEST_CASE("quantum bundle approximates the classical majority") {
  Rng rng(11);
  std::vector<Hypervector> vs;
  std::vector<PhaseState> states;
  for (int i = 0; i < 5; ++i) {
    vs.push_back(random_hypervector(1024, rng));
    states.push_back(qencode(vs.back()));
  }
  const Hypervector majority = normalize(bundle(vs), 0);
  CHECK(qsimilarity(qbundle(states).state, qencode(majority)) > 0.7);
}

TEST_CASE("bundle errors") {
  Rng rng(12);
  const Hypervector a = random_hypervector(256, rng);
  const std::vector<PhaseState> opposite{qencode(a), qencode(negate(a))};
  CHECK(code_of([&] { qbundle(opposite); }) == ErrorCode::kDestructiveCancellation);
  CHECK(code_of([] { qbundle({}); }) == ErrorCode::kEmptyInput);
  const std::vector<PhaseState> mixed{qencode(a), qencode(random_hypervector(512, rng))};
  CHECK(code_of([&] { qbundle(mixed); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("sampled similarity concentrates at the binomial rate") {
  Rng rng(13);
  const PhaseState a = qencode(random_hypervector(1024, rng));
  const PhaseState b = qencode(random_hypervector(1024, rng));
  const double exact = qsimilarity(a, b);
  double prev_rms = 0;
  for (std::size_t shots : {100, 10000}) {
    std::size_t within = 0;
    double sq = 0, mean = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      Rng trial(1000 + t + shots);
      const double est = qsimilarity_sampled(a, b, shots, trial);
      CHECK(est >= -1.0);
      CHECK(est <= 1.0);
      within += std::abs(est - exact) < 4.0 / std::sqrt(static_cast<double>(shots)) ? 1U : 0U;
      sq += (est - exact) * (est - exact);
      mean += est / 100.0;
    }
    const double rms = std::sqrt(sq / 100.0);
    CAPTURE(shots);
    CHECK(within >= 95);
    // Binomial standard error: sqrt(1 - s^2) / sqrt(shots).
    const double se = std::sqrt((1.0 - exact * exact) / static_cast<double>(shots));
    CHECK(rms < 1.5 * se);
    CHECK(std::abs(mean - exact) < 4.0 * se / std::sqrt(100.0) + 1e-12);
    if (prev_rms > 0) CHECK(rms < prev_rms);
    prev_rms = rms;
  }
}

TEST_CASE("sampled similarity is deterministic in its generator and validates shots") {
  Rng rng(14);
  const PhaseState a = qencode(random_hypervector(256, rng));
  const PhaseState b = qencode(random_hypervector(256, rng));
  Rng r1(5), r2(5);
  CHECK(qsimilarity_sampled(a, b, 500, r1) == qsimilarity_sampled(a, b, 500, r2));
  Rng r3(6);
  CHECK(qsimilarity_sampled(a, a, 50, r3) == 1.0);
  CHECK(code_of([&] { qsimilarity_sampled(a, b, 0, r3); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("one row per class predicts its own label with similarity one") {
  Dataset d;
  d.kind = DatasetKind::kClassification;
  d.feature_names = feature_names(3);
  d.matrix = {{0.0, 1.0, 2.0}, {2.0, 0.0, 1.0}, {1.0, 2.0, 0.0}};
  d.labels = {"a", "b", "c"};
  d.sample_ids = {"s0", "s1", "s2"};
  ClassifierConfig cfg;
  cfg.dim = 1024;
  cfg.seed = 3;
  const auto m = QuantumClassificationModel::fit(d, cfg);
  for (std::size_t i = 0; i < 3; ++i) {
    const Prediction p = m.predict(d.matrix[i]);
    CHECK(p.label == d.labels[i]);
    CHECK(p.similarities[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.success_probabilities()[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("quantum classifier agrees with the classical one and with its sampled mode") {
  const Dataset blobs = two_blobs(200, 10, 4.0, 21);
  const auto [train_idx, test_idx] = split_rows(blobs.rows(), 0.3, 22);
  const Dataset train = blobs.select(train_idx);
  const Dataset test = blobs.select(test_idx);
  ClassifierConfig cfg;
  cfg.dim = 8192;
  cfg.seed = 23;
  const auto classical = ClassificationModel::fit(train, cfg);
  const auto quantum = QuantumClassificationModel::fit(train, cfg);

  for (const auto& s : quantum.class_states()) CHECK(std::abs(s.norm() - 1.0) < 1e-12);
  for (double p : quantum.success_probabilities()) {
    CHECK(p > 0.0);
    CHECK(p <= 1.0 + 1e-12);
  }

  std::size_t with_classical = 0, with_sampled = 0;
  for (std::size_t i = 0; i < test.rows(); ++i) {
    const Prediction exact = quantum.predict(test.matrix[i]);
    with_classical += exact.label == classical.predict(test.matrix[i]).label ? 1U : 0U;
    with_sampled += exact.label == quantum.predict(test.matrix[i], 10000).label ? 1U : 0U;
  }
  const double n = static_cast<double>(test.rows());
  CHECK(static_cast<double>(with_classical) / n >= 0.98);
  CHECK(static_cast<double>(with_sampled) / n >= 0.98);
}

TEST_CASE("sampled prediction is reproducible from its shot seed") {
  const Dataset blobs = two_blobs(40, 4, 2.0, 31);
  ClassifierConfig cfg;
  cfg.dim = 1024;
  cfg.seed = 32;
  const auto m = QuantumClassificationModel::fit(blobs, cfg);
  const auto& row = blobs.matrix[0];
  CHECK(m.predict(row, 200).similarities == m.predict(row, 200, m.default_shot_seed()).similarities);
  CHECK(m.predict(row, 200, 7).similarities == m.predict(row, 200, 7).similarities);
}

TEST_CASE("quantum classifier errors") {
  const Dataset one_class = [] {
    Dataset d = two_blobs(10, 3, 1.0, 41);
    std::fill(d.labels.begin(), d.labels.end(), "x");
    return d;
  }();
  ClassifierConfig cfg;
  cfg.dim = 256;
  CHECK(code_of([&] { QuantumClassificationModel::fit(one_class, cfg); }) == ErrorCode::kInvalidInput);

  // Two rows of one class with opposite encodings cancel exactly.
  Rng rng(42);
  const Hypervector h = random_hypervector(256, rng);
  const std::vector<Hypervector> enc{h, negate(h), random_hypervector(256, rng)};
  const std::vector<std::size_t> labels{0, 0, 1};
  const Dataset small = two_blobs(4, 2, 1.0, 43);
  const auto encoder = FeatureEncoder::fit(small.matrix, small.feature_names, cfg.encoder());
  CHECK(code_of([&] {
          QuantumClassificationModel::fit_encoded(encoder, {"a", "b"}, enc, labels, cfg);
        }) == ErrorCode::kDestructiveCancellation);
}
