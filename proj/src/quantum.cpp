#include "hdc/quantum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <set>

#include "hdc/error.hpp"
#include "hdc/kernels.hpp"

namespace hdc {

namespace {

constexpr double kCancellationFloor = 1e-12;

void require_same_size(const PhaseState& a, const PhaseState& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "state sizes differ: " + std::to_string(a.size()) +
                                                   " vs " + std::to_string(b.size()));
  }
}

std::size_t rotation(std::int64_t k, std::size_t n) {
  const auto m = static_cast<std::int64_t>(n);
  return static_cast<std::size_t>(((k % m) + m) % m);
}

// FFTW's planner is not thread-safe.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void fft_in_place(std::vector<std::complex<double>>& data, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  const std::lock_guard<std::mutex> lock(fftw_mutex());
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

}  // namespace

double PhaseState::norm() const {
  double s = 0;
  for (const auto& a : amplitudes) s += std::norm(a);
  return std::sqrt(s);
}

std::size_t padded_dim(std::size_t dim) { return std::bit_ceil(std::max<std::size_t>(dim, 1)); }

PhaseState qencode(const Hypervector& v) {
  if (!v.is_bipolar()) throw Error(ErrorCode::kFormMismatch, "qencode needs a bipolar vector");
  PhaseState s;
  const std::size_t n = padded_dim(v.dim());
  s.n_qubits = static_cast<std::size_t>(std::countr_zero(n));
  s.original_dim = v.dim();
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  s.amplitudes.assign(n, {amp, 0.0});
  for (std::size_t i = 0; i < v.dim(); ++i) s.amplitudes[i] = {v[i] * amp, 0.0};
  s.provenance.push_back("qencode");
  if (n != v.dim()) s.provenance.push_back("pad:" + std::to_string(n - v.dim()));
  return s;
}

Hypervector qdecode(const PhaseState& state) {
  std::vector<std::int32_t> out(state.original_dim);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = state.amplitudes[i].real() < 0 ? -1 : 1;
  return Hypervector::bipolar(std::move(out));
}

PhaseState qbind(const PhaseState& state, const Hypervector& b) {
  if (!b.is_bipolar()) throw Error(ErrorCode::kFormMismatch, "qbind needs a bipolar vector");
  if (b.dim() != state.size() && b.dim() != state.original_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "oracle dimension " + std::to_string(b.dim()) + " matches neither " +
                    std::to_string(state.size()) + " nor " + std::to_string(state.original_dim));
  }
  PhaseState out = state;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    if (b[i] < 0) out.amplitudes[i] = -out.amplitudes[i];
  }
  out.provenance.push_back("qbind");
  return out;
}

BundleResult qbundle(std::span<const PhaseState> states) {
  if (states.empty()) throw Error(ErrorCode::kEmptyInput, "qbundle of no states");
  for (const auto& s : states) require_same_size(s, states.front());
  BundleResult r;
  r.state.n_qubits = states.front().n_qubits;
  r.state.original_dim = states.front().original_dim;
  r.state.amplitudes.assign(states.front().size(), {0.0, 0.0});
  for (const auto& s : states) {
    for (std::size_t i = 0; i < s.size(); ++i) r.state.amplitudes[i] += s.amplitudes[i];
  }
  const double m = static_cast<double>(states.size());
  for (auto& a : r.state.amplitudes) a /= m;
  const double norm = r.state.norm();
  if (norm < kCancellationFloor) {
    throw Error(ErrorCode::kDestructiveCancellation,
                "bundled states cancel (norm " + std::to_string(norm) + ")");
  }
  for (auto& a : r.state.amplitudes) a /= norm;
  r.success_probability = norm * norm;
  r.state.provenance = {"qbundle:" + std::to_string(states.size())};
  return r;
}

PhaseState qpermute(const PhaseState& state, std::int64_t k) {
  PhaseState out = state;
  const std::size_t n = state.size();
  const std::size_t shift = rotation(k, n);
  for (std::size_t i = 0; i < n; ++i) out.amplitudes[(i + shift) % n] = state.amplitudes[i];
  out.provenance.push_back("qpermute:" + std::to_string(k));
  return out;
}

PhaseState qpermute_spectral(const PhaseState& state, std::int64_t k) {
  PhaseState out = state;
  const std::size_t n = state.size();
  const std::size_t shift = rotation(k, n);
  // FFTW_BACKWARD carries the +i exponent of the QFT.
  fft_in_place(out.amplitudes, FFTW_BACKWARD);
  for (std::size_t j = 0; j < n; ++j) {
    // Reduce k*j mod n first to keep the angle small and exact.
    const double turn = static_cast<double>((shift * j) % n) / static_cast<double>(n);
    out.amplitudes[j] *= std::polar(1.0, 2.0 * std::numbers::pi * turn);
  }
  fft_in_place(out.amplitudes, FFTW_FORWARD);
  for (auto& a : out.amplitudes) a /= static_cast<double>(n);
  out.provenance.push_back("qpermute:" + std::to_string(k));
  return out;
}

double qsimilarity(const PhaseState& a, const PhaseState& b) {
  require_same_size(a, b);
  // Re<a|b> = sum re(a) re(b) + im(a) im(b); amplitudes are interleaved pairs.
  const auto* pa = reinterpret_cast<const double*>(a.amplitudes.data());
  const auto* pb = reinterpret_cast<const double*>(b.amplitudes.data());
  return kernels::active().dot_f64(pa, pb, 2 * a.size());
}

double qsimilarity_sampled(const PhaseState& a, const PhaseState& b, std::size_t shots, Rng& rng) {
  if (shots < 1) throw Error(ErrorCode::kInvalidArgument, "sampled similarity needs shots >= 1");
  const double s = std::clamp(qsimilarity(a, b), -1.0, 1.0);
  const double p0 = (1.0 + s) / 2.0;
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < shots; ++i) zeros += rng.uniform() < p0 ? 1U : 0U;
  return 2.0 * static_cast<double>(zeros) / static_cast<double>(shots) - 1.0;
}

QuantumClassificationModel QuantumClassificationModel::fit(const Dataset& data,
                                                           const ClassifierConfig& config,
                                                           const FeatureMask& mask) {
  if (data.kind != DatasetKind::kClassification) {
    throw Error(ErrorCode::kInvalidInput, "dataset has no class labels");
  }
  if (data.rows() == 0) throw Error(ErrorCode::kEmptyInput, "empty dataset");
  data.validate();
  const std::set<std::string> distinct(data.labels.begin(), data.labels.end());
  std::vector<std::string> classes(distinct.begin(), distinct.end());
  std::vector<std::size_t> labels;
  for (const auto& l : data.labels) {
    labels.push_back(static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), l) - classes.begin()));
  }
  FeatureEncoder encoder = FeatureEncoder::fit(data.matrix, data.feature_names, config.encoder());
  const std::vector<Hypervector> encodings = encoder.encode_rows(data.matrix, mask);
  return fit_encoded(std::move(encoder), std::move(classes), encodings, labels, config, mask);
}

QuantumClassificationModel QuantumClassificationModel::fit_encoded(
    FeatureEncoder encoder, std::vector<std::string> classes,
    std::span<const Hypervector> encodings, std::span<const std::size_t> labels,
    const ClassifierConfig& config, const FeatureMask& mask) {
  if (encodings.empty()) throw Error(ErrorCode::kEmptyInput, "no training rows");
  if (classes.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "classification needs at least two distinct labels");
  }
  if (labels.size() != encodings.size()) {
    throw Error(ErrorCode::kInvalidArgument, "label count differs from row count");
  }
  std::vector<std::vector<PhaseState>> members(classes.size());
  for (std::size_t i = 0; i < encodings.size(); ++i) {
    if (labels[i] >= classes.size()) throw Error(ErrorCode::kInvalidArgument, "label out of range");
    members[labels[i]].push_back(qencode(encodings[i]));
  }
  QuantumClassificationModel model;
  model.config_ = config;
  model.mask_ = mask;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (members[c].empty()) {
      throw Error(ErrorCode::kInvalidInput, "class '" + classes[c] + "' has no rows");
    }
    BundleResult r = qbundle(members[c]);
    model.class_states_.push_back(std::move(r.state));
    model.success_.push_back(r.success_probability);
  }
  model.encoder_ = std::move(encoder);
  model.classes_ = std::move(classes);
  return model;
}

QuantumClassificationModel QuantumClassificationModel::from_parts(
    FeatureEncoder encoder, std::vector<std::string> classes, std::vector<PhaseState> class_states,
    std::vector<double> success_probabilities, const ClassifierConfig& config, FeatureMask mask) {
  if (classes.size() < 2 || class_states.size() != classes.size() ||
      success_probabilities.size() != classes.size()) {
    throw Error(ErrorCode::kInvalidInput, "malformed quantum classification model");
  }
  QuantumClassificationModel model;
  model.encoder_ = std::move(encoder);
  model.classes_ = std::move(classes);
  model.class_states_ = std::move(class_states);
  model.success_ = std::move(success_probabilities);
  model.config_ = config;
  model.mask_ = std::move(mask);
  return model;
}

std::uint64_t QuantumClassificationModel::default_shot_seed() const {
  return derive_seed(config_.seed, streams::kShots);
}

Prediction QuantumClassificationModel::predict(std::span<const double> x, std::size_t shots) const {
  return predict(x, shots, default_shot_seed());
}

Prediction QuantumClassificationModel::predict(std::span<const double> x, std::size_t shots,
                                               std::uint64_t shot_seed) const {
  return predict_encoded(encoder_.encode(x, mask_), shots, shot_seed);
}

Prediction QuantumClassificationModel::predict_encoded(const Hypervector& h, std::size_t shots,
                                                       std::uint64_t shot_seed) const {
  if (class_states_.empty()) {
    throw Error(ErrorCode::kNotFitted, "quantum classification model is not fitted");
  }
  const PhaseState query = qencode(h);
  Rng rng(shot_seed);
  Prediction p;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < class_states_.size(); ++c) {
    const double s = shots == 0 ? qsimilarity(class_states_[c], query)
                                : qsimilarity_sampled(class_states_[c], query, shots, rng);
    p.similarities.push_back(s);
    if (s > best) {
      best = s;
      p.class_index = c;
    }
  }
  p.label = classes_[p.class_index];
  return p;
}

}  // namespace hdc
