#pragma once

// Statevector emulation of quantum HDC.
//
// A bipolar vector v of dimension D = 2^n becomes the uniform superposition
// with amplitude v_j / sqrt(D) on basis state j. Binding is a diagonal +-1
// phase oracle, bundling averages states and renormalizes (reporting the
// post-selection probability), permutation rotates basis indices, and
// similarity is Re<psi|phi>, either exact or estimated from Hadamard-test
// outcomes.
//
// Dimensions that are not a power of two are padded with +1 components.
// Padding is recorded and stripped by qdecode. Padded components take part in
// every inner product, so similarities are exact only at power-of-two D.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdc/classification.hpp"
#include "hdc/core.hpp"
#include "hdc/random.hpp"

namespace hdc {

struct PhaseState {
  std::size_t n_qubits = 0;
  std::vector<std::complex<double>> amplitudes;
  // Dimension before padding.
  std::size_t original_dim = 0;
  // Operations applied, oldest first.
  std::vector<std::string> provenance;

  std::size_t size() const noexcept { return amplitudes.size(); }
  double norm() const;
};

// Smallest power of two >= dim.
std::size_t padded_dim(std::size_t dim);

// Throws kFormMismatch for an accumulator.
PhaseState qencode(const Hypervector& v);
// Sign of the real part of each unpadded amplitude (+1 on zero).
Hypervector qdecode(const PhaseState& state);

// `b` may have the padded or the original dimension; missing components are +1.
PhaseState qbind(const PhaseState& state, const Hypervector& b);

struct BundleResult {
  PhaseState state;
  double success_probability = 0.0;
};

// Throws kEmptyInput, kDimensionMismatch, or kDestructiveCancellation when
// the average has norm below 1e-12.
BundleResult qbundle(std::span<const PhaseState> states);

// Amplitude at basis index i moves to (i + k) mod 2^n.
PhaseState qpermute(const PhaseState& state, std::int64_t k);
// Same rotation through the Fourier basis: QFT, phase e^{2 pi i k j / N} on
// frequency j, inverse QFT.
PhaseState qpermute_spectral(const PhaseState& state, std::int64_t k);

// Re<a|b>. Throws kDimensionMismatch.
double qsimilarity(const PhaseState& a, const PhaseState& b);
// Hadamard-test estimate: `shots` outcomes with P(0) = (1 + Re<a|b>) / 2,
// returning 2 * count0 / shots - 1. Throws kInvalidArgument for shots < 1.
double qsimilarity_sampled(const PhaseState& a, const PhaseState& b, std::size_t shots, Rng& rng);

class QuantumClassificationModel {
 public:
  // Rows are encoded as in ClassificationModel and phase-encoded; each class
  // state is the quantum bundle of its rows. Throws as ClassificationModel::fit
  // plus kDestructiveCancellation.
  static QuantumClassificationModel fit(const Dataset& data, const ClassifierConfig& config,
                                        const FeatureMask& mask = {});
  static QuantumClassificationModel fit_encoded(FeatureEncoder encoder,
                                                std::vector<std::string> classes,
                                                std::span<const Hypervector> encodings,
                                                std::span<const std::size_t> labels,
                                                const ClassifierConfig& config,
                                                const FeatureMask& mask = {});
  static QuantumClassificationModel from_parts(FeatureEncoder encoder,
                                               std::vector<std::string> classes,
                                               std::vector<PhaseState> class_states,
                                               std::vector<double> success_probabilities,
                                               const ClassifierConfig& config, FeatureMask mask);

  // shots == 0 selects exact similarity. Sampled predictions draw from
  // Rng(shot_seed); the default is derived from the model seed.
  Prediction predict(std::span<const double> x, std::size_t shots = 0) const;
  Prediction predict(std::span<const double> x, std::size_t shots, std::uint64_t shot_seed) const;
  Prediction predict_encoded(const Hypervector& h, std::size_t shots,
                             std::uint64_t shot_seed) const;
  std::uint64_t default_shot_seed() const;

  const FeatureEncoder& encoder() const noexcept { return encoder_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const std::vector<PhaseState>& class_states() const noexcept { return class_states_; }
  const std::vector<double>& success_probabilities() const noexcept { return success_; }
  const ClassifierConfig& config() const noexcept { return config_; }
  const FeatureMask& mask() const noexcept { return mask_; }

 private:
  QuantumClassificationModel() = default;

  FeatureEncoder encoder_;
  std::vector<std::string> classes_;
  std::vector<PhaseState> class_states_;
  std::vector<double> success_;
  ClassifierConfig config_;
  FeatureMask mask_;
};

}  // namespace hdc
