#pragma once

// Multi-model hyperdimensional regression.
//
// Inputs are lifted with random Fourier features, h_i = cos(<b_i, x> + c_i),
// with b_i ~ N(0, I) and c_i ~ U[0, 2pi). The model keeps k (cluster,
// regressor) pairs of real D-vectors. A prediction softmaxes the cosine of h
// to every cluster vector into confidences alpha and returns
// sum_j alpha_j <h, M_j> / D. Training moves every regressor by
// lr * e * alpha_j * h and pulls only the most similar cluster vector toward h.
//
// A binarized copy (signs plus regressor norms) supports Hamming-based
// inference on bit-packed vectors.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdc/encoding.hpp"

namespace hdc {

inline constexpr double kClusterRefineRate = 0.1;

struct RegressionConfig {
  std::size_t dim = 4096;
  std::size_t k = 8;
  double learning_rate = 0.2;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  bool quantized_prediction = false;
};

// Signs of a real vector packed 64 per word; bit set means negative.
class SignBits {
 public:
  SignBits() = default;
  explicit SignBits(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::uint64_t>& words() const noexcept { return words_; }
  // +1 / -1 at position i.
  int sign(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U ? -1 : 1; }

  std::size_t hamming(const SignBits& other) const;
  // 1 - 2 * hamming / D.
  double similarity(const SignBits& other) const;

  friend bool operator==(const SignBits&, const SignBits&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t dim_ = 0;
};

class RegressionEncoder {
 public:
  static RegressionEncoder create(std::size_t dim, std::size_t input_dim, std::uint64_t seed);
  static RegressionEncoder from_parts(std::size_t dim, std::size_t input_dim,
                                      std::vector<double> bases, std::vector<double> biases,
                                      std::uint64_t seed);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  // Row-major dim x input_dim.
  const std::vector<double>& bases() const noexcept { return bases_; }
  const std::vector<double>& biases() const noexcept { return biases_; }
  std::uint64_t seed() const noexcept { return seed_; }

  // Throws kInvalidInput on length mismatch or non-finite input.
  std::vector<double> encode(std::span<const double> x) const;

 private:
  std::size_t dim_ = 0;
  std::size_t input_dim_ = 0;
  std::vector<double> bases_;
  std::vector<double> biases_;
  std::uint64_t seed_ = 0;
};

struct TargetScaling {
  double mean = 0.0;
  double scale = 1.0;
};

// One regressor update: regressor += lr * error * alpha * h.
void regressor_step(std::span<double> regressor, std::span<const double> h, double error,
                    double alpha, double learning_rate);

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> scores);

double real_cosine(std::span<const double> a, std::span<const double> b);

class RegressionModel {
 public:
  // Throws kInvalidArgument for k == 0, k > rows, or a negative learning
  // rate, and kInvalidInput for non-finite targets. A zero learning rate
  // yields the mean predictor.
  static RegressionModel fit(const Matrix& x, std::span<const double> y,
                             const RegressionConfig& config);

  static RegressionModel from_parts(RegressionEncoder encoder,
                                    std::vector<std::vector<double>> clusters,
                                    std::vector<std::vector<double>> regressors,
                                    TargetScaling scaling, const RegressionConfig& config,
                                    bool binarized);

  // Uses config().quantized_prediction.
  double predict(std::span<const double> x) const;
  double predict_encoded(std::span<const double> h, bool quantized) const;
  // Softmax confidences over the k models.
  std::vector<double> confidences(std::span<const double> h, bool quantized) const;

  // Stores sign copies of every cluster and regressor plus regressor norms.
  void binarize();
  bool has_binarized() const noexcept { return !binary_clusters_.empty(); }
  void set_quantized_prediction(bool on) { config_.quantized_prediction = on; }

  const RegressionEncoder& encoder() const noexcept { return encoder_; }
  const std::vector<std::vector<double>>& clusters() const noexcept { return clusters_; }
  const std::vector<std::vector<double>>& regressors() const noexcept { return regressors_; }
  const std::vector<SignBits>& binary_clusters() const noexcept { return binary_clusters_; }
  const std::vector<SignBits>& binary_regressors() const noexcept { return binary_regressors_; }
  const std::vector<double>& regressor_norms() const noexcept { return regressor_norms_; }
  const TargetScaling& scaling() const noexcept { return scaling_; }
  const RegressionConfig& config() const noexcept { return config_; }

 private:
  RegressionModel() = default;
  double predict_scaled(std::span<const double> h, bool quantized) const;
  std::vector<double> scores(std::span<const double> h, bool quantized) const;

  RegressionEncoder encoder_;
  std::vector<std::vector<double>> clusters_;
  std::vector<std::vector<double>> regressors_;
  std::vector<SignBits> binary_clusters_;
  std::vector<SignBits> binary_regressors_;
  std::vector<double> regressor_norms_;
  TargetScaling scaling_;
  RegressionConfig config_;
};

}  // namespace hdc
