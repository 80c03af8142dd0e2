#include "hdc/regression.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hdc/clustering.hpp"
#include "hdc/error.hpp"
#include "hdc/kernels.hpp"
#include "hdc/parallel.hpp"

namespace hdc {

namespace {

constexpr std::size_t kInitSampleSize = 512;
constexpr std::size_t kInitIterations = 20;

double dot_real(std::span<const double> a, std::span<const double> b) {
  return kernels::active().dot_f64(a.data(), b.data(), a.size());
}

double norm_real(std::span<const double> a) { return std::sqrt(dot_real(a, a)); }

}  // namespace

SignBits::SignBits(std::span<const double> values)
    : words_((values.size() + 63) / 64, 0), dim_(values.size()) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

std::size_t SignBits::hamming(const SignBits& other) const {
  if (dim_ != other.dim_) throw Error(ErrorCode::kDimensionMismatch, "sign vector dimensions");
  return kernels::active().xor_popcount_u64(words_.data(), other.words_.data(), words_.size());
}

double SignBits::similarity(const SignBits& other) const {
  return 1.0 - 2.0 * static_cast<double>(hamming(other)) / static_cast<double>(dim_);
}

RegressionEncoder RegressionEncoder::create(std::size_t dim, std::size_t input_dim,
                                            std::uint64_t seed) {
  if (dim < 2) throw Error(ErrorCode::kInvalidDimension, "dimension must be at least 2");
  if (input_dim == 0) throw Error(ErrorCode::kInvalidArgument, "input dimension must be positive");
  Rng rng(derive_seed(seed, streams::kRegressionBases));
  std::vector<double> bases(dim * input_dim);
  for (auto& b : bases) b = rng.normal();
  std::vector<double> biases(dim);
  for (auto& b : biases) b = 2.0 * std::numbers::pi * rng.uniform();
  return from_parts(dim, input_dim, std::move(bases), std::move(biases), seed);
}

RegressionEncoder RegressionEncoder::from_parts(std::size_t dim, std::size_t input_dim,
                                                std::vector<double> bases,
                                                std::vector<double> biases, std::uint64_t seed) {
  if (bases.size() != dim * input_dim || biases.size() != dim) {
    throw Error(ErrorCode::kInvalidInput, "regression encoder shape mismatch");
  }
  RegressionEncoder enc;
  enc.dim_ = dim;
  enc.input_dim_ = input_dim;
  enc.bases_ = std::move(bases);
  enc.biases_ = std::move(biases);
  enc.seed_ = seed;
  return enc;
}

std::vector<double> RegressionEncoder::encode(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw Error(ErrorCode::kInvalidInput, "input has " + std::to_string(x.size()) +
                                              " features, encoder expects " +
                                              std::to_string(input_dim_));
  }
  for (const double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidInput, "non-finite input value");
  }
  std::vector<double> h(dim_);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < dim_; ++i) {
    h[i] = std::cos(k.dot_f64(bases_.data() + i * input_dim_, x.data(), input_dim_) + biases_[i]);
  }
  return h;
}

void regressor_step(std::span<double> regressor, std::span<const double> h, double error,
                    double alpha, double learning_rate) {
  kernels::active().axpy_f64(learning_rate * error * alpha, h.data(), regressor.data(), h.size());
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  const double top = *std::max_element(out.begin(), out.end());
  double total = 0;
  for (auto& v : out) {
    v = std::exp(v - top);
    total += v;
  }
  for (auto& v : out) v /= total;
  return out;
}

double real_cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm_real(a);
  const double nb = norm_real(b);
  if (na == 0 || nb == 0) return 0.0;
  return dot_real(a, b) / (na * nb);
}

RegressionModel RegressionModel::fit(const Matrix& x, std::span<const double> y,
                                     const RegressionConfig& config) {
  if (config.k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  if (x.size() != y.size()) throw Error(ErrorCode::kInvalidInput, "row and target counts differ");
  if (x.empty()) throw Error(ErrorCode::kEmptyInput, "no training rows");
  if (config.k > x.size()) {
    throw Error(ErrorCode::kInvalidArgument, "k (" + std::to_string(config.k) +
                                                 ") exceeds row count (" +
                                                 std::to_string(x.size()) + ")");
  }
  if (!(config.learning_rate >= 0) || !std::isfinite(config.learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be non-negative");
  }
  for (const double t : y) {
    if (!std::isfinite(t)) throw Error(ErrorCode::kInvalidInput, "non-finite target");
  }

  RegressionModel model;
  model.config_ = config;
  model.encoder_ = RegressionEncoder::create(config.dim, x.front().size(), config.seed);

  const auto n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double var = 0;
  for (const double t : y) var += (t - mean) * (t - mean);
  const double sd = std::sqrt(var / n);
  model.scaling_ = {mean, sd > 0 ? sd : 1.0};
  std::vector<double> ys(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) ys[i] = (y[i] - mean) / model.scaling_.scale;

  std::vector<std::vector<double>> encoded(x.size());
  parallel_for(x.size(), [&](std::size_t i) { encoded[i] = model.encoder_.encode(x[i]); });
  std::vector<double> h_norm(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) h_norm[i] = norm_real(encoded[i]);

  // Cluster vectors start at k-means centroids of the sign-quantized
  // encodings of a seeded row sample.
  std::vector<std::size_t> sample(x.size());
  std::iota(sample.begin(), sample.end(), std::size_t{0});
  Rng sample_rng(derive_seed(config.seed, streams::kSample));
  sample_rng.shuffle(std::span<std::size_t>(sample));
  sample.resize(std::min(sample.size(), std::max(kInitSampleSize, config.k)));
  std::vector<Hypervector> signs;
  signs.reserve(sample.size());
  for (const std::size_t i : sample) {
    std::vector<std::int32_t> s(config.dim);
    for (std::size_t d = 0; d < config.dim; ++d) s[d] = encoded[i][d] < 0 ? -1 : 1;
    signs.push_back(Hypervector::bipolar(std::move(s)));
  }
  std::vector<Hypervector> centroids;
  if (config.k == 1) {
    centroids.push_back(normalize(bundle(signs), derive_seed(config.seed, streams::kTies)));
  } else {
    centroids = ClusteringModel::fit(signs, config.k, kInitIterations, config.seed).centroids();
  }
  for (const auto& c : centroids) {
    model.clusters_.emplace_back(c.values().begin(), c.values().end());
  }
  model.regressors_.assign(config.k, std::vector<double>(config.dim, 0.0));

  std::vector<double> cluster_norm(config.k);
  for (std::size_t j = 0; j < config.k; ++j) cluster_norm[j] = norm_real(model.clusters_[j]);

  const auto dim = static_cast<double>(config.dim);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(derive_seed(config.seed, streams::kRegressionShuffle));
  std::vector<double> sims(config.k);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    for (const std::size_t i : order) {
      const std::span<const double> h = encoded[i];
      for (std::size_t j = 0; j < config.k; ++j) {
        const double denom = h_norm[i] * cluster_norm[j];
        sims[j] = denom > 0 ? dot_real(h, model.clusters_[j]) / denom : 0.0;
      }
      const std::vector<double> alpha = softmax(sims);
      double prediction = 0;
      for (std::size_t j = 0; j < config.k; ++j) {
        prediction += alpha[j] * dot_real(h, model.regressors_[j]) / dim;
      }
      const double error = ys[i] - prediction;
      for (std::size_t j = 0; j < config.k; ++j) {
        regressor_step(model.regressors_[j], h, error, alpha[j], config.learning_rate);
      }
      const std::size_t winner =
          static_cast<std::size_t>(std::max_element(sims.begin(), sims.end()) - sims.begin());
      auto& c = model.clusters_[winner];
      for (std::size_t d = 0; d < config.dim; ++d) {
        c[d] += kClusterRefineRate * (h[d] - c[d]);
      }
      cluster_norm[winner] = norm_real(c);
    }
    model.binarize();
  }
  if (!model.has_binarized()) model.binarize();
  return model;
}

RegressionModel RegressionModel::from_parts(RegressionEncoder encoder,
                                            std::vector<std::vector<double>> clusters,
                                            std::vector<std::vector<double>> regressors,
                                            TargetScaling scaling, const RegressionConfig& config,
                                            bool binarized) {
  if (clusters.empty() || clusters.size() != regressors.size()) {
    throw Error(ErrorCode::kInvalidInput, "cluster and regressor counts differ");
  }
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    if (clusters[j].size() != encoder.dim() || regressors[j].size() != encoder.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "model vector length differs from encoder");
    }
  }
  RegressionModel model;
  model.encoder_ = std::move(encoder);
  model.clusters_ = std::move(clusters);
  model.regressors_ = std::move(regressors);
  model.scaling_ = scaling;
  model.config_ = config;
  if (binarized) model.binarize();
  return model;
}

void RegressionModel::binarize() {
  if (clusters_.empty()) throw Error(ErrorCode::kNotFitted, "regression model is not fitted");
  binary_clusters_.clear();
  binary_regressors_.clear();
  regressor_norms_.clear();
  for (std::size_t j = 0; j < clusters_.size(); ++j) {
    binary_clusters_.emplace_back(clusters_[j]);
    binary_regressors_.emplace_back(regressors_[j]);
    regressor_norms_.push_back(norm_real(regressors_[j]));
  }
}

std::vector<double> RegressionModel::scores(std::span<const double> h, bool quantized) const {
  std::vector<double> s(clusters_.size());
  if (quantized) {
    const SignBits hb(h);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = hb.similarity(binary_clusters_[j]);
  } else {
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = real_cosine(h, clusters_[j]);
  }
  return s;
}

std::vector<double> RegressionModel::confidences(std::span<const double> h, bool quantized) const {
  if (clusters_.empty()) throw Error(ErrorCode::kNotFitted, "regression model is not fitted");
  if (quantized && !has_binarized()) {
    throw Error(ErrorCode::kNotFitted, "quantized prediction needs binarized models");
  }
  if (h.size() != encoder_.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "encoded vector length differs from model");
  }
  return softmax(scores(h, quantized));
}

double RegressionModel::predict_scaled(std::span<const double> h, bool quantized) const {
  const std::vector<double> alpha = confidences(h, quantized);
  const auto dim = static_cast<double>(encoder_.dim());
  double out = 0;
  if (quantized) {
    // <h, M_j> estimated from sign agreement scaled by both norms.
    const SignBits hb(h);
    const double h_norm = norm_real(h);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      const double est = hb.similarity(binary_regressors_[j]) * regressor_norms_[j] * h_norm;
      out += alpha[j] * est / dim;
    }
  } else {
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      out += alpha[j] * dot_real(h, regressors_[j]) / dim;
    }
  }
  return out;
}

double RegressionModel::predict_encoded(std::span<const double> h, bool quantized) const {
  return scaling_.mean + scaling_.scale * predict_scaled(h, quantized);
}

double RegressionModel::predict(std::span<const double> x) const {
  if (clusters_.empty()) throw Error(ErrorCode::kNotFitted, "regression model is not fitted");
  return predict_encoded(encoder_.encode(x), config_.quantized_prediction);
}

}  // namespace hdc
