#pragma once

// Supervised HDC classifier: one accumulator per class, bundled from the
// encodings of that class's rows, and a bipolar class vector obtained by
// normalizing it. Prediction is argmax cosine against the class vectors.
//
// Around it: error-driven retraining with best-epoch snapshots, seeded
// stratified k-fold cross-validation, stepwise (backward/forward) feature
// selection with per-feature importance, and an exhaustive grid sweep over
// dimensionality, level count, and retraining epochs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdc/core.hpp"
#include "hdc/dataset.hpp"
#include "hdc/encoding.hpp"

namespace hdc {

struct ClassifierConfig {
  std::size_t dim = kDefaultDim;
  std::size_t levels = 10;
  std::size_t retrain_epochs = 0;
  std::uint64_t seed = 0;
  bool per_feature_ranges = false;

  EncoderConfig encoder() const { return {dim, levels, per_feature_ranges, seed}; }
};

struct Prediction {
  std::string label;
  std::size_t class_index = 0;
  // One entry per class, in class order.
  std::vector<double> similarities;
};

class ClassificationModel;

struct RetrainResult;

class ClassificationModel {
 public:
  // Classes are the distinct labels in lexicographic order. Throws
  // kInvalidInput for fewer than two distinct labels, kEmptyInput for no rows.
  // Runs config.retrain_epochs of retraining after the initial bundle.
  static ClassificationModel fit(const Dataset& data, const ClassifierConfig& config,
                                 const FeatureMask& mask = {});

  // Fit from rows already encoded by `encoder`; labels index into `classes`.
  static ClassificationModel fit_encoded(FeatureEncoder encoder, std::vector<std::string> classes,
                                         std::span<const Hypervector> encodings,
                                         std::span<const std::size_t> labels,
                                         const ClassifierConfig& config,
                                         const FeatureMask& mask = {});

  static ClassificationModel from_parts(FeatureEncoder encoder, std::vector<std::string> classes,
                                        std::vector<Hypervector> accumulators,
                                        const ClassifierConfig& config, FeatureMask mask,
                                        std::uint64_t class_tie_seed);

  Prediction predict(std::span<const double> x) const;
  Prediction predict_encoded(const Hypervector& h) const;
  Hypervector encode(std::span<const double> x) const { return encoder_.encode(x, mask_); }

  // Error-driven refinement; see RetrainResult.
  RetrainResult retrain(const Dataset& data, std::size_t epochs) const;
  RetrainResult retrain_encoded(std::span<const Hypervector> encodings,
                                std::span<const std::size_t> labels, std::size_t epochs) const;

  // Replaces one accumulator and renormalizes its class vector.
  void set_accumulator(std::size_t class_index, Hypervector acc);

  const FeatureEncoder& encoder() const noexcept { return encoder_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const std::vector<Hypervector>& accumulators() const noexcept { return accumulators_; }
  const std::vector<Hypervector>& class_vectors() const noexcept { return class_vectors_; }
  const ClassifierConfig& config() const noexcept { return config_; }
  const FeatureMask& mask() const noexcept { return mask_; }
  std::uint64_t class_tie_seed() const noexcept { return class_tie_seed_; }

  std::size_t class_index(const std::string& label) const;

 private:
  ClassificationModel() = default;
  void refresh_vectors();

  FeatureEncoder encoder_;
  std::vector<std::string> classes_;
  std::vector<Hypervector> accumulators_;
  std::vector<Hypervector> class_vectors_;
  ClassifierConfig config_;
  FeatureMask mask_;
  std::uint64_t class_tie_seed_ = 0;
};

// Per epoch: every row misclassified by the epoch-start class vectors adds its
// encoding to its true class and subtracts it from the predicted class; class
// vectors are renormalized at the end of the epoch. The returned model is the
// snapshot with the highest training accuracy (earliest on ties; epoch 0 is
// the input model).
struct RetrainResult {
  ClassificationModel model;
  std::vector<double> accuracy;  // accuracy[e] after e epochs
  std::size_t best_epoch = 0;
};

// Fold index per row. Within each class (in class order) rows are shuffled
// with `seed` and dealt round-robin, so per-class fold sizes differ by at most
// one. Throws kStratification when a class has fewer rows than folds.
std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels,
                                          std::size_t class_count, std::size_t folds,
                                          std::uint64_t seed);

// Accuracy per fold. The encoder (ranges and seeds) is fit once on all rows;
// each fold is scored by a model bundled and retrained on the other folds.
std::vector<double> cross_validate(const Dataset& data, const ClassifierConfig& config,
                                   std::size_t folds, std::uint64_t seed,
                                   const FeatureMask& mask = {});

enum class SelectionDirection { kBackward, kForward };

struct SelectionOptions {
  SelectionDirection direction = SelectionDirection::kBackward;
  // Stop once the best candidate's score falls below best-so-far - threshold.
  double threshold = 0.0;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};

struct SelectionRound {
  std::vector<std::string> subset;
  double score = 0.0;
};

struct SelectionReport {
  std::vector<std::string> feature_names;
  // Backward: removal order followed by the surviving features.
  // Forward: addition order followed by the features never added.
  std::vector<std::string> ranked_features;
  // One entry per original feature, indexed like feature_names.
  std::vector<double> importance;
  std::vector<std::string> best_subset;
  double best_score = 0.0;
  // Accepted subsets in visiting order. Backward starts with the full set;
  // forward starts with the first single feature added.
  std::vector<SelectionRound> rounds;
};

// Candidate subsets are scored by mean stratified CV accuracy with the
// omitted features' bind terms dropped from the encoding. The empty subset
// scores as the training-fold majority-class predictor.
SelectionReport stepwise_feature_selection(const Dataset& data, const ClassifierConfig& config,
                                           const SelectionOptions& options);

struct TuneGrid {
  std::vector<std::size_t> dims;
  std::vector<std::size_t> levels;
  std::vector<std::size_t> retrain_epochs{0};
};

struct TuneCell {
  std::size_t dim = 0;
  std::size_t levels = 0;
  std::size_t retrain_epochs = 0;
  std::vector<double> fold_scores;
  double mean = 0.0;
};

struct TuneResult {
  ClassifierConfig best;
  double best_score = 0.0;
  // Every cell, ordered by (dim, levels, epochs) ascending.
  std::vector<TuneCell> table;
};

// Exhaustive sweep; ties go to the smaller (dim, levels, epochs).
TuneResult auto_tune(const Dataset& data, const ClassifierConfig& base, const TuneGrid& grid,
                     std::size_t folds, std::uint64_t seed);

// Mean of a score list.
double mean_of(std::span<const double> xs);

}  // namespace hdc
