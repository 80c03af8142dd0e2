#include "hdc/classification.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "hdc/error.hpp"
#include "hdc/parallel.hpp"

namespace hdc {

namespace {

struct IndexedLabels {
  std::vector<std::string> classes;
  std::vector<std::size_t> labels;
};

IndexedLabels index_labels(const std::vector<std::string>& labels) {
  IndexedLabels out;
  const std::set<std::string> distinct(labels.begin(), labels.end());
  out.classes.assign(distinct.begin(), distinct.end());
  out.labels.reserve(labels.size());
  for (const auto& l : labels) {
    out.labels.push_back(static_cast<std::size_t>(
        std::lower_bound(out.classes.begin(), out.classes.end(), l) - out.classes.begin()));
  }
  return out;
}

void require_classification(const Dataset& data) {
  if (data.kind != DatasetKind::kClassification) {
    throw Error(ErrorCode::kInvalidInput, "dataset has no class labels");
  }
  if (data.rows() == 0) throw Error(ErrorCode::kEmptyInput, "empty dataset");
  data.validate();
}

// Index of the most similar class vector; first index wins ties.
std::size_t nearest_class(const std::vector<Hypervector>& vectors, const Hypervector& h,
                          std::vector<double>* sims = nullptr) {
  std::size_t best = 0;
  double best_sim = -std::numeric_limits<double>::infinity();
  if (sims != nullptr) sims->assign(vectors.size(), 0.0);
  for (std::size_t c = 0; c < vectors.size(); ++c) {
    const double s = cosine_similarity(h, vectors[c]);
    if (sims != nullptr) (*sims)[c] = s;
    if (s > best_sim) {
      best_sim = s;
      best = c;
    }
  }
  return best;
}

std::vector<std::size_t> predict_all(const std::vector<Hypervector>& vectors,
                                     std::span<const Hypervector> encodings) {
  std::vector<std::size_t> out(encodings.size());
  parallel_for(encodings.size(),
               [&](std::size_t i) { out[i] = nearest_class(vectors, encodings[i]); });
  return out;
}

double accuracy_of(std::span<const std::size_t> predicted, std::span<const std::size_t> truth) {
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1U : 0U;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

struct ClassMemory {
  std::vector<Hypervector> accumulators;
  std::vector<Hypervector> vectors;
  std::uint64_t tie_seed = 0;

  void renormalize() {
    vectors.clear();
    for (const auto& a : accumulators) vectors.push_back(normalize(a, tie_seed));
  }
};

ClassMemory bundle_classes(std::size_t class_count, std::size_t dim,
                           std::span<const Hypervector> encodings,
                           std::span<const std::size_t> labels, std::uint64_t tie_seed) {
  ClassMemory mem;
  mem.tie_seed = tie_seed;
  mem.accumulators.assign(class_count, Hypervector::zeros(dim));
  for (std::size_t i = 0; i < encodings.size(); ++i) mem.accumulators[labels[i]].add(encodings[i]);
  mem.renormalize();
  return mem;
}

// Retraining loop shared by the model API and cross-validation. on_epoch sees
// the state after e epochs for e = 0..epochs together with its training
// predictions.
void run_retraining(
    ClassMemory& mem, std::span<const Hypervector> encodings, std::span<const std::size_t> labels,
    std::size_t epochs,
    const std::function<void(std::size_t, const ClassMemory&, const std::vector<std::size_t>&)>&
        on_epoch) {
  std::vector<std::size_t> predicted = predict_all(mem.vectors, encodings);
  on_epoch(0, mem, predicted);
  for (std::size_t e = 1; e <= epochs; ++e) {
    bool changed = false;
    for (std::size_t i = 0; i < encodings.size(); ++i) {
      if (predicted[i] == labels[i]) continue;
      mem.accumulators[labels[i]].add(encodings[i]);
      mem.accumulators[predicted[i]].subtract(encodings[i]);
      changed = true;
    }
    if (changed) {
      mem.renormalize();
      predicted = predict_all(mem.vectors, encodings);
    }
    on_epoch(e, mem, predicted);
  }
}

std::uint64_t class_tie_seed_for(const ClassifierConfig& config) {
  return derive_seed(derive_seed(config.seed, streams::kTies), 1);
}

}  // namespace

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

ClassificationModel ClassificationModel::fit(const Dataset& data, const ClassifierConfig& config,
                                             const FeatureMask& mask) {
  require_classification(data);
  IndexedLabels idx = index_labels(data.labels);
  if (idx.classes.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "classification needs at least two distinct labels");
  }
  FeatureEncoder encoder = FeatureEncoder::fit(data.matrix, data.feature_names, config.encoder());
  const std::vector<Hypervector> encodings = encoder.encode_rows(data.matrix, mask);
  return fit_encoded(std::move(encoder), std::move(idx.classes), encodings, idx.labels, config,
                     mask);
}

ClassificationModel ClassificationModel::fit_encoded(FeatureEncoder encoder,
                                                     std::vector<std::string> classes,
                                                     std::span<const Hypervector> encodings,
                                                     std::span<const std::size_t> labels,
                                                     const ClassifierConfig& config,
                                                     const FeatureMask& mask) {
  if (encodings.empty()) throw Error(ErrorCode::kEmptyInput, "no training rows");
  if (classes.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "classification needs at least two distinct labels");
  }
  ClassificationModel model;
  model.config_ = config;
  model.mask_ = mask;
  model.class_tie_seed_ = class_tie_seed_for(config);
  ClassMemory mem = bundle_classes(classes.size(), encoder.dim(), encodings, labels,
                                   model.class_tie_seed_);
  model.encoder_ = std::move(encoder);
  model.classes_ = std::move(classes);
  model.accumulators_ = std::move(mem.accumulators);
  model.class_vectors_ = std::move(mem.vectors);
  if (config.retrain_epochs > 0) {
    return model.retrain_encoded(encodings, labels, config.retrain_epochs).model;
  }
  return model;
}

ClassificationModel ClassificationModel::from_parts(FeatureEncoder encoder,
                                                    std::vector<std::string> classes,
                                                    std::vector<Hypervector> accumulators,
                                                    const ClassifierConfig& config,
                                                    FeatureMask mask,
                                                    std::uint64_t class_tie_seed) {
  if (classes.size() != accumulators.size() || classes.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "class and accumulator counts disagree");
  }
  ClassificationModel model;
  model.encoder_ = std::move(encoder);
  model.classes_ = std::move(classes);
  model.accumulators_ = std::move(accumulators);
  model.config_ = config;
  model.mask_ = std::move(mask);
  model.class_tie_seed_ = class_tie_seed;
  model.refresh_vectors();
  return model;
}

void ClassificationModel::refresh_vectors() {
  class_vectors_.clear();
  for (const auto& a : accumulators_) class_vectors_.push_back(normalize(a, class_tie_seed_));
}

void ClassificationModel::set_accumulator(std::size_t class_index, Hypervector acc) {
  if (acc.dim() != encoder_.dim()) throw Error(ErrorCode::kDimensionMismatch, "accumulator dim");
  accumulators_.at(class_index) = std::move(acc);
  class_vectors_.at(class_index) = normalize(accumulators_[class_index], class_tie_seed_);
}

std::size_t ClassificationModel::class_index(const std::string& label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw Error(ErrorCode::kInvalidInput, "unknown class '" + label + "'");
  return static_cast<std::size_t>(it - classes_.begin());
}

Prediction ClassificationModel::predict(std::span<const double> x) const {
  return predict_encoded(encode(x));
}

Prediction ClassificationModel::predict_encoded(const Hypervector& h) const {
  if (class_vectors_.empty()) throw Error(ErrorCode::kNotFitted, "classifier is not fitted");
  Prediction p;
  p.class_index = nearest_class(class_vectors_, h, &p.similarities);
  p.label = classes_[p.class_index];
  return p;
}

RetrainResult ClassificationModel::retrain(const Dataset& data, std::size_t epochs) const {
  require_classification(data);
  std::vector<std::size_t> labels;
  labels.reserve(data.rows());
  for (const auto& l : data.labels) labels.push_back(class_index(l));
  const std::vector<Hypervector> encodings = encoder_.encode_rows(data.matrix, mask_);
  return retrain_encoded(encodings, labels, epochs);
}

RetrainResult ClassificationModel::retrain_encoded(std::span<const Hypervector> encodings,
                                                   std::span<const std::size_t> labels,
                                                   std::size_t epochs) const {
  if (class_vectors_.empty()) throw Error(ErrorCode::kNotFitted, "classifier is not fitted");
  ClassMemory mem{accumulators_, class_vectors_, class_tie_seed_};
  RetrainResult result{*this, {}, 0};
  double best = -1.0;
  run_retraining(mem, encodings, labels, epochs,
                 [&](std::size_t e, const ClassMemory& state,
                     const std::vector<std::size_t>& predicted) {
                   const double acc = accuracy_of(predicted, labels);
                   result.accuracy.push_back(acc);
                   if (acc > best) {
                     best = acc;
                     result.best_epoch = e;
                     result.model.accumulators_ = state.accumulators;
                     result.model.class_vectors_ = state.vectors;
                   }
                 });
  return result;
}

std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels,
                                          std::size_t class_count, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::kInvalidArgument, "folds must be at least 2");
  if (folds > labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "folds (" + std::to_string(folds) +
                                                 ") exceed row count (" +
                                                 std::to_string(labels.size()) + ")");
  }
  std::vector<std::vector<std::size_t>> members(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) members.at(labels[i]).push_back(i);

  std::vector<std::size_t> assignment(labels.size(), 0);
  Rng rng(derive_seed(seed, streams::kFolds));
  for (std::size_t c = 0; c < class_count; ++c) {
    auto& rows = members[c];
    if (rows.empty()) continue;
    if (rows.size() < folds) {
      throw Error(ErrorCode::kStratification,
                  "class " + std::to_string(c) + " has " + std::to_string(rows.size()) +
                      " rows, fewer than " + std::to_string(folds) + " folds");
    }
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t j = 0; j < rows.size(); ++j) assignment[rows[j]] = j % folds;
  }
  return assignment;
}

namespace {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::vector<Split> make_splits(std::span<const std::size_t> assignment, std::size_t folds) {
  std::vector<Split> splits(folds);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    for (std::size_t f = 0; f < folds; ++f) {
      (assignment[i] == f ? splits[f].test : splits[f].train).push_back(i);
    }
  }
  return splits;
}

template <typename T>
std::vector<T> gather(std::span<const T> all, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (const std::size_t i : idx) out.push_back(all[i]);
  return out;
}

// Test accuracy per fold for each requested epoch budget. Budget E uses the
// best-training-accuracy snapshot among epochs 0..E, exactly as retrain does.
std::vector<std::vector<double>> cv_scores(std::span<const Hypervector> encodings,
                                           std::span<const std::size_t> labels,
                                           std::size_t class_count,
                                           std::span<const std::size_t> assignment,
                                           std::size_t folds, std::uint64_t tie_seed,
                                           std::span<const std::size_t> budgets) {
  const std::size_t max_epochs =
      budgets.empty() ? 0 : *std::max_element(budgets.begin(), budgets.end());
  const std::vector<Split> splits = make_splits(assignment, folds);
  std::vector<std::vector<double>> scores(budgets.size(), std::vector<double>(folds, 0.0));
  for (std::size_t f = 0; f < folds; ++f) {
    const auto train_enc = gather(encodings, splits[f].train);
    const auto train_lab = gather(labels, splits[f].train);
    const auto test_enc = gather(encodings, splits[f].test);
    const auto test_lab = gather(labels, splits[f].test);

    ClassMemory mem =
        bundle_classes(class_count, encodings.front().dim(), train_enc, train_lab, tie_seed);
    std::vector<double> train_acc;
    std::vector<double> test_acc;
    run_retraining(mem, train_enc, train_lab, max_epochs,
                   [&](std::size_t, const ClassMemory& state,
                       const std::vector<std::size_t>& predicted) {
                     train_acc.push_back(accuracy_of(predicted, train_lab));
                     test_acc.push_back(accuracy_of(predict_all(state.vectors, test_enc), test_lab));
                   });
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      std::size_t best = 0;
      for (std::size_t e = 1; e <= budgets[b]; ++e) {
        if (train_acc[e] > train_acc[best]) best = e;
      }
      scores[b][f] = test_acc[best];
    }
  }
  return scores;
}

// Majority class of the training folds (first in class order on ties).
std::vector<double> majority_scores(std::span<const std::size_t> labels, std::size_t class_count,
                                    std::span<const std::size_t> assignment, std::size_t folds) {
  std::vector<double> scores(folds, 0.0);
  for (const Split& s : make_splits(assignment, folds)) {
    std::vector<std::size_t> counts(class_count, 0);
    for (const std::size_t i : s.train) ++counts[labels[i]];
    const auto majority =
        static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    std::size_t hits = 0;
    for (const std::size_t i : s.test) hits += labels[i] == majority ? 1U : 0U;
    scores[assignment[s.test.front()]] =
        static_cast<double>(hits) / static_cast<double>(s.test.size());
  }
  return scores;
}

struct PreparedData {
  FeatureEncoder encoder;
  IndexedLabels labels;
  std::vector<std::size_t> assignment;
};

PreparedData prepare(const Dataset& data, const ClassifierConfig& config, std::size_t folds,
                     std::uint64_t seed) {
  require_classification(data);
  IndexedLabels idx = index_labels(data.labels);
  if (idx.classes.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "classification needs at least two distinct labels");
  }
  std::vector<std::size_t> assignment =
      stratified_folds(idx.labels, idx.classes.size(), folds, seed);
  return {FeatureEncoder::fit(data.matrix, data.feature_names, config.encoder()), std::move(idx),
          std::move(assignment)};
}

}  // namespace

std::vector<double> cross_validate(const Dataset& data, const ClassifierConfig& config,
                                   std::size_t folds, std::uint64_t seed,
                                   const FeatureMask& mask) {
  const PreparedData prep = prepare(data, config, folds, seed);
  const std::vector<Hypervector> encodings = prep.encoder.encode_rows(data.matrix, mask);
  const std::size_t budget[] = {config.retrain_epochs};
  return cv_scores(encodings, prep.labels.labels, prep.labels.classes.size(), prep.assignment,
                   folds, class_tie_seed_for(config), budget)
      .front();
}

namespace {

std::vector<std::string> names_in(const FeatureMask& mask, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (std::size_t f = 0; f < mask.size(); ++f) {
    if (mask[f]) out.push_back(names[f]);
  }
  return out;
}

}  // namespace

SelectionReport stepwise_feature_selection(const Dataset& data, const ClassifierConfig& config,
                                           const SelectionOptions& options) {
  const std::size_t features = data.features();
  if (features < 2) {
    throw Error(ErrorCode::kInvalidArgument, "feature selection needs at least two features");
  }
  const PreparedData prep = prepare(data, config, options.folds, options.seed);
  const std::size_t class_count = prep.labels.classes.size();
  const std::uint64_t tie_seed = class_tie_seed_for(config);

  std::map<FeatureMask, double> cache;
  auto score = [&](const FeatureMask& mask) {
    if (const auto it = cache.find(mask); it != cache.end()) return it->second;
    double s = 0.0;
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; })) {
      s = mean_of(majority_scores(prep.labels.labels, class_count, prep.assignment,
                                  options.folds));
    } else {
      const auto encodings = prep.encoder.encode_rows(data.matrix, mask);
      const std::size_t budget[] = {config.retrain_epochs};
      s = mean_of(cv_scores(encodings, prep.labels.labels, class_count, prep.assignment,
                            options.folds, tie_seed, budget)
                      .front());
    }
    cache.emplace(mask, s);
    return s;
  };

  SelectionReport report;
  report.feature_names = data.feature_names;
  report.importance.assign(features, 0.0);

  const bool backward = options.direction == SelectionDirection::kBackward;
  FeatureMask current(features, backward);
  double current_score = score(current);
  double best_so_far = current_score;
  if (backward) report.rounds.push_back({names_in(current, data.feature_names), current_score});

  std::vector<std::size_t> order;
  auto remaining = [&] {
    std::vector<std::size_t> out;
    for (std::size_t f = 0; f < features; ++f) {
      if (current[f] == backward) out.push_back(f);
    }
    return out;
  };

  for (;;) {
    const std::vector<std::size_t> candidates = remaining();
    // Backward stops with one feature left; forward once every feature is in.
    if (backward ? candidates.size() <= 1 : candidates.empty()) break;

    std::vector<double> candidate_scores(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      FeatureMask trial = current;
      trial[candidates[i]] = !backward;
      candidate_scores[i] = score(trial);
      // Contribution of the candidate in this round: score with it present
      // minus score with it absent.
      report.importance[candidates[i]] = backward ? current_score - candidate_scores[i]
                                                  : candidate_scores[i] - current_score;
    }
    const std::size_t pick = static_cast<std::size_t>(
        std::max_element(candidate_scores.begin(), candidate_scores.end()) -
        candidate_scores.begin());
    if (candidate_scores[pick] < best_so_far - options.threshold) break;

    current[candidates[pick]] = !backward;
    current_score = candidate_scores[pick];
    best_so_far = std::max(best_so_far, current_score);
    order.push_back(candidates[pick]);
    report.rounds.push_back({names_in(current, data.feature_names), current_score});
  }

  // A lone backward survivor was never scored against its absence.
  const std::vector<std::size_t> rest = remaining();
  if (backward && rest.size() == 1 && order.size() + 1 == features) {
    report.importance[rest.front()] = current_score - score(FeatureMask(features, false));
  }

  for (const std::size_t f : order) report.ranked_features.push_back(data.feature_names[f]);
  for (const std::size_t f : rest) report.ranked_features.push_back(data.feature_names[f]);

  // Highest score wins; on ties the smaller subset.
  const SelectionRound* best = nullptr;
  for (const auto& round : report.rounds) {
    if (best == nullptr || round.score > best->score ||
        (round.score == best->score && round.subset.size() < best->subset.size())) {
      best = &round;
    }
  }
  if (best != nullptr) {
    report.best_subset = best->subset;
    report.best_score = best->score;
  }
  return report;
}

TuneResult auto_tune(const Dataset& data, const ClassifierConfig& base, const TuneGrid& grid,
                     std::size_t folds, std::uint64_t seed) {
  if (grid.dims.empty() || grid.levels.empty() || grid.retrain_epochs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty tuning grid");
  }
  auto sorted_unique = [](std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto dims = sorted_unique(grid.dims);
  const auto levels = sorted_unique(grid.levels);
  const auto epochs = sorted_unique(grid.retrain_epochs);

  require_classification(data);
  const IndexedLabels idx = index_labels(data.labels);
  if (idx.classes.size() < 2) {
    throw Error(ErrorCode::kInvalidInput, "classification needs at least two distinct labels");
  }
  const std::vector<std::size_t> assignment =
      stratified_folds(idx.labels, idx.classes.size(), folds, seed);

  TuneResult result;
  bool have_best = false;
  for (const std::size_t d : dims) {
    for (const std::size_t l : levels) {
      ClassifierConfig cell = base;
      cell.dim = d;
      cell.levels = l;
      // One encoding pass per (dim, levels); every epoch budget reuses it.
      const FeatureEncoder encoder =
          FeatureEncoder::fit(data.matrix, data.feature_names, cell.encoder());
      const auto encodings = encoder.encode_rows(data.matrix);
      const auto scores = cv_scores(encodings, idx.labels, idx.classes.size(), assignment, folds,
                                    class_tie_seed_for(cell), epochs);
      for (std::size_t b = 0; b < epochs.size(); ++b) {
        TuneCell row{d, l, epochs[b], scores[b], mean_of(scores[b])};
        if (!have_best || row.mean > result.best_score) {
          have_best = true;
          result.best = cell;
          result.best.retrain_epochs = epochs[b];
          result.best_score = row.mean;
        }
        result.table.push_back(std::move(row));
      }
    }
  }
  return result;
}

}  // namespace hdc
