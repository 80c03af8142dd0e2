#include "hdc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "hdc/error.hpp"
#include "hdc/parallel.hpp"

namespace hdc {

namespace {

std::size_t nearest(const std::vector<Hypervector>& centroids, const Hypervector& p,
                    double* best_sim = nullptr) {
  std::size_t best = 0;
  double best_s = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    const double s = cosine_similarity(p, centroids[j]);
    if (s > best_s) {
      best_s = s;
      best = j;
    }
  }
  if (best_sim != nullptr) *best_sim = best_s;
  return best;
}

std::vector<std::size_t> assign(const std::vector<Hypervector>& centroids,
                                std::span<const Hypervector> points) {
  std::vector<std::size_t> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) { out[i] = nearest(centroids, points[i]); });
  return out;
}

void check_points(std::span<const Hypervector> points, std::size_t k) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  if (points.size() < k) {
    throw Error(ErrorCode::kInvalidArgument, "fewer points (" + std::to_string(points.size()) +
                                                 ") than clusters (" + std::to_string(k) + ")");
  }
  for (const auto& p : points) {
    if (p.dim() != points.front().dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "points differ in dimension");
    }
  }
}

}  // namespace

void ClusteringModel::update(std::span<const Hypervector> points) {
  const std::size_t k = centroids_.size();
  std::vector<Hypervector> sums(k, Hypervector::zeros(points.front().dim()));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    sums[assignments_[i]].add(points[i]);
    ++counts[assignments_[i]];
  }
  std::vector<Hypervector> next(k);
  std::vector<bool> filled(k, false);
  for (std::size_t j = 0; j < k; ++j) {
    reseeded_[j] = counts[j] == 0;
    if (counts[j] > 0) {
      next[j] = normalize(sums[j], tie_seed());
      filled[j] = true;
    }
  }
  // Empty clusters take the point whose best similarity to the centroids
  // placed so far is lowest (first such point on ties).
  for (std::size_t j = 0; j < k; ++j) {
    if (filled[j]) continue;
    std::vector<Hypervector> placed;
    for (std::size_t c = 0; c < k; ++c) {
      if (filled[c]) placed.push_back(next[c]);
    }
    std::size_t pick = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
      double s = -1.0;
      if (!placed.empty()) nearest(placed, points[i], &s);
      if (s < lowest) {
        lowest = s;
        pick = i;
      }
    }
    next[j] = points[pick];
    filled[j] = true;
  }
  centroids_ = std::move(next);
}

void ClusteringModel::iterate(std::span<const Hypervector> points) {
  while (iterations_run_ < max_iterations_) {
    update(points);
    std::vector<std::size_t> next = assign(centroids_, points);
    ++iterations_run_;
    if (next == assignments_) {
      converged_ = true;
      return;
    }
    assignments_ = std::move(next);
  }
}

ClusteringModel ClusteringModel::fit(std::span<const Hypervector> points, std::size_t k,
                                     std::size_t max_iterations, std::uint64_t seed) {
  check_points(points, k);
  ClusteringModel model;
  model.seed_ = seed;
  model.max_iterations_ = max_iterations;
  model.reseeded_.assign(k, false);

  // Greedy k-means++ seeding on cosine distance. The first centroid is a
  // uniform draw; each later step draws 2 + floor(ln k) candidates with weight
  // (1 - best cosine)^2 and keeps the one that most lowers the total weight.
  // Chosen points have weight 0, so the picks are distinct.
  Rng rng(derive_seed(seed, streams::kClusterInit));
  const std::size_t n = points.size();
  const std::size_t trials = 2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));
  auto distance_to = [&](std::size_t c, std::vector<double>& out) {
    out.resize(n);
    parallel_for(n, [&](std::size_t i) {
      const double d = 1.0 - cosine_similarity(points[i], points[c]);
      out[i] = d * d;
    });
  };
  auto draw = [&](const std::vector<double>& w) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      double r = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] <= 0.0) continue;
        pick = i;
        r -= w[i];
        if (r < 0.0) break;
      }
    }
    return pick;
  };

  std::vector<bool> taken(n, false);
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  taken[first] = true;
  model.centroids_.push_back(points[first]);
  std::vector<double> weight;
  distance_to(first, weight);
  weight[first] = 0.0;
  std::vector<double> trial;
  for (std::size_t j = 1; j < k; ++j) {
    std::size_t best = n;
    double best_total = std::numeric_limits<double>::infinity();
    std::vector<double> best_weight;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t c = draw(weight);
      if (c == n) break;
      distance_to(c, trial);
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i] = taken[i] || i == c ? 0.0 : std::min(weight[i], trial[i]);
        total += trial[i];
      }
      if (total < best_total) {
        best_total = total;
        best = c;
        best_weight = trial;
      }
    }
    if (best == n) {
      // Every remaining point duplicates a pick: take the first unused index.
      best = static_cast<std::size_t>(std::find(taken.begin(), taken.end(), false) - taken.begin());
      best_weight = weight;
      best_weight[best] = 0.0;
    }
    taken[best] = true;
    model.centroids_.push_back(points[best]);
    weight = std::move(best_weight);
  }
  model.assignments_ = assign(model.centroids_, points);
  model.iterate(points);
  return model;
}

ClusteringModel ClusteringModel::fit_from_assignments(std::span<const Hypervector> points,
                                                      std::span<const std::size_t> assignments,
                                                      std::size_t k, std::size_t max_iterations,
                                                      std::uint64_t seed) {
  check_points(points, k);
  if (assignments.size() != points.size()) {
    throw Error(ErrorCode::kInvalidArgument, "assignment count differs from point count");
  }
  if (max_iterations == 0) {
    throw Error(ErrorCode::kInvalidArgument, "refitting from assignments needs an iteration");
  }
  ClusteringModel model;
  model.seed_ = seed;
  model.max_iterations_ = max_iterations;
  model.reseeded_.assign(k, false);
  model.centroids_.assign(k, Hypervector{});
  model.assignments_.assign(assignments.begin(), assignments.end());
  for (const std::size_t a : model.assignments_) {
    if (a >= k) throw Error(ErrorCode::kInvalidArgument, "assignment out of range");
  }
  model.iterate(points);
  return model;
}

ClusteringModel ClusteringModel::from_parts(std::vector<Hypervector> centroids,
                                            std::vector<std::size_t> assignments,
                                            std::vector<bool> reseeded,
                                            std::size_t max_iterations,
                                            std::size_t iterations_run, bool converged,
                                            std::uint64_t seed) {
  if (centroids.size() < 2 || reseeded.size() != centroids.size()) {
    throw Error(ErrorCode::kInvalidInput, "malformed clustering model");
  }
  ClusteringModel model;
  model.centroids_ = std::move(centroids);
  model.assignments_ = std::move(assignments);
  model.reseeded_ = std::move(reseeded);
  model.max_iterations_ = max_iterations;
  model.iterations_run_ = iterations_run;
  model.converged_ = converged;
  model.seed_ = seed;
  return model;
}

std::size_t ClusteringModel::predict(const Hypervector& point) const {
  if (centroids_.empty()) throw Error(ErrorCode::kNotFitted, "clustering model is not fitted");
  if (point.dim() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "point dimension " + std::to_string(point.dim()) +
                                                   " differs from model dimension " +
                                                   std::to_string(dim()));
  }
  return nearest(centroids_, point);
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "labelings differ in length");
  const auto n = static_cast<double>(a.size());
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> ra;
  std::map<std::size_t, double> rb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1;
    ra[a[i]] += 1;
    rb[b[i]] += 1;
  }
  auto pairs = [](double x) { return x * (x - 1) / 2; };
  double index = 0;
  for (const auto& [key, c] : joint) index += pairs(c);
  double sum_a = 0;
  for (const auto& [key, c] : ra) sum_a += pairs(c);
  double sum_b = 0;
  for (const auto& [key, c] : rb) sum_b += pairs(c);
  const double expected = sum_a * sum_b / pairs(n);
  const double max_index = (sum_a + sum_b) / 2;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace hdc
