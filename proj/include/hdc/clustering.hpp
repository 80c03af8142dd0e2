#pragma once

// k-means in hyperdimensional space. Assignment is argmax cosine (lowest
// index on ties); the update bundles each cluster's members and normalizes.
// Iteration stops when assignments repeat or max_iterations is reached.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdc/core.hpp"

namespace hdc {

inline constexpr std::size_t kDefaultMaxIterations = 100;

class ClusteringModel {
 public:
  // Initial centroids are k distinct points sampled with `seed` by greedy
  // k-means++ (weights are squared cosine distance to the nearest pick). An empty
  // cluster is reseeded with the point least similar to its nearest centroid.
  static ClusteringModel fit(std::span<const Hypervector> points, std::size_t k,
                             std::size_t max_iterations, std::uint64_t seed);

  // Starts from given assignments (update, then reassign) instead of sampling.
  static ClusteringModel fit_from_assignments(std::span<const Hypervector> points,
                                              std::span<const std::size_t> assignments,
                                              std::size_t k, std::size_t max_iterations,
                                              std::uint64_t seed);

  static ClusteringModel from_parts(std::vector<Hypervector> centroids,
                                    std::vector<std::size_t> assignments,
                                    std::vector<bool> reseeded, std::size_t max_iterations,
                                    std::size_t iterations_run, bool converged,
                                    std::uint64_t seed);

  std::size_t predict(const Hypervector& point) const;

  std::size_t k() const noexcept { return centroids_.size(); }
  std::size_t dim() const noexcept { return centroids_.empty() ? 0 : centroids_.front().dim(); }
  const std::vector<Hypervector>& centroids() const noexcept { return centroids_; }
  const std::vector<std::size_t>& assignments() const noexcept { return assignments_; }
  // reseeded()[j]: centroid j was replaced by a data point in the last update.
  const std::vector<bool>& reseeded() const noexcept { return reseeded_; }
  std::size_t max_iterations() const noexcept { return max_iterations_; }
  std::size_t iterations_run() const noexcept { return iterations_run_; }
  bool converged() const noexcept { return converged_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t tie_seed() const noexcept { return derive_seed(seed_, streams::kTies); }

 private:
  ClusteringModel() = default;
  void iterate(std::span<const Hypervector> points);
  void update(std::span<const Hypervector> points);

  std::vector<Hypervector> centroids_;
  std::vector<std::size_t> assignments_;
  std::vector<bool> reseeded_;
  std::size_t max_iterations_ = kDefaultMaxIterations;
  std::size_t iterations_run_ = 0;
  bool converged_ = false;
  std::uint64_t seed_ = 0;
};

// Adjusted Rand index between two labelings of the same points.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace hdc
