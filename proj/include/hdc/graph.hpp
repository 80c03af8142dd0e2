#pragma once

// Whole-graph memorization in a single hypervector.
//
// Every node v gets a random vector H_v and every weight class w a random
// vector W_w. Node v's memory bundles bind(W_w, H'_n) over its neighbours n,
// where H'_n = permute(H_n, 1) for directed graphs and H_n otherwise. The
// graph accumulator bundles bind(H_v, normalize(M_v)) over all nodes with a
// non-empty memory, and G = normalize(G_acc).
//
// Probing bind(G, H_u) recovers a noisy copy of M_u; an edge (u, v) is scored
// by the best cosine of that copy against bind(W_w, H'_v) over weight classes.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdc/core.hpp"

namespace hdc {

struct Edge {
  std::string source;
  std::string target;
  std::string weight;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct GraphConfig {
  std::size_t dim = kDefaultDim;
  bool directed = false;
  std::uint64_t seed = 0;
};

struct EdgeScore {
  bool exists = false;
  double score = 0.0;
  std::size_t weight_index = 0;  // best-matching weight class
};

class GraphModel;

struct MitigationResult;

class GraphModel {
 public:
  // `weight_alphabet` fixes the class order; when empty the distinct weights
  // in lexicographic order are used. Throws kEmptyInput, kSelfLoop, or
  // kInvalidInput (weight outside the alphabet).
  static GraphModel fit(std::span<const Edge> edges, const GraphConfig& config,
                        std::vector<std::string> weight_alphabet = {});

  struct Parts {
    GraphConfig config;
    std::vector<std::string> nodes;
    std::vector<Hypervector> node_vectors;
    std::vector<std::string> weights;
    std::vector<Hypervector> weight_vectors;
    std::vector<Hypervector> memories;
    Hypervector graph_accumulator;
    std::vector<Edge> edges;
    double threshold = 0.0;
  };
  static GraphModel from_parts(Parts parts);

  // Throws kUnknownNode or kSelfLoop.
  EdgeScore edge_exists(const std::string& u, const std::string& v) const;
  // Weight class with the best score; first class on ties.
  std::string predict(const std::string& u, const std::string& v) const;

  // Fraction of distinct training edges whose weight class is recovered.
  double weight_accuracy() const;
  // Fraction of distinct training edges accepted plus sampled non-edges rejected.
  double existence_accuracy() const;

  // Corrective rounds on G_acc; see MitigationResult.
  MitigationResult error_mitigation(std::size_t max_rounds) const;

  // Seeded sample of ordered non-adjacent pairs (as node indices), at most as
  // many as there are distinct training edges. Used for calibration and mitigation.
  std::vector<std::pair<std::size_t, std::size_t>> non_edge_sample() const;

  const GraphConfig& config() const noexcept { return config_; }
  bool directed() const noexcept { return config_.directed; }
  std::size_t dim() const noexcept { return config_.dim; }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Hypervector>& node_vectors() const noexcept { return node_vectors_; }
  const std::vector<std::string>& weights() const noexcept { return weights_; }
  const std::vector<Hypervector>& weight_vectors() const noexcept { return weight_vectors_; }
  const std::vector<Hypervector>& memories() const noexcept { return memories_; }
  const Hypervector& graph_accumulator() const noexcept { return graph_accumulator_; }
  const Hypervector& graph_vector() const noexcept { return graph_vector_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  double threshold() const noexcept { return threshold_; }
  std::size_t node_index(const std::string& name) const;

 private:
  GraphModel() = default;
  void index_nodes();
  const Hypervector& probe_target(std::size_t v) const;
  EdgeScore score(std::size_t u, std::size_t v) const;
  struct LabeledPair {
    std::size_t u;
    std::size_t v;
    std::size_t weight;
  };
  std::vector<std::pair<std::size_t, std::size_t>> distinct_edges() const;
  std::vector<LabeledPair> labeled_edges() const;
  void calibrate();
  void refresh_graph_vector();

  GraphConfig config_;
  std::vector<std::string> nodes_;
  std::map<std::string, std::size_t> node_index_;
  std::vector<Hypervector> node_vectors_;
  std::vector<Hypervector> permuted_nodes_;  // directed only
  std::vector<std::string> weights_;
  std::vector<Hypervector> weight_vectors_;
  std::vector<Hypervector> memories_;
  Hypervector graph_accumulator_;
  Hypervector graph_vector_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> edge_weight_index_;
  double threshold_ = 0.0;
};

// Per round: each training edge whose predicted class is wrong adds the
// correct term bind(H_u, bind(W_true, H'_v)) to G_acc and subtracts the
// predicted one; each sampled non-edge accepted by edge_exists subtracts its
// best term. G is renormalized after the round; a round with no corrections
// ends the loop. The returned model is the best snapshot by (weight accuracy,
// existence accuracy), the input model when nothing improves.
struct MitigationResult {
  GraphModel model;
  std::vector<double> weight_accuracy;  // [0] is the input model
  std::size_t rounds_run = 0;
  std::size_t best_round = 0;
};

// Edge lists: one `source<TAB>target<TAB>weight` per line; the weight column
// may be omitted (class "1"). A first line reading source/target[/weight] is
// treated as a header. Blank lines and lines starting with '#' are skipped.
std::vector<Edge> parse_edge_list(std::istream& in, const std::string& source = "<input>");
std::vector<Edge> load_edge_list(const std::filesystem::path& path);

}  // namespace hdc
