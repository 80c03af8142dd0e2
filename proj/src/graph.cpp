#include "hdc/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "hdc/error.hpp"

namespace hdc {

namespace {

// Beyond this many ordered pairs the non-edge sample is drawn by rejection
// instead of enumeration.
constexpr std::size_t kEnumeratePairsLimit = 4'000'000;

std::uint64_t memory_tie_seed(std::uint64_t seed) { return derive_seed(seed, streams::kTies); }

std::uint64_t graph_tie_seed(std::uint64_t seed) {
  return derive_seed(derive_seed(seed, streams::kTies), 1);
}

}  // namespace

GraphModel GraphModel::fit(std::span<const Edge> edges, const GraphConfig& config,
                           std::vector<std::string> weight_alphabet) {
  if (edges.empty()) throw Error(ErrorCode::kEmptyInput, "graph has no edges");
  if (config.dim < 2) throw Error(ErrorCode::kInvalidDimension, "dimension must be at least 2");

  GraphModel model;
  model.config_ = config;
  for (const Edge& e : edges) {
    if (e.source == e.target) {
      throw Error(ErrorCode::kSelfLoop, "self-loop on node '" + e.source + "' is not supported");
    }
    for (const std::string* name : {&e.source, &e.target}) {
      if (model.node_index_.emplace(*name, model.nodes_.size()).second) {
        model.nodes_.push_back(*name);
      }
    }
  }
  if (weight_alphabet.empty()) {
    std::set<std::string> distinct;
    for (const Edge& e : edges) distinct.insert(e.weight);
    weight_alphabet.assign(distinct.begin(), distinct.end());
  }
  model.weights_ = std::move(weight_alphabet);

  Rng node_rng(derive_seed(config.seed, streams::kGraphNodes));
  for (const auto& name : model.nodes_) {
    model.node_vectors_.push_back(random_hypervector(config.dim, node_rng));
    model.node_vectors_.back().set_name(name);
  }
  Rng weight_rng(derive_seed(config.seed, streams::kGraphWeights));
  for (const auto& w : model.weights_) {
    model.weight_vectors_.push_back(random_hypervector(config.dim, weight_rng));
    model.weight_vectors_.back().set_name(w);
  }
  if (config.directed) {
    for (const auto& h : model.node_vectors_) model.permuted_nodes_.push_back(permute(h, 1));
  }

  model.edges_.assign(edges.begin(), edges.end());
  model.memories_.assign(model.nodes_.size(), Hypervector::zeros(config.dim));
  for (const Edge& e : model.edges_) {
    const auto it = std::find(model.weights_.begin(), model.weights_.end(), e.weight);
    if (it == model.weights_.end()) {
      throw Error(ErrorCode::kInvalidInput, "weight class '" + e.weight + "' is not in the alphabet");
    }
    const auto w = static_cast<std::size_t>(it - model.weights_.begin());
    model.edge_weight_index_.push_back(w);
    const std::size_t u = model.node_index_.at(e.source);
    const std::size_t v = model.node_index_.at(e.target);
    model.memories_[u].add_product(model.weight_vectors_[w], model.probe_target(v));
    if (!config.directed) {
      model.memories_[v].add_product(model.weight_vectors_[w], model.node_vectors_[u]);
    }
  }

  model.graph_accumulator_ = Hypervector::zeros(config.dim);
  for (std::size_t v = 0; v < model.nodes_.size(); ++v) {
    if (model.memories_[v].is_zero()) continue;
    model.graph_accumulator_.add_product(
        model.node_vectors_[v], normalize(model.memories_[v], memory_tie_seed(config.seed)));
  }
  model.refresh_graph_vector();
  model.calibrate();
  return model;
}

GraphModel GraphModel::from_parts(Parts parts) {
  GraphModel model;
  model.config_ = parts.config;
  model.nodes_ = std::move(parts.nodes);
  model.node_vectors_ = std::move(parts.node_vectors);
  model.weights_ = std::move(parts.weights);
  model.weight_vectors_ = std::move(parts.weight_vectors);
  model.memories_ = std::move(parts.memories);
  model.graph_accumulator_ = std::move(parts.graph_accumulator);
  model.edges_ = std::move(parts.edges);
  model.threshold_ = parts.threshold;
  if (model.nodes_.size() != model.node_vectors_.size() ||
      model.weights_.size() != model.weight_vectors_.size() ||
      model.memories_.size() != model.nodes_.size() || model.weights_.empty()) {
    throw Error(ErrorCode::kInvalidInput, "malformed graph model");
  }
  model.index_nodes();
  if (model.config_.directed) {
    for (const auto& h : model.node_vectors_) model.permuted_nodes_.push_back(permute(h, 1));
  }
  for (const Edge& e : model.edges_) {
    const auto it = std::find(model.weights_.begin(), model.weights_.end(), e.weight);
    if (it == model.weights_.end()) throw Error(ErrorCode::kInvalidInput, "malformed graph model");
    model.edge_weight_index_.push_back(static_cast<std::size_t>(it - model.weights_.begin()));
  }
  model.refresh_graph_vector();
  return model;
}

void GraphModel::index_nodes() {
  node_index_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) node_index_.emplace(nodes_[i], i);
}

void GraphModel::refresh_graph_vector() {
  graph_vector_ = normalize(graph_accumulator_, graph_tie_seed(config_.seed));
}

std::size_t GraphModel::node_index(const std::string& name) const {
  const auto it = node_index_.find(name);
  if (it == node_index_.end()) throw Error(ErrorCode::kUnknownNode, "unknown node '" + name + "'");
  return it->second;
}

const Hypervector& GraphModel::probe_target(std::size_t v) const {
  return config_.directed ? permuted_nodes_[v] : node_vectors_[v];
}

EdgeScore GraphModel::score(std::size_t u, std::size_t v) const {
  if (u == v) {
    throw Error(ErrorCode::kSelfLoop, "self-loop query on node '" + nodes_[u] + "' is not supported");
  }
  // cos(bind(G, H_u), bind(W_w, H'_v)) = <G * H_u * H'_v, W_w> / D
  const Hypervector probe = bind(bind(graph_vector_, node_vectors_[u]), probe_target(v));
  EdgeScore out;
  out.score = -2.0;
  for (std::size_t w = 0; w < weight_vectors_.size(); ++w) {
    const double s = static_cast<double>(dot(probe, weight_vectors_[w])) /
                     static_cast<double>(config_.dim);
    if (s > out.score) {
      out.score = s;
      out.weight_index = w;
    }
  }
  out.exists = out.score >= threshold_;
  return out;
}

EdgeScore GraphModel::edge_exists(const std::string& u, const std::string& v) const {
  return score(node_index(u), node_index(v));
}

std::string GraphModel::predict(const std::string& u, const std::string& v) const {
  return weights_[edge_exists(u, v).weight_index];
}

std::vector<std::pair<std::size_t, std::size_t>> GraphModel::distinct_edges() const {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const Edge& e : edges_) {
    const std::pair<std::size_t, std::size_t> key{node_index_.at(e.source),
                                                  node_index_.at(e.target)};
    if (seen.insert(key).second) out.push_back(key);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> GraphModel::non_edge_sample() const {
  std::set<std::pair<std::size_t, std::size_t>> adjacent;
  for (const Edge& e : edges_) {
    const std::size_t u = node_index_.at(e.source);
    const std::size_t v = node_index_.at(e.target);
    adjacent.insert({u, v});
    if (!config_.directed) adjacent.insert({v, u});
  }
  const std::size_t want = distinct_edges().size();
  const std::size_t n = nodes_.size();
  Rng rng(derive_seed(config_.seed, streams::kGraphNonEdges));

  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (n * (n - 1) <= kEnumeratePairsLimit) {
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) {
        if (u != v && adjacent.count({u, v}) == 0) candidates.push_back({u, v});
      }
    }
    rng.shuffle(std::span(candidates));
    candidates.resize(std::min(candidates.size(), want));
    return candidates;
  }
  std::set<std::pair<std::size_t, std::size_t>> chosen;
  for (std::size_t attempt = 0; attempt < 50 * want && out.size() < want; ++attempt) {
    const std::pair<std::size_t, std::size_t> p{static_cast<std::size_t>(rng.below(n)),
                                                static_cast<std::size_t>(rng.below(n))};
    if (p.first == p.second || adjacent.count(p) != 0 || !chosen.insert(p).second) continue;
    out.push_back(p);
  }
  return out;
}

void GraphModel::calibrate() {
  const auto edges = distinct_edges();
  const auto non_edges = non_edge_sample();
  double edge_mean = 0;
  for (const auto& [u, v] : edges) edge_mean += score(u, v).score;
  edge_mean /= static_cast<double>(edges.size());
  if (non_edges.empty()) {
    // Complete graph: no negatives to calibrate against, unrelated pairs score ~0.
    threshold_ = edge_mean / 2;
    return;
  }
  double non_edge_mean = 0;
  for (const auto& [u, v] : non_edges) non_edge_mean += score(u, v).score;
  non_edge_mean /= static_cast<double>(non_edges.size());
  threshold_ = (edge_mean + non_edge_mean) / 2;
}

std::vector<GraphModel::LabeledPair> GraphModel::labeled_edges() const {
  // The first listing of a pair defines its true class.
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<LabeledPair> out;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const std::pair<std::size_t, std::size_t> key{node_index_.at(edges_[i].source),
                                                  node_index_.at(edges_[i].target)};
    if (seen.insert(key).second) out.push_back({key.first, key.second, edge_weight_index_[i]});
  }
  return out;
}

double GraphModel::weight_accuracy() const {
  const auto edges = labeled_edges();
  std::size_t hits = 0;
  for (const auto& e : edges) hits += score(e.u, e.v).weight_index == e.weight ? 1U : 0U;
  return static_cast<double>(hits) / static_cast<double>(edges.size());
}

double GraphModel::existence_accuracy() const {
  const auto edges = distinct_edges();
  const auto non_edges = non_edge_sample();
  std::size_t hits = 0;
  for (const auto& [u, v] : edges) hits += score(u, v).exists ? 1U : 0U;
  for (const auto& [u, v] : non_edges) hits += score(u, v).exists ? 0U : 1U;
  return static_cast<double>(hits) / static_cast<double>(edges.size() + non_edges.size());
}

MitigationResult GraphModel::error_mitigation(std::size_t max_rounds) const {
  if (edges_.empty()) {
    throw Error(ErrorCode::kInvalidInput, "error mitigation needs the retained training edges");
  }
  MitigationResult result{*this, {weight_accuracy()}, 0, 0};
  double best_weight = result.weight_accuracy.front();
  double best_existence = existence_accuracy();

  const auto truth = labeled_edges();
  const auto non_edges = non_edge_sample();

  GraphModel current = *this;
  for (std::size_t round = 1; round <= max_rounds; ++round) {
    std::size_t corrections = 0;
    Hypervector acc = current.graph_accumulator_;
    for (const auto& e : truth) {
      const std::size_t w_pred = current.score(e.u, e.v).weight_index;
      if (w_pred == e.weight) continue;
      const Hypervector key = bind(current.node_vectors_[e.u], current.probe_target(e.v));
      acc.add(bind(key, current.weight_vectors_[e.weight]));
      acc.subtract(bind(key, current.weight_vectors_[w_pred]));
      ++corrections;
    }
    for (const auto& [u, v] : non_edges) {
      const EdgeScore s = current.score(u, v);
      if (!s.exists) continue;
      const Hypervector key = bind(current.node_vectors_[u], current.probe_target(v));
      acc.subtract(bind(key, current.weight_vectors_[s.weight_index]));
      ++corrections;
    }
    result.rounds_run = round;
    if (corrections == 0) break;
    current.graph_accumulator_ = std::move(acc);
    current.refresh_graph_vector();
    current.calibrate();

    const double weight = current.weight_accuracy();
    const double existence = current.existence_accuracy();
    result.weight_accuracy.push_back(weight);
    if (weight > best_weight || (weight == best_weight && existence > best_existence)) {
      best_weight = weight;
      best_existence = existence;
      result.model = current;
      result.best_round = round;
    }
  }
  return result;
}

std::vector<Edge> parse_edge_list(std::istream& in, const std::string& source) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, '\t');) cells.push_back(cell);
    if (cells.size() < 2 || cells.size() > 3) {
      throw Error(ErrorCode::kParse, source + ":" + std::to_string(line_no) +
                                         ": expected source, target, and weight columns, found " +
                                         std::to_string(cells.size()));
    }
    if (edges.empty() && line_no == 1 && cells[0] == "source" && cells[1] == "target") continue;
    edges.push_back({cells[0], cells[1], cells.size() == 3 ? cells[2] : "1"});
  }
  if (edges.empty()) throw Error(ErrorCode::kEmptyInput, source + ": no edges");
  return edges;
}

std::vector<Edge> load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return parse_edge_list(in, path.string());
}

}  // namespace hdc
