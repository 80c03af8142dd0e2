#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "../support/synthetic.hpp"
#include "doctest.h"
#include "hdc/error.hpp"
#include "hdc/graph.hpp"

using namespace hdc;
using namespace hdc::testing;

namespace {

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an hdc::Error");
  return Error(ErrorCode::kInvalidArgument, "");
}

GraphConfig cfg(std::size_t dim, bool directed, std::uint64_t seed) { return {dim, directed, seed}; }

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Nodes without edges never enter the model; they score as absent.
EdgeScore query(const GraphModel& g, const std::string& u, const std::string& v) {
  const auto& names = g.nodes();
  if (std::find(names.begin(), names.end(), u) == names.end() ||
      std::find(names.begin(), names.end(), v) == names.end()) {
    return {false, 0.0, 0};
  }
  return g.edge_exists(u, v);
}

double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (const double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST_CASE("single undirected edge follows the construction") {
  const std::vector<Edge> edges{{"a", "b", "1"}};
  const auto g = GraphModel::fit(edges, cfg(2048, false, 1));
  const std::size_t a = g.node_index("a");
  const std::size_t b = g.node_index("b");
  const Hypervector& ha = g.node_vectors()[a];
  const Hypervector& hb = g.node_vectors()[b];
  const Hypervector& w = g.weight_vectors()[0];
  const Hypervector ma = bind(w, hb);
  const Hypervector mb = bind(w, ha);
  CHECK(normalize(g.memories()[a], 0) == ma);
  CHECK(normalize(g.memories()[b], 0) == mb);
  CHECK(g.graph_accumulator() == bundle({bind(ha, ma), bind(hb, mb)}));
  CHECK(g.edge_exists("a", "b").exists);
  CHECK(g.edge_exists("b", "a").exists);
  CHECK(g.predict("a", "b") == "1");
}

TEST_CASE("listing an edge twice leaves normalized memories unchanged") {
  const std::vector<Edge> once{{"a", "b", "x"}, {"b", "c", "y"}, {"c", "a", "x"}};
  std::vector<Edge> twice = once;
  twice.push_back(once[1]);
  const auto g1 = GraphModel::fit(once, cfg(1000, true, 2));
  const auto g2 = GraphModel::fit(twice, cfg(1000, true, 2));
  for (std::size_t v = 0; v < g1.nodes().size(); ++v) {
    if (g1.memories()[v].is_zero()) continue;
    CHECK(normalize(g1.memories()[v], 5) == normalize(g2.memories()[v], 5));
  }
  CHECK(g1.graph_vector() == g2.graph_vector());
}

TEST_CASE("training edges score well above non-edges") {
  const RandomGraph rg = random_graph(20, 0.2, false, {"1"}, 3);
  const auto g = GraphModel::fit(rg.edges, cfg(kDefaultDim, false, 4));
  std::vector<double> edge_scores, non_scores;
  for (std::size_t u = 0; u < rg.nodes; ++u) {
    for (std::size_t v = 0; v < rg.nodes; ++v) {
      if (u == v) continue;
      const double s = query(g, node_name(u), node_name(v)).score;
      (rg.adjacency[u][v] ? edge_scores : non_scores).push_back(s);
    }
  }
  CHECK(mean(edge_scores) - mean(non_scores) >= 5 * stddev(non_scores));
}

TEST_CASE("edge existence over all ordered pairs") {
  const RandomGraph rg = random_graph(20, 0.2, false, {"1"}, 5);
  const auto g = GraphModel::fit(rg.edges, cfg(kDefaultDim, false, 6));
  std::size_t hits = 0, total = 0;
  for (std::size_t u = 0; u < rg.nodes; ++u) {
    for (std::size_t v = 0; v < rg.nodes; ++v) {
      if (u == v) continue;
      hits += query(g, node_name(u), node_name(v)).exists == rg.adjacency[u][v] ? 1U : 0U;
      ++total;
    }
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(total) >= 0.95);
}

TEST_CASE("two weight classes on a small graph are recovered") {
  std::vector<Edge> edges;
  Rng rng(7);
  for (std::size_t i = 0; i < 10; ++i) {
    edges.push_back({node_name(i), node_name((i * 3 + 1) % 12), rng.coin() ? "heavy" : "light"});
  }
  const auto g = GraphModel::fit(edges, cfg(kDefaultDim, true, 8));
  CHECK(g.weight_accuracy() >= 0.9);
  std::size_t hits = 0;
  for (const auto& e : edges) hits += g.predict(e.source, e.target) == e.weight ? 1U : 0U;
  CHECK(hits >= 9);
}

TEST_CASE("one-class alphabet always predicts that class") {
  const RandomGraph rg = random_graph(8, 0.5, true, {"only"}, 9);
  const auto g = GraphModel::fit(rg.edges, cfg(1000, true, 10));
  for (std::size_t u = 0; u < 8; ++u) {
    for (std::size_t v = 0; v < 8; ++v) {
      if (u != v) CHECK(g.predict(node_name(u), node_name(v)) == "only");
    }
  }
}

TEST_CASE("declared alphabet fixes class order") {
  const std::vector<Edge> edges{{"a", "b", "lo"}};
  const auto g = GraphModel::fit(edges, cfg(1000, false, 11), {"zz", "lo"});
  CHECK(g.weights() == std::vector<std::string>{"zz", "lo"});
  CHECK(g.predict("a", "b") == "lo");
  CHECK(error_of([&] { GraphModel::fit(edges, cfg(1000, false, 11), {"zz"}); }).code() ==
        ErrorCode::kInvalidInput);
}

TEST_CASE("mitigation leaves an error-free model unchanged") {
  const std::vector<Edge> edges{{"a", "b", "p"}, {"c", "d", "q"}};
  const auto g = GraphModel::fit(edges, cfg(kDefaultDim, false, 12));
  REQUIRE(g.weight_accuracy() == 1.0);
  const auto r = g.error_mitigation(1);
  CHECK(r.model.graph_accumulator() == g.graph_accumulator());
  CHECK(r.best_round == 0);
  const auto none = g.error_mitigation(0);
  CHECK(none.rounds_run == 0);
  CHECK(none.model.graph_vector() == g.graph_vector());
  CHECK(none.weight_accuracy.size() == 1);
}

TEST_CASE("mitigation on a dense graph never lowers weight accuracy") {
  const RandomGraph rg = random_graph(30, 0.4, false, {"a", "b"}, 13);
  for (const std::size_t dim : {std::size_t{1000}, kDefaultDim}) {
    CAPTURE(dim);
    const auto g = GraphModel::fit(rg.edges, cfg(dim, false, 14));
    const auto r = g.error_mitigation(10);
    CHECK(r.rounds_run <= 10);
    CHECK(r.model.weight_accuracy() >= g.weight_accuracy());
    CHECK(r.weight_accuracy.front() == g.weight_accuracy());
    CHECK(r.model.weight_accuracy() == r.weight_accuracy[r.best_round]);
  }
}

TEST_CASE("directed edges are asymmetric and undirected edges symmetric") {
  const std::vector<Edge> edges{{"a", "b", "1"}};
  const auto directed = GraphModel::fit(edges, cfg(kDefaultDim, true, 15));
  CHECK(directed.edge_exists("a", "b").score > directed.edge_exists("b", "a").score);
  CHECK(directed.edge_exists("a", "b").exists);
  const auto undirected = GraphModel::fit(edges, cfg(kDefaultDim, false, 15));
  CHECK(undirected.edge_exists("a", "b").score == undirected.edge_exists("b", "a").score);
}

TEST_CASE("renaming nodes leaves every score unchanged") {
  const RandomGraph rg = random_graph(12, 0.3, true, {"x", "y"}, 16);
  std::vector<Edge> renamed;
  auto rename = [](const std::string& n) { return "node_" + n + "_renamed"; };
  for (const auto& e : rg.edges) renamed.push_back({rename(e.source), rename(e.target), e.weight});
  const auto g1 = GraphModel::fit(rg.edges, cfg(2000, true, 17));
  const auto g2 = GraphModel::fit(renamed, cfg(2000, true, 17));
  for (const auto& u : g1.nodes()) {
    for (const auto& v : g1.nodes()) {
      if (u == v) continue;
      const EdgeScore a = g1.edge_exists(u, v);
      const EdgeScore b = g2.edge_exists(rename(u), rename(v));
      CHECK(a.score == b.score);
      CHECK(a.weight_index == b.weight_index);
    }
  }
  CHECK(g1.threshold() == g2.threshold());
}

TEST_CASE("fit is deterministic in its seed") {
  const RandomGraph rg = random_graph(15, 0.3, false, {"x", "y"}, 18);
  const auto a = GraphModel::fit(rg.edges, cfg(1000, false, 19));
  const auto b = GraphModel::fit(rg.edges, cfg(1000, false, 19));
  CHECK(a.graph_vector() == b.graph_vector());
  CHECK(a.threshold() == b.threshold());
  CHECK(a.non_edge_sample() == b.non_edge_sample());
}

TEST_CASE("training edge scores stay above threshold while E <= D/100") {
  for (const std::size_t e_count : {10U, 25U, 50U, 100U}) {
    CAPTURE(e_count);
    // Sparse graph with exactly e_count distinct edges over 200 nodes.
    std::vector<Edge> edges;
    Rng rng(20 + e_count);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    while (edges.size() < e_count) {
      const auto u = static_cast<std::size_t>(rng.below(200));
      const auto v = static_cast<std::size_t>(rng.below(200));
      if (u == v || !seen.insert({std::min(u, v), std::max(u, v)}).second) continue;
      edges.push_back({node_name(u), node_name(v), "1"});
    }
    const auto g = GraphModel::fit(edges, cfg(kDefaultDim, false, 21));
    std::vector<double> scores;
    std::size_t above = 0;
    for (const auto& e : edges) {
      const EdgeScore s = g.edge_exists(e.source, e.target);
      scores.push_back(s.score);
      above += s.exists ? 1U : 0U;
    }
    MESSAGE("E=" << e_count << " mean edge score " << mean(scores) << ", threshold "
                  << g.threshold() << ", accepted " << above << "/" << e_count);
    CHECK(mean(scores) > g.threshold());
    // Individual edges can dip below the midpoint threshold as crosstalk grows.
    CHECK(static_cast<double>(above) >= 0.9 * static_cast<double>(e_count));
  }
}

TEST_CASE("graph errors") {
  const std::vector<Edge> edges{{"a", "b", "1"}};
  const auto g = GraphModel::fit(edges, cfg(500, false, 22));
  const Error unknown = error_of([&] { g.edge_exists("a", "zebra"); });
  CHECK(unknown.code() == ErrorCode::kUnknownNode);
  CHECK(std::string(unknown.what()).find("zebra") != std::string::npos);
  CHECK(error_of([&] { g.edge_exists("a", "a"); }).code() == ErrorCode::kSelfLoop);
  CHECK(error_of([] { GraphModel::fit(std::vector<Edge>{}, GraphConfig{}); }).code() ==
        ErrorCode::kEmptyInput);
  CHECK(error_of([] { GraphModel::fit(std::vector<Edge>{{"a", "a", "1"}}, GraphConfig{}); }).code() ==
        ErrorCode::kSelfLoop);
}

TEST_CASE("edge list parsing") {
  std::istringstream in("source\ttarget\tweight\n# comment\nA\tB\thigh\n\nB\tC\n");
  const auto edges = parse_edge_list(in, "mem");
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == Edge{"A", "B", "high"});
  CHECK(edges[1] == Edge{"B", "C", "1"});

  std::istringstream bad("A\tB\tw\nA\n");
  const Error e = error_of([&] { parse_edge_list(bad, "mem"); });
  CHECK(e.code() == ErrorCode::kParse);
  CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
  std::istringstream empty("# nothing\n");
  CHECK(error_of([&] { parse_edge_list(empty); }).code() == ErrorCode::kEmptyInput);
  CHECK(error_of([] { load_edge_list("/nonexistent/edges.tsv"); }).code() == ErrorCode::kIo);
}
