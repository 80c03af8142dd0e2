// hdc: command-line front end for the classification, clustering, regression,
// and graph models.
//
// Every run prints its resolved configuration as a "# config" line on stdout
// before any result. Errors go to stderr as one line,
//   error<TAB><code><TAB><message>
// with exit status 2.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdc/classification.hpp"
#include "hdc/clustering.hpp"
#include "hdc/dataset.hpp"
#include "hdc/error.hpp"
#include "hdc/graph.hpp"
#include "hdc/kernels.hpp"
#include "hdc/model_io.hpp"
#include "hdc/quantum.hpp"
#include "hdc/regression.hpp"

namespace {

using namespace hdc;

// Ordered key=value pairs for the "# config" line.
class ConfigLine {
 public:
  explicit ConfigLine(std::string command) { add("command", std::move(command)); }

  template <typename T>
  ConfigLine& add(const std::string& key, const T& value) {
    std::ostringstream os;
    os << value;
    items_.emplace_back(key, os.str());
    return *this;
  }
  ConfigLine& flag(const std::string& key, bool value) { return add(key, value ? "true" : "false"); }

  void print() const {
    std::printf("# config");
    for (const auto& [k, v] : items_) std::printf(" %s=%s", k.c_str(), v.c_str());
    std::printf(" kernels=%s\n", kernels::active().name);
  }

 private:
  std::vector<std::pair<std::string, std::string>> items_;
};

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

template <typename T>
std::string join_numbers(const std::vector<T>& items) {
  std::vector<std::string> parts;
  for (const T& x : items) parts.push_back(std::to_string(x));
  return join(parts);
}

template <typename T>
const T& expect(const AnyModel& m, ModelKind want) {
  if (const T* p = std::get_if<T>(&m)) return *p;
  throw Error(ErrorCode::kInvalidInput, "model file holds a " + std::string(to_string(kind_of(m))) +
                                            " model, expected " + std::string(to_string(want)));
}

// ---- classify -------------------------------------------------------------

struct ClassifyOptions {
  std::string data;
  std::string model;
  std::size_t dim = kDefaultDim;
  std::size_t levels = 10;
  std::size_t retrain = 0;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  bool per_feature = false;
  bool quantum = false;
  std::size_t shots = 0;
  bool unlabeled = false;
  std::string direction = "backward";
  double threshold = 0.0;
  std::vector<std::size_t> grid_dim;
  std::vector<std::size_t> grid_levels;
  std::vector<std::size_t> grid_retrain;

  ClassifierConfig config() const { return {dim, levels, retrain, seed, per_feature}; }
};

ConfigLine& add_classifier(ConfigLine& line, const ClassifierConfig& c) {
  return line.add("dim", c.dim)
      .add("levels", c.levels)
      .add("retrain", c.retrain_epochs)
      .add("seed", c.seed)
      .flag("per_feature_ranges", c.per_feature_ranges);
}

void classify_fit(const ClassifyOptions& o) {
  ConfigLine line("classify.fit");
  line.add("data", o.data).add("model", o.model);
  add_classifier(line, o.config()).flag("quantum", o.quantum).print();
  const Dataset data = load_dataset(o.data, DatasetKind::kClassification);
  if (o.quantum) {
    const auto m = QuantumClassificationModel::fit(data, o.config());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      hits += m.predict(data.matrix[i]).label == data.labels[i] ? 1U : 0U;
    }
    for (std::size_t c = 0; c < m.classes().size(); ++c) {
      std::printf("class\t%s\tsuccess_probability\t%.6f\n", m.classes()[c].c_str(),
                  m.success_probabilities()[c]);
    }
    std::printf("training_accuracy\t%.6f\n",
                static_cast<double>(hits) / static_cast<double>(data.rows()));
    save_model(m, o.model);
    return;
  }
  const auto m = ClassificationModel::fit(data, o.config());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    hits += m.predict(data.matrix[i]).label == data.labels[i] ? 1U : 0U;
  }
  std::printf("classes\t%s\n", join(m.classes()).c_str());
  std::printf("training_accuracy\t%.6f\n",
              static_cast<double>(hits) / static_cast<double>(data.rows()));
  save_model(m, o.model);
}

void classify_predict(const ClassifyOptions& o) {
  const AnyModel any = load_model(o.model);
  const bool quantum = std::holds_alternative<QuantumClassificationModel>(any);
  const ClassifierConfig cfg =
      quantum ? expect<QuantumClassificationModel>(any, ModelKind::kQuantumClassification).config()
              : expect<ClassificationModel>(any, ModelKind::kClassification).config();
  ConfigLine line("classify.predict");
  line.add("data", o.data).add("model", o.model);
  add_classifier(line, cfg).flag("quantum", quantum).add("shots", o.shots).flag("unlabeled", o.unlabeled);
  line.print();
  if (!quantum && o.shots > 0) {
    throw Error(ErrorCode::kInvalidArgument, "--shots applies to quantum models only");
  }
  const Dataset data =
      load_dataset(o.data, o.unlabeled ? DatasetKind::kUnlabeled : DatasetKind::kClassification);
  std::vector<std::string> classes;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    Prediction p;
    if (quantum) {
      const auto& m = std::get<QuantumClassificationModel>(any);
      // Each row draws from its own stream so results do not depend on row order.
      p = m.predict(data.matrix[i], o.shots, derive_seed(m.default_shot_seed(), i));
      classes = m.classes();
    } else {
      const auto& m = std::get<ClassificationModel>(any);
      p = m.predict(data.matrix[i]);
      classes = m.classes();
    }
    if (i == 0) std::printf("sample\tpredicted\t%s\n", join(classes, "\t").c_str());
    std::printf("%s\t%s", data.sample_ids[i].c_str(), p.label.c_str());
    for (double s : p.similarities) std::printf("\t%.6f", s);
    std::printf("\n");
    if (!o.unlabeled) hits += p.label == data.labels[i] ? 1U : 0U;
  }
  if (!o.unlabeled) {
    std::printf("# accuracy\t%.6f\n", static_cast<double>(hits) / static_cast<double>(data.rows()));
  }
}

void classify_cv(const ClassifyOptions& o) {
  ConfigLine line("classify.cv");
  line.add("data", o.data).add("folds", o.folds);
  add_classifier(line, o.config()).print();
  const Dataset data = load_dataset(o.data, DatasetKind::kClassification);
  const std::vector<double> scores = cross_validate(data, o.config(), o.folds, o.seed);
  std::printf("fold\taccuracy\n");
  for (std::size_t f = 0; f < scores.size(); ++f) std::printf("%zu\t%.6f\n", f, scores[f]);
  std::printf("mean\t%.6f\n", mean_of(scores));
}

void classify_select(const ClassifyOptions& o) {
  if (o.direction != "backward" && o.direction != "forward") {
    throw Error(ErrorCode::kInvalidArgument, "--direction must be backward or forward");
  }
  ConfigLine line("classify.select");
  line.add("data", o.data).add("direction", o.direction).add("threshold", o.threshold).add("folds", o.folds);
  add_classifier(line, o.config()).print();
  const Dataset data = load_dataset(o.data, DatasetKind::kClassification);
  SelectionOptions opts;
  opts.direction = o.direction == "backward" ? SelectionDirection::kBackward
                                             : SelectionDirection::kForward;
  opts.threshold = o.threshold;
  opts.folds = o.folds;
  opts.seed = o.seed;
  const SelectionReport r = stepwise_feature_selection(data, o.config(), opts);
  std::printf("round\tscore\tsubset\n");
  for (std::size_t i = 0; i < r.rounds.size(); ++i) {
    std::printf("%zu\t%.6f\t%s\n", i, r.rounds[i].score, join(r.rounds[i].subset).c_str());
  }
  std::printf("feature\timportance\n");
  for (std::size_t f = 0; f < r.feature_names.size(); ++f) {
    std::printf("%s\t%.6f\n", r.feature_names[f].c_str(), r.importance[f]);
  }
  std::printf("ranked\t%s\n", join(r.ranked_features).c_str());
  std::printf("best_subset\t%s\n", join(r.best_subset).c_str());
  std::printf("best_score\t%.6f\n", r.best_score);
}

void classify_tune(const ClassifyOptions& o) {
  TuneGrid grid;
  grid.dims = o.grid_dim.empty() ? std::vector<std::size_t>{o.dim} : o.grid_dim;
  grid.levels = o.grid_levels.empty() ? std::vector<std::size_t>{o.levels} : o.grid_levels;
  grid.retrain_epochs = o.grid_retrain.empty() ? std::vector<std::size_t>{o.retrain} : o.grid_retrain;
  ConfigLine line("classify.tune");
  line.add("data", o.data)
      .add("grid_dim", join_numbers(grid.dims))
      .add("grid_levels", join_numbers(grid.levels))
      .add("grid_retrain", join_numbers(grid.retrain_epochs))
      .add("folds", o.folds)
      .add("seed", o.seed)
      .flag("per_feature_ranges", o.per_feature)
      .print();
  const Dataset data = load_dataset(o.data, DatasetKind::kClassification);
  const TuneResult r = auto_tune(data, o.config(), grid, o.folds, o.seed);
  std::printf("dim\tlevels\tretrain\tmean_accuracy\n");
  for (const TuneCell& cell : r.table) {
    std::printf("%zu\t%zu\t%zu\t%.6f\n", cell.dim, cell.levels, cell.retrain_epochs, cell.mean);
  }
  std::printf("best\t%zu\t%zu\t%zu\t%.6f\n", r.best.dim, r.best.levels, r.best.retrain_epochs,
              r.best_score);
}

// ---- cluster --------------------------------------------------------------

struct ClusterOptions {
  std::string data;
  std::string model;
  std::size_t k = 2;
  std::size_t max_iter = kDefaultMaxIterations;
  std::size_t dim = kDefaultDim;
  std::size_t levels = 10;
  std::uint64_t seed = 0;
  bool labeled = false;
};

void print_ari(const Dataset& data, const std::vector<std::size_t>& clusters) {
  std::map<std::string, std::size_t> ids;
  std::vector<std::size_t> truth;
  for (const auto& l : data.labels) truth.push_back(ids.emplace(l, ids.size()).first->second);
  std::printf("# adjusted_rand_index\t%.6f\n", adjusted_rand_index(clusters, truth));
}

void cluster_fit(const ClusterOptions& o) {
  ConfigLine("cluster.fit")
      .add("data", o.data)
      .add("model", o.model)
      .add("k", o.k)
      .add("max_iter", o.max_iter)
      .add("dim", o.dim)
      .add("levels", o.levels)
      .add("seed", o.seed)
      .flag("labeled", o.labeled)
      .print();
  const Dataset data =
      load_dataset(o.data, o.labeled ? DatasetKind::kClassification : DatasetKind::kUnlabeled);
  FeatureEncoder enc = FeatureEncoder::fit(data.matrix, data.feature_names, {o.dim, o.levels, false, o.seed});
  const std::vector<Hypervector> points = enc.encode_rows(data.matrix);
  ClusteringArtifact art{std::move(enc), ClusteringModel::fit(points, o.k, o.max_iter, o.seed)};
  std::printf("sample\tcluster\n");
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::printf("%s\t%zu\n", data.sample_ids[i].c_str(), art.model.assignments()[i]);
  }
  std::printf("# iterations\t%zu\n# converged\t%s\n", art.model.iterations_run(),
              art.model.converged() ? "true" : "false");
  if (o.labeled) print_ari(data, art.model.assignments());
  save_model(art, o.model);
}

void cluster_predict(const ClusterOptions& o) {
  const AnyModel any = load_model(o.model);
  const auto& art = expect<ClusteringArtifact>(any, ModelKind::kClustering);
  ConfigLine("cluster.predict")
      .add("data", o.data)
      .add("model", o.model)
      .add("k", art.model.k())
      .add("dim", art.model.dim())
      .add("seed", art.model.seed())
      .flag("labeled", o.labeled)
      .print();
  const Dataset data =
      load_dataset(o.data, o.labeled ? DatasetKind::kClassification : DatasetKind::kUnlabeled);
  std::vector<std::size_t> clusters;
  std::printf("sample\tcluster\n");
  for (std::size_t i = 0; i < data.rows(); ++i) {
    clusters.push_back(art.model.predict(art.encoder.encode(data.matrix[i])));
    std::printf("%s\t%zu\n", data.sample_ids[i].c_str(), clusters.back());
  }
  if (o.labeled) print_ari(data, clusters);
}

// ---- regress --------------------------------------------------------------

struct RegressOptions {
  std::string data;
  std::string model;
  RegressionConfig config;
  bool quantized = false;
  bool unlabeled = false;
};

ConfigLine& add_regression(ConfigLine& line, const RegressionConfig& c) {
  return line.add("dim", c.dim)
      .add("k", c.k)
      .add("lr", c.learning_rate)
      .add("epochs", c.epochs)
      .add("seed", c.seed);
}

void print_fit_quality(const std::vector<double>& truth, const std::vector<double>& pred) {
  double mean = 0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  std::printf("# rmse\t%.6f\n", std::sqrt(ss_res / static_cast<double>(truth.size())));
  if (ss_tot > 0) std::printf("# r2\t%.6f\n", 1.0 - ss_res / ss_tot);
}

void regress_fit(RegressOptions o) {
  o.config.quantized_prediction = o.quantized;
  ConfigLine line("regress.fit");
  line.add("data", o.data).add("model", o.model);
  add_regression(line, o.config).flag("quantized", o.quantized).print();
  if (o.config.learning_rate == 0.0) {
    std::fprintf(stderr,
                 "warning\tzero_learning_rate\t--lr 0 trains nothing; the model predicts the "
                 "training-target mean\n");
  }
  const Dataset data = load_dataset(o.data, DatasetKind::kRegression);
  const RegressionModel m = RegressionModel::fit(data.matrix, data.targets, o.config);
  std::vector<double> pred;
  for (const auto& row : data.matrix) pred.push_back(m.predict(row));
  std::printf("# training_rows\t%zu\n", data.rows());
  print_fit_quality(data.targets, pred);
  save_model(m, o.model);
}

void regress_predict(const RegressOptions& o, bool quantized_set) {
  const AnyModel any = load_model(o.model);
  RegressionModel m = expect<RegressionModel>(any, ModelKind::kRegression);
  if (quantized_set) m.set_quantized_prediction(o.quantized);
  ConfigLine line("regress.predict");
  line.add("data", o.data).add("model", o.model);
  add_regression(line, m.config())
      .flag("quantized", m.config().quantized_prediction)
      .flag("unlabeled", o.unlabeled)
      .print();
  const Dataset data =
      load_dataset(o.data, o.unlabeled ? DatasetKind::kUnlabeled : DatasetKind::kRegression);
  std::vector<double> pred;
  std::printf("sample\tprediction\n");
  for (std::size_t i = 0; i < data.rows(); ++i) {
    pred.push_back(m.predict(data.matrix[i]));
    std::printf("%s\t%.6f\n", data.sample_ids[i].c_str(), pred.back());
  }
  if (!o.unlabeled) print_fit_quality(data.targets, pred);
}

// ---- graph ----------------------------------------------------------------

struct GraphOptions {
  std::string edges;
  std::string model;
  std::string output;
  std::string source;
  std::string target;
  GraphConfig config;
  std::size_t rounds = 10;
};

ConfigLine& add_graph(ConfigLine& line, const GraphConfig& c) {
  return line.add("dim", c.dim).flag("directed", c.directed).add("seed", c.seed);
}

void graph_build(const GraphOptions& o) {
  ConfigLine line("graph.build");
  line.add("edges", o.edges).add("model", o.model);
  add_graph(line, o.config).print();
  const GraphModel m = GraphModel::fit(load_edge_list(o.edges), o.config);
  std::printf("nodes\t%zu\nedges\t%zu\nweights\t%s\nthreshold\t%.6f\n", m.nodes().size(),
              m.edges().size(), join(m.weights()).c_str(), m.threshold());
  std::printf("weight_accuracy\t%.6f\nexistence_accuracy\t%.6f\n", m.weight_accuracy(),
              m.existence_accuracy());
  save_model(m, o.model);
}

void graph_query(const GraphOptions& o, bool weight) {
  const AnyModel any = load_model(o.model);
  const auto& m = expect<GraphModel>(any, ModelKind::kGraph);
  ConfigLine line(weight ? "graph.predict" : "graph.query");
  line.add("model", o.model).add("source", o.source).add("target", o.target);
  add_graph(line, m.config()).print();
  const EdgeScore s = m.edge_exists(o.source, o.target);
  if (weight) {
    std::printf("source\ttarget\tweight\tscore\n%s\t%s\t%s\t%.6f\n", o.source.c_str(),
                o.target.c_str(), m.weights()[s.weight_index].c_str(), s.score);
  } else {
    std::printf("source\ttarget\texists\tscore\tthreshold\n%s\t%s\t%s\t%.6f\t%.6f\n",
                o.source.c_str(), o.target.c_str(), s.exists ? "true" : "false", s.score,
                m.threshold());
  }
}

void graph_mitigate(const GraphOptions& o) {
  const AnyModel any = load_model(o.model);
  const auto& m = expect<GraphModel>(any, ModelKind::kGraph);
  const std::string out = o.output.empty() ? o.model : o.output;
  ConfigLine line("graph.mitigate");
  line.add("model", o.model).add("output", out).add("rounds", o.rounds);
  add_graph(line, m.config()).print();
  const MitigationResult r = m.error_mitigation(o.rounds);
  std::printf("round\tweight_accuracy\n");
  for (std::size_t i = 0; i < r.weight_accuracy.size(); ++i) {
    std::printf("%zu\t%.6f\n", i, r.weight_accuracy[i]);
  }
  std::printf("rounds_run\t%zu\nbest_round\t%zu\nexistence_accuracy\t%.6f\n", r.rounds_run,
              r.best_round, r.model.existence_accuracy());
  save_model(r.model, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperdimensional computing models"};
  app.require_subcommand(1);

  ClassifyOptions co;
  auto* classify = app.add_subcommand("classify", "Supervised classification");
  classify->require_subcommand(1);
  auto add_common_classify = [&](CLI::App* sub) {
    sub->add_option("--data", co.data, "Labelled dataset (tab or comma delimited)")->required();
    sub->add_option("--dim", co.dim, "Hypervector dimension")->capture_default_str();
    sub->add_option("--levels", co.levels, "Level vectors per feature range")->capture_default_str();
    sub->add_option("--retrain", co.retrain, "Retraining epochs")->capture_default_str();
    sub->add_option("--seed", co.seed, "Random seed")->capture_default_str();
    sub->add_flag("--per-feature-ranges", co.per_feature, "Quantize each feature over its own range");
  };
  auto* c_fit = classify->add_subcommand("fit", "Fit and save a classifier");
  add_common_classify(c_fit);
  c_fit->add_option("--model", co.model, "Output model file")->required();
  c_fit->add_flag("--quantum", co.quantum, "Fit the statevector-emulated quantum classifier");
  auto* c_predict = classify->add_subcommand("predict", "Predict labels with a saved classifier");
  c_predict->add_option("--data", co.data, "Dataset to label")->required();
  c_predict->add_option("--model", co.model, "Model file")->required();
  c_predict->add_option("--shots", co.shots, "Hadamard-test shots for quantum models (0 = exact)")
      ->capture_default_str();
  c_predict->add_flag("--unlabeled", co.unlabeled, "The dataset has no label column");
  auto* c_cv = classify->add_subcommand("cv", "Stratified k-fold cross-validation");
  add_common_classify(c_cv);
  c_cv->add_option("--folds", co.folds, "Number of folds")->capture_default_str();
  auto* c_select = classify->add_subcommand("select", "Stepwise feature selection");
  add_common_classify(c_select);
  c_select->add_option("--folds", co.folds, "Number of folds")->capture_default_str();
  c_select->add_option("--direction", co.direction, "backward or forward")->capture_default_str();
  c_select->add_option("--threshold", co.threshold, "Tolerated score drop before stopping (inf to run to the end)")
      ->capture_default_str();
  auto* c_tune = classify->add_subcommand("tune", "Grid search over dimension, levels, and retraining");
  add_common_classify(c_tune);
  c_tune->add_option("--folds", co.folds, "Number of folds")->capture_default_str();
  c_tune->add_option("--grid-dim", co.grid_dim, "Dimensions to try")->delimiter(',');
  c_tune->add_option("--grid-levels", co.grid_levels, "Level counts to try")->delimiter(',');
  c_tune->add_option("--grid-retrain", co.grid_retrain, "Retraining epochs to try")->delimiter(',');

  ClusterOptions cl;
  auto* cluster = app.add_subcommand("cluster", "Hyperdimensional k-means");
  cluster->require_subcommand(1);
  auto* cl_fit = cluster->add_subcommand("fit", "Cluster a dataset and save the model");
  cl_fit->add_option("--data", cl.data, "Dataset (last column is features unless --labeled)")->required();
  cl_fit->add_option("--model", cl.model, "Output model file")->required();
  cl_fit->add_option("--k", cl.k, "Number of clusters")->capture_default_str();
  cl_fit->add_option("--max-iter", cl.max_iter, "Iteration limit")->capture_default_str();
  cl_fit->add_option("--dim", cl.dim, "Hypervector dimension")->capture_default_str();
  cl_fit->add_option("--levels", cl.levels, "Level vectors")->capture_default_str();
  cl_fit->add_option("--seed", cl.seed, "Random seed")->capture_default_str();
  cl_fit->add_flag("--labeled", cl.labeled, "Last column is a label; report the adjusted Rand index");
  auto* cl_predict = cluster->add_subcommand("predict", "Assign rows to saved clusters");
  cl_predict->add_option("--data", cl.data, "Dataset")->required();
  cl_predict->add_option("--model", cl.model, "Model file")->required();
  cl_predict->add_flag("--labeled", cl.labeled, "Last column is a label; report the adjusted Rand index");

  RegressOptions ro;
  auto* regress = app.add_subcommand("regress", "Multi-model regression");
  regress->require_subcommand(1);
  auto* r_fit = regress->add_subcommand("fit", "Fit and save a regressor");
  r_fit->add_option("--data", ro.data, "Dataset with a numeric last column")->required();
  r_fit->add_option("--model", ro.model, "Output model file")->required();
  r_fit->add_option("--dim", ro.config.dim, "Hypervector dimension")->capture_default_str();
  r_fit->add_option("--k", ro.config.k, "Number of cluster/regressor pairs")->capture_default_str();
  r_fit->add_option("--lr", ro.config.learning_rate, "Learning rate")->capture_default_str();
  r_fit->add_option("--epochs", ro.config.epochs, "Training epochs")->capture_default_str();
  r_fit->add_option("--seed", ro.config.seed, "Random seed")->capture_default_str();
  r_fit->add_flag("--quantized", ro.quantized, "Predict with binarized Hamming inference by default");
  auto* r_predict = regress->add_subcommand("predict", "Predict with a saved regressor");
  r_predict->add_option("--data", ro.data, "Dataset")->required();
  r_predict->add_option("--model", ro.model, "Model file")->required();
  auto* r_quantized = r_predict->add_flag("--quantized,!--full", ro.quantized,
                                          "Override the model's inference mode");
  r_predict->add_flag("--unlabeled", ro.unlabeled, "The dataset has no target column");

  GraphOptions go;
  auto* graph = app.add_subcommand("graph", "Graph memorization in one hypervector");
  graph->require_subcommand(1);
  auto* g_build = graph->add_subcommand("build", "Encode an edge list and save the model");
  g_build->add_option("--edges", go.edges, "Edge list: source<TAB>target<TAB>weight")->required();
  g_build->add_option("--model", go.model, "Output model file")->required();
  g_build->add_flag("--directed", go.config.directed, "Treat edges as directed");
  g_build->add_option("--dim", go.config.dim, "Hypervector dimension")->capture_default_str();
  g_build->add_option("--seed", go.config.seed, "Random seed")->capture_default_str();
  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("--model", go.model, "Model file")->required();
    sub->add_option("--source", go.source, "Source node")->required();
    sub->add_option("--target", go.target, "Target node")->required();
  };
  auto* g_query = graph->add_subcommand("query", "Test whether an edge exists");
  add_pair(g_query);
  auto* g_predict = graph->add_subcommand("predict", "Predict the weight class of an edge");
  add_pair(g_predict);
  auto* g_mitigate = graph->add_subcommand("mitigate", "Run corrective rounds on a saved model");
  g_mitigate->add_option("--model", go.model, "Model file")->required();
  g_mitigate->add_option("--output", go.output, "Output model file (default: overwrite --model)");
  g_mitigate->add_option("--rounds", go.rounds, "Maximum rounds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& ch : msg) ch = ch == '\n' ? ' ' : ch;
    std::fprintf(stderr, "error\tusage\t%s\n", msg.c_str());
    return 2;
  }

  try {
    if (c_fit->parsed()) classify_fit(co);
    else if (c_predict->parsed()) classify_predict(co);
    else if (c_cv->parsed()) classify_cv(co);
    else if (c_select->parsed()) classify_select(co);
    else if (c_tune->parsed()) classify_tune(co);
    else if (cl_fit->parsed()) cluster_fit(cl);
    else if (cl_predict->parsed()) cluster_predict(cl);
    else if (r_fit->parsed()) regress_fit(ro);
    else if (r_predict->parsed()) regress_predict(ro, r_quantized->count() > 0);
    else if (g_build->parsed()) graph_build(go);
    else if (g_query->parsed()) graph_query(go, false);
    else if (g_predict->parsed()) graph_query(go, true);
    else if (g_mitigate->parsed()) graph_mitigate(go);
  } catch (const Error& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "error\t%s\t%s\n", std::string(to_string(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "error\tinternal\t%s\n", e.what());
    return 2;
  }
  return 0;
}
