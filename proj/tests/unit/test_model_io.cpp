#include <cstring>
#include <filesystem>
#include <sstream>
#include <string>

#include "../support/synthetic.hpp"
#include "doctest.h"
#include "hdc/error.hpp"
#include "hdc/model_io.hpp"

using namespace hdc;
using namespace hdc::testing;

namespace {

ErrorCode load_error(const std::string& bytes) {
  std::stringstream in(bytes);
  try {
    load_model(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an hdc::Error");
  return ErrorCode::kInvalidArgument;
}

std::string bytes_of(const AnyModel& m) {
  std::stringstream out;
  save_model(m, out);
  return out.str();
}

AnyModel from_bytes(const std::string& bytes) {
  std::stringstream in(bytes);
  return load_model(in);
}

// Bitwise reflected CRC-32 (polynomial 0xEDB88320).
std::uint32_t crc32_ref(const std::string& s, std::size_t from, std::size_t to) {
  std::uint32_t crc = 0xFFFFFFFFU;
  for (std::size_t i = from; i < to; ++i) {
    crc ^= static_cast<std::uint8_t>(s[i]);
    for (int b = 0; b < 8; ++b) crc = (crc >> 1) ^ (0xEDB88320U & (0U - (crc & 1U)));
  }
  return ~crc;
}

std::uint64_t read_le(const std::string& s, std::size_t at, int width) {
  std::uint64_t v = 0;
  for (int i = width - 1; i >= 0; --i) v = v << 8 | static_cast<std::uint8_t>(s[at + i]);
  return v;
}

void write_le(std::string& s, std::size_t at, std::uint64_t v, int width) {
  for (int i = 0; i < width; ++i) s[at + i] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

// Rewrites the trailing checksum so that only the intended edit is visible.
void reseal(std::string& s) {
  write_le(s, s.size() - 4, crc32_ref(s, 8, s.size() - 4), 4);
}

ClassifierConfig small_classifier() {
  ClassifierConfig cfg;
  cfg.dim = 1024;
  cfg.seed = 5;
  cfg.retrain_epochs = 2;
  return cfg;
}

}  // namespace

TEST_CASE("header layout and checksum") {
  const Dataset d = two_blobs(20, 3, 3.0, 1);
  const std::string bytes = bytes_of(ClassificationModel::fit(d, small_classifier()));
  REQUIRE(bytes.size() > 28);
  CHECK(bytes.substr(0, 8) == "HDCMODEL");
  CHECK(read_le(bytes, 8, 4) == kModelFormatVersion);
  CHECK(read_le(bytes, 12, 4) == static_cast<std::uint32_t>(ModelKind::kClassification));
  CHECK(read_le(bytes, 16, 8) == bytes.size() - 28);
  CHECK(read_le(bytes, bytes.size() - 4, 4) == crc32_ref(bytes, 8, bytes.size() - 4));
}

TEST_CASE("model kinds have stable names and tags") {
  CHECK(to_string(ModelKind::kClassification) == "classification");
  CHECK(to_string(ModelKind::kQuantumClassification) == "quantum_classification");
  CHECK(to_string(ModelKind::kClustering) == "clustering");
  CHECK(to_string(ModelKind::kRegression) == "regression");
  CHECK(to_string(ModelKind::kGraph) == "graph");
}

TEST_CASE("every model kind round-trips with identical predictions") {
  const Dataset d = two_blobs(30, 4, 2.0, 2);

  SUBCASE("classification") {
    const auto m = ClassificationModel::fit(d, small_classifier());
    const AnyModel back = from_bytes(bytes_of(m));
    REQUIRE(kind_of(back) == ModelKind::kClassification);
    const auto& b = std::get<ClassificationModel>(back);
    CHECK(b.accumulators() == m.accumulators());
    CHECK(b.classes() == m.classes());
    for (const auto& row : d.matrix) CHECK(b.predict(row).similarities == m.predict(row).similarities);
  }
  SUBCASE("quantum classification") {
    const auto m = QuantumClassificationModel::fit(d, small_classifier());
    const AnyModel back = from_bytes(bytes_of(m));
    REQUIRE(kind_of(back) == ModelKind::kQuantumClassification);
    const auto& b = std::get<QuantumClassificationModel>(back);
    CHECK(b.success_probabilities() == m.success_probabilities());
    CHECK(b.default_shot_seed() == m.default_shot_seed());
    for (const auto& row : d.matrix) {
      CHECK(b.predict(row).similarities == m.predict(row).similarities);
      CHECK(b.predict(row, 300).similarities == m.predict(row, 300).similarities);
    }
  }
  SUBCASE("clustering") {
    const auto enc = FeatureEncoder::fit(d.matrix, d.feature_names, {1024, 10, true, 3});
    const ClusteringArtifact art{enc, ClusteringModel::fit(enc.encode_rows(d.matrix), 2, 20, 4)};
    const AnyModel back = from_bytes(bytes_of(art));
    REQUIRE(kind_of(back) == ModelKind::kClustering);
    const auto& b = std::get<ClusteringArtifact>(back);
    CHECK(b.model.centroids() == art.model.centroids());
    CHECK(b.model.assignments() == art.model.assignments());
    CHECK(b.model.tie_seed() == art.model.tie_seed());
    for (const auto& row : d.matrix) CHECK(b.encoder.encode(row) == enc.encode(row));
  }
  SUBCASE("regression") {
    const Dataset r = regression_1d(80, 6, [](double x) { return x * x - 0.5; });
    RegressionConfig cfg;
    cfg.dim = 512;
    cfg.k = 3;
    cfg.epochs = 3;
    cfg.seed = 7;
    cfg.quantized_prediction = true;
    const auto m = RegressionModel::fit(r.matrix, r.targets, cfg);
    const AnyModel back = from_bytes(bytes_of(m));
    REQUIRE(kind_of(back) == ModelKind::kRegression);
    const auto& b = std::get<RegressionModel>(back);
    CHECK(b.config().quantized_prediction);
    for (const auto& row : r.matrix) {
      const auto h = m.encoder().encode(row);
      CHECK(b.predict(row) == m.predict(row));
      CHECK(b.predict_encoded(h, false) == m.predict_encoded(h, false));
    }
  }
  SUBCASE("graph") {
    const RandomGraph g = random_graph(10, 0.4, false, {"p", "q", "r"}, 8);
    GraphConfig cfg;
    cfg.dim = 1024;
    cfg.seed = 9;
    const auto m = GraphModel::fit(g.edges, cfg);
    const AnyModel back = from_bytes(bytes_of(m));
    REQUIRE(kind_of(back) == ModelKind::kGraph);
    const auto& b = std::get<GraphModel>(back);
    CHECK(b.nodes() == m.nodes());
    CHECK(b.weights() == m.weights());
    CHECK(b.edges() == m.edges());
    CHECK(b.threshold() == m.threshold());
    CHECK(b.graph_accumulator() == m.graph_accumulator());
    for (const auto& u : m.nodes()) {
      for (const auto& v : m.nodes()) {
        if (u == v) continue;
        CHECK(b.edge_exists(u, v).score == m.edge_exists(u, v).score);
        CHECK(b.predict(u, v) == m.predict(u, v));
      }
    }
  }
}

TEST_CASE("saving is deterministic") {
  const Dataset d = two_blobs(20, 3, 3.0, 10);
  const auto m = ClassificationModel::fit(d, small_classifier());
  CHECK(bytes_of(m) == bytes_of(m));
  CHECK(bytes_of(from_bytes(bytes_of(m))) == bytes_of(m));
}

TEST_CASE("corrupted files are rejected with specific errors") {
  const Dataset d = two_blobs(20, 3, 3.0, 11);
  const std::string good = bytes_of(ClassificationModel::fit(d, small_classifier()));

  SUBCASE("bad magic") {
    std::string s = good;
    s[0] = 'X';
    CHECK(load_error(s) == ErrorCode::kParse);
    CHECK(load_error("") == ErrorCode::kParse);
    CHECK(load_error("HDC") == ErrorCode::kParse);
  }
  SUBCASE("future version, even with a bad checksum") {
    std::string s = good;
    write_le(s, 8, kModelFormatVersion + 1, 4);
    CHECK(load_error(s) == ErrorCode::kUnsupportedVersion);
    write_le(s, 8, 0, 4);
    CHECK(load_error(s) == ErrorCode::kUnsupportedVersion);
  }
  SUBCASE("flipped bytes anywhere after the header") {
    for (std::size_t at : {std::size_t{12}, std::size_t{30}, good.size() / 2, good.size() - 1}) {
      std::string s = good;
      s[at] = static_cast<char>(s[at] ^ 0x01);
      CAPTURE(at);
      CHECK(load_error(s) == ErrorCode::kChecksum);
    }
  }
  SUBCASE("truncation and trailing garbage") {
    for (std::size_t keep : {std::size_t{10}, std::size_t{20}, good.size() / 2, good.size() - 1}) {
      CAPTURE(keep);
      CHECK(load_error(good.substr(0, keep)) == ErrorCode::kChecksum);
    }
    CHECK(load_error(good + "x") == ErrorCode::kChecksum);
  }
  SUBCASE("unknown kind behind a valid checksum") {
    for (std::uint32_t kind : {0U, 6U, 99U}) {
      std::string s = good;
      write_le(s, 12, kind, 4);
      reseal(s);
      CAPTURE(kind);
      CHECK(load_error(s) == ErrorCode::kUnknownModelKind);
    }
  }
  SUBCASE("payload of the wrong kind behind a valid checksum") {
    std::string s = good;
    write_le(s, 12, static_cast<std::uint32_t>(ModelKind::kGraph), 4);
    reseal(s);
    CHECK(load_error(s) == ErrorCode::kParse);
  }
  SUBCASE("resealed payload with an extra byte") {
    std::string s = good.substr(0, good.size() - 4) + std::string(1, '\0') + "0000";
    write_le(s, 16, read_le(good, 16, 8) + 1, 8);
    reseal(s);
    CHECK(load_error(s) == ErrorCode::kParse);
  }
}

TEST_CASE("path-based save and load") {
  const auto dir = std::filesystem::temp_directory_path() / "hdc_model_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "model.hdc";
  const Dataset d = two_blobs(20, 3, 3.0, 12);
  const auto m = ClassificationModel::fit(d, small_classifier());
  save_model(m, path);
  const auto back = load_model(path);
  CHECK(std::get<ClassificationModel>(back).accumulators() == m.accumulators());
  std::filesystem::remove_all(dir);

  ErrorCode code = ErrorCode::kInvalidArgument;
  try {
    load_model(dir / "missing.hdc");
  } catch (const Error& e) {
    code = e.code();
  }
  CHECK(code == ErrorCode::kIo);
  code = ErrorCode::kInvalidArgument;
  try {
    save_model(m, dir / "no" / "such" / "dir.hdc");
  } catch (const Error& e) {
    code = e.code();
  }
  CHECK(code == ErrorCode::kIo);
}
