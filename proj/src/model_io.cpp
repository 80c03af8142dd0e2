#include "hdc/model_io.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "hdc/error.hpp"

namespace hdc {

namespace {

constexpr std::array<char, 8> kMagic = {'H', 'D', 'C', 'M', 'O', 'D', 'E', 'L'};
constexpr std::size_t kHeaderFields = 4 + 4 + 8;

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void size(std::size_t v) { u64(static_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    size(s.size());
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void strings(const std::vector<std::string>& v) {
    size(v.size());
    for (const auto& s : v) str(s);
  }
  void doubles(const std::vector<double>& v) {
    size(v.size());
    for (double d : v) f64(d);
  }
  void bools(const std::vector<bool>& v) {
    size(v.size());
    for (bool b : v) boolean(b);
  }
  void sizes(const std::vector<std::size_t>& v) {
    size(v.size());
    for (std::size_t s : v) size(s);
  }

  void hv(const Hypervector& h) {
    boolean(h.is_bipolar());
    str(h.name());
    boolean(h.seed().has_value());
    u64(h.seed().value_or(0));
    size(h.dim());
    for (std::int32_t x : h.values()) i32(x);
  }
  void hvs(const std::vector<Hypervector>& v) {
    size(v.size());
    for (const auto& h : v) hv(h);
  }

  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool boolean() {
    const std::uint8_t v = u8();
    if (v > 1) malformed();
    return v == 1;
  }
  std::size_t size() { return static_cast<std::size_t>(u64()); }
  // Element count; none can exceed the payload length.
  std::size_t count() {
    const std::uint64_t v = u64();
    if (v > bytes_.size()) malformed();
    return static_cast<std::size_t>(v);
  }
  std::string str() {
    const std::size_t n = count();
    const auto b = take(n);
    return {b.begin(), b.end()};
  }
  std::vector<std::string> strings() {
    std::vector<std::string> v(count());
    for (auto& s : v) s = str();
    return v;
  }
  std::vector<double> doubles() {
    std::vector<double> v(count());
    for (auto& d : v) d = f64();
    return v;
  }
  std::vector<bool> bools() {
    std::vector<bool> v(count());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = boolean();
    return v;
  }
  std::vector<std::size_t> sizes() {
    std::vector<std::size_t> v(count());
    for (auto& s : v) s = static_cast<std::size_t>(u64());
    return v;
  }

  Hypervector hv() {
    const bool bipolar = boolean();
    std::string name = str();
    const bool has_seed = boolean();
    const std::uint64_t seed = u64();
    std::vector<std::int32_t> values(count());
    for (auto& x : values) x = i32();
    Hypervector h = bipolar ? Hypervector::bipolar(std::move(values))
                            : Hypervector::accumulator(std::move(values));
    h.set_name(std::move(name));
    if (has_seed) h.set_seed(seed);
    return h;
  }
  std::vector<Hypervector> hvs() {
    std::vector<Hypervector> v(count());
    for (auto& h : v) h = hv();
    return v;
  }

  bool done() const noexcept { return pos_ == bytes_.size(); }

  [[noreturn]] static void malformed() {
    throw Error(ErrorCode::kParse, "malformed model payload");
  }

 private:
  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) malformed();
    const auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put(Writer& w, const ClassifierConfig& c) {
  w.size(c.dim);
  w.size(c.levels);
  w.size(c.retrain_epochs);
  w.u64(c.seed);
  w.boolean(c.per_feature_ranges);
}

ClassifierConfig get_classifier_config(Reader& r) {
  ClassifierConfig c;
  c.dim = r.size();
  c.levels = r.size();
  c.retrain_epochs = r.size();
  c.seed = r.u64();
  c.per_feature_ranges = r.boolean();
  return c;
}

void put(Writer& w, const FeatureEncoder& e) {
  w.strings(e.feature_names());
  w.hvs(e.feature_ids());
  w.hvs(e.level_encoding().levels());
  w.f64(e.level_encoding().range().min);
  w.f64(e.level_encoding().range().max);
  w.size(e.feature_ranges().size());
  for (const auto& r : e.feature_ranges()) {
    w.f64(r.min);
    w.f64(r.max);
  }
  w.u64(e.tie_seed());
}

FeatureEncoder get_encoder(Reader& r) {
  std::vector<std::string> names = r.strings();
  std::vector<Hypervector> ids = r.hvs();
  std::vector<Hypervector> levels = r.hvs();
  ValueRange range;
  range.min = r.f64();
  range.max = r.f64();
  std::vector<ValueRange> ranges(r.count());
  for (auto& fr : ranges) {
    fr.min = r.f64();
    fr.max = r.f64();
  }
  const std::uint64_t tie_seed = r.u64();
  return FeatureEncoder::from_parts(std::move(names), std::move(ids),
                                    LevelEncoding::from_parts(std::move(levels), range),
                                    std::move(ranges), tie_seed);
}

void put_payload(Writer& w, const ClassificationModel& m) {
  put(w, m.encoder());
  w.strings(m.classes());
  w.hvs(m.accumulators());
  put(w, m.config());
  w.bools(m.mask());
  w.u64(m.class_tie_seed());
}

ClassificationModel get_classification(Reader& r) {
  FeatureEncoder encoder = get_encoder(r);
  std::vector<std::string> classes = r.strings();
  std::vector<Hypervector> accumulators = r.hvs();
  const ClassifierConfig config = get_classifier_config(r);
  FeatureMask mask = r.bools();
  const std::uint64_t tie_seed = r.u64();
  return ClassificationModel::from_parts(std::move(encoder), std::move(classes),
                                         std::move(accumulators), config, std::move(mask),
                                         tie_seed);
}

void put_payload(Writer& w, const QuantumClassificationModel& m) {
  put(w, m.encoder());
  w.strings(m.classes());
  w.size(m.class_states().size());
  for (const PhaseState& s : m.class_states()) {
    w.size(s.n_qubits);
    w.size(s.original_dim);
    w.strings(s.provenance);
    w.size(s.amplitudes.size());
    for (const auto& a : s.amplitudes) {
      w.f64(a.real());
      w.f64(a.imag());
    }
  }
  w.doubles(m.success_probabilities());
  put(w, m.config());
  w.bools(m.mask());
}

QuantumClassificationModel get_quantum(Reader& r) {
  FeatureEncoder encoder = get_encoder(r);
  std::vector<std::string> classes = r.strings();
  std::vector<PhaseState> states(r.count());
  for (PhaseState& s : states) {
    s.n_qubits = r.size();
    s.original_dim = r.size();
    s.provenance = r.strings();
    s.amplitudes.resize(r.count());
    for (auto& a : s.amplitudes) {
      const double re = r.f64();
      const double im = r.f64();
      a = {re, im};
    }
  }
  std::vector<double> success = r.doubles();
  const ClassifierConfig config = get_classifier_config(r);
  FeatureMask mask = r.bools();
  return QuantumClassificationModel::from_parts(std::move(encoder), std::move(classes),
                                                std::move(states), std::move(success), config,
                                                std::move(mask));
}

void put_payload(Writer& w, const ClusteringArtifact& a) {
  put(w, a.encoder);
  const ClusteringModel& m = a.model;
  w.hvs(m.centroids());
  w.sizes(m.assignments());
  w.bools(m.reseeded());
  w.size(m.max_iterations());
  w.size(m.iterations_run());
  w.boolean(m.converged());
  w.u64(m.seed());
}

ClusteringArtifact get_clustering(Reader& r) {
  FeatureEncoder encoder = get_encoder(r);
  std::vector<Hypervector> centroids = r.hvs();
  std::vector<std::size_t> assignments = r.sizes();
  std::vector<bool> reseeded = r.bools();
  const std::size_t max_iterations = r.size();
  const std::size_t iterations_run = r.size();
  const bool converged = r.boolean();
  const std::uint64_t seed = r.u64();
  return {std::move(encoder),
          ClusteringModel::from_parts(std::move(centroids), std::move(assignments),
                                      std::move(reseeded), max_iterations, iterations_run,
                                      converged, seed)};
}

void put_payload(Writer& w, const RegressionModel& m) {
  const RegressionConfig& c = m.config();
  w.size(c.dim);
  w.size(c.k);
  w.f64(c.learning_rate);
  w.size(c.epochs);
  w.u64(c.seed);
  w.boolean(c.quantized_prediction);
  const RegressionEncoder& e = m.encoder();
  w.size(e.input_dim());
  w.doubles(e.bases());
  w.doubles(e.biases());
  w.u64(e.seed());
  w.size(m.clusters().size());
  for (const auto& v : m.clusters()) w.doubles(v);
  w.size(m.regressors().size());
  for (const auto& v : m.regressors()) w.doubles(v);
  w.f64(m.scaling().mean);
  w.f64(m.scaling().scale);
  w.boolean(m.has_binarized());
}

RegressionModel get_regression(Reader& r) {
  RegressionConfig c;
  c.dim = r.size();
  c.k = r.size();
  c.learning_rate = r.f64();
  c.epochs = r.size();
  c.seed = r.u64();
  c.quantized_prediction = r.boolean();
  const std::size_t input_dim = r.size();
  std::vector<double> bases = r.doubles();
  std::vector<double> biases = r.doubles();
  const std::uint64_t encoder_seed = r.u64();
  RegressionEncoder encoder = RegressionEncoder::from_parts(
      c.dim, input_dim, std::move(bases), std::move(biases), encoder_seed);
  std::vector<std::vector<double>> clusters(r.count());
  for (auto& v : clusters) v = r.doubles();
  std::vector<std::vector<double>> regressors(r.count());
  for (auto& v : regressors) v = r.doubles();
  TargetScaling scaling;
  scaling.mean = r.f64();
  scaling.scale = r.f64();
  const bool binarized = r.boolean();
  return RegressionModel::from_parts(std::move(encoder), std::move(clusters),
                                     std::move(regressors), scaling, c, binarized);
}

void put_payload(Writer& w, const GraphModel& m) {
  w.size(m.config().dim);
  w.boolean(m.config().directed);
  w.u64(m.config().seed);
  w.strings(m.nodes());
  w.hvs(m.node_vectors());
  w.strings(m.weights());
  w.hvs(m.weight_vectors());
  w.hvs(m.memories());
  w.hv(m.graph_accumulator());
  w.size(m.edges().size());
  for (const Edge& e : m.edges()) {
    w.str(e.source);
    w.str(e.target);
    w.str(e.weight);
  }
  w.f64(m.threshold());
}

GraphModel get_graph(Reader& r) {
  GraphModel::Parts p;
  p.config.dim = r.size();
  p.config.directed = r.boolean();
  p.config.seed = r.u64();
  p.nodes = r.strings();
  p.node_vectors = r.hvs();
  p.weights = r.strings();
  p.weight_vectors = r.hvs();
  p.memories = r.hvs();
  p.graph_accumulator = r.hv();
  p.edges.resize(r.count());
  for (Edge& e : p.edges) {
    e.source = r.str();
    e.target = r.str();
    e.weight = r.str();
  }
  p.threshold = r.f64();
  return GraphModel::from_parts(std::move(p));
}

std::uint32_t crc_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  constexpr std::size_t kChunk = std::size_t{1} << 30;
  for (std::size_t off = 0; off < bytes.size(); off += kChunk) {
    const std::size_t n = std::min(kChunk, bytes.size() - off);
    crc = crc32(crc, bytes.data() + off, static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint64_t le64(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(le32(p)) | static_cast<std::uint64_t>(le32(p + 4)) << 32;
}

[[noreturn]] void truncated() {
  throw Error(ErrorCode::kChecksum, "model file is truncated or corrupted");
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::kClassification:
      return "classification";
    case ModelKind::kQuantumClassification:
      return "quantum_classification";
    case ModelKind::kClustering:
      return "clustering";
    case ModelKind::kRegression:
      return "regression";
    case ModelKind::kGraph:
      return "graph";
  }
  return "unknown";
}

ModelKind kind_of(const AnyModel& model) noexcept {
  return static_cast<ModelKind>(model.index() + 1);
}

void save_model(const AnyModel& model, std::ostream& out) {
  Writer payload;
  std::visit([&](const auto& m) { put_payload(payload, m); }, model);

  Writer body;
  body.u32(kModelFormatVersion);
  body.u32(static_cast<std::uint32_t>(kind_of(model)));
  body.size(payload.bytes().size());
  std::vector<std::uint8_t> bytes = body.bytes();
  bytes.insert(bytes.end(), payload.bytes().begin(), payload.bytes().end());
  Writer trailer;
  trailer.u32(crc_of(bytes));

  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.write(reinterpret_cast<const char*>(trailer.bytes().data()), 4);
  if (!out) throw Error(ErrorCode::kIo, "failed to write model");
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  save_model(model, out);
  out.close();
  if (!out) throw Error(ErrorCode::kIo, "failed to write '" + path.string() + "'");
}

AnyModel load_model(std::istream& in) {
  const std::vector<std::uint8_t> file{std::istreambuf_iterator<char>(in),
                                       std::istreambuf_iterator<char>()};
  if (file.size() < kMagic.size() ||
      std::memcmp(file.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorCode::kParse, "not a model file (bad magic)");
  }
  const std::uint8_t* header = file.data() + kMagic.size();
  const std::size_t rest = file.size() - kMagic.size();
  // The version is checked before anything else so that files written by a
  // newer format are reported as such rather than as corrupt.
  if (rest < 4) truncated();
  const std::uint32_t version = le32(header);
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "model format version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  if (rest < kHeaderFields + 4) truncated();
  const std::uint32_t kind = le32(header + 4);
  const std::uint64_t length = le64(header + 8);
  if (length != rest - kHeaderFields - 4) truncated();
  const std::span<const std::uint8_t> body(header, kHeaderFields + length);
  if (crc_of(body) != le32(header + kHeaderFields + length)) truncated();

  Reader r(body.subspan(kHeaderFields));
  AnyModel model = [&]() -> AnyModel {
    switch (static_cast<ModelKind>(kind)) {
      case ModelKind::kClassification:
        return get_classification(r);
      case ModelKind::kQuantumClassification:
        return get_quantum(r);
      case ModelKind::kClustering:
        return get_clustering(r);
      case ModelKind::kRegression:
        return get_regression(r);
      case ModelKind::kGraph:
        return get_graph(r);
    }
    throw Error(ErrorCode::kUnknownModelKind, "unknown model kind " + std::to_string(kind));
  }();
  if (!r.done()) Reader::malformed();
  return model;
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return load_model(in);
}

}  // namespace hdc
