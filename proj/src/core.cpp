#include "hdc/core.hpp"

#include <algorithm>
#include <cmath>

#include "hdc/error.hpp"
#include "hdc/kernels.hpp"

namespace hdc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid_dimension";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kFormMismatch: return "form_mismatch";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kNotFitted: return "not_fitted";
    case ErrorCode::kUnknownNode: return "unknown_node";
    case ErrorCode::kSelfLoop: return "self_loop";
    case ErrorCode::kStratification: return "stratification";
    case ErrorCode::kDestructiveCancellation: return "destructive_cancellation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kChecksum: return "checksum";
    case ErrorCode::kUnsupportedVersion: return "unsupported_version";
    case ErrorCode::kUnknownModelKind: return "unknown_model_kind";
  }
  return "unknown";
}

namespace {

void require_same_dim(const Hypervector& a, const Hypervector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "dimension mismatch: " + std::to_string(a.dim()) +
                                                   " vs " + std::to_string(b.dim()));
  }
}

void require_bipolar(const Hypervector& a) {
  if (!a.is_bipolar()) throw Error(ErrorCode::kFormMismatch, "operand must be bipolar");
}

}  // namespace

Hypervector Hypervector::bipolar(std::vector<std::int32_t> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidDimension, "empty hypervector");
  for (const std::int32_t v : values) {
    if (v != 1 && v != -1) {
      throw Error(ErrorCode::kFormMismatch, "bipolar entries must be -1 or +1");
    }
  }
  return Hypervector(std::move(values), Form::kBipolar);
}

Hypervector Hypervector::accumulator(std::vector<std::int32_t> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidDimension, "empty hypervector");
  return Hypervector(std::move(values), Form::kAccumulator);
}

Hypervector Hypervector::zeros(std::size_t dim) {
  return accumulator(std::vector<std::int32_t>(dim, 0));
}

void Hypervector::add(const Hypervector& x) {
  require_same_dim(*this, x);
  kernels::active().add_i32(values_.data(), x.values_.data(), values_.size());
  form_ = Form::kAccumulator;
}

void Hypervector::subtract(const Hypervector& x) {
  require_same_dim(*this, x);
  kernels::active().sub_i32(values_.data(), x.values_.data(), values_.size());
  form_ = Form::kAccumulator;
}

void Hypervector::add_product(const Hypervector& a, const Hypervector& b) {
  require_same_dim(*this, a);
  require_same_dim(a, b);
  kernels::active().mul_add_i32(values_.data(), a.values_.data(), b.values_.data(),
                                values_.size());
  form_ = Form::kAccumulator;
}

void Hypervector::scale(std::int32_t factor) {
  for (auto& v : values_) v *= factor;
  form_ = Form::kAccumulator;
}

bool Hypervector::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](std::int32_t v) { return v == 0; });
}

Hypervector random_hypervector(std::size_t dim, Rng& rng) {
  if (dim < 2) {
    throw Error(ErrorCode::kInvalidDimension,
                "dimension must be at least 2, got " + std::to_string(dim));
  }
  std::vector<std::int32_t> values(dim);
  // 64 components per engine draw.
  for (std::size_t i = 0; i < dim; i += 64) {
    const std::uint64_t bits = rng.next();
    const std::size_t end = std::min(dim, i + 64);
    for (std::size_t j = i; j < end; ++j) {
      values[j] = ((bits >> (j - i)) & 1U) ? 1 : -1;
    }
  }
  Hypervector v = Hypervector::bipolar(std::move(values));
  v.set_seed(rng.seed());
  return v;
}

Hypervector bind(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b);
  require_bipolar(a);
  require_bipolar(b);
  std::vector<std::int32_t> out(a.dim());
  kernels::active().mul_i32(a.values().data(), b.values().data(), out.data(), out.size());
  return Hypervector::bipolar(std::move(out));
}

Hypervector bundle(std::span<const Hypervector> vs) {
  if (vs.empty()) throw Error(ErrorCode::kEmptyInput, "bundle of an empty list");
  const Form form = vs.front().form();
  Hypervector acc = Hypervector::zeros(vs.front().dim());
  for (const Hypervector& v : vs) {
    if (v.form() != form) {
      throw Error(ErrorCode::kFormMismatch, "bundle operands mix bipolar and accumulator forms");
    }
    acc.add(v);
  }
  return acc;
}

Hypervector bundle(std::initializer_list<Hypervector> vs) {
  return bundle(std::span<const Hypervector>(vs.begin(), vs.size()));
}

std::int32_t tie_flip(std::uint64_t tie_seed, std::size_t position) noexcept {
  return (mix64(tie_seed ^ mix64(static_cast<std::uint64_t>(position))) & 1U) ? 1 : -1;
}

Hypervector normalize(const Hypervector& acc, std::uint64_t tie_seed) {
  if (acc.is_bipolar()) return acc;
  const auto src = acc.values();
  std::vector<std::int32_t> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    out[i] = src[i] > 0 ? 1 : (src[i] < 0 ? -1 : tie_flip(tie_seed, i));
  }
  return Hypervector::bipolar(std::move(out));
}

Hypervector permute(const Hypervector& a, std::int64_t k) {
  const auto n = static_cast<std::int64_t>(a.dim());
  const std::int64_t shift = ((k % n) + n) % n;
  const auto src = a.values();
  std::vector<std::int32_t> out(src.size());
  // out[(i + shift) % n] = src[i]
  std::copy(src.begin(), src.end() - shift, out.begin() + shift);
  std::copy(src.end() - shift, src.end(), out.begin());
  return a.is_bipolar() ? Hypervector::bipolar(std::move(out))
                        : Hypervector::accumulator(std::move(out));
}

Hypervector negate(const Hypervector& a) {
  std::vector<std::int32_t> out(a.values().begin(), a.values().end());
  for (auto& v : out) v = -v;
  return a.is_bipolar() ? Hypervector::bipolar(std::move(out))
                        : Hypervector::accumulator(std::move(out));
}

std::int64_t dot(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b);
  return kernels::active().dot_i32(a.values().data(), b.values().data(), a.dim());
}

double cosine_similarity(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b);
  const auto& k = kernels::active();
  // Bipolar norms are exactly D; skip the extra passes.
  const std::int64_t na = a.is_bipolar() ? static_cast<std::int64_t>(a.dim())
                                         : k.dot_i32(a.values().data(), a.values().data(), a.dim());
  const std::int64_t nb = b.is_bipolar() ? static_cast<std::int64_t>(b.dim())
                                         : k.dot_i32(b.values().data(), b.values().data(), b.dim());
  if (na == 0 || nb == 0) throw Error(ErrorCode::kInvalidInput, "cosine of a zero-norm vector");
  const std::int64_t d = k.dot_i32(a.values().data(), b.values().data(), a.dim());
  return static_cast<double>(d) /
         std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
}

std::size_t hamming_distance(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b);
  require_bipolar(a);
  require_bipolar(b);
  return kernels::active().count_mismatch_i32(a.values().data(), b.values().data(), a.dim());
}

Space::Space(std::size_t dim) : dim_(dim) {
  if (dim < 2) throw Error(ErrorCode::kInvalidDimension, "space dimension must be at least 2");
}

void Space::insert(const std::string& name, Hypervector v) {
  if (v.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "member '" + name + "' has dimension " +
                                                   std::to_string(v.dim()) + ", space has " +
                                                   std::to_string(dim_));
  }
  if (contains(name)) throw Error(ErrorCode::kInvalidArgument, "duplicate member '" + name + "'");
  v.set_name(name);
  members_.emplace(name, std::move(v));
}

const Hypervector& Space::insert_random(const std::string& name, Rng& rng) {
  insert(name, random_hypervector(dim_, rng));
  return members_.at(name);
}

const Hypervector& Space::at(const std::string& name) const {
  const auto it = members_.find(name);
  if (it == members_.end()) throw Error(ErrorCode::kInvalidArgument, "no member '" + name + "'");
  return it->second;
}

void Space::remove(const std::string& name) {
  if (members_.erase(name) == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no member '" + name + "'");
  }
  for (auto& [tag, names] : tags_) names.erase(name);
}

void Space::add_tag(const std::string& name, const std::string& tag) {
  if (!contains(name)) throw Error(ErrorCode::kInvalidArgument, "no member '" + name + "'");
  tags_[tag].insert(name);
}

std::set<std::string> Space::with_tag(const std::string& tag) const {
  const auto it = tags_.find(tag);
  return it == tags_.end() ? std::set<std::string>{} : it->second;
}

std::vector<std::string> Space::names() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& [name, v] : members_) out.push_back(name);
  return out;
}

std::pair<std::string, double> Space::nearest(const Hypervector& query) const {
  if (members_.empty()) throw Error(ErrorCode::kEmptyInput, "nearest on an empty space");
  std::pair<std::string, double> best{"", -2.0};
  for (const auto& [name, v] : members_) {
    const double s = cosine_similarity(query, v);
    if (s > best.second) best = {name, s};
  }
  return best;
}

}  // namespace hdc
