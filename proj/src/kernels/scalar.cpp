#include "hdc/kernels.hpp"

namespace hdc::kernels {
namespace {

void mul_i32(const std::int32_t* a, const std::int32_t* b, std::int32_t* out,
             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void add_i32(std::int32_t* acc, const std::int32_t* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void sub_i32(std::int32_t* acc, const std::int32_t* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] -= x[i];
}

void mul_add_i32(std::int32_t* acc, const std::int32_t* a, const std::int32_t* b,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += a[i] * b[i];
}

std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += static_cast<std::int64_t>(a[i]) * static_cast<std::int64_t>(b[i]);
  }
  return s;
}

std::size_t count_mismatch_i32(const std::int32_t* a, const std::int32_t* b,
                               std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] != b[i]) ? 1U : 0U;
  return c;
}

// Reference summation order: lane l of an 8-wide accumulator collects
// elements i with i % 8 == l over full blocks; lanes fold as
// (l, l+4) -> ((0+2) + (1+3)); the tail is added sequentially.
double dot_f64(const double* a, const double* b, std::size_t n) {
  double lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int l = 0; l < 8; ++l) lane[l] += a[i + l] * b[i + l];
  }
  const double v0 = lane[0] + lane[4];
  const double v1 = lane[1] + lane[5];
  const double v2 = lane[2] + lane[6];
  const double v3 = lane[3] + lane[7];
  double s = (v0 + v2) + (v1 + v3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

std::size_t xor_popcount_u64(const std::uint64_t* a, const std::uint64_t* b,
                             std::size_t n) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) {
    c += static_cast<std::size_t>(__builtin_popcountll(a[i] ^ b[i]));
  }
  return c;
}

constexpr KernelTable kScalar{
    "scalar",   mul_i32,  add_i32,  sub_i32,         mul_add_i32, dot_i32, count_mismatch_i32,
    dot_f64,    axpy_f64, xor_popcount_u64,
};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace hdc::kernels
