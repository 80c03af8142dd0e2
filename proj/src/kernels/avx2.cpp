// AVX2 kernel variants. Compiled with -mavx2; only reachable through the
// dispatch table after a runtime CPU check.

#include <immintrin.h>

#include "hdc/kernels.hpp"

namespace hdc::kernels {
namespace {

void mul_i32(const std::int32_t* a, const std::int32_t* b, std::int32_t* out,
             std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_mullo_epi32(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void add_i32(std::int32_t* acc, const std::int32_t* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    auto* p = reinterpret_cast<__m256i*>(acc + i);
    const __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    _mm256_storeu_si256(p, _mm256_add_epi32(_mm256_loadu_si256(p), vx));
  }
  for (; i < n; ++i) acc[i] += x[i];
}

void sub_i32(std::int32_t* acc, const std::int32_t* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    auto* p = reinterpret_cast<__m256i*>(acc + i);
    const __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    _mm256_storeu_si256(p, _mm256_sub_epi32(_mm256_loadu_si256(p), vx));
  }
  for (; i < n; ++i) acc[i] -= x[i];
}

void mul_add_i32(std::int32_t* acc, const std::int32_t* a, const std::int32_t* b,
                 std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    auto* p = reinterpret_cast<__m256i*>(acc + i);
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(p, _mm256_add_epi32(_mm256_loadu_si256(p), _mm256_mullo_epi32(va, vb)));
  }
  for (; i < n; ++i) acc[i] += a[i] * b[i];
}

// Even lanes multiply directly (mul_epi32 reads the low signed dword of each
// qword); odd lanes are shifted down first.
std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  __m256i sum = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i even = _mm256_mul_epi32(va, vb);
    const __m256i odd =
        _mm256_mul_epi32(_mm256_srli_epi64(va, 32), _mm256_srli_epi64(vb, 32));
    sum = _mm256_add_epi64(sum, _mm256_add_epi64(even, odd));
  }
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), sum);
  std::int64_t s = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    s += static_cast<std::int64_t>(a[i]) * static_cast<std::int64_t>(b[i]);
  }
  return s;
}

std::size_t count_mismatch_i32(const std::int32_t* a, const std::int32_t* b,
                               std::size_t n) {
  std::size_t equal = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const int mask = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(va, vb)));
    equal += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  std::size_t mismatch = i - equal;
  for (; i < n; ++i) mismatch += (a[i] != b[i]) ? 1U : 0U;
  return mismatch;
}

// Same lane layout and fold order as the scalar reference.
double dot_f64(const double* a, const double* b, std::size_t n) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    lo = _mm256_add_pd(lo, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    hi = _mm256_add_pd(hi,
                       _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  alignas(32) double v[4];
  _mm256_store_pd(v, _mm256_add_pd(lo, hi));
  double s = (v[0] + v[2]) + (v[1] + v[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Nibble-LUT popcount with per-block SAD reduction into 64-bit lanes.
std::size_t xor_popcount_u64(const std::uint64_t* a, const std::uint64_t* b,
                             std::size_t n) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i total = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i x = _mm256_xor_si256(va, vb);
    const __m256i lo = _mm256_and_si256(x, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(x, 4), low_mask);
    const __m256i counts =
        _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
    total = _mm256_add_epi64(total, _mm256_sad_epu8(counts, _mm256_setzero_si256()));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), total);
  std::size_t c = static_cast<std::size_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]);
  for (; i < n; ++i) c += static_cast<std::size_t>(__builtin_popcountll(a[i] ^ b[i]));
  return c;
}

constexpr KernelTable kAvx2{
    "avx2",  mul_i32,  add_i32,  sub_i32,         mul_add_i32, dot_i32, count_mismatch_i32,
    dot_f64, axpy_f64, xor_popcount_u64,
};

}  // namespace

const KernelTable* avx2_table_unchecked() noexcept { return &kAvx2; }

}  // namespace hdc::kernels
