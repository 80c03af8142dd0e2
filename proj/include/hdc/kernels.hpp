#pragma once

// Inner-loop kernels shared by every model. Each variant (scalar reference,
// AVX2) exports the same table; the active table is chosen once at startup
// from CPU features and can be pinned with HDC_KERNELS=scalar|avx2.
//
// Integer kernels are exact. The float dot product uses a fixed 8-lane
// partial-sum order in every variant, so all variants return identical bits.
//
// This header is included by the AVX2 translation unit and must stay free of
// standard-library templates (no inline code that could be merged across
// differently-targeted objects).

#include <cstddef>
#include <cstdint>

namespace hdc::kernels {

struct KernelTable {
  const char* name;

  // out[i] = a[i] * b[i]
  void (*mul_i32)(const std::int32_t* a, const std::int32_t* b, std::int32_t* out,
                  std::size_t n);
  // acc[i] += x[i]
  void (*add_i32)(std::int32_t* acc, const std::int32_t* x, std::size_t n);
  // acc[i] -= x[i]
  void (*sub_i32)(std::int32_t* acc, const std::int32_t* x, std::size_t n);
  // acc[i] += a[i] * b[i]
  void (*mul_add_i32)(std::int32_t* acc, const std::int32_t* a, const std::int32_t* b,
                      std::size_t n);
  std::int64_t (*dot_i32)(const std::int32_t* a, const std::int32_t* b, std::size_t n);
  // Number of positions where a[i] != b[i].
  std::size_t (*count_mismatch_i32)(const std::int32_t* a, const std::int32_t* b,
                                    std::size_t n);

  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);

  // popcount(a ^ b) over n 64-bit words.
  std::size_t (*xor_popcount_u64)(const std::uint64_t* a, const std::uint64_t* b,
                                  std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_table() noexcept;

const KernelTable& active() noexcept;

}  // namespace hdc::kernels
