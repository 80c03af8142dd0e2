#include <cstdlib>
#include <string_view>

#include "hdc/kernels.hpp"

namespace hdc::kernels {

#if defined(HDC_HAVE_AVX2_KERNELS)
const KernelTable* avx2_table_unchecked() noexcept;
#endif

const KernelTable* avx2_table() noexcept {
#if defined(HDC_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2") != 0;
  return supported ? avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() noexcept {
  const char* forced = std::getenv("HDC_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
  if (const KernelTable* simd = avx2_table()) return *simd;
  return scalar_table();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace hdc::kernels
