#include "kernels_impl.hpp"

#include <cstdlib>
#include <string_view>

namespace e91::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(E91_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* forced = std::getenv("E91_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
  if (const KernelTable* simd = avx2_table()) return *simd;
  return scalar_table();
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(E91_HAVE_AVX2)
  static const KernelTable table{"avx2", &detail::cdot_avx2, &detail::grid_row_max_avx2};
  static const bool supported = cpu_has_avx2();
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace e91::kernels
