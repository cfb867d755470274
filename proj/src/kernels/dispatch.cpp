#include <cstdlib>
#include <string_view>

#include "ibc/kernels.hpp"

namespace ibc::kernels {

#if IBC_HAVE_AVX2
const KernelTable& avx2_table();
#endif

const KernelTable* avx2() {
#if IBC_HAVE_AVX2
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("popcnt");
  }();
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* env = std::getenv("IBC_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar();
    if (const KernelTable* t = avx2()) return *t;
    return scalar();
  }();
  return table;
}

}  // namespace ibc::kernels
