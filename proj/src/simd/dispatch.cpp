#include <cstdlib>
#include <string_view>

#include "tsmc/simd/kernels.hpp"

namespace tsmc::simd {

#if defined(TSMC_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(TSMC_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() {
  static const KernelTable& selected = [] () -> const KernelTable& {
    const char* env = std::getenv("TSMC_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return selected;
}

}  // namespace tsmc::simd
