#include <cstdlib>
#include <string_view>

#include "g2flow/kernels.hpp"

namespace g2flow::kernels {

#if defined(G2FLOW_HAVE_AVX2_TU)
const KernelTable& avx2_table_unchecked();
#endif
#if defined(G2FLOW_HAVE_NEON_TU)
const KernelTable& neon_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(G2FLOW_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_table() {
#if defined(G2FLOW_HAVE_NEON_TU)
  // Advanced SIMD is mandatory on aarch64.
  return &neon_table_unchecked();
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    if (const char* env = std::getenv("G2FLOW_SIMD"); env && std::string_view(env) == "off")
      return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    if (const KernelTable* t = neon_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace g2flow::kernels
