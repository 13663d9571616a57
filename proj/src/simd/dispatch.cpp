#include <cstdlib>
#include <cstring>

#include "tcfem/simd/kernels.hpp"

namespace tcfem::simd {

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, &detail::contract_f64_scalar, &detail::contract_f32_scalar,
                                 &detail::round_to_half_scalar};
  return table;
}

const KernelTable* avx2_kernels() {
#if defined(TCFEM_HAVE_AVX2_KERNELS)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("f16c");
  }();
  static const KernelTable table{Isa::avx2, &detail::contract_f64_avx2, &detail::contract_f32_avx2,
                                 &detail::round_to_half_avx2};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* forced = std::getenv("TCFEM_SIMD");
    if (forced && std::strcmp(forced, "scalar") == 0) return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace tcfem::simd
