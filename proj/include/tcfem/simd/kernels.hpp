#pragma once

// Inner loops shared by every contraction in the library. Each kernel has a
// scalar reference implementation and, where the CPU allows it, a vector
// variant selected at runtime. Variants must agree bit for bit with the scalar
// reference: they vectorize across independent outputs only, keep the
// ascending-k summation order, and never fuse multiply and add.

#include <cstddef>

namespace tcfem::simd {

/// out[p + i*pre + q*pre*rows] = sum_k M[i*cols + k] * in[p + k*pre + q*pre*cols]
/// for p < pre, i < rows, q < post. Summation runs over ascending k and starts
/// from zero. `out` must not alias `in`.
template <class Real>
using ContractFn = void (*)(const Real* matrix, std::size_t rows, std::size_t cols, const Real* in, std::size_t pre,
                            std::size_t post, Real* out);

/// Rounds each value to the nearest IEEE binary16 value (ties to even,
/// subnormals kept, overflow to infinity, NaN to the canonical quiet NaN) and
/// widens it back to binary32.
using RoundHalfFn = void (*)(const float* in, float* out, std::size_t n);

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);

struct KernelTable {
  Isa isa;
  ContractFn<double> contract_f64;
  ContractFn<float> contract_f32;
  RoundHalfFn round_to_half;
};

const KernelTable& scalar_kernels();
/// nullptr when the library was built without the AVX2 variant or the CPU lacks AVX2/F16C.
const KernelTable* avx2_kernels();

/// Best table for this CPU. Setting TCFEM_SIMD=scalar in the environment
/// forces the scalar reference.
const KernelTable& active_kernels();

namespace detail {
void contract_f64_scalar(const double*, std::size_t, std::size_t, const double*, std::size_t, std::size_t, double*);
void contract_f32_scalar(const float*, std::size_t, std::size_t, const float*, std::size_t, std::size_t, float*);
void round_to_half_scalar(const float*, float*, std::size_t);
#if defined(TCFEM_HAVE_AVX2_KERNELS)
void contract_f64_avx2(const double*, std::size_t, std::size_t, const double*, std::size_t, std::size_t, double*);
void contract_f32_avx2(const float*, std::size_t, std::size_t, const float*, std::size_t, std::size_t, float*);
void round_to_half_avx2(const float*, float*, std::size_t);
#endif
}  // namespace detail

}  // namespace tcfem::simd
