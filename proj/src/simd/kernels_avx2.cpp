// Compiled with -mavx2 -mf16c (no -mfma: products and sums stay separately rounded).
#include <immintrin.h>

#include <vector>

#include "tcfem/binary16.hpp"
#include "tcfem/simd/kernels.hpp"

namespace tcfem::simd::detail {

namespace {

struct F64x4 {
  using scalar = double;
  using reg = __m256d;
  static constexpr std::size_t width = 4;
  static reg zero() { return _mm256_setzero_pd(); }
  static reg load(const double* p) { return _mm256_loadu_pd(p); }
  static reg broadcast(double v) { return _mm256_set1_pd(v); }
  static void store(double* p, reg v) { _mm256_storeu_pd(p, v); }
  static reg madd(reg acc, reg a, reg b) { return _mm256_add_pd(acc, _mm256_mul_pd(a, b)); }
};

struct F32x8 {
  using scalar = float;
  using reg = __m256;
  static constexpr std::size_t width = 8;
  static reg zero() { return _mm256_setzero_ps(); }
  static reg load(const float* p) { return _mm256_loadu_ps(p); }
  static reg broadcast(float v) { return _mm256_set1_ps(v); }
  static void store(float* p, reg v) { _mm256_storeu_ps(p, v); }
  static reg madd(reg acc, reg a, reg b) { return _mm256_add_ps(acc, _mm256_mul_ps(a, b)); }
};

template <class V>
void contract_avx2(const typename V::scalar* matrix, std::size_t rows, std::size_t cols,
                   const typename V::scalar* in, std::size_t pre, std::size_t post, typename V::scalar* out) {
  using Real = typename V::scalar;
  constexpr std::size_t W = V::width;

  if (pre >= W) {
    // Vectorize across the contiguous fast index p.
    const std::size_t pv = pre - pre % W;
    for (std::size_t q = 0; q < post; ++q) {
      const Real* src = in + q * pre * cols;
      Real* dst = out + q * pre * rows;
      for (std::size_t i = 0; i < rows; ++i) {
        const Real* mrow = matrix + i * cols;
        Real* drow = dst + i * pre;
        for (std::size_t p = 0; p < pv; p += W) {
          auto acc = V::zero();
          for (std::size_t k = 0; k < cols; ++k) acc = V::madd(acc, V::broadcast(mrow[k]), V::load(src + p + k * pre));
          V::store(drow + p, acc);
        }
        for (std::size_t p = pv; p < pre; ++p) {
          Real acc = Real{0};
          for (std::size_t k = 0; k < cols; ++k) acc += mrow[k] * src[p + k * pre];
          drow[p] = acc;
        }
      }
    }
    return;
  }

  if (pre == 1 && rows >= W) {
    // Contraction along the fast axis: vectorize across output rows using a
    // transposed copy of the matrix so that each column is contiguous.
    thread_local std::vector<Real> mt;
    mt.resize(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) mt[k * rows + i] = matrix[i * cols + k];
    const std::size_t iv = rows - rows % W;
    for (std::size_t q = 0; q < post; ++q) {
      const Real* src = in + q * cols;
      Real* dst = out + q * rows;
      for (std::size_t i = 0; i < iv; i += W) {
        auto acc = V::zero();
        for (std::size_t k = 0; k < cols; ++k) acc = V::madd(acc, V::load(mt.data() + k * rows + i), V::broadcast(src[k]));
        V::store(dst + i, acc);
      }
      for (std::size_t i = iv; i < rows; ++i) {
        Real acc = Real{0};
        for (std::size_t k = 0; k < cols; ++k) acc += matrix[i * cols + k] * src[k];
        dst[i] = acc;
      }
    }
    return;
  }

  if constexpr (sizeof(Real) == 8)
    contract_f64_scalar(matrix, rows, cols, in, pre, post, out);
  else
    contract_f32_scalar(matrix, rows, cols, in, pre, post, out);
}

}  // namespace

void contract_f64_avx2(const double* m, std::size_t rows, std::size_t cols, const double* in, std::size_t pre,
                       std::size_t post, double* out) {
  contract_avx2<F64x4>(m, rows, cols, in, pre, post, out);
}

void contract_f32_avx2(const float* m, std::size_t rows, std::size_t cols, const float* in, std::size_t pre,
                       std::size_t post, float* out) {
  contract_avx2<F32x8>(m, rows, cols, in, pre, post, out);
}

void round_to_half_avx2(const float* in, float* out, std::size_t n) {
  const __m256 canonical_nan = _mm256_castsi256_ps(_mm256_set1_epi32(0x7FC00000));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 x = _mm256_loadu_ps(in + i);
    const __m128i h = _mm256_cvtps_ph(x, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256 y = _mm256_cvtph_ps(h);
    // F16C keeps NaN payload bits; the scalar reference canonicalizes them.
    const __m256 is_nan = _mm256_cmp_ps(x, x, _CMP_UNORD_Q);
    y = _mm256_blendv_ps(y, canonical_nan, is_nan);
    _mm256_storeu_ps(out + i, y);
  }
  for (; i < n; ++i) out[i] = from_half(to_half(in[i]));
}

}  // namespace tcfem::simd::detail
