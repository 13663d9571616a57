#include "tcfem/binary16.hpp"
#include "tcfem/simd/kernels.hpp"

namespace tcfem::simd::detail {

namespace {

template <class Real>
void contract_scalar(const Real* matrix, std::size_t rows, std::size_t cols, const Real* in, std::size_t pre,
                     std::size_t post, Real* out) {
  for (std::size_t q = 0; q < post; ++q) {
    const Real* src = in + q * pre * cols;
    Real* dst = out + q * pre * rows;
    for (std::size_t i = 0; i < rows; ++i) {
      const Real* mrow = matrix + i * cols;
      Real* drow = dst + i * pre;
      for (std::size_t p = 0; p < pre; ++p) {
        Real acc = Real{0};
        for (std::size_t k = 0; k < cols; ++k) acc += mrow[k] * src[p + k * pre];
        drow[p] = acc;
      }
    }
  }
}

}  // namespace

void contract_f64_scalar(const double* m, std::size_t rows, std::size_t cols, const double* in, std::size_t pre,
                         std::size_t post, double* out) {
  contract_scalar(m, rows, cols, in, pre, post, out);
}

void contract_f32_scalar(const float* m, std::size_t rows, std::size_t cols, const float* in, std::size_t pre,
                         std::size_t post, float* out) {
  contract_scalar(m, rows, cols, in, pre, post, out);
}

void round_to_half_scalar(const float* in, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = from_half(to_half(in[i]));
}

}  // namespace tcfem::simd::detail
