#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tcfem {

/// IEEE-754 binary16 value: 1 sign bit, 5 exponent bits, 10 mantissa bits.
struct Binary16 {
  std::uint16_t bits = 0;

  friend bool operator==(Binary16, Binary16) = default;
};

inline constexpr std::uint16_t kHalfCanonicalNaN = 0x7E00;
inline constexpr float kHalfMax = 65504.0f;
inline constexpr float kHalfMinNormal = 6.103515625e-05f;  // 2^-14

/// Round-to-nearest-even conversion. Subnormals are produced, values at or
/// beyond 65520 become infinity and every NaN maps to the canonical quiet NaN.
Binary16 to_half(float x);
/// Exact widening conversion.
float from_half(Binary16 h);

/// Error-corrected split of a binary32 value into two binary16 numbers:
/// x ≈ main + residual / 2^11.
struct EcPair {
  static constexpr float scale = 2048.0f;

  Binary16 main;
  Binary16 residual;

  float reconstruct() const { return from_half(main) + from_half(residual) / scale; }
};

/// Throws std::range_error when |x| > 65504 or the residual is not representable.
EcPair ec_split(float x);

/// Which operands of an error-corrected product carry their residual term.
enum class EcSides { both, matrix_only };

/// Row-major binary32 matrix, the result type of the emulated tensor-core products.
struct MatrixF32 {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  float operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Row-major matrix of error-corrected pairs.
struct EcMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<EcPair> entries;

  static EcMatrix split(std::size_t rows, std::size_t cols, std::span<const float> values);
  MatrixF32 main_part() const;
  MatrixF32 residual_part() const;
};

/// C = A_h B_h + (dA_h B_h + A_h dB_h) / 2^11. Each product has binary16
/// operands and binary32 accumulation in ascending k; the correction sum is
/// formed in binary32. The second-order dA dB term is omitted.
MatrixF32 ec_matmul(const EcMatrix& a, const EcMatrix& b, EcSides sides = EcSides::both);

/// Plain binary32 product with ascending-k accumulation.
MatrixF32 matmul_f32(const MatrixF32& a, const MatrixF32& b);

}  // namespace tcfem
