#include "tcfem/binary16.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tcfem/common.hpp"

namespace tcfem {

Binary16 to_half(float x) {
  const std::uint32_t f = std::bit_cast<std::uint32_t>(x);
  const auto sign = static_cast<std::uint16_t>((f >> 16) & 0x8000u);
  const std::uint32_t a = f & 0x7FFFFFFFu;

  if (a >= 0x7F800000u) {
    if (a > 0x7F800000u) return {kHalfCanonicalNaN};
    return {static_cast<std::uint16_t>(sign | 0x7C00u)};
  }
  // 65520 is the midpoint between 65504 and the next binade; RNE sends it up.
  if (a >= 0x477FF000u) return {static_cast<std::uint16_t>(sign | 0x7C00u)};

  const std::uint32_t exp = a >> 23;
  if (exp < 113) {
    // Result is a half subnormal (or zero): round(|x| * 2^24).
    if (exp < 102) return {sign};  // |x| < 2^-25 rounds to zero
    const std::uint32_t mant = (a & 0x7FFFFFu) | 0x800000u;
    const std::uint32_t shift = 126 - exp;  // 14..24
    std::uint32_t q = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1);
    const std::uint32_t half = 1u << (shift - 1);
    if (rem > half || (rem == half && (q & 1u))) ++q;
    return {static_cast<std::uint16_t>(sign | q)};
  }

  const std::uint32_t mant = a & 0x7FFFFFu;
  std::uint32_t q = ((exp - 112) << 10) | (mant >> 13);
  const std::uint32_t rem = mant & 0x1FFFu;
  if (rem > 0x1000u || (rem == 0x1000u && (q & 1u))) ++q;  // carry may bump the exponent
  return {static_cast<std::uint16_t>(sign | q)};
}

float from_half(Binary16 h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h.bits & 0x8000u) << 16;
  const std::uint32_t exp = (h.bits >> 10) & 0x1Fu;
  const std::uint32_t mant = h.bits & 0x3FFu;
  if (exp == 0) {
    const float mag = static_cast<float>(mant) * 5.9604644775390625e-08f;  // mant * 2^-24, exact
    return sign ? -mag : mag;
  }
  if (exp == 31) return std::bit_cast<float>(sign | 0x7F800000u | (mant << 13));
  return std::bit_cast<float>(sign | ((exp + 112) << 23) | (mant << 13));
}

EcPair ec_split(float x) {
  if (!(std::fabs(x) <= kHalfMax))
    throw std::range_error("ec_split: |x| = " + std::to_string(x) + " exceeds the binary16 range");
  EcPair p;
  p.main = to_half(x);
  // x - main is exact in binary32 and scaling by 2^11 is exact.
  const float r = (x - from_half(p.main)) * EcPair::scale;
  p.residual = to_half(r);
  if (std::isinf(from_half(p.residual))) throw std::range_error("ec_split: residual overflow");
  return p;
}

EcMatrix EcMatrix::split(std::size_t rows, std::size_t cols, std::span<const float> values) {
  if (values.size() != rows * cols) throw ContractViolation("EcMatrix::split: value count mismatch");
  EcMatrix m{rows, cols, {}};
  m.entries.reserve(values.size());
  for (float v : values) m.entries.push_back(ec_split(v));
  return m;
}

MatrixF32 EcMatrix::main_part() const {
  MatrixF32 m{rows, cols, std::vector<float>(entries.size())};
  for (std::size_t i = 0; i < entries.size(); ++i) m.values[i] = from_half(entries[i].main);
  return m;
}

MatrixF32 EcMatrix::residual_part() const {
  MatrixF32 m{rows, cols, std::vector<float>(entries.size())};
  for (std::size_t i = 0; i < entries.size(); ++i) m.values[i] = from_half(entries[i].residual);
  return m;
}

MatrixF32 matmul_f32(const MatrixF32& a, const MatrixF32& b) {
  if (a.cols != b.rows) throw ContractViolation("matmul_f32: inner dimensions differ");
  MatrixF32 c{a.rows, b.cols, std::vector<float>(a.rows * b.cols)};
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      float acc = 0.0f;
      for (std::size_t k = 0; k < a.cols; ++k) acc += a.values[i * a.cols + k] * b.values[k * b.cols + j];
      c.values[i * c.cols + j] = acc;
    }
  return c;
}

MatrixF32 ec_matmul(const EcMatrix& a, const EcMatrix& b, EcSides sides) {
  if (a.cols != b.rows) throw ContractViolation("ec_matmul: inner dimensions differ");
  const MatrixF32 ah = a.main_part();
  const MatrixF32 bh = b.main_part();
  const MatrixF32 main = matmul_f32(ah, bh);
  MatrixF32 corr = matmul_f32(a.residual_part(), bh);
  if (sides == EcSides::both) {
    const MatrixF32 other = matmul_f32(ah, b.residual_part());
    for (std::size_t i = 0; i < corr.values.size(); ++i) corr.values[i] += other.values[i];
  }
  MatrixF32 c = main;
  for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] += corr.values[i] / EcPair::scale;
  return c;
}

}  // namespace tcfem
