#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "tcfem/common.hpp"

namespace tcfem {

/// Dense row-major matrix holding one-dimensional shape, mass or stiffness data.
class Matrix1D {
 public:
  Matrix1D() = default;
  /// Zero matrix.
  Matrix1D(std::size_t rows, std::size_t cols);
  /// Throws std::invalid_argument when the size is wrong or an entry is not finite.
  Matrix1D(std::size_t rows, std::size_t cols, std::vector<double> entries);
  Matrix1D(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix1D identity(std::size_t n);
  static Matrix1D diagonal(std::span<const double> diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  std::span<const double> entries() const { return entries_; }
  std::span<double> entries() { return entries_; }

  Matrix1D transposed() const;
  Matrix1D& operator+=(const Matrix1D& other);
  Matrix1D& operator*=(double s);
  friend Matrix1D operator+(Matrix1D a, const Matrix1D& b) { return a += b; }
  friend Matrix1D operator*(double s, Matrix1D a) { return a *= s; }
  friend bool operator==(const Matrix1D&, const Matrix1D&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

/// Block-diagonal matrix with the given diagonal blocks.
Matrix1D block_diagonal(std::span<const Matrix1D> blocks);
Matrix1D matmul(const Matrix1D& a, const Matrix1D& b);

/// Coefficient array over a cell or patch, stored lexicographically with
/// strides 1, n0, n0*n1.
template <class Real>
class BasicTensor {
 public:
  BasicTensor() = default;
  explicit BasicTensor(Extents extents) : extents_(extents), values_(extents.size(), Real{0}) {}
  BasicTensor(Extents extents, std::vector<Real> values) : extents_(extents), values_(std::move(values)) {
    if (values_.size() != extents_.size())
      throw ContractViolation("tensor value count " + std::to_string(values_.size()) +
                              " does not match extents " + to_string(extents_));
  }

  int dim() const { return extents_.dim; }
  const Extents& extents() const { return extents_; }
  std::size_t extent(int axis) const { return extents_[axis]; }
  std::size_t size() const { return values_.size(); }

  std::span<const Real> values() const { return values_; }
  std::span<Real> values() { return values_; }
  Real operator[](std::size_t i) const { return values_[i]; }
  Real& operator[](std::size_t i) { return values_[i]; }

  Real& at(std::size_t i, std::size_t j = 0, std::size_t k = 0) {
    return values_[i + extents_.n[0] * (j + extents_.n[1] * k)];
  }
  Real at(std::size_t i, std::size_t j = 0, std::size_t k = 0) const {
    return values_[i + extents_.n[0] * (j + extents_.n[1] * k)];
  }

 private:
  Extents extents_;
  std::vector<Real> values_;
};

using TensorField = BasicTensor<double>;

/// Sum of Kronecker products; term t applies factors[t][d-1] ⊗ ... ⊗ factors[t][0].
class SeparableOperator {
 public:
  using Term = std::vector<Matrix1D>;

  SeparableOperator() = default;
  /// Validates that every term has `dim` factors and that all terms agree on
  /// input and output extents.
  SeparableOperator(int dim, std::vector<Term> terms);

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  Extents input_extents() const { return in_; }
  Extents output_extents() const { return out_; }

  SeparableOperator transposed() const;

 private:
  int dim_ = 0;
  std::vector<Term> terms_;
  Extents in_;
  Extents out_;
};

/// The three-term Laplacian-type Kronecker sum built from per-axis (mass, stiffness) pairs:
/// L2⊗M1⊗M0 + M2⊗L1⊗M0 + M2⊗M1⊗L0 in 3D (and the analogous two-term sum in 2D).
SeparableOperator kronecker_sum(std::span<const Matrix1D> mass, std::span<const Matrix1D> stiffness);

}  // namespace tcfem
