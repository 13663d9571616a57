#include "tcfem/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tcfem {

Extents::Extents(int d, std::array<std::size_t, 3> sizes) : dim(d), n(sizes) {
  if (d < 1 || d > 3) throw std::invalid_argument("tensor dimension must be 1, 2 or 3");
  for (int a = d; a < 3; ++a) n[static_cast<std::size_t>(a)] = 1;
}

Extents Extents::cube(int d, std::size_t size) { return Extents(d, {size, size, size}); }

std::size_t Extents::stride(int axis) const {
  std::size_t s = 1;
  for (int a = 0; a < axis; ++a) s *= (*this)[a];
  return s;
}

std::size_t Extents::post(int axis) const {
  std::size_t s = 1;
  for (int a = axis + 1; a < dim; ++a) s *= (*this)[a];
  return s;
}

Extents Extents::with(int axis, std::size_t size) const {
  Extents e = *this;
  e.n[static_cast<std::size_t>(axis)] = size;
  return e;
}

std::string to_string(const Extents& e) {
  std::string s = "(";
  for (int a = 0; a < e.dim; ++a) {
    if (a) s += ",";
    s += std::to_string(e[a]);
  }
  return s + ")";
}

Matrix1D::Matrix1D(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

Matrix1D::Matrix1D(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows * cols)
    throw std::invalid_argument("Matrix1D: expected " + std::to_string(rows * cols) + " entries, got " +
                                std::to_string(entries_.size()));
  for (double v : entries_)
    if (!std::isfinite(v)) throw std::invalid_argument("Matrix1D: non-finite entry");
}

Matrix1D::Matrix1D(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("Matrix1D: ragged initializer");
    entries_.insert(entries_.end(), r.begin(), r.end());
  }
  for (double v : entries_)
    if (!std::isfinite(v)) throw std::invalid_argument("Matrix1D: non-finite entry");
}

Matrix1D Matrix1D::identity(std::size_t n) {
  Matrix1D m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix1D Matrix1D::diagonal(std::span<const double> diag) {
  Matrix1D m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix1D Matrix1D::transposed() const {
  Matrix1D t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix1D& Matrix1D::operator+=(const Matrix1D& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ContractViolation("Matrix1D: shape mismatch in +=");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

Matrix1D& Matrix1D::operator*=(double s) {
  for (double& v : entries_) v *= s;
  return *this;
}

Matrix1D block_diagonal(std::span<const Matrix1D> blocks) {
  std::size_t rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix1D m(rows, cols);
  std::size_t r0 = 0, c0 = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) m(r0 + i, c0 + j) = b(i, j);
    r0 += b.rows();
    c0 += b.cols();
  }
  return m;
}

Matrix1D matmul(const Matrix1D& a, const Matrix1D& b) {
  if (a.cols() != b.rows()) throw ContractViolation("matmul: inner dimensions differ");
  Matrix1D c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

SeparableOperator::SeparableOperator(int dim, std::vector<Term> terms) : dim_(dim), terms_(std::move(terms)) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("SeparableOperator: dimension must be 1, 2 or 3");
  if (terms_.empty()) throw std::invalid_argument("SeparableOperator: needs at least one term");
  std::array<std::size_t, 3> in{1, 1, 1}, out{1, 1, 1};
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const auto& term = terms_[t];
    if (term.size() != static_cast<std::size_t>(dim))
      throw ContractViolation("SeparableOperator: term " + std::to_string(t) + " has " +
                              std::to_string(term.size()) + " factors, expected " + std::to_string(dim));
    for (int a = 0; a < dim; ++a) {
      const auto& f = term[static_cast<std::size_t>(a)];
      const auto ua = static_cast<std::size_t>(a);
      if (t == 0) {
        in[ua] = f.cols();
        out[ua] = f.rows();
      } else if (f.cols() != in[ua] || f.rows() != out[ua]) {
        throw ContractViolation("SeparableOperator: term " + std::to_string(t) + " axis " + std::to_string(a) +
                                " has extents inconsistent with term 0");
      }
    }
  }
  in_ = Extents(dim, in);
  out_ = Extents(dim, out);
}

SeparableOperator SeparableOperator::transposed() const {
  std::vector<Term> terms;
  terms.reserve(terms_.size());
  for (const auto& term : terms_) {
    Term t;
    for (const auto& f : term) t.push_back(f.transposed());
    terms.push_back(std::move(t));
  }
  return SeparableOperator(dim_, std::move(terms));
}

SeparableOperator kronecker_sum(std::span<const Matrix1D> mass, std::span<const Matrix1D> stiffness) {
  if (mass.size() != stiffness.size() || mass.empty())
    throw std::invalid_argument("kronecker_sum: need one mass and one stiffness matrix per axis");
  const int dim = static_cast<int>(mass.size());
  std::vector<SeparableOperator::Term> terms;
  // Term order follows the slowest axis first: L2⊗M1⊗M0, M2⊗L1⊗M0, M2⊗M1⊗L0.
  for (int s = dim - 1; s >= 0; --s) {
    SeparableOperator::Term term;
    for (int a = 0; a < dim; ++a) term.push_back(a == s ? stiffness[static_cast<std::size_t>(a)] : mass[static_cast<std::size_t>(a)]);
    terms.push_back(std::move(term));
  }
  return SeparableOperator(dim, std::move(terms));
}

}  // namespace tcfem
