#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tcfem/tensor.hpp"

namespace tcfem::testing {

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

inline Matrix1D random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  return Matrix1D(rows, cols, random_vector(rows * cols, rng));
}

inline TensorField random_tensor(const Extents& e, std::mt19937_64& rng) {
  return TensorField(e, random_vector(e.size(), rng));
}

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double rel_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0, r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] - b[i]) * (a[i] - b[i]);
    r += b[i] * b[i];
  }
  return r == 0.0 ? std::sqrt(d) : std::sqrt(d / r);
}

inline std::vector<double> matvec(const Matrix1D& m, std::span<const double> x) {
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

/// Columns A e_j of a linear map on R^n.
inline Eigen::MatrixXd materialize(std::size_t n, const std::function<void(std::span<const double>, std::span<double>)>& a) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> e(n, 0.0), y(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    a(e, y);
    for (std::size_t i = 0; i < n; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = y[i];
    e[j] = 0.0;
  }
  return m;
}

}  // namespace tcfem::testing
