#pragma once

#include <vector>

#include "tcfem/tensor.hpp"

namespace tcfem {

/// Quadrature on the unit interval [0, 1].
struct QuadratureRule {
  std::vector<double> points;   // strictly increasing
  std::vector<double> weights;  // positive, summing to 1
};

/// The k+1 Gauss-Lobatto nodes on [0, 1], endpoints included. Requires k >= 1.
std::vector<double> gauss_lobatto_points(int k);

/// q-point Gauss-Legendre rule on [0, 1], exact for degree 2q-1. Requires q >= 1.
QuadratureRule gauss_rule(int q);

/// Lagrange polynomials of degree k on the Gauss-Lobatto nodes, tabulated at
/// the points of a quadrature rule.
struct Basis1D {
  int degree = 0;
  std::vector<double> nodes;
  QuadratureRule quadrature;
  Matrix1D values;       // S: n_q x (k+1), S(q, j) = phi_j(x_q)
  Matrix1D derivatives;  // D: n_q x (k+1), D(q, j) = phi_j'(x_q)

  /// Tabulates on a Gauss rule with `n_quad` points (k+1 when zero).
  Basis1D(int k, int n_quad = 0);

  double value(int j, double x) const;
  double derivative(int j, double x) const;
  /// 1 x (k+1) row of values (or derivatives) at an arbitrary point.
  Matrix1D value_row(double x) const;
  Matrix1D derivative_row(double x) const;
};

}  // namespace tcfem
