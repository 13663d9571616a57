#include "tcfem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tcfem {

namespace {

// Legendre P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

std::vector<double> gauss_lobatto_points(int k) {
  if (k < 1) throw std::invalid_argument("gauss_lobatto_points: degree must be >= 1, got " + std::to_string(k));
  const int n = k;
  std::vector<double> x(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) x[static_cast<std::size_t>(i)] = -std::cos(std::numbers::pi * i / n);
  // Newton iteration on (1 - x^2) P_n'(x), written through P_n and P_{n-1}.
  for (int i = 1; i < n; ++i) {
    double& xi = x[static_cast<std::size_t>(i)];
    for (int it = 0; it < 100; ++it) {
      const auto [pn, pn1] = legendre(n, xi);
      const double dx = (xi * pn - pn1) / ((n + 1) * pn);
      xi -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
  }
  std::vector<double> nodes(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) nodes[i] = 0.5 * (x[i] + 1.0);
  // Symmetrize so that mirrored nodes sum to exactly 1.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::size_t j = nodes.size() - 1 - i;
    if (i <= j) {
      const double s = 0.5 * (nodes[i] + 1.0 - nodes[j]);
      nodes[i] = s;
      nodes[j] = 1.0 - s;
    }
  }
  nodes.front() = 0.0;
  nodes.back() = 1.0;
  return nodes;
}

QuadratureRule gauss_rule(int q) {
  if (q < 1) throw std::invalid_argument("gauss_rule: need at least one point");
  QuadratureRule r;
  r.points.resize(static_cast<std::size_t>(q));
  r.weights.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, pm1] = legendre(q, x);
      dp = q * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const auto [p, pm1] = legendre(q, x);
    dp = q * (x * p - pm1) / (x * x - 1.0);
    r.points[static_cast<std::size_t>(i)] = 0.5 * (x + 1.0);
    r.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const std::size_t j = r.points.size() - 1 - i;
    if (i <= j) {
      const double s = 0.5 * (r.points[i] + 1.0 - r.points[j]);
      const double w = 0.5 * (r.weights[i] + r.weights[j]);
      r.points[i] = s;
      r.points[j] = 1.0 - s;
      r.weights[i] = r.weights[j] = w;
    }
  }
  return r;
}

Basis1D::Basis1D(int k, int n_quad)
    : degree(k), nodes(gauss_lobatto_points(k)), quadrature(gauss_rule(n_quad > 0 ? n_quad : k + 1)) {
  const std::size_t nq = quadrature.points.size();
  const auto n = static_cast<std::size_t>(k + 1);
  values = Matrix1D(nq, n);
  derivatives = Matrix1D(nq, n);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t j = 0; j < n; ++j) {
      values(q, j) = value(static_cast<int>(j), quadrature.points[q]);
      derivatives(q, j) = derivative(static_cast<int>(j), quadrature.points[q]);
    }
}

double Basis1D::value(int j, double x) const {
  double v = 1.0;
  const double xj = nodes[static_cast<std::size_t>(j)];
  for (std::size_t m = 0; m < nodes.size(); ++m)
    if (static_cast<int>(m) != j) v *= (x - nodes[m]) / (xj - nodes[m]);
  return v;
}

double Basis1D::derivative(int j, double x) const {
  const double xj = nodes[static_cast<std::size_t>(j)];
  double sum = 0.0;
  for (std::size_t l = 0; l < nodes.size(); ++l) {
    if (static_cast<int>(l) == j) continue;
    double prod = 1.0 / (xj - nodes[l]);
    for (std::size_t m = 0; m < nodes.size(); ++m)
      if (static_cast<int>(m) != j && m != l) prod *= (x - nodes[m]) / (xj - nodes[m]);
    sum += prod;
  }
  return sum;
}

Matrix1D Basis1D::value_row(double x) const {
  Matrix1D r(1, nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) r(0, j) = value(static_cast<int>(j), x);
  return r;
}

Matrix1D Basis1D::derivative_row(double x) const {
  Matrix1D r(1, nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) r(0, j) = derivative(static_cast<int>(j), x);
  return r;
}

}  // namespace tcfem
