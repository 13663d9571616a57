#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "tcfem/mesh.hpp"

namespace tcfem {

using Point = std::array<double, 3>;
using ScalarFunction = std::function<double(const Point&)>;
using GradientFunction = std::function<Point(const Point&)>;

/// Nodal interpolant: coefficient i is f at DoF i's Gauss-Lobatto node.
std::vector<double> interpolate(const LevelMesh& mesh, const ScalarFunction& f);

/// b_i = int f phi_i + sum over boundary faces of int g (gamma phi_i - d_n phi_i),
/// by cell-wise Gauss quadrature with n_quad points per axis (k+2 when zero).
std::vector<double> assemble_rhs(const LevelMesh& mesh, const ScalarFunction& f, const ScalarFunction& g,
                                 int n_quad = 0);

/// ||u_h - u||_L2 with n_quad Gauss points per axis (k+3 when zero, exact to degree 2k+5).
double l2_error(const LevelMesh& mesh, std::span<const double> u_h, const ScalarFunction& u, int n_quad = 0);

/// Broken H1 seminorm |u_h - u|, using the exact gradient.
double h1_seminorm_error(const LevelMesh& mesh, std::span<const double> u_h, const GradientFunction& grad_u,
                         int n_quad = 0);

/// The manufactured problem -Δu = f, u = g on the boundary, with
/// u = prod_a sin(pi x_a) and g = 0.
struct ManufacturedProblem {
  ScalarFunction solution;
  GradientFunction gradient;
  ScalarFunction rhs;
  ScalarFunction boundary;
};

ManufacturedProblem sine_problem(int dim);

/// "index,value" lines for debugging dumps.
void write_vector_csv(std::ostream& os, std::span<const double> v);

}  // namespace tcfem
