#include "tcfem/fe_space.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "tcfem/quadrature.hpp"
#include "tcfem/sipg.hpp"
#include "tcfem/tensor_kernel.hpp"

namespace tcfem {

namespace {

// Loops over the multi-index space of `e` with x fastest.
template <class F>
void for_each_index(const Extents& e, F&& f) {
  for (std::size_t k = 0; k < e.n[2]; ++k)
    for (std::size_t j = 0; j < e.n[1]; ++j)
      for (std::size_t i = 0; i < e.n[0]; ++i) f(MultiIndex{i, j, k});
}

template <class F>
void for_each_cell(const LevelMesh& mesh, F&& f) {
  for_each_index(Extents::cube(mesh.dim, mesh.cells_per_axis), f);
}

TensorField gather_cell(const LevelMesh& mesh, const MultiIndex& cell, std::span<const double> u) {
  const Extents e = mesh.cell_extents();
  const std::size_t base = mesh.cell_index(cell) * mesh.dofs_per_cell;
  return TensorField(e, std::vector<double>(u.begin() + static_cast<std::ptrdiff_t>(base),
                                            u.begin() + static_cast<std::ptrdiff_t>(base + mesh.dofs_per_cell)));
}

TensorField apply_factors(std::span<const Matrix1D> factors, const TensorField& u) {
  TensorField t = contract_dir(factors[0], u, 0);
  for (int a = 1; a < u.dim(); ++a) t = contract_dir(factors[static_cast<std::size_t>(a)], t, a);
  return t;
}

Point quad_point(const LevelMesh& mesh, const MultiIndex& cell, const MultiIndex& q, const QuadratureRule& rule) {
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < mesh.dim; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    x[ua] = (static_cast<double>(cell[ua]) + rule.points[q[ua]]) * mesh.h;
  }
  return x;
}

double quad_weight(const LevelMesh& mesh, const MultiIndex& q, const QuadratureRule& rule) {
  double w = 1.0;
  for (int a = 0; a < mesh.dim; ++a) w *= rule.weights[q[static_cast<std::size_t>(a)]] * mesh.h;
  return w;
}

void check_length(const LevelMesh& mesh, std::span<const double> u) {
  if (u.size() != mesh.n_dofs) throw ContractViolation("vector length does not match the level's DoF count");
}

}  // namespace

std::vector<double> interpolate(const LevelMesh& mesh, const ScalarFunction& f) {
  const auto nodes = gauss_lobatto_points(mesh.degree);
  std::vector<double> u(mesh.n_dofs);
  for_each_cell(mesh, [&](const MultiIndex& c) {
    for_each_index(mesh.cell_extents(), [&](const MultiIndex& l) {
      Point x{0.0, 0.0, 0.0};
      for (int a = 0; a < mesh.dim; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        x[ua] = (static_cast<double>(c[ua]) + nodes[l[ua]]) * mesh.h;
      }
      u[mesh.dof_index(c, l)] = f(x);
    });
  });
  return u;
}

std::vector<double> assemble_rhs(const LevelMesh& mesh, const ScalarFunction& f, const ScalarFunction& g,
                                 int n_quad) {
  const int nq = n_quad > 0 ? n_quad : mesh.degree + 2;
  const Basis1D basis(mesh.degree, nq);
  const QuadratureRule& rule = basis.quadrature;
  const Matrix1D st = basis.values.transposed();
  const std::vector<Matrix1D> st_all(3, st);
  const double gamma = penalty(mesh.degree, mesh.h, mesh.h);
  const std::size_t n1 = mesh.nodes_per_axis;

  // Boundary-face test vectors gamma phi_j(end) - n phi_j'(end)/h as (k+1) x 1 matrices.
  std::array<Matrix1D, 2> face_vec{Matrix1D(n1, 1), Matrix1D(n1, 1)};
  for (int side = 0; side < 2; ++side) {
    const double x = side == 0 ? 0.0 : 1.0, normal = side == 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n1; ++j)
      face_vec[static_cast<std::size_t>(side)](j, 0) =
          gamma * basis.value(static_cast<int>(j), x) - normal * basis.derivative(static_cast<int>(j), x) / mesh.h;
  }

  std::vector<double> b(mesh.n_dofs, 0.0);
  const Extents qext = Extents::cube(mesh.dim, static_cast<std::size_t>(nq));
  for_each_cell(mesh, [&](const MultiIndex& c) {
    TensorField fq(qext);
    for_each_index(qext, [&](const MultiIndex& q) {
      fq.at(q[0], q[1], q[2]) = f(quad_point(mesh, c, q, rule)) * quad_weight(mesh, q, rule);
    });
    TensorField bc = apply_factors(st_all, fq);

    for (int a = 0; a < mesh.dim; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      for (int side = 0; side < 2; ++side) {
        const bool on_boundary = side == 0 ? c[ua] == 0 : c[ua] + 1 == mesh.cells_per_axis;
        if (!on_boundary) continue;
        const Extents fext = qext.with(a, 1);
        TensorField gq(fext);
        for_each_index(fext, [&](const MultiIndex& q) {
          Point x{0.0, 0.0, 0.0};
          double w = 1.0;
          for (int t = 0; t < mesh.dim; ++t) {
            const auto ut = static_cast<std::size_t>(t);
            if (t == a) {
              x[ut] = (static_cast<double>(c[ut]) + side) * mesh.h;
            } else {
              x[ut] = (static_cast<double>(c[ut]) + rule.points[q[ut]]) * mesh.h;
              w *= rule.weights[q[ut]] * mesh.h;
            }
          }
          gq.at(q[0], q[1], q[2]) = g(x) * w;
        });
        std::vector<Matrix1D> factors(st_all.begin(), st_all.begin() + mesh.dim);
        factors[ua] = face_vec[static_cast<std::size_t>(side)];
        const TensorField contrib = apply_factors(factors, gq);
        for (std::size_t i = 0; i < bc.size(); ++i) bc[i] += contrib[i];
      }
    }
    const std::size_t base = mesh.cell_index(c) * mesh.dofs_per_cell;
    for (std::size_t i = 0; i < bc.size(); ++i) b[base + i] = bc[i];
  });
  return b;
}

double l2_error(const LevelMesh& mesh, std::span<const double> u_h, const ScalarFunction& u, int n_quad) {
  check_length(mesh, u_h);
  const int nq = n_quad > 0 ? n_quad : mesh.degree + 3;
  const Basis1D basis(mesh.degree, nq);
  const std::vector<Matrix1D> s(3, basis.values);
  const Extents qext = Extents::cube(mesh.dim, static_cast<std::size_t>(nq));
  double sum = 0.0;
  for_each_cell(mesh, [&](const MultiIndex& c) {
    const TensorField uq = apply_factors(s, gather_cell(mesh, c, u_h));
    for_each_index(qext, [&](const MultiIndex& q) {
      const double e = uq.at(q[0], q[1], q[2]) - u(quad_point(mesh, c, q, basis.quadrature));
      sum += quad_weight(mesh, q, basis.quadrature) * e * e;
    });
  });
  return std::sqrt(sum);
}

double h1_seminorm_error(const LevelMesh& mesh, std::span<const double> u_h, const GradientFunction& grad_u,
                         int n_quad) {
  check_length(mesh, u_h);
  const int nq = n_quad > 0 ? n_quad : mesh.degree + 3;
  const Basis1D basis(mesh.degree, nq);
  const Matrix1D d_phys = (1.0 / mesh.h) * basis.derivatives;
  const Extents qext = Extents::cube(mesh.dim, static_cast<std::size_t>(nq));
  double sum = 0.0;
  for_each_cell(mesh, [&](const MultiIndex& c) {
    const TensorField uc = gather_cell(mesh, c, u_h);
    std::array<TensorField, 3> grad;
    for (int a = 0; a < mesh.dim; ++a) {
      std::vector<Matrix1D> f(3, basis.values);
      f[static_cast<std::size_t>(a)] = d_phys;
      grad[static_cast<std::size_t>(a)] = apply_factors(f, uc);
    }
    for_each_index(qext, [&](const MultiIndex& q) {
      const Point g = grad_u(quad_point(mesh, c, q, basis.quadrature));
      double e2 = 0.0;
      for (int a = 0; a < mesh.dim; ++a) {
        const double e = grad[static_cast<std::size_t>(a)].at(q[0], q[1], q[2]) - g[static_cast<std::size_t>(a)];
        e2 += e * e;
      }
      sum += quad_weight(mesh, q, basis.quadrature) * e2;
    });
  });
  return std::sqrt(sum);
}

ManufacturedProblem sine_problem(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("sine_problem: dimension must be 1, 2 or 3");
  constexpr double pi = std::numbers::pi;
  ManufacturedProblem p;
  p.solution = [dim](const Point& x) {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= std::sin(pi * x[static_cast<std::size_t>(a)]);
    return v;
  };
  p.gradient = [dim](const Point& x) {
    Point g{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      double v = pi;
      for (int b = 0; b < dim; ++b) {
        const double xb = pi * x[static_cast<std::size_t>(b)];
        v *= b == a ? std::cos(xb) : std::sin(xb);
      }
      g[static_cast<std::size_t>(a)] = v;
    }
    return g;
  };
  p.rhs = [dim, u = p.solution](const Point& x) { return dim * pi * pi * u(x); };
  p.boundary = [](const Point&) { return 0.0; };
  return p;
}

void write_vector_csv(std::ostream& os, std::span<const double> v) {
  os << "index,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << i << ',' << v[i] << '\n';
}

}  // namespace tcfem
