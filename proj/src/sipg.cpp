#include "tcfem/sipg.hpp"

#include <array>
#include <stdexcept>
#include <vector>

#include "tcfem/quadrature.hpp"

namespace tcfem {

std::string_view to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::interior: return "interior";
    case BoundaryKind::left_boundary: return "left_boundary";
    case BoundaryKind::right_boundary: return "right_boundary";
    case BoundaryKind::both: return "both";
  }
  return "unknown";
}

BoundaryKind boundary_kind(bool left_on_boundary, bool right_on_boundary) {
  if (left_on_boundary && right_on_boundary) return BoundaryKind::both;
  if (left_on_boundary) return BoundaryKind::left_boundary;
  if (right_on_boundary) return BoundaryKind::right_boundary;
  return BoundaryKind::interior;
}

double penalty(int k, double h_plus, double h_minus) {
  if (!(h_plus > 0.0) || !(h_minus > 0.0)) throw std::invalid_argument("penalty: cell sizes must be positive");
  return k * (k + 1.0) * (1.0 / h_plus + 1.0 / h_minus);
}

CellMatrices1D cell_matrices_1d(int k, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("cell_matrices_1d: h must be positive");
  const Basis1D basis(k, k + 1);
  const auto n = static_cast<std::size_t>(k + 1);
  CellMatrices1D c{Matrix1D(n, n), Matrix1D(n, n)};
  const auto& w = basis.quadrature.weights;
  for (std::size_t q = 0; q < w.size(); ++q)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        c.mass(i, j) += w[q] * basis.values(q, i) * basis.values(q, j);
        c.stiffness(i, j) += w[q] * basis.derivatives(q, i) * basis.derivatives(q, j);
      }
  c.mass *= h;
  c.stiffness *= 1.0 / h;
  return c;
}

namespace {

struct EndTraces {
  std::vector<double> value;       // phi_j at the end point
  std::vector<double> derivative;  // physical derivative phi_j'(end) / h
};

EndTraces end_traces(int k, double h, bool left_end) {
  const Basis1D basis(k);
  const double x = left_end ? 0.0 : 1.0;
  EndTraces t;
  for (int j = 0; j <= k; ++j) {
    t.value.push_back(basis.value(j, x));
    t.derivative.push_back(basis.derivative(j, x) / h);
  }
  return t;
}

// gamma J J^T - J G^T - G J^T for jump vector J and average-derivative vector G.
Matrix1D face_form(const std::vector<double>& jump, const std::vector<double>& avg, double gamma) {
  const std::size_t n = jump.size();
  Matrix1D f(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) f(i, j) = gamma * jump[i] * jump[j] - jump[i] * avg[j] - avg[i] * jump[j];
  return f;
}

// Interior-face jump and average vectors over [left cell, right cell].
std::pair<std::vector<double>, std::vector<double>> interior_face_vectors(int k, double h) {
  const EndTraces minus = end_traces(k, h, false);  // left cell at its right end
  const EndTraces plus = end_traces(k, h, true);    // right cell at its left end
  std::vector<double> jump, avg;
  for (int j = 0; j <= k; ++j) {
    jump.push_back(minus.value[static_cast<std::size_t>(j)]);
    avg.push_back(0.5 * minus.derivative[static_cast<std::size_t>(j)]);
  }
  for (int j = 0; j <= k; ++j) {
    jump.push_back(-plus.value[static_cast<std::size_t>(j)]);
    avg.push_back(0.5 * plus.derivative[static_cast<std::size_t>(j)]);
  }
  return {jump, avg};
}

Matrix1D sub_block(const Matrix1D& m, std::size_t r0, std::size_t c0, std::size_t n) {
  Matrix1D b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = m(r0 + i, c0 + j);
  return b;
}

void add_block(Matrix1D& m, const Matrix1D& b, std::size_t r0, std::size_t c0) {
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) m(r0 + i, c0 + j) += b(i, j);
}

}  // namespace

Matrix1D interior_face_matrix_1d(int k, double h) {
  const auto [jump, avg] = interior_face_vectors(k, h);
  return face_form(jump, avg, penalty(k, h, h));
}

Matrix1D boundary_face_matrix_1d(int k, double h, bool left_end) {
  const EndTraces t = end_traces(k, h, left_end);
  // Outward normal is -1 on the left end and +1 on the right end; with
  // [u] = u n and {u'} = u' the form is gamma u v - (u' n) v - u (v' n).
  const double n = left_end ? -1.0 : 1.0;
  std::vector<double> jump, avg;
  for (int j = 0; j <= k; ++j) {
    jump.push_back(n * t.value[static_cast<std::size_t>(j)]);
    avg.push_back(t.derivative[static_cast<std::size_t>(j)]);
  }
  return face_form(jump, avg, penalty(k, h, h));
}

PatchMatrices1D patch_matrices_1d(int k, double h, BoundaryKind kind) {
  const CellMatrices1D cell = cell_matrices_1d(k, h);
  const auto n = static_cast<std::size_t>(k + 1);
  const std::array<Matrix1D, 2> masses{cell.mass, cell.mass};
  const std::array<Matrix1D, 2> stiffs{cell.stiffness, cell.stiffness};
  PatchMatrices1D p{block_diagonal(masses), block_diagonal(stiffs), kind};
  p.stiffness += interior_face_matrix_1d(k, h);
  if (touches_left(kind)) add_block(p.stiffness, boundary_face_matrix_1d(k, h, true), 0, 0);
  if (touches_right(kind)) add_block(p.stiffness, boundary_face_matrix_1d(k, h, false), n, n);
  return p;
}

PatchMatrices1D local_patch_matrices_1d(int k, double h, BoundaryKind kind) {
  PatchMatrices1D p = patch_matrices_1d(k, h, kind);
  const auto n = static_cast<std::size_t>(k + 1);
  const Matrix1D face = interior_face_matrix_1d(k, h);
  // An interior outer face contributes the block of its own side: the patch's
  // first cell is the right neighbour of the face on its left end.
  if (!touches_left(kind)) add_block(p.stiffness, sub_block(face, n, n, n), 0, 0);
  if (!touches_right(kind)) add_block(p.stiffness, sub_block(face, 0, 0, n), n, n);
  return p;
}

CellMatrices1D global_matrices_1d(int k, double h, std::size_t cells) {
  const CellMatrices1D cell = cell_matrices_1d(k, h);
  const auto n = static_cast<std::size_t>(k + 1);
  const Matrix1D face = interior_face_matrix_1d(k, h);
  CellMatrices1D g{Matrix1D(cells * n, cells * n), Matrix1D(cells * n, cells * n)};
  for (std::size_t c = 0; c < cells; ++c) {
    add_block(g.mass, cell.mass, c * n, c * n);
    add_block(g.stiffness, cell.stiffness, c * n, c * n);
  }
  for (std::size_t c = 0; c + 1 < cells; ++c) add_block(g.stiffness, face, c * n, c * n);
  add_block(g.stiffness, boundary_face_matrix_1d(k, h, true), 0, 0);
  add_block(g.stiffness, boundary_face_matrix_1d(k, h, false), (cells - 1) * n, (cells - 1) * n);
  return g;
}

}  // namespace tcfem
