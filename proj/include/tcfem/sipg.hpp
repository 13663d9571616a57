#pragma once

#include <string_view>

#include "tcfem/tensor.hpp"

namespace tcfem {

/// Which ends of a two-cell patch lie on the domain boundary.
enum class BoundaryKind { interior, left_boundary, right_boundary, both };

std::string_view to_string(BoundaryKind kind);
BoundaryKind boundary_kind(bool left_on_boundary, bool right_on_boundary);
inline bool touches_left(BoundaryKind k) { return k == BoundaryKind::left_boundary || k == BoundaryKind::both; }
inline bool touches_right(BoundaryKind k) { return k == BoundaryKind::right_boundary || k == BoundaryKind::both; }

/// Edge-wise interior penalty k(k+1)(1/h+ + 1/h-).
double penalty(int k, double h_plus, double h_minus);

struct CellMatrices1D {
  Matrix1D mass;       // h * int phi_i phi_j
  Matrix1D stiffness;  // (1/h) * int phi_i' phi_j'
};

/// Exact 1D cell mass and stiffness matrices on a cell of size h.
CellMatrices1D cell_matrices_1d(int k, double h);

/// SIPG terms of the face shared by two neighbouring cells, acting on the
/// 2(k+1) DoFs [left cell, right cell]:
/// gamma [u][v] - {u'}[v] - [u]{v'} with [u] = u(left) - u(right).
Matrix1D interior_face_matrix_1d(int k, double h);

/// Nitsche terms of a boundary face on the left (x = 0 of the cell) or right end.
Matrix1D boundary_face_matrix_1d(int k, double h, bool left_end);

/// Operator-evaluation factors of a two-cell patch: block-diagonal mass, and
/// stiffness made of both cell blocks, the shared face, and Nitsche terms on
/// the ends flagged by `kind`.
struct PatchMatrices1D {
  Matrix1D mass;
  Matrix1D stiffness;
  BoundaryKind kind = BoundaryKind::interior;
};

PatchMatrices1D patch_matrices_1d(int k, double h, BoundaryKind kind);

/// Restriction of the global 1D matrices to the DoFs of a two-cell patch.
/// Unlike patch_matrices_1d, interior outer faces contribute their one-sided
/// terms, so the Kronecker sum of these factors equals the global operator
/// restricted to the patch (the local problem of the Schwarz smoother).
PatchMatrices1D local_patch_matrices_1d(int k, double h, BoundaryKind kind);

/// Global 1D SIPG matrices on `cells` cells of size h with Nitsche terms at both ends.
CellMatrices1D global_matrices_1d(int k, double h, std::size_t cells);

}  // namespace tcfem
