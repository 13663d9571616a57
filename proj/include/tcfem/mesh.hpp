#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tcfem/common.hpp"
#include "tcfem/sipg.hpp"

namespace tcfem {

using MultiIndex = std::array<std::size_t, 3>;

/// One uniform Cartesian DG level on [0,1]^dim: 2^level cells per axis of
/// size 2^-level, (k+1)^dim Gauss-Lobatto DoFs per cell. DoFs are numbered
/// cell by cell (cells lexicographic, x fastest), then lexicographically
/// inside the cell.
struct LevelMesh {
  int dim = 3;
  int level = 1;
  int degree = 1;
  std::size_t cells_per_axis = 2;
  std::size_t nodes_per_axis = 2;  // k + 1
  std::size_t dofs_per_cell = 8;
  std::size_t n_cells = 8;
  std::size_t n_dofs = 64;
  double h = 0.5;

  LevelMesh() = default;
  /// Requires dim in {1,2,3}, level >= 1 and degree >= 1.
  LevelMesh(int dim, int level, int degree);

  Extents cell_extents() const { return Extents::cube(dim, nodes_per_axis); }
  std::size_t cell_index(const MultiIndex& cell) const;
  std::size_t dof_index(const MultiIndex& cell, const MultiIndex& local) const;
};

/// Disjoint patches of two cells per axis. Along an axis with shift 0 the
/// patches cover cells (2i, 2i+1); with shift 1 they cover (2i+1, 2i+2) and
/// skip the outermost cells.
struct PatchTiling {
  std::array<int, 3> shift{0, 0, 0};
  std::size_t patch_size = 0;  // (2(k+1))^dim
  Extents patch_extents;
  std::vector<MultiIndex> first_cell;
  std::vector<std::array<BoundaryKind, 3>> kinds;
  std::vector<std::uint32_t> dof_map;  // patch p owns [p*patch_size, (p+1)*patch_size)

  std::size_t size() const { return first_cell.size(); }
  std::span<const std::uint32_t> map(std::size_t p) const {
    return std::span<const std::uint32_t>(dof_map).subspan(p * patch_size, patch_size);
  }
};

PatchTiling make_tiling(const LevelMesh& mesh, std::array<int, 3> shift);

/// All 2^dim shifts in lexicographic order (x fastest): the colours of the
/// multiplicative smoother.
std::vector<std::array<int, 3>> all_shifts(int dim);

}  // namespace tcfem
