#include "tcfem/mesh.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace tcfem {

LevelMesh::LevelMesh(int d, int l, int k) : dim(d), level(l), degree(k) {
  if (d < 1 || d > 3) throw std::invalid_argument("LevelMesh: dimension must be 1, 2 or 3");
  if (l < 1 || l > 20) throw std::invalid_argument("LevelMesh: level must be in [1, 20], got " + std::to_string(l));
  if (k < 1) throw std::invalid_argument("LevelMesh: degree must be >= 1");
  cells_per_axis = std::size_t{1} << l;
  nodes_per_axis = static_cast<std::size_t>(k + 1);
  dofs_per_cell = 1;
  n_cells = 1;
  for (int a = 0; a < d; ++a) {
    dofs_per_cell *= nodes_per_axis;
    n_cells *= cells_per_axis;
  }
  n_dofs = n_cells * dofs_per_cell;
  h = 1.0 / static_cast<double>(cells_per_axis);
}

std::size_t LevelMesh::cell_index(const MultiIndex& c) const {
  return c[0] + cells_per_axis * (c[1] + cells_per_axis * c[2]);
}

std::size_t LevelMesh::dof_index(const MultiIndex& c, const MultiIndex& l) const {
  return cell_index(c) * dofs_per_cell + l[0] + nodes_per_axis * (l[1] + nodes_per_axis * l[2]);
}

PatchTiling make_tiling(const LevelMesh& mesh, std::array<int, 3> shift) {
  PatchTiling t;
  t.shift = shift;
  const std::size_t n1 = mesh.nodes_per_axis;
  t.patch_extents = Extents::cube(mesh.dim, 2 * n1);
  t.patch_size = t.patch_extents.size();
  if (mesh.n_dofs > std::numeric_limits<std::uint32_t>::max())
    throw std::length_error("make_tiling: level too large for 32-bit DoF maps");

  std::array<std::size_t, 3> count{1, 1, 1};
  for (int a = 0; a < mesh.dim; ++a) {
    if (shift[static_cast<std::size_t>(a)] != 0 && shift[static_cast<std::size_t>(a)] != 1)
      throw std::invalid_argument("make_tiling: shifts must be 0 or 1");
    count[static_cast<std::size_t>(a)] = mesh.cells_per_axis / 2 - static_cast<std::size_t>(shift[static_cast<std::size_t>(a)]);
  }
  const std::size_t n_patches = count[0] * count[1] * count[2];
  t.first_cell.reserve(n_patches);
  t.kinds.reserve(n_patches);
  t.dof_map.resize(n_patches * t.patch_size);

  const Extents& pe = t.patch_extents;
  std::size_t p = 0;
  for (std::size_t iz = 0; iz < count[2]; ++iz)
    for (std::size_t iy = 0; iy < count[1]; ++iy)
      for (std::size_t ix = 0; ix < count[0]; ++ix, ++p) {
        const std::array<std::size_t, 3> idx{ix, iy, iz};
        MultiIndex first{0, 0, 0};
        std::array<BoundaryKind, 3> kinds{BoundaryKind::interior, BoundaryKind::interior, BoundaryKind::interior};
        for (int a = 0; a < mesh.dim; ++a) {
          const auto ua = static_cast<std::size_t>(a);
          first[ua] = 2 * idx[ua] + static_cast<std::size_t>(shift[ua]);
          kinds[ua] = boundary_kind(first[ua] == 0, first[ua] + 2 == mesh.cells_per_axis);
        }
        t.first_cell.push_back(first);
        t.kinds.push_back(kinds);

        std::uint32_t* out = t.dof_map.data() + p * t.patch_size;
        for (std::size_t az = 0; az < pe[2]; ++az)
          for (std::size_t ay = 0; ay < pe[1]; ++ay)
            for (std::size_t ax = 0; ax < pe[0]; ++ax) {
              const MultiIndex a{ax, ay, az};
              MultiIndex cell = first, local{0, 0, 0};
              for (int d = 0; d < mesh.dim; ++d) {
                const auto ud = static_cast<std::size_t>(d);
                cell[ud] += a[ud] / n1;
                local[ud] = a[ud] % n1;
              }
              *out++ = static_cast<std::uint32_t>(mesh.dof_index(cell, local));
            }
      }
  return t;
}

std::vector<std::array<int, 3>> all_shifts(int dim) {
  std::vector<std::array<int, 3>> s;
  const int n = 1 << dim;
  for (int c = 0; c < n; ++c) s.push_back({c & 1, dim > 1 ? (c >> 1) & 1 : 0, dim > 2 ? (c >> 2) & 1 : 0});
  return s;
}

}  // namespace tcfem
