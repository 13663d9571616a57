#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "tcfem/mesh.hpp"
#include "tcfem/precision.hpp"
#include "tcfem/sipg.hpp"

namespace tcfem {

/// One tiling traversal of the operator: each patch applies the separable
/// operator selected by op_index.
struct OperatorPass {
  PatchTiling tiling;
  std::vector<SeparableOperator> ops;
  std::vector<std::uint16_t> op_index;  // per patch
};

/// Matrix-free SIPG Laplacian of one level.
///
/// Pass 0 visits the unshifted tiling with the full Kronecker sum of
/// patch_matrices_1d: it integrates every cell, every face interior to a
/// patch and every boundary face. Pass d (d = 1..dim) visits the tiling
/// shifted by one cell along axis d-1 and integrates only the faces normal to
/// that axis that lie between two unshifted patches. Every integral is
/// therefore counted once.
class LevelOperator {
 public:
  explicit LevelOperator(const LevelMesh& mesh, EcSides sides = EcSides::both);

  const LevelMesh& mesh() const { return mesh_; }
  std::size_t size() const { return mesh_.n_dofs; }
  const std::vector<OperatorPass>& passes() const { return passes_; }

  /// v = A u in binary64.
  void apply(std::span<const double> u, std::span<double> v) const;
  /// v = A u with binary32 storage and the contraction arithmetic of `mode`
  /// (fp32, fp16 or fp16_ec).
  void apply(std::span<const float> u, std::span<float> v, PrecisionMode mode) const;
  /// Converts to the storage of `mode` and back.
  std::vector<double> apply(std::span<const double> u, PrecisionMode mode = PrecisionMode::fp64) const;

  /// Operator-evaluation factors and smoother-local factors per boundary kind.
  const PatchMatrices1D& patch_matrices(BoundaryKind kind) const { return eval_[static_cast<std::size_t>(kind)]; }
  const PatchMatrices1D& local_patch_matrices(BoundaryKind kind) const {
    return local_[static_cast<std::size_t>(kind)];
  }

 private:
  template <class Real>
  void apply_passes(std::span<const Real> u, std::span<Real> v, PrecisionMode mode) const;

  LevelMesh mesh_;
  std::array<PatchMatrices1D, 4> eval_;
  std::array<PatchMatrices1D, 4> local_;
  std::vector<OperatorPass> passes_;
  // prepared_f64_[pass][op]; prepared_f32_[mode-1][pass][op]
  std::vector<std::vector<PreparedSeparable<double>>> prepared_f64_;
  std::array<std::vector<std::vector<PreparedSeparable<float>>>, 3> prepared_f32_;
};

/// Nested levels min_level..max_level of one discretization.
struct MeshHierarchy {
  int dim = 3;
  int degree = 1;
  int min_level = 1;
  int max_level = 1;
  std::vector<LevelOperator> levels;  // levels[l - min_level]

  const LevelOperator& level(int l) const;
  std::size_t dofs(int l) const { return level(l).size(); }
};

inline constexpr std::size_t kDefaultDofCap = 20'000'000;

/// Builds levels min_level..max_level. Throws std::length_error when the
/// finest level would exceed dof_cap DoFs.
MeshHierarchy build_hierarchy(int max_level, int k, int dim = 3, int min_level = 1,
                              std::size_t dof_cap = kDefaultDofCap, EcSides sides = EcSides::both);

}  // namespace tcfem
