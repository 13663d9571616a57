#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "tcfem/level_operator.hpp"
#include "tcfem/precision.hpp"

namespace tcfem {

/// Buffers for one PatchSolver application; one per thread.
template <class Real>
struct PatchSolveScratch {
  ContractionWorkspace<Real> ws;
  std::vector<Real> mid;
};

/// Exact inverse of a patch Kronecker sum by fast diagonalization.
///
/// Per axis the generalized eigenproblem L v = lambda M v gives V with
/// V^T M V = I and V^T L V = Lambda, so A^-1 = (⊗V) diag(1/sum lambda) (⊗V^T).
class PatchSolver {
 public:
  PatchSolver() = default;
  /// Throws SingularMatrixError when an eigenvalue sum is not positive.
  PatchSolver(std::span<const Matrix1D> mass, std::span<const Matrix1D> stiffness, EcSides sides = EcSides::both);

  int dim() const { return dim_; }
  const Extents& extents() const { return extents_; }
  const std::vector<double>& eigenvalues(int axis) const { return lambda_[static_cast<std::size_t>(axis)]; }

  /// e = A^-1 r in binary64.
  TensorField apply(const TensorField& r) const;
  void apply(std::span<const double> r, std::span<double> e, PatchSolveScratch<double>& s) const;
  /// e = A^-1 r in the arithmetic of a binary32-storage mode.
  void apply(std::span<const float> r, std::span<float> e, PrecisionMode mode, PatchSolveScratch<float>& s) const;

 private:
  int dim_ = 0;
  Extents extents_;
  std::array<std::vector<double>, 3> lambda_;
  std::vector<double> inv_diag_;
  std::vector<float> inv_diag_f32_;
  PreparedSeparable<double> to_eigen_f64_, from_eigen_f64_;
  std::array<PreparedSeparable<float>, 3> to_eigen_f32_, from_eigen_f32_;  // fp32, fp16, fp16_ec
};

/// Piecewise polynomial embedding of level l-1 into level l (prolongation)
/// and its transpose (restriction).
class Transfer {
 public:
  Transfer(const LevelMesh& coarse, const LevelMesh& fine, EcSides sides = EcSides::both);

  /// The 1D embedding of a parent cell into its left (0) or right (1) child:
  /// P[i][j] = phi_j((s + x_i) / 2).
  static Matrix1D embedding_1d(int k, int child);

  const LevelMesh& coarse() const { return coarse_; }
  const LevelMesh& fine() const { return fine_; }

  /// fine = I_up coarse, written (not added).
  template <class Real>
  void prolongate(std::span<const Real> coarse, std::span<Real> fine, PrecisionMode mode) const;
  /// coarse = I_up^T fine.
  template <class Real>
  void restrict_to_coarse(std::span<const Real> fine, std::span<Real> coarse, PrecisionMode mode) const;

 private:
  template <class Real>
  const PreparedSeparable<Real>& op(bool up, std::size_t child, PrecisionMode mode) const;

  LevelMesh coarse_, fine_;
  std::size_t children_ = 0;
  std::vector<PreparedSeparable<double>> up_f64_, down_f64_;
  std::array<std::vector<PreparedSeparable<float>>, 3> up_f32_, down_f32_;
};

struct VCycleConfig {
  int pre_smooth_steps = 1;
  int post_smooth_steps = 1;
  int coarse_level = 1;
  PrecisionMode mode = PrecisionMode::fp64;
  EcSides sides = EcSides::both;
};

/// Geometric multigrid on a MeshHierarchy with multiplicative vertex-patch
/// Schwarz smoothing. All level work runs in config.mode; for the binary32
/// modes vectors are converted only on entry to and exit from the cycle.
class Multigrid {
 public:
  Multigrid(const MeshHierarchy& hierarchy, VCycleConfig config);
  ~Multigrid();
  Multigrid(Multigrid&&) noexcept;

  const VCycleConfig& config() const { return config_; }
  const MeshHierarchy& hierarchy() const { return *hierarchy_; }
  int finest_level() const { return hierarchy_->max_level; }

  /// One V-cycle on level l starting from x (updated in place).
  void vcycle(int level, std::span<double> x, std::span<const double> b) const;
  /// One V-cycle from a zero initial guess on the finest level.
  std::vector<double> precondition(std::span<const double> r) const;

  /// One multiplicative smoothing sweep over the 2^dim patch colours.
  void smooth(int level, std::span<double> x, std::span<const double> b) const;
  std::vector<double> restrict_to_coarse(int fine_level, std::span<const double> r) const;
  std::vector<double> prolongate(int coarse_level, std::span<const double> e) const;
  std::vector<double> coarse_solve(std::span<const double> b) const;

  /// The local solver of a smoother patch, selected by its per-axis boundary kinds.
  const PatchSolver& patch_solver(int level, const std::array<BoundaryKind, 3>& kinds) const;

  template <class Real>
  void vcycle_impl(int level, std::span<Real> x, std::span<const Real> b) const;
  template <class Real>
  void smooth_impl(int level, std::span<Real> x, std::span<const Real> b) const;
  template <class Real>
  void coarse_solve_impl(std::span<const Real> b, std::span<Real> x) const;

 private:
  struct LevelData;
  struct CoarseFactor;

  const LevelData& level_data(int l) const;

  const MeshHierarchy* hierarchy_;
  VCycleConfig config_;
  std::vector<std::unique_ptr<LevelData>> levels_;
  std::vector<std::unique_ptr<Transfer>> transfers_;  // transfers_[l - coarse_level - 1]: (l-1) -> l
  std::unique_ptr<CoarseFactor> coarse_;
};

}  // namespace tcfem
