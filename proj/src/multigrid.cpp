#include "tcfem/multigrid.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "tcfem/parallel.hpp"
#include "tcfem/quadrature.hpp"

namespace tcfem {

// ---------------------------------------------------------------- PatchSolver

PatchSolver::PatchSolver(std::span<const Matrix1D> mass, std::span<const Matrix1D> stiffness, EcSides sides) {
  if (mass.size() != stiffness.size() || mass.empty() || mass.size() > 3)
    throw ContractViolation("PatchSolver: need one (mass, stiffness) pair per axis, 1 to 3 axes");
  dim_ = static_cast<int>(mass.size());
  std::array<std::size_t, 3> n{1, 1, 1};
  std::vector<Matrix1D> fwd, bwd;
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const Matrix1D& m = mass[ua];
    const Matrix1D& l = stiffness[ua];
    if (m.rows() != m.cols() || l.rows() != m.rows() || l.cols() != m.cols())
      throw ContractViolation("PatchSolver: mass and stiffness must be square and of equal size");
    const Eigen::Index s = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXd em(s, s), el(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
      for (Eigen::Index j = 0; j < s; ++j) {
        em(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        el(i, j) = l(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(el, em);
    if (es.info() != Eigen::Success) throw SingularMatrixError("PatchSolver: generalized eigenproblem failed");
    Matrix1D v(m.rows(), m.rows());
    for (Eigen::Index i = 0; i < s; ++i) {
      lambda_[ua].push_back(es.eigenvalues()(i));
      for (Eigen::Index j = 0; j < s; ++j)
        v(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = es.eigenvectors()(i, j);
    }
    fwd.push_back(v.transposed());
    bwd.push_back(v);
    n[ua] = m.rows();
  }
  extents_ = Extents(dim_, n);

  inv_diag_.resize(extents_.size());
  inv_diag_f32_.resize(extents_.size());
  std::size_t idx = 0;
  for (std::size_t k = 0; k < n[2]; ++k)
    for (std::size_t j = 0; j < n[1]; ++j)
      for (std::size_t i = 0; i < n[0]; ++i, ++idx) {
        double s = lambda_[0][i];
        if (dim_ > 1) s += lambda_[1][j];
        if (dim_ > 2) s += lambda_[2][k];
        if (!(s > 0.0)) throw SingularMatrixError("PatchSolver: patch operator is not positive definite");
        inv_diag_[idx] = 1.0 / s;
        inv_diag_f32_[idx] = static_cast<float>(inv_diag_[idx]);
      }

  const SeparableOperator to_eigen(dim_, {fwd}), from_eigen(dim_, {bwd});
  to_eigen_f64_ = PreparedSeparable<double>(to_eigen, PrecisionMode::fp64, sides);
  from_eigen_f64_ = PreparedSeparable<double>(from_eigen, PrecisionMode::fp64, sides);
  for (PrecisionMode mode : {PrecisionMode::fp32, PrecisionMode::fp16, PrecisionMode::fp16_ec}) {
    to_eigen_f32_[binary32_slot(mode)] = PreparedSeparable<float>(to_eigen, mode, sides);
    from_eigen_f32_[binary32_slot(mode)] = PreparedSeparable<float>(from_eigen, mode, sides);
  }
}

TensorField PatchSolver::apply(const TensorField& r) const {
  if (r.extents() != extents_) throw ContractViolation("PatchSolver::apply: residual extents do not match the patch");
  TensorField e(extents_);
  PatchSolveScratch<double> s;
  apply(r.values(), e.values(), s);
  return e;
}

void PatchSolver::apply(std::span<const double> r, std::span<double> e, PatchSolveScratch<double>& s) const {
  s.mid.resize(extents_.size());
  to_eigen_f64_.apply(r, s.mid, s.ws);
  for (std::size_t i = 0; i < s.mid.size(); ++i) s.mid[i] *= inv_diag_[i];
  from_eigen_f64_.apply(s.mid, e, s.ws);
}

void PatchSolver::apply(std::span<const float> r, std::span<float> e, PrecisionMode mode,
                        PatchSolveScratch<float>& s) const {
  const std::size_t slot = binary32_slot(mode);
  s.mid.resize(extents_.size());
  to_eigen_f32_[slot].apply(r, s.mid, s.ws);
  for (std::size_t i = 0; i < s.mid.size(); ++i) s.mid[i] *= inv_diag_f32_[i];
  from_eigen_f32_[slot].apply(s.mid, e, s.ws);
}

// ------------------------------------------------------------------- Transfer

Matrix1D Transfer::embedding_1d(int k, int child) {
  if (child != 0 && child != 1) throw std::invalid_argument("embedding_1d: child must be 0 or 1");
  const Basis1D basis(k);
  const std::size_t n = basis.nodes.size();
  Matrix1D p(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = basis.value(static_cast<int>(j), (child + basis.nodes[i]) / 2.0);
  return p;
}

Transfer::Transfer(const LevelMesh& coarse, const LevelMesh& fine, EcSides sides) : coarse_(coarse), fine_(fine) {
  if (coarse.dim != fine.dim || coarse.degree != fine.degree || fine.level != coarse.level + 1)
    throw std::invalid_argument("Transfer: levels must be consecutive with equal dimension and degree");
  const std::array<Matrix1D, 2> p{embedding_1d(coarse.degree, 0), embedding_1d(coarse.degree, 1)};
  children_ = std::size_t{1} << coarse.dim;
  for (std::size_t c = 0; c < children_; ++c) {
    std::vector<Matrix1D> up, down;
    for (int a = 0; a < coarse.dim; ++a) {
      const Matrix1D& m = p[(c >> a) & 1];
      up.push_back(m);
      down.push_back(m.transposed());
    }
    const SeparableOperator up_op(coarse.dim, {up}), down_op(coarse.dim, {down});
    up_f64_.emplace_back(up_op, PrecisionMode::fp64, sides);
    down_f64_.emplace_back(down_op, PrecisionMode::fp64, sides);
    for (PrecisionMode mode : {PrecisionMode::fp32, PrecisionMode::fp16, PrecisionMode::fp16_ec}) {
      up_f32_[binary32_slot(mode)].emplace_back(up_op, mode, sides);
      down_f32_[binary32_slot(mode)].emplace_back(down_op, mode, sides);
    }
  }
}

template <class Real>
const PreparedSeparable<Real>& Transfer::op(bool up, std::size_t child, PrecisionMode mode) const {
  if constexpr (sizeof(Real) == 8) {
    return (up ? up_f64_ : down_f64_)[child];
  } else {
    return (up ? up_f32_ : down_f32_)[binary32_slot(mode)][child];
  }
}

namespace {

MultiIndex child_cell(const MultiIndex& parent, std::size_t child) {
  return {2 * parent[0] + (child & 1), 2 * parent[1] + ((child >> 1) & 1), 2 * parent[2] + ((child >> 2) & 1)};
}

MultiIndex unflatten_cell(const LevelMesh& mesh, std::size_t c) {
  const std::size_t n = mesh.cells_per_axis;
  return {c % n, mesh.dim > 1 ? (c / n) % n : 0, mesh.dim > 2 ? c / (n * n) : 0};
}

}  // namespace

template <class Real>
void Transfer::prolongate(std::span<const Real> coarse, std::span<Real> fine, PrecisionMode mode) const {
  if (coarse.size() != coarse_.n_dofs || fine.size() != fine_.n_dofs)
    throw ContractViolation("Transfer::prolongate: vector lengths do not match the levels");
  const std::size_t nc = coarse_.dofs_per_cell;
  std::vector<ContractionWorkspace<Real>> ws(static_cast<std::size_t>(thread_count()));
  parallel_for(coarse_.n_cells, [&](std::size_t begin, std::size_t end, std::size_t w) {
    for (std::size_t c = begin; c < end; ++c) {
      const MultiIndex parent = unflatten_cell(coarse_, c);
      const auto src = coarse.subspan(c * nc, nc);
      for (std::size_t ch = 0; ch < children_; ++ch) {
        const std::size_t f = fine_.cell_index(child_cell(parent, ch));
        op<Real>(true, ch, mode).apply(src, fine.subspan(f * nc, nc), ws[w]);
      }
    }
  });
}

template <class Real>
void Transfer::restrict_to_coarse(std::span<const Real> fine, std::span<Real> coarse, PrecisionMode mode) const {
  if (coarse.size() != coarse_.n_dofs || fine.size() != fine_.n_dofs)
    throw ContractViolation("Transfer::restrict_to_coarse: vector lengths do not match the levels");
  const std::size_t nc = coarse_.dofs_per_cell;
  const auto workers = static_cast<std::size_t>(thread_count());
  std::vector<ContractionWorkspace<Real>> ws(workers);
  std::vector<std::vector<Real>> tmp(workers, std::vector<Real>(nc));
  parallel_for(coarse_.n_cells, [&](std::size_t begin, std::size_t end, std::size_t w) {
    for (std::size_t c = begin; c < end; ++c) {
      const MultiIndex parent = unflatten_cell(coarse_, c);
      auto dst = coarse.subspan(c * nc, nc);
      for (std::size_t ch = 0; ch < children_; ++ch) {
        const std::size_t f = fine_.cell_index(child_cell(parent, ch));
        if (ch == 0) {
          op<Real>(false, ch, mode).apply(fine.subspan(f * nc, nc), dst, ws[w]);
        } else {
          op<Real>(false, ch, mode).apply(fine.subspan(f * nc, nc), tmp[w], ws[w]);
          for (std::size_t i = 0; i < nc; ++i) dst[i] += tmp[w][i];
        }
      }
    }
  });
}

template void Transfer::prolongate<double>(std::span<const double>, std::span<double>, PrecisionMode) const;
template void Transfer::prolongate<float>(std::span<const float>, std::span<float>, PrecisionMode) const;
template void Transfer::restrict_to_coarse<double>(std::span<const double>, std::span<double>, PrecisionMode) const;
template void Transfer::restrict_to_coarse<float>(std::span<const float>, std::span<float>, PrecisionMode) const;

// ------------------------------------------------------------------ Multigrid

struct Multigrid::LevelData {
  const LevelOperator* op = nullptr;
  std::vector<PatchTiling> colours;
  std::vector<std::vector<std::uint16_t>> solver_index;  // [colour][patch]
  std::vector<PatchSolver> solvers;
  std::map<std::array<BoundaryKind, 3>, std::uint16_t> lookup;
};

struct Multigrid::CoarseFactor {
  std::size_t n = 0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu64;
  Eigen::PartialPivLU<Eigen::MatrixXf> lu32;
};

namespace {

constexpr std::size_t kMaxCoarseDofs = 6000;

float demote(double x, PrecisionMode mode) {
  const auto f = static_cast<float>(x);
  switch (mode) {
    case PrecisionMode::fp16: return from_half(to_half(f));
    case PrecisionMode::fp16_ec: return ec_split(f).reconstruct();
    default: return f;
  }
}

template <class Mat>
void check_pivots(const Mat& lu) {
  const auto diag = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = static_cast<double>(lu.matrixLU().cwiseAbs().maxCoeff());
  const double eps = static_cast<double>(std::numeric_limits<typename Mat::Scalar>::epsilon());
  if (!(largest > 0.0) || !(static_cast<double>(diag.minCoeff()) > eps * largest))
    throw SingularMatrixError("coarse_solve: the coarse operator is numerically singular");
}

}  // namespace

Multigrid::Multigrid(const MeshHierarchy& hierarchy, VCycleConfig config) : hierarchy_(&hierarchy), config_(config) {
  if (config.pre_smooth_steps < 1 || config.post_smooth_steps < 1)
    throw std::invalid_argument("VCycleConfig: smoothing steps must be >= 1");
  if (config.coarse_level < hierarchy.min_level || config.coarse_level > hierarchy.max_level)
    throw std::invalid_argument("VCycleConfig: coarse level " + std::to_string(config.coarse_level) +
                                " is outside the hierarchy");

  for (int l = config.coarse_level; l <= hierarchy.max_level; ++l) {
    auto data = std::make_unique<LevelData>();
    data->op = &hierarchy.level(l);
    const LevelMesh& mesh = data->op->mesh();
    for (const auto& shift : all_shifts(mesh.dim)) {
      PatchTiling t = make_tiling(mesh, shift);
      std::vector<std::uint16_t> index;
      for (const auto& kinds : t.kinds) {
        auto [it, inserted] = data->lookup.try_emplace(kinds, static_cast<std::uint16_t>(data->solvers.size()));
        if (inserted) {
          std::vector<Matrix1D> m, s;
          for (int a = 0; a < mesh.dim; ++a) {
            const PatchMatrices1D& pm = data->op->local_patch_matrices(kinds[static_cast<std::size_t>(a)]);
            m.push_back(pm.mass);
            s.push_back(pm.stiffness);
          }
          data->solvers.emplace_back(m, s, config.sides);
        }
        index.push_back(it->second);
      }
      data->colours.push_back(std::move(t));
      data->solver_index.push_back(std::move(index));
    }
    levels_.push_back(std::move(data));
    if (l > config.coarse_level)
      transfers_.push_back(std::make_unique<Transfer>(hierarchy.level(l - 1).mesh(), hierarchy.level(l).mesh(),
                                                      config.sides));
  }

  // Materialize and factor the coarse operator.
  const LevelOperator& cop = hierarchy.level(config.coarse_level);
  const std::size_t n = cop.size();
  if (n > kMaxCoarseDofs)
    throw std::length_error("coarse level has " + std::to_string(n) + " DoFs; the dense coarse solver allows " +
                            std::to_string(kMaxCoarseDofs));
  coarse_ = std::make_unique<CoarseFactor>();
  coarse_->n = n;
  const auto en = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a(en, en);
  std::vector<double> unit(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    cop.apply(unit, col);
    unit[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  if (config.mode == PrecisionMode::fp64) {
    coarse_->lu64.compute(a);
    check_pivots(coarse_->lu64);
  } else {
    Eigen::MatrixXf af(en, en);
    for (Eigen::Index i = 0; i < en; ++i)
      for (Eigen::Index j = 0; j < en; ++j) af(i, j) = demote(a(i, j), config.mode);
    coarse_->lu32.compute(af);
    check_pivots(coarse_->lu32);
  }
}

Multigrid::~Multigrid() = default;
Multigrid::Multigrid(Multigrid&&) noexcept = default;

const Multigrid::LevelData& Multigrid::level_data(int l) const {
  if (l < config_.coarse_level || l > hierarchy_->max_level)
    throw std::out_of_range("multigrid level " + std::to_string(l) + " out of range");
  return *levels_[static_cast<std::size_t>(l - config_.coarse_level)];
}

const PatchSolver& Multigrid::patch_solver(int level, const std::array<BoundaryKind, 3>& kinds) const {
  const LevelData& d = level_data(level);
  const auto it = d.lookup.find(kinds);
  if (it == d.lookup.end()) throw std::out_of_range("no smoother patch with these boundary kinds on this level");
  return d.solvers[it->second];
}

template <class Real>
void Multigrid::coarse_solve_impl(std::span<const Real> b, std::span<Real> x) const {
  if (b.size() != coarse_->n || x.size() != coarse_->n)
    throw ContractViolation("coarse_solve: vector length does not match the coarse level");
  const auto n = static_cast<Eigen::Index>(coarse_->n);
  if constexpr (sizeof(Real) == 8) {
    const Eigen::VectorXd sol = coarse_->lu64.solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
    for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = sol(i);
  } else {
    const Eigen::VectorXf sol = coarse_->lu32.solve(Eigen::Map<const Eigen::VectorXf>(b.data(), n));
    for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = sol(i);
  }
}

namespace {

template <class Real>
void apply_level(const LevelOperator& op, std::span<const Real> u, std::span<Real> v, PrecisionMode mode) {
  if constexpr (sizeof(Real) == 8) {
    op.apply(u, v);
  } else {
    op.apply(u, v, mode);
  }
}

template <class Real>
void apply_patch_solver(const PatchSolver& s, std::span<const Real> r, std::span<Real> e, PrecisionMode mode,
                        PatchSolveScratch<Real>& scratch) {
  if constexpr (sizeof(Real) == 8) {
    s.apply(r, e, scratch);
  } else {
    s.apply(r, e, mode, scratch);
  }
}

template <class Real>
struct SmootherScratch {
  std::vector<Real> r, e;
  PatchSolveScratch<Real> solve;
};

}  // namespace

template <class Real>
void Multigrid::smooth_impl(int level, std::span<Real> x, std::span<const Real> b) const {
  const LevelData& d = level_data(level);
  const std::size_t n = d.op->size();
  if (x.size() != n || b.size() != n) throw ContractViolation("smooth: vector length does not match the level");
  std::vector<Real> r(n);
  std::vector<SmootherScratch<Real>> scratch(static_cast<std::size_t>(thread_count()));
  for (std::size_t c = 0; c < d.colours.size(); ++c) {
    const PatchTiling& t = d.colours[c];
    if (t.size() == 0) continue;
    apply_level<Real>(*d.op, x, r, config_.mode);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    parallel_for(t.size(), [&](std::size_t begin, std::size_t end, std::size_t w) {
      SmootherScratch<Real>& s = scratch[w];
      s.r.resize(t.patch_size);
      s.e.resize(t.patch_size);
      for (std::size_t p = begin; p < end; ++p) {
        const auto map = t.map(p);
        for (std::size_t i = 0; i < t.patch_size; ++i) s.r[i] = r[map[i]];
        apply_patch_solver<Real>(d.solvers[d.solver_index[c][p]], s.r, s.e, config_.mode, s.solve);
        for (std::size_t i = 0; i < t.patch_size; ++i) x[map[i]] += s.e[i];
      }
    });
  }
}

template <class Real>
void Multigrid::vcycle_impl(int level, std::span<Real> x, std::span<const Real> b) const {
  if (level == config_.coarse_level) {
    coarse_solve_impl<Real>(b, x);
    return;
  }
  const LevelData& d = level_data(level);
  const std::size_t n = d.op->size();
  for (int s = 0; s < config_.pre_smooth_steps; ++s) smooth_impl<Real>(level, x, b);

  std::vector<Real> r(n);
  apply_level<Real>(*d.op, x, r, config_.mode);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

  const Transfer& tr = *transfers_[static_cast<std::size_t>(level - config_.coarse_level - 1)];
  const std::size_t nc = tr.coarse().n_dofs;
  std::vector<Real> rc(nc), ec(nc, Real{0});
  tr.restrict_to_coarse<Real>(r, rc, config_.mode);
  vcycle_impl<Real>(level - 1, ec, rc);
  tr.prolongate<Real>(ec, r, config_.mode);
  for (std::size_t i = 0; i < n; ++i) x[i] += r[i];

  for (int s = 0; s < config_.post_smooth_steps; ++s) smooth_impl<Real>(level, x, b);
}

template void Multigrid::vcycle_impl<double>(int, std::span<double>, std::span<const double>) const;
template void Multigrid::vcycle_impl<float>(int, std::span<float>, std::span<const float>) const;
template void Multigrid::smooth_impl<double>(int, std::span<double>, std::span<const double>) const;
template void Multigrid::smooth_impl<float>(int, std::span<float>, std::span<const float>) const;
template void Multigrid::coarse_solve_impl<double>(std::span<const double>, std::span<double>) const;
template void Multigrid::coarse_solve_impl<float>(std::span<const float>, std::span<float>) const;

namespace {

std::vector<float> to_f32(std::span<const double> v) { return std::vector<float>(v.begin(), v.end()); }

}  // namespace

void Multigrid::vcycle(int level, std::span<double> x, std::span<const double> b) const {
  level_data(level);
  if (config_.mode == PrecisionMode::fp64) {
    vcycle_impl<double>(level, x, b);
    return;
  }
  std::vector<float> xf = to_f32(x), bf = to_f32(b);
  vcycle_impl<float>(level, xf, bf);
  std::copy(xf.begin(), xf.end(), x.begin());
}

std::vector<double> Multigrid::precondition(std::span<const double> r) const {
  std::vector<double> x(r.size(), 0.0);
  vcycle(finest_level(), x, r);
  return x;
}

void Multigrid::smooth(int level, std::span<double> x, std::span<const double> b) const {
  if (config_.mode == PrecisionMode::fp64) {
    smooth_impl<double>(level, x, b);
    return;
  }
  std::vector<float> xf = to_f32(x), bf = to_f32(b);
  smooth_impl<float>(level, xf, bf);
  std::copy(xf.begin(), xf.end(), x.begin());
}

std::vector<double> Multigrid::restrict_to_coarse(int fine_level, std::span<const double> r) const {
  if (fine_level <= config_.coarse_level || fine_level > hierarchy_->max_level)
    throw std::out_of_range("restrict: no coarser multigrid level below " + std::to_string(fine_level));
  const Transfer& tr = *transfers_[static_cast<std::size_t>(fine_level - config_.coarse_level - 1)];
  std::vector<double> rc(tr.coarse().n_dofs);
  if (config_.mode == PrecisionMode::fp64) {
    tr.restrict_to_coarse<double>(r, rc, config_.mode);
  } else {
    const std::vector<float> rf = to_f32(r);
    std::vector<float> out(rc.size());
    tr.restrict_to_coarse<float>(rf, out, config_.mode);
    std::copy(out.begin(), out.end(), rc.begin());
  }
  return rc;
}

std::vector<double> Multigrid::prolongate(int coarse_level, std::span<const double> e) const {
  if (coarse_level < config_.coarse_level || coarse_level >= hierarchy_->max_level)
    throw std::out_of_range("prolongate: no finer multigrid level above " + std::to_string(coarse_level));
  const Transfer& tr = *transfers_[static_cast<std::size_t>(coarse_level - config_.coarse_level)];
  std::vector<double> ef(tr.fine().n_dofs);
  if (config_.mode == PrecisionMode::fp64) {
    tr.prolongate<double>(e, ef, config_.mode);
  } else {
    const std::vector<float> in = to_f32(e);
    std::vector<float> out(ef.size());
    tr.prolongate<float>(in, out, config_.mode);
    std::copy(out.begin(), out.end(), ef.begin());
  }
  return ef;
}

std::vector<double> Multigrid::coarse_solve(std::span<const double> b) const {
  std::vector<double> x(b.size());
  if (config_.mode == PrecisionMode::fp64) {
    coarse_solve_impl<double>(b, x);
    return x;
  }
  const std::vector<float> bf = to_f32(b);
  std::vector<float> xf(b.size());
  coarse_solve_impl<float>(bf, xf);
  std::copy(xf.begin(), xf.end(), x.begin());
  return x;
}

}  // namespace tcfem
