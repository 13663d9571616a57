#include "tcfem/level_operator.hpp"

#include <map>
#include <stdexcept>
#include <string>

#include "tcfem/parallel.hpp"

namespace tcfem {

namespace {

constexpr std::array<BoundaryKind, 4> kAllKinds{BoundaryKind::interior, BoundaryKind::left_boundary,
                                                BoundaryKind::right_boundary, BoundaryKind::both};

template <class Real>
struct PatchScratch {
  std::vector<Real> in, out;
  ContractionWorkspace<Real> ws;
};

}  // namespace

LevelOperator::LevelOperator(const LevelMesh& mesh, EcSides sides) : mesh_(mesh) {
  const int k = mesh.degree;
  for (BoundaryKind kind : kAllKinds) {
    eval_[static_cast<std::size_t>(kind)] = patch_matrices_1d(k, mesh.h, kind);
    local_[static_cast<std::size_t>(kind)] = local_patch_matrices_1d(k, mesh.h, kind);
  }

  // Pass 0: full patch operators, one per combination of boundary kinds.
  {
    OperatorPass pass;
    pass.tiling = make_tiling(mesh, {0, 0, 0});
    std::map<std::array<BoundaryKind, 3>, std::uint16_t> lookup;
    for (const auto& kinds : pass.tiling.kinds) {
      auto [it, inserted] = lookup.try_emplace(kinds, static_cast<std::uint16_t>(pass.ops.size()));
      if (inserted) {
        std::vector<Matrix1D> m, l;
        for (int a = 0; a < mesh.dim; ++a) {
          const PatchMatrices1D& pm = eval_[static_cast<std::size_t>(kinds[static_cast<std::size_t>(a)])];
          m.push_back(pm.mass);
          l.push_back(pm.stiffness);
        }
        pass.ops.push_back(kronecker_sum(m, l));
      }
      pass.op_index.push_back(it->second);
    }
    passes_.push_back(std::move(pass));
  }

  // Passes 1..dim: faces between unshifted patches, one direction at a time.
  const Matrix1D face = interior_face_matrix_1d(k, mesh.h);
  const Matrix1D mass = eval_[0].mass;
  for (int d = 0; d < mesh.dim; ++d) {
    std::array<int, 3> shift{0, 0, 0};
    shift[static_cast<std::size_t>(d)] = 1;
    OperatorPass pass;
    pass.tiling = make_tiling(mesh, shift);
    if (pass.tiling.size() == 0) continue;
    // The face sits between the two cells of the shifted patch; embed the
    // 2(k+1) face matrix as the coupling of those two cells.
    std::vector<Matrix1D> term;
    for (int a = 0; a < mesh.dim; ++a) term.push_back(a == d ? face : mass);
    pass.ops.emplace_back(mesh.dim, std::vector<SeparableOperator::Term>{term});
    pass.op_index.assign(pass.tiling.size(), 0);
    passes_.push_back(std::move(pass));
  }

  for (const auto& pass : passes_) {
    std::vector<PreparedSeparable<double>> f64;
    for (const auto& op : pass.ops) f64.emplace_back(op, PrecisionMode::fp64, sides);
    prepared_f64_.push_back(std::move(f64));
    for (PrecisionMode mode : {PrecisionMode::fp32, PrecisionMode::fp16, PrecisionMode::fp16_ec}) {
      std::vector<PreparedSeparable<float>> f32;
      for (const auto& op : pass.ops) f32.emplace_back(op, mode, sides);
      prepared_f32_[binary32_slot(mode)].push_back(std::move(f32));
    }
  }
}

template <class Real>
void LevelOperator::apply_passes(std::span<const Real> u, std::span<Real> v, PrecisionMode mode) const {
  if (u.size() != size() || v.size() != size())
    throw ContractViolation("LevelOperator::apply: vector length " + std::to_string(u.size()) + " does not match " +
                            std::to_string(size()) + " DoFs");
  std::fill(v.begin(), v.end(), Real{0});
  const std::size_t workers = static_cast<std::size_t>(thread_count());
  std::vector<PatchScratch<Real>> scratch(workers);

  for (std::size_t pi = 0; pi < passes_.size(); ++pi) {
    const OperatorPass& pass = passes_[pi];
    const std::size_t n = pass.tiling.patch_size;
    parallel_for(pass.tiling.size(), [&](std::size_t begin, std::size_t end, std::size_t w) {
      PatchScratch<Real>& s = scratch[w];
      s.in.resize(n);
      s.out.resize(n);
      for (std::size_t p = begin; p < end; ++p) {
        const auto map = pass.tiling.map(p);
        for (std::size_t i = 0; i < n; ++i) s.in[i] = u[map[i]];
        if constexpr (sizeof(Real) == 8) {
          prepared_f64_[pi][pass.op_index[p]].apply(s.in, s.out, s.ws);
        } else {
          prepared_f32_[binary32_slot(mode)][pi][pass.op_index[p]].apply(s.in, s.out, s.ws);
        }
        for (std::size_t i = 0; i < n; ++i) v[map[i]] += s.out[i];
      }
    });
  }
}

void LevelOperator::apply(std::span<const double> u, std::span<double> v) const {
  apply_passes<double>(u, v, PrecisionMode::fp64);
}

void LevelOperator::apply(std::span<const float> u, std::span<float> v, PrecisionMode mode) const {
  binary32_slot(mode);
  apply_passes<float>(u, v, mode);
}

std::vector<double> LevelOperator::apply(std::span<const double> u, PrecisionMode mode) const {
  std::vector<double> v(size());
  if (mode == PrecisionMode::fp64) {
    apply(u, v);
    return v;
  }
  if (u.size() != size()) throw ContractViolation("LevelOperator::apply: vector length does not match the level");
  std::vector<float> uf(u.begin(), u.end()), vf(size());
  apply(std::span<const float>(uf), std::span<float>(vf), mode);
  std::copy(vf.begin(), vf.end(), v.begin());
  return v;
}

const LevelOperator& MeshHierarchy::level(int l) const {
  if (l < min_level || l > max_level)
    throw std::out_of_range("level " + std::to_string(l) + " outside hierarchy [" + std::to_string(min_level) + ", " +
                            std::to_string(max_level) + "]");
  return levels[static_cast<std::size_t>(l - min_level)];
}

MeshHierarchy build_hierarchy(int max_level, int k, int dim, int min_level, std::size_t dof_cap, EcSides sides) {
  if (min_level < 1) throw std::invalid_argument("build_hierarchy: vertex patches need at least level 1");
  if (max_level < min_level) throw std::invalid_argument("build_hierarchy: max_level below min_level");
  if (k < 1) throw std::invalid_argument("build_hierarchy: degree must be >= 1");
  const LevelMesh finest(dim, max_level, k);
  if (finest.n_dofs > dof_cap)
    throw std::length_error("build_hierarchy: level " + std::to_string(max_level) + " has " +
                            std::to_string(finest.n_dofs) + " DoFs, above the cap of " + std::to_string(dof_cap));
  MeshHierarchy h;
  h.dim = dim;
  h.degree = k;
  h.min_level = min_level;
  h.max_level = max_level;
  for (int l = min_level; l <= max_level; ++l) h.levels.emplace_back(LevelMesh(dim, l, k), sides);
  return h;
}

}  // namespace tcfem
