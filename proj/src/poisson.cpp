#include "tcfem/poisson.hpp"

#include <stdexcept>
#include <string>

namespace tcfem {

std::string_view to_string(SolverKind s) { return s == SolverKind::fgmres ? "fgmres" : "gmres"; }

SolverKind parse_solver(std::string_view name) {
  if (name == "fgmres") return SolverKind::fgmres;
  if (name == "gmres") return SolverKind::gmres;
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

SolveResult solve_poisson(const MeshHierarchy& h, const PoissonConfig& config) {
  const LevelOperator& fine = h.level(h.max_level);
  const LevelMesh& mesh = fine.mesh();
  const ManufacturedProblem problem = sine_problem(mesh.dim);
  const std::vector<double> b = assemble_rhs(mesh, problem.rhs, problem.boundary);

  VCycleConfig vc = config.vcycle;
  vc.mode = config.precision;
  if (vc.coarse_level < h.min_level) vc.coarse_level = h.min_level;
  const Multigrid mg(h, vc);

  const LinearMap a = [&fine](std::span<const double> x, std::span<double> y) { fine.apply(x, y); };
  const LinearMap m = [&mg](std::span<const double> x, std::span<double> y) {
    std::fill(y.begin(), y.end(), 0.0);
    mg.vcycle(mg.finest_level(), y, x);
  };
  const KrylovOptions opt{config.tol, config.maxit, config.record_arnoldi};
  SolveResult r = config.solver == SolverKind::fgmres ? fgmres(a, m, b, opt) : gmres(a, m, b, opt);
  r.report.l2_error = l2_error(mesh, r.x, problem.solution);
  r.report.h1_error = h1_seminorm_error(mesh, r.x, problem.gradient);
  return r;
}

}  // namespace tcfem
