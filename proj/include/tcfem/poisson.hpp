#pragma once

#include <string_view>

#include "tcfem/fe_space.hpp"
#include "tcfem/krylov.hpp"
#include "tcfem/multigrid.hpp"

namespace tcfem {

enum class SolverKind { fgmres, gmres };

std::string_view to_string(SolverKind s);
SolverKind parse_solver(std::string_view name);

struct PoissonConfig {
  PrecisionMode precision = PrecisionMode::fp64;  // of the multigrid preconditioner
  SolverKind solver = SolverKind::fgmres;
  double tol = 1e-8;
  int maxit = 100;
  VCycleConfig vcycle{};  // its mode is overridden by `precision`
  bool record_arnoldi = false;
};

/// Solves the manufactured sine problem on the finest level of `h` with the
/// outer Krylov method in binary64 and one V-cycle as preconditioner. The
/// report carries L2 and H1 errors against the exact solution.
SolveResult solve_poisson(const MeshHierarchy& h, const PoissonConfig& config);

}  // namespace tcfem
