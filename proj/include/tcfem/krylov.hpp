#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace tcfem {

/// y = Op(x). Used for the system matrix and for preconditioners, which may
/// change from call to call under FGMRES.
using LinearMap = std::function<void(std::span<const double> x, std::span<double> y)>;

enum class SolveStatus { converged, breakdown, max_iterations };

std::string_view to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::max_iterations;
  int iterations = 0;
  /// Least-squares residual norms ||r_j||, j = 0..iterations; entry 0 is ||b||.
  std::vector<double> residual_history;
  /// ||b - A x|| / ||b|| recomputed from the returned x.
  double final_relative_residual = 0.0;
  double wall_time = 0.0;
  std::optional<double> l2_error;
  std::optional<double> h1_error;
};

/// The bases of a finished run, for checking A Z_j = V_{j+1} Hbar_j.
struct ArnoldiRecord {
  std::vector<std::vector<double>> v;  // j+1 orthonormal vectors (j after a breakdown)
  std::vector<std::vector<double>> z;  // j preconditioned vectors (M v_i for GMRES)
  std::vector<std::vector<double>> h;  // column c of Hbar, c+2 entries
};

struct KrylovOptions {
  double tol = 1e-8;
  int maxit = 100;
  bool record_arnoldi = false;
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
  std::optional<ArnoldiRecord> arnoldi;
};

/// Flexible GMRES with right preconditioning, zero initial guess and no
/// restart. Stops when ||r_j|| <= tol ||b||. Throws std::invalid_argument for
/// tol outside (0, 1) or maxit < 1.
SolveResult fgmres(const LinearMap& a, const LinearMap& m, std::span<const double> b, const KrylovOptions& opt = {});

/// Right-preconditioned GMRES assuming a fixed preconditioner: only the V
/// basis is stored and x = M (V y) is formed at the end.
SolveResult gmres(const LinearMap& a, const LinearMap& m, std::span<const double> b, const KrylovOptions& opt = {});

}  // namespace tcfem
