#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcfem/gpu_model.hpp"
#include "tcfem/poisson.hpp"
#include "tcfem/tensor_kernel.hpp"

namespace tcfem {

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);
/// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

struct SolveRow {
  int k = 0;
  int level = 0;
  std::size_t dofs = 0;
  PrecisionMode precision = PrecisionMode::fp64;
  SolverKind solver = SolverKind::fgmres;
  SolveReport report;
};

/// One solve per (level, precision) in the given order, each on its own
/// hierarchy 1..level.
std::vector<SolveRow> solve_sweep(int k, std::span<const int> levels, std::span<const PrecisionMode> precisions,
                                  const PoissonConfig& base);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  std::size_t dofs = 0;
  double l2_error = 0.0;
  double h1_error = 0.0;
  std::optional<double> rate;  // log2 of the L2 error ratio to the previous level
  int iterations = 0;
};

std::vector<ConvergenceRow> convergence_study(int k, std::span<const int> levels, const PoissonConfig& base);

struct ErrorProfileRow {
  int level = 0;
  std::size_t dofs = 0;
  PrecisionMode mode = PrecisionMode::fp64;
  double relative_error = 0.0;
};

/// relative_error(A_mode u, A_fp64 u) for u with independent standard normal
/// entries drawn from `seed`, averaged over `samples` vectors; one row per
/// (level, mode).
std::vector<ErrorProfileRow> error_profile(int k, std::span<const int> levels, std::span<const PrecisionMode> modes,
                                           std::uint64_t seed, int samples = 1, int dim = 3);

struct BankScenario {
  std::string name;
  gpu::LayoutFn layout;
  gpu::AccessPattern pattern;
  gpu::BankReport report;
  bool bijective = false;
};

/// fp64-naive, fp64-swizzled, fp16-naive, fp16-swizzled.
std::vector<std::string> bank_scenario_names();
/// Throws std::invalid_argument for an unknown name.
BankScenario run_bank_scenario(std::string_view name);

struct RooflinePoint {
  std::string kernel;
  double flops = 0.0;
  double bytes = 0.0;
  double arithmetic_intensity = 0.0;
  double shared_ceiling_tflops = 0.0;
  double vram_ceiling_tflops = 0.0;
};

/// Patch Laplacian kernels (N = 8, 16; plain and error-corrected) placed on the
/// shared-memory and device-memory rooflines of an A100-class GPU.
std::vector<RooflinePoint> roofline_points();

/// Kronecker-sum schedule of an N-per-axis patch (identity factors; only the
/// shapes matter for counting).
SeparableOperator patch_laplacian(std::size_t n, int dim);

}  // namespace tcfem
