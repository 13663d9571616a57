#include "tcfem/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tcfem {

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log_log_slope: need two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two or more pairs");
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<SolveRow> solve_sweep(int k, std::span<const int> levels, std::span<const PrecisionMode> precisions,
                                  const PoissonConfig& base) {
  std::vector<SolveRow> rows;
  for (int level : levels) {
    const MeshHierarchy h = build_hierarchy(level, k);
    for (PrecisionMode mode : precisions) {
      PoissonConfig c = base;
      c.precision = mode;
      SolveRow row;
      row.k = k;
      row.level = level;
      row.dofs = h.dofs(level);
      row.precision = mode;
      row.solver = c.solver;
      row.report = solve_poisson(h, c).report;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_study(int k, std::span<const int> levels, const PoissonConfig& base) {
  std::vector<ConvergenceRow> rows;
  for (int level : levels) {
    const MeshHierarchy h = build_hierarchy(level, k);
    const SolveResult r = solve_poisson(h, base);
    ConvergenceRow row;
    row.level = level;
    row.h = h.level(level).mesh().h;
    row.dofs = h.dofs(level);
    row.l2_error = *r.report.l2_error;
    row.h1_error = *r.report.h1_error;
    row.iterations = r.report.iterations;
    if (!rows.empty())
      row.rate = std::log(rows.back().l2_error / row.l2_error) / std::log(rows.back().h / row.h);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ErrorProfileRow> error_profile(int k, std::span<const int> levels, std::span<const PrecisionMode> modes,
                                           std::uint64_t seed, int samples, int dim) {
  if (samples < 1) throw std::invalid_argument("error_profile: samples must be positive");
  std::vector<ErrorProfileRow> rows;
  for (int level : levels) {
    const LevelOperator op(LevelMesh(dim, level, k));
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(level));
    std::normal_distribution<double> normal;
    std::vector<double> sum(modes.size(), 0.0);
    std::vector<double> u(op.size());
    for (int s = 0; s < samples; ++s) {
      for (double& x : u) x = normal(rng);
      const std::vector<double> ref = op.apply(u, PrecisionMode::fp64);
      for (std::size_t i = 0; i < modes.size(); ++i) sum[i] += relative_error(op.apply(u, modes[i]), ref);
    }
    for (std::size_t i = 0; i < modes.size(); ++i)
      rows.push_back({level, op.size(), modes[i], sum[i] / static_cast<double>(samples)});
  }
  return rows;
}

std::vector<std::string> bank_scenario_names() { return {"fp64-naive", "fp64-swizzled", "fp16-naive", "fp16-swizzled"}; }

BankScenario run_bank_scenario(std::string_view name) {
  const bool fp64 = name.starts_with("fp64-");
  const bool fp16 = name.starts_with("fp16-");
  const bool swizzled = name.ends_with("-swizzled");
  if (!(fp64 || fp16) || !(swizzled || name.ends_with("-naive")))
    throw std::invalid_argument("unknown bank scenario '" + std::string(name) + "'");
  const gpu::AccessPattern pattern =
      fp64 ? gpu::mma_fragment_pattern({8, 8, 4}, gpu::MmaPrecision::fp64, gpu::MmaRole::A)
           : gpu::mma_fragment_pattern({16, 8, 16}, gpu::MmaPrecision::fp16, gpu::MmaRole::A);
  gpu::SwizzleParams params;
  if (swizzled) {
    const auto found =
        gpu::search_conflict_free_swizzle(pattern, pattern.rows, pattern.cols, pattern.element_bytes);
    if (!found) throw std::runtime_error("no conflict-free swizzle found for " + std::string(name));
    params = *found;
  }
  gpu::LayoutFn layout(pattern.rows, pattern.cols, pattern.element_bytes, params);
  gpu::BankReport report = gpu::bank_trace(layout, pattern);
  const bool bij = gpu::is_bijection(layout);
  return BankScenario{std::string(name), layout, pattern, report, bij};
}

SeparableOperator patch_laplacian(std::size_t n, int dim) {
  std::vector<Matrix1D> m(static_cast<std::size_t>(dim), Matrix1D::identity(n)),
      l(static_cast<std::size_t>(dim), Matrix1D::identity(n));
  return kronecker_sum(m, l);
}

std::vector<RooflinePoint> roofline_points() {
  // A100: 19.5 TFLOPS fp64 and 312 TFLOPS fp16 tensor cores, 2 TB/s device memory.
  const double shared_bw = gpu::shared_bandwidth(108, 32, 4, 1.27) * 1e12;
  const double vram_bw = 2e12;
  std::vector<RooflinePoint> pts;
  for (std::size_t n : {std::size_t{8}, std::size_t{16}})
    for (bool ec : {false, true}) {
      const SeparableOperator op = patch_laplacian(n, 3);
      const FlopReport f = count_flops(op, ec ? FlopVariant::error_corrected : FlopVariant::base, EvaluationKind::patch);
      const double word = ec ? 4.0 : 8.0;  // fp16 pipelines keep vectors in binary32
      const double dofs = static_cast<double>(f.dofs);
      // Shared memory: each of the d contractions of each term reads and writes
      // the tensor once; the device-memory kernel reads u and writes v once.
      const double contractions = static_cast<double>(op.terms().size()) * 3.0;
      const double shared_read = contractions * dofs * word, shared_write = contractions * dofs * word;
      const double vram_bytes = 2.0 * dofs * word;
      RooflinePoint p;
      p.kernel = std::string(ec ? "fp16_ec" : "fp64") + " patch N=" + std::to_string(n);
      p.flops = static_cast<double>(f.total_flops);
      p.bytes = vram_bytes;
      p.arithmetic_intensity = p.flops / vram_bytes;
      p.shared_ceiling_tflops = gpu::roofline(shared_bw, p.flops, shared_read, shared_write) / 1e12;
      p.vram_ceiling_tflops = gpu::vram_roofline(ec ? 312e12 : 19.5e12, vram_bw, p.arithmetic_intensity) / 1e12;
      pts.push_back(p);
    }
  return pts;
}

}  // namespace tcfem
