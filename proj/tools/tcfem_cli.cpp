// tcfem: batch experiment driver. Writes one CSV or JSON report per run.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tcfem/experiments.hpp"
#include "tcfem/report.hpp"

namespace {

using namespace tcfem;

constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;

struct Options {
  int k = 3;
  std::string levels = "3";
  std::string precision = "fp64";
  std::string solver = "fgmres";
  double tol = 1e-8;
  int maxit = 100;
  std::uint64_t seed = 42;
  int samples = 8;
  std::string out;
  std::string format = "csv";
  std::string scenario = "all";
  bool no_timing = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) parts.push_back(item);
  return parts;
}

// "3", "2,3,4" or "2-4"
std::vector<int> parse_levels(const std::string& s) {
  std::vector<int> out;
  try {
    for (const auto& part : split(s)) {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        const int a = std::stoi(part.substr(0, dash)), b = std::stoi(part.substr(dash + 1));
        if (b < a) throw UsageError("empty level range '" + part + "'");
        for (int l = a; l <= b; ++l) out.push_back(l);
      }
    }
  } catch (const std::logic_error&) {
    throw UsageError("cannot parse --levels '" + s + "'");
  }
  if (out.empty()) throw UsageError("--levels is empty");
  for (int l : out)
    if (l < 1 || l > 12) throw UsageError("levels must lie in 1..12");
  return out;
}

std::vector<PrecisionMode> parse_precisions(const std::string& s) {
  std::vector<PrecisionMode> out;
  try {
    for (const auto& part : split(s)) out.push_back(parse_precision(part));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (out.empty()) throw UsageError("--precision is empty");
  return out;
}

void validate(const Options& o) {
  if (o.k < 1 || o.k > 15) throw UsageError("--k must lie in 1..15");
  if (!(o.tol > 0.0 && o.tol < 1.0)) throw UsageError("--tol must lie in (0, 1)");
  if (o.maxit < 1) throw UsageError("--maxit must be positive");
  if (o.samples < 1) throw UsageError("--samples must be positive");
  if (o.format != "csv" && o.format != "json") throw UsageError("--format must be csv or json");
  if (o.solver != "fgmres" && o.solver != "gmres") throw UsageError("--solver must be fgmres or gmres");
}

PoissonConfig poisson_config(const Options& o) {
  PoissonConfig c;
  c.solver = parse_solver(o.solver);
  c.tol = o.tol;
  c.maxit = o.maxit;
  return c;
}

std::string fmt(double x) { return report::format_double(x); }

std::vector<std::pair<std::string, std::string>> solver_meta(const Options& o) {
  return {{"k", std::to_string(o.k)},   {"levels", o.levels},       {"precision", o.precision},
          {"solver", o.solver},         {"tol", fmt(o.tol)},        {"maxit", std::to_string(o.maxit)},
          {"timing", o.no_timing ? "off" : "on"}};
}

bool all_converged(const std::vector<SolveRow>& rows) {
  for (const auto& r : rows)
    if (r.report.status != SolveStatus::converged) return false;
  return true;
}

int emit(const report::Table& t, const Options& o) {
  const report::Format f = report::parse_format(o.format);
  if (o.out.empty() || o.out == "-") {
    report::write(std::cout, t, f);
    return 0;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) {
    std::cerr << "tcfem: cannot open " << o.out << " for writing\n";
    return 1;
  }
  report::write(file, t, f);
  return file ? 0 : 1;
}

int run_solve(const Options& o) {
  const auto levels = parse_levels(o.levels);
  const auto modes = parse_precisions(o.precision);
  const auto rows = solve_sweep(o.k, levels, modes, poisson_config(o));
  auto t = report::solve_table(rows, {.timing = !o.no_timing});
  report::stamp(t, "solve", solver_meta(o));
  const int rc = emit(t, o);
  return rc ? rc : all_converged(rows) ? 0 : kExitNotConverged;
}

int run_residuals(const Options& o) {
  const auto levels = parse_levels(o.levels);
  const auto modes = parse_precisions(o.precision);
  const auto rows = solve_sweep(o.k, levels, modes, poisson_config(o));
  auto t = report::residuals_table(rows);
  auto meta = solver_meta(o);
  meta.pop_back();  // no timing columns here
  report::stamp(t, "residuals", std::move(meta));
  const int rc = emit(t, o);
  return rc ? rc : all_converged(rows) ? 0 : kExitNotConverged;
}

int run_convergence(const Options& o) {
  auto levels = parse_levels(o.levels);
  // A single level L means the three levels ending at L.
  if (levels.size() == 1) {
    const int top = levels.front();
    levels.clear();
    for (int l = std::max(1, top - 2); l <= top; ++l) levels.push_back(l);
  }
  const auto modes = parse_precisions(o.precision);
  if (modes.size() != 1) throw UsageError("convergence takes a single --precision");
  PoissonConfig c = poisson_config(o);
  c.precision = modes.front();
  const auto rows = convergence_study(o.k, levels, c);
  auto t = report::convergence_table(rows);
  auto meta = solver_meta(o);
  meta.pop_back();
  report::stamp(t, "convergence", std::move(meta));
  bool ok = true;
  // convergence_study keeps no status; re-derive it from the iteration cap.
  for (const auto& r : rows) ok = ok && r.iterations < o.maxit;
  const int rc = emit(t, o);
  return rc ? rc : ok ? 0 : kExitNotConverged;
}

int run_error_profile(const Options& o) {
  const auto levels = parse_levels(o.levels);
  const auto modes = parse_precisions(o.precision);
  const auto rows = error_profile(o.k, levels, modes, o.seed, o.samples);
  auto t = report::error_profile_table(rows);
  report::stamp(t, "error-profile",
                {{"k", std::to_string(o.k)},
                 {"levels", o.levels},
                 {"precision", o.precision},
                 {"seed", std::to_string(o.seed)},
                 {"samples", std::to_string(o.samples)}});
  return emit(t, o);
}

int run_bank_sim(const Options& o) {
  std::vector<std::string> names = o.scenario == "all" ? bank_scenario_names() : split(o.scenario);
  std::vector<BankScenario> scenarios;
  try {
    for (const auto& n : names) scenarios.push_back(run_bank_scenario(n));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto t = report::bank_table(scenarios);
  report::stamp(t, "bank-sim", {{"scenario", o.scenario}});
  return emit(t, o);
}

int run_roofline(const Options& o) {
  auto t = report::roofline_table(roofline_points());
  const auto bw = gpu::a100_shared_bandwidth();
  report::stamp(t, "roofline",
                {{"shared_bandwidth_tb_s", fmt(bw.tb_per_s)},
                 {"shared_bandwidth_note", bw.note},
                 {"vram_bandwidth_tb_s", "2"},
                 {"peak_fp64_tflops", "19.5"},
                 {"peak_fp16_tflops", "312"}});
  return emit(t, o);
}

int run_flops(const Options& o) {
  const std::size_t n = 2 * static_cast<std::size_t>(o.k + 1);
  const SeparableOperator op = patch_laplacian(n, 3);
  const FlopReport base = count_flops(op, FlopVariant::base, EvaluationKind::patch);
  const FlopReport ec = count_flops(op, FlopVariant::error_corrected, EvaluationKind::patch);
  const FlopReport cell = count_flops(patch_laplacian(static_cast<std::size_t>(o.k + 1), 3), FlopVariant::base,
                                      EvaluationKind::cell);
  const bool published = n == 16;
  std::vector<report::FlopsEntry> entries{
      {"fp64 cell N=" + std::to_string(o.k + 1), cell, std::nullopt},
      {"fp64 patch N=" + std::to_string(n), base, published ? std::optional<double>(1738) : std::nullopt},
      {"fp16_ec patch N=" + std::to_string(n), ec, published ? std::optional<double>(5361) : std::nullopt}};
  auto t = report::flops_table(entries);
  std::vector<std::pair<std::string, std::string>> meta{
      {"k", std::to_string(o.k)}, {"ec_over_base", fmt(static_cast<double>(ec.total_flops) / base.total_flops)}};
  if (published) meta.emplace_back("reference_ec_over_base", fmt(5361.0 / 1736.0));
  report::stamp(t, "flops", std::move(meta));
  return emit(t, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tcfem: matrix-free DG Poisson solver with mixed-precision multigrid and GPU cost models"};
  app.set_version_flag("--version", std::string(TCFEM_VERSION));
  app.require_subcommand(1);
  Options o;

  const auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  const auto add_solver = [&o, &add_common](CLI::App* sub) {
    sub->add_option("--k", o.k, "polynomial degree");
    sub->add_option("--levels", o.levels, "level, list (2,3,4) or range (2-4)");
    sub->add_option("--precision", o.precision, "comma list of fp64, fp32, fp16, fp16_ec");
    sub->add_option("--solver", o.solver, "fgmres or gmres");
    sub->add_option("--tol", o.tol, "relative residual reduction");
    sub->add_option("--maxit", o.maxit, "iteration cap");
    add_common(sub);
  };

  auto* solve = app.add_subcommand("solve", "solve the sine problem, one row per level and precision");
  add_solver(solve);
  solve->add_flag("--no-timing", o.no_timing, "print NA for wall time and speedup");
  auto* conv = app.add_subcommand("convergence", "L2 and H1 errors with rates over refinement levels");
  add_solver(conv);
  auto* resid = app.add_subcommand("residuals", "per-iteration residual history");
  add_solver(resid);

  auto* prof = app.add_subcommand("error-profile", "relative error of v = Au per precision and size");
  prof->add_option("--k", o.k, "polynomial degree (N = 2(k+1) per patch axis)");
  prof->add_option("--levels", o.levels, "level, list or range");
  prof->add_option("--precision", o.precision, "comma list of modes");
  prof->add_option("--seed", o.seed, "random seed");
  prof->add_option("--samples", o.samples, "random vectors averaged per size");
  add_common(prof);

  auto* bank = app.add_subcommand("bank-sim", "shared-memory bank conflicts of MMA fragment loads");
  bank->add_option("--scenario", o.scenario, "fp64-naive, fp64-swizzled, fp16-naive, fp16-swizzled or all");
  add_common(bank);

  auto* roof = app.add_subcommand("roofline", "patch kernels on the A100 roofline models");
  add_common(roof);

  auto* flops = app.add_subcommand("flops", "flop counts of the patch Laplacian");
  flops->add_option("--k", o.k, "polynomial degree (default gives N = 8)");
  add_common(flops);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    validate(o);
    if (*solve) return run_solve(o);
    if (*conv) return run_convergence(o);
    if (*resid) return run_residuals(o);
    if (*prof) return run_error_profile(o);
    if (*bank) return run_bank_sim(o);
    if (*roof) return run_roofline(o);
    if (*flops) return run_flops(o);
  } catch (const UsageError& e) {
    std::cerr << "tcfem: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "tcfem: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
