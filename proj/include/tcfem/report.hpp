#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tcfem/experiments.hpp"

namespace tcfem::report {

/// Missing values (timings under --no-timing, the first convergence rate)
/// print as NA in CSV and null in JSON.
struct Missing {};
using Cell = std::variant<Missing, std::string, std::int64_t, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Provenance: tool, version and the run configuration, in insertion order.
  std::vector<std::pair<std::string, std::string>> meta;
};

enum class Format { csv, json };
Format parse_format(std::string_view name);

/// Shortest form that reads back to the same double.
std::string format_double(double x);

void write(std::ostream& os, const Table& t, Format f);
std::string render(const Table& t, Format f);

struct TableOptions {
  bool timing = true;
};

Table solve_table(const std::vector<SolveRow>& rows, TableOptions opt = {});
Table convergence_table(const std::vector<ConvergenceRow>& rows);
Table error_profile_table(const std::vector<ErrorProfileRow>& rows);
/// One row per (run, iteration) with the absolute and relative residual.
Table residuals_table(const std::vector<SolveRow>& rows);
Table bank_table(const std::vector<BankScenario>& scenarios);
Table roofline_table(const std::vector<RooflinePoint>& points);
struct FlopsEntry {
  std::string kernel;
  FlopReport report;
  std::optional<double> reference_flops_per_dof;  // published figure, where one exists
};
Table flops_table(const std::vector<FlopsEntry>& entries);

/// Prepends tool name and version to the given config pairs.
void stamp(Table& t, std::string_view subcommand, std::vector<std::pair<std::string, std::string>> config);

}  // namespace tcfem::report
