#include "tcfem/report.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tcfem::report {

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_cell(const Cell& c) {
  struct V {
    std::string operator()(Missing) const { return "NA"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos) return s;
      std::string q = "\"";
      for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
  };
  return std::visit(V{}, c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  struct V {
    nlohmann::ordered_json operator()(Missing) const { return nullptr; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
    nlohmann::ordered_json operator()(double d) const {
      if (!std::isfinite(d)) return format_double(d);
      return d;
    }
  };
  return std::visit(V{}, c);
}

Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{Missing{}}; }
Cell integer(std::size_t n) { return static_cast<std::int64_t>(n); }
Cell str(std::string_view s) { return std::string(s); }

}  // namespace

void write(std::ostream& os, const Table& t, Format f) {
  if (f == Format::csv) {
    for (const auto& [k, v] : t.meta) os << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
      os << "\n";
    }
    return;
  }
  nlohmann::ordered_json doc;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.meta) meta[k] = v;
  doc["provenance"] = meta;
  doc["columns"] = t.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << "\n";
}

std::string render(const Table& t, Format f) {
  std::ostringstream os;
  write(os, t, f);
  return os.str();
}

void stamp(Table& t, std::string_view subcommand, std::vector<std::pair<std::string, std::string>> config) {
  t.meta.clear();
  t.meta.emplace_back("tool", "tcfem");
  t.meta.emplace_back("version", TCFEM_VERSION);
  t.meta.emplace_back("subcommand", std::string(subcommand));
  for (auto& kv : config) t.meta.push_back(std::move(kv));
}

Table solve_table(const std::vector<SolveRow>& rows, TableOptions opt_) {
  Table t;
  t.columns = {"precision", "solver", "k", "level", "dofs", "time_s", "iterations", "final_relative_residual",
               "l2_error", "h1_error", "speedup_vs_fp64", "status"};
  std::map<std::pair<int, int>, double> fp64_time;
  for (const auto& r : rows)
    if (r.precision == PrecisionMode::fp64) fp64_time[{r.k, r.level}] = r.report.wall_time;
  for (const auto& r : rows) {
    Cell time = Missing{}, speedup = Missing{};
    if (opt_.timing) {
      time = r.report.wall_time;
      const auto it = fp64_time.find({r.k, r.level});
      if (it != fp64_time.end() && r.report.wall_time > 0) speedup = it->second / r.report.wall_time;
    }
    t.rows.push_back({str(to_string(r.precision)), str(to_string(r.solver)), std::int64_t{r.k}, std::int64_t{r.level},
                      integer(r.dofs), time, std::int64_t{r.report.iterations}, r.report.final_relative_residual,
                      opt(r.report.l2_error), opt(r.report.h1_error), speedup, str(to_string(r.report.status))});
  }
  return t;
}

Table convergence_table(const std::vector<ConvergenceRow>& rows) {
  Table t;
  t.columns = {"level", "h", "dofs", "l2_error", "h1_error", "rate"};
  for (const auto& r : rows)
    t.rows.push_back({std::int64_t{r.level}, r.h, integer(r.dofs), r.l2_error, r.h1_error, opt(r.rate)});
  return t;
}

Table error_profile_table(const std::vector<ErrorProfileRow>& rows) {
  Table t;
  t.columns = {"level", "dofs", "precision", "relative_error"};
  for (const auto& r : rows)
    t.rows.push_back({std::int64_t{r.level}, integer(r.dofs), str(to_string(r.mode)), r.relative_error});
  return t;
}

Table residuals_table(const std::vector<SolveRow>& rows) {
  Table t;
  t.columns = {"precision", "solver", "k", "level", "iteration", "residual", "relative_residual"};
  for (const auto& r : rows) {
    const auto& h = r.report.residual_history;
    for (std::size_t i = 0; i < h.size(); ++i)
      t.rows.push_back({str(to_string(r.precision)), str(to_string(r.solver)), std::int64_t{r.k},
                        std::int64_t{r.level}, integer(i), h[i], h[0] > 0 ? Cell{h[i] / h[0]} : Cell{Missing{}}});
  }
  return t;
}

Table bank_table(const std::vector<BankScenario>& scenarios) {
  Table t;
  t.columns = {"scenario", "pattern", "layout", "phase", "wavefronts", "bijective", "summary"};
  for (const auto& s : scenarios) {
    std::size_t worst = 0;
    for (std::size_t w : s.report.wavefronts) worst = std::max(worst, w);
    const std::string summary =
        worst <= 1 ? "wavefronts: 1 per phase" : "wavefronts: up to " + std::to_string(worst) + " per phase";
    for (std::size_t p = 0; p < s.report.wavefronts.size(); ++p)
      t.rows.push_back({s.name, s.pattern.name, s.layout.describe(), integer(p), integer(s.report.wavefronts[p]),
                        str(s.bijective ? "true" : "false"), summary});
  }
  return t;
}

Table roofline_table(const std::vector<RooflinePoint>& points) {
  Table t;
  t.columns = {"kernel", "flops", "bytes", "arithmetic_intensity", "shared_ceiling_tflops", "vram_ceiling_tflops"};
  for (const auto& p : points)
    t.rows.push_back({p.kernel, p.flops, p.bytes, p.arithmetic_intensity, p.shared_ceiling_tflops,
                      p.vram_ceiling_tflops});
  return t;
}

Table flops_table(const std::vector<FlopsEntry>& entries) {
  Table t;
  t.columns = {"kernel",  "total_flops", "dofs",    "flops_per_dof",      "contractions",
               "ec_extra", "scaling",    "patch_multiplicity", "reference_flops_per_dof"};
  for (const auto& e : entries) {
    const FlopReport& f = e.report;
    t.rows.push_back({e.kernel, static_cast<std::int64_t>(f.total_flops), static_cast<std::int64_t>(f.dofs),
                      f.flops_per_dof, static_cast<std::int64_t>(f.breakdown.contractions),
                      static_cast<std::int64_t>(f.breakdown.ec_extra), static_cast<std::int64_t>(f.breakdown.scaling),
                      static_cast<std::int64_t>(f.breakdown.patch_multiplicity), opt(e.reference_flops_per_dof)});
  }
  return t;
}

}  // namespace tcfem::report
