#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "tcfem/parallel.hpp"
#include "tcfem/report.hpp"

using namespace tcfem;
using namespace tcfem::report;

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5e-12) == "-2.5e-12");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  for (double x : {1.0 / 3.0, 2.0 / 7.0, 6.02214076e23, std::numeric_limits<double>::denorm_min()}) {
    const std::string s = format_double(x);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == x);
  }
}

TEST_CASE("csv and json") {
  Table t;
  t.columns = {"name", "n", "x", "missing"};
  t.rows.push_back({std::string("a,b"), std::int64_t{3}, 0.25, Missing{}});
  t.rows.push_back({std::string("say \"hi\""), std::int64_t{-1}, 1e300, 2.0});
  t.meta = {{"tool", "tcfem"}, {"k", "3"}};
  CHECK(render(t, Format::csv) ==
        "# tool=tcfem\n# k=3\nname,n,x,missing\n\"a,b\",3,0.25,NA\n\"say \"\"hi\"\"\",-1,1e+300,2\n");
  const auto j = nlohmann::json::parse(render(t, Format::json));
  CHECK(j["provenance"]["k"] == "3");
  CHECK(j["columns"].size() == 4);
  CHECK(j["rows"][0]["name"] == "a,b");
  CHECK(j["rows"][0]["missing"].is_null());
  CHECK(j["rows"][1]["x"].get<double>() == 1e300);
  CHECK(parse_format("json") == Format::json);
  CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}

TEST_CASE("stamp") {
  Table t;
  t.meta = {{"stale", "1"}};
  stamp(t, "solve", {{"k", "2"}});
  REQUIRE(t.meta.size() == 4);
  CHECK(t.meta[0] == std::pair<std::string, std::string>{"tool", "tcfem"});
  CHECK(t.meta[1].first == "version");
  CHECK(t.meta[1].second == TCFEM_VERSION);
  CHECK(t.meta[2].second == "solve");
  CHECK(t.meta[3].first == "k");
}

TEST_CASE("solve table") {
  std::vector<SolveRow> rows(2);
  rows[0].k = rows[1].k = 2;
  rows[0].level = rows[1].level = 3;
  rows[0].precision = PrecisionMode::fp64;
  rows[1].precision = PrecisionMode::fp16_ec;
  rows[0].report.wall_time = 2.0;
  rows[1].report.wall_time = 0.5;
  rows[0].report.status = SolveStatus::converged;
  rows[0].report.l2_error = 1e-3;
  const Table timed = solve_table(rows);
  REQUIRE(timed.rows.size() == 2);
  CHECK(std::get<double>(timed.rows[0][10]) == 1.0);
  CHECK(std::get<double>(timed.rows[1][10]) == 4.0);
  CHECK(std::get<std::string>(timed.rows[0][11]) == "converged");
  CHECK(std::holds_alternative<Missing>(timed.rows[1][8]));
  const Table plain = solve_table(rows, {.timing = false});
  for (const auto& r : plain.rows) {
    CHECK(std::holds_alternative<Missing>(r[5]));
    CHECK(std::holds_alternative<Missing>(r[10]));
  }
}

TEST_CASE("statistics helpers") {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625};
  std::vector<double> e;
  for (double x : h) e.push_back(7.0 * x * x * x);
  CHECK(log_log_slope(h, e) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(log_log_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);

  const std::vector<double> x{1, 2, 3, 4, 5};
  CHECK(spearman(x, std::vector<double>{2, 4, 8, 16, 1000}) == doctest::Approx(1.0));
  CHECK(spearman(x, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0));
  // 1 - 6 sum d^2 / (n (n^2 - 1)) with one swap: d = (0,0,1,1,0)
  CHECK(spearman(x, std::vector<double>{1, 2, 4, 3, 5}) == doctest::Approx(0.9));
  // ties take the average rank
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 2}) ==
        doctest::Approx(std::sqrt(3.0) / 2.0));
}

TEST_CASE("bank and flops tables") {
  std::vector<BankScenario> s;
  for (const auto& name : bank_scenario_names()) s.push_back(run_bank_scenario(name));
  const Table t = bank_table(s);
  CHECK(t.rows.size() == 2 + 2 + 4 + 4);
  CHECK(std::get<std::string>(t.rows[0][6]) == "wavefronts: up to 2 per phase");
  CHECK(std::get<std::string>(t.rows[2][6]) == "wavefronts: 1 per phase");
  for (const auto& r : t.rows) CHECK(std::get<std::string>(r[5]) == "true");
  CHECK_THROWS_AS(run_bank_scenario("fp32-naive"), std::invalid_argument);

  const SeparableOperator op = patch_laplacian(16, 3);
  const Table f = flops_table({{"base", count_flops(op, FlopVariant::base, EvaluationKind::patch), 1738.0}});
  CHECK(std::get<double>(f.rows[0][8]) == 1738.0);
  CHECK(std::get<std::int64_t>(f.rows[0][2]) == 4096);
}

TEST_CASE("roofline points") {
  const auto pts = roofline_points();
  REQUIRE(pts.size() == 4);
  for (const auto& p : pts) {
    CHECK(p.arithmetic_intensity == doctest::Approx(p.flops / p.bytes));
    CHECK(p.vram_ceiling_tflops <= (p.kernel.starts_with("fp16") ? 312.0 : 19.5));
    CHECK(p.shared_ceiling_tflops > 0.0);
  }
  CHECK(pts[3].arithmetic_intensity > pts[1].arithmetic_intensity);
}

TEST_CASE("reports do not depend on the thread count") {
  const std::vector<int> levels{1, 2};
  const std::vector<PrecisionMode> modes{PrecisionMode::fp64, PrecisionMode::fp16, PrecisionMode::fp16_ec};
  auto run = [&](int threads) {
    set_thread_count(threads);
    std::string out = render(solve_table(solve_sweep(2, levels, modes, {}), {.timing = false}), Format::csv);
    out += render(error_profile_table(error_profile(2, levels, modes, 7, 2)), Format::json);
    out += render(residuals_table(solve_sweep(1, levels, modes, {})), Format::csv);
    set_thread_count(1);
    return out;
  };
  CHECK(run(1) == run(4));
  CHECK(run(3) == run(1));
}
