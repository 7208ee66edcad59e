#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "exotest/exotest.h"

namespace {

std::string take(char* s) {
  std::string out = s == nullptr ? "" : s;
  exo_string_free(s);
  return out;
}

const char kFourRows[] = "y,delta,x,w,z\n1,1,0,0,0\n2,0,0,1,0\n3,1,0,0,1\n4,1,0,1,1\n";

exo_dataset* parse(const char* text) {
  exo_dataset* d = nullptr;
  REQUIRE(exo_dataset_parse(text, std::strlen(text), &d) == EXO_OK);
  return d;
}

}  // namespace

TEST_CASE("parse, size, round trip") {
  exo_dataset* d = parse(kFourRows);
  CHECK(exo_dataset_size(d) == 4);
  char* csv = nullptr;
  REQUIRE(exo_dataset_to_csv(d, &csv) == EXO_OK);
  CHECK(take(csv) == kFourRows);
  exo_dataset_free(d);
}

TEST_CASE("error codes and messages") {
  exo_dataset* d = nullptr;
  const char bad[] = "y,delta,x,w,z\n1,5,0,0,0\n";
  CHECK(exo_dataset_parse(bad, std::strlen(bad), &d) == EXO_ERR_PARSE);
  CHECK(d == nullptr);
  CHECK(std::string(exo_last_error()).starts_with("line 2:"));

  CHECK(exo_dataset_parse("", 0, &d) == EXO_ERR_PARSE);
  CHECK(exo_dataset_read("/nonexistent/file.csv", &d) == EXO_ERR_IO);
  CHECK(exo_dataset_parse(bad, std::strlen(bad), nullptr) == EXO_ERR_INVALID_ARGUMENT);

  exo_dataset* degenerate = parse("y,delta,x,w,z\n1,1,0,0,0\n2,0,1,0,1\n");
  exo_test_options options;
  exo_test_options_default(&options);
  exo_report* report = nullptr;
  CHECK(exo_run_test(degenerate, &options, &report) == EXO_ERR_DEGENERATE);
  CHECK(report == nullptr);
  options.statistic = static_cast<exo_statistic>(9);
  CHECK(exo_run_test(degenerate, &options, &report) == EXO_ERR_INVALID_ARGUMENT);
  exo_dataset_free(degenerate);
}

TEST_CASE("defaults") {
  exo_test_options t;
  exo_test_options_default(&t);
  CHECK(t.statistic == EXO_STAT_CM);
  CHECK(t.kind == EXO_BOOT_A);
  CHECK(t.replicates == 1000);
  CHECK(t.seed == 42);
  CHECK(t.gamma == 0.0);
  CHECK(t.weights == EXO_WEIGHTS_CONSTANT);

  exo_dgp_params p;
  exo_dgp_params_default(&p);
  CHECK(p.alpha == 0.0);
  CHECK(p.eta == 2.4);
  CHECK(p.lambda == -5.7);
  CHECK(p.n == 1000);

  exo_study_options s;
  exo_study_options_default(&s);
  CHECK(s.n_statistics == 2);
  CHECK(s.n_kinds == 2);
  CHECK(s.mc == 1000);
  CHECK(s.nominal == 0.05);
}

TEST_CASE("describe outputs") {
  exo_dataset* d = parse(kFourRows);
  char* csv = nullptr;
  REQUIRE(exo_cell_table_csv(d, &csv) == EXO_OK);
  CHECK(take(csv) ==
        "x,w,z,count,censoring_rate\n0,0,0,1,0\n0,0,1,1,0\n0,1,0,1,1\n0,1,1,1,0\n");
  std::size_t count = 0;
  REQUIRE(exo_small_cells_csv(d, 2, &csv, &count) == EXO_OK);
  CHECK(count == 4);
  take(csv);
  REQUIRE(exo_survival_curves_csv(d, &csv) == EXO_OK);
  CHECK(take(csv).starts_with("x,w,z,t,cdf,at_risk,events\n"));
  REQUIRE(exo_logrank_csv(d, &csv) == EXO_OK);
  CHECK(take(csv).starts_with("stratum,chi_square,df,p_value\nall,"));
  REQUIRE(exo_ranks_csv(d, &csv) == EXO_OK);
  CHECK(take(csv).starts_with("v_hat,delta,x,w,z\n"));
  REQUIRE(exo_d_surface_csv(d, 0.0, &csv) == EXO_OK);
  CHECK(take(csv).starts_with("v,x,w,d_hat\n"));
  CHECK(exo_d_surface_csv(d, 1.0, &csv) == EXO_ERR_INVALID_ARGUMENT);
  exo_dataset_free(d);
}

TEST_CASE("test run through the C API") {
  exo_dgp_params p;
  exo_dgp_params_default(&p);
  p.n = 300;
  char* csv = nullptr;
  REQUIRE(exo_simulate_csv(&p, 8, 0, &csv) == EXO_OK);
  const std::string text = take(csv);
  exo_dataset* d = parse(text.c_str());

  exo_test_options options;
  exo_test_options_default(&options);
  options.replicates = 20;
  options.threads = 2;
  exo_report* report = nullptr;
  REQUIRE(exo_run_test(d, &options, &report) == EXO_OK);
  const double p_value = exo_report_p_value(report);
  CHECK(p_value >= 0.0);
  CHECK(p_value <= 1.0);
  CHECK(exo_report_statistic(report) > 0.0);
  char* json = nullptr;
  REQUIRE(exo_report_json(report, 1, &json) == EXO_OK);
  CHECK(take(json).find("\"t_star\"") != std::string::npos);
  REQUIRE(exo_report_json(report, 0, &json) == EXO_OK);
  CHECK(take(json).find("\"t_star\"") == std::string::npos);
  exo_report_free(report);
  exo_dataset_free(d);
}

TEST_CASE("power study through the C API") {
  exo_dgp_params grid[2];
  exo_dgp_params_default(&grid[0]);
  grid[0].n = 120;
  grid[1] = grid[0];
  grid[1].alpha = 2;
  exo_study_options options;
  exo_study_options_default(&options);
  options.mc = 20;
  const exo_statistic cm = EXO_STAT_CM;
  options.statistics = &cm;
  options.n_statistics = 1;
  char* summary = nullptr;
  char* reps = nullptr;
  REQUIRE(exo_power_study_csv(grid, 2, &options, &summary, &reps) == EXO_OK);
  const std::string s = take(summary);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
  const std::string r = take(reps);
  CHECK(std::count(r.begin(), r.end(), '\n') == 1 + 4 * 20);
  CHECK(exo_power_study_csv(grid, 0, &options, &summary, nullptr) == EXO_ERR_INVALID_ARGUMENT);
}

TEST_CASE("null handles are tolerated") {
  exo_dataset_free(nullptr);
  exo_report_free(nullptr);
  exo_string_free(nullptr);
  CHECK(exo_dataset_size(nullptr) == 0);
  CHECK(std::string(exo_version()) == "1.0.0");
}
