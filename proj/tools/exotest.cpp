// exotest command-line front end. Talks to the library only through the C API.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exotest/exotest.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;

// Thrown for bad flag values; reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StatusError : std::runtime_error {
  StatusError(exo_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  exo_status status;
};

void check(exo_status status) {
  if (status != EXO_OK) throw StatusError(status, exo_last_error());
}

struct StringDeleter {
  void operator()(char* s) const { exo_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct DatasetDeleter {
  void operator()(exo_dataset* d) const { exo_dataset_free(d); }
};
using OwnedDataset = std::unique_ptr<exo_dataset, DatasetDeleter>;

struct ReportDeleter {
  void operator()(exo_report* r) const { exo_report_free(r); }
};
using OwnedReport = std::unique_ptr<exo_report, ReportDeleter>;

template <typename Fn>
OwnedString take_string(Fn&& fn) {
  char* raw = nullptr;
  check(fn(&raw));
  return OwnedString(raw);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
  if (!out) throw UsageError("failed writing '" + path + "'");
}

OwnedDataset load(const std::string& path) {
  exo_dataset* raw = nullptr;
  check(exo_dataset_read(path.c_str(), &raw));
  return OwnedDataset(raw);
}

std::vector<std::string> split_list(const std::string& text, const std::string& flag) {
  std::vector<std::string> items;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = text.find(',', start);
    items.push_back(text.substr(start, comma - start));
    if (items.back().empty()) throw UsageError(flag + ": empty list element in '" + text + "'");
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

template <typename T>
T parse_value(const std::string& text, const std::string& flag) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw UsageError(flag + ": cannot parse '" + text + "'");
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  for (const auto& item : split_list(text, flag)) out.push_back(parse_value<T>(item, flag));
  return out;
}

exo_statistic parse_statistic(const std::string& s) {
  if (s == "ks") return EXO_STAT_KS;
  if (s == "cm") return EXO_STAT_CM;
  throw UsageError("--statistic: expected ks or cm, got '" + s + "'");
}

exo_boot_kind parse_kind(const std::string& s) {
  if (s == "a" || s == "A") return EXO_BOOT_A;
  if (s == "b" || s == "B") return EXO_BOOT_B;
  throw UsageError("--boot: expected a or b, got '" + s + "'");
}

exo_weight_scheme parse_weights(const std::string& s) {
  if (s == "constant") return EXO_WEIGHTS_CONSTANT;
  if (s == "empirical") return EXO_WEIGHTS_EMPIRICAL;
  throw UsageError("--weights: expected constant or empirical, got '" + s + "'");
}

// --seed beats EXOTEST_SEED beats the built-in default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("EXOTEST_SEED"); env != nullptr && *env != '\0')
    return parse_value<std::uint64_t>(env, "EXOTEST_SEED");
  return fallback;
}

std::string curves_path_for(const std::string& output) {
  const std::string suffix = ".csv";
  if (output.size() > suffix.size() && output.ends_with(suffix))
    return output.substr(0, output.size() - suffix.size()) + ".curves.csv";
  return output + ".curves.csv";
}

struct Flags {
  std::string input;
  std::string output;
  std::string statistic;
  std::string boot;
  std::string weights = "constant";
  std::uint32_t reps = 1000;
  std::optional<std::uint64_t> seed;
  double gamma = 0.0;
  std::string n = "1000";
  std::string alpha = "0";
  std::string eta = "2.4";
  std::string lambda = "-5.7";
  std::uint32_t mc = 1000;
  double nominal = 0.05;
  bool latent = false;
  bool no_t_star = false;
  std::uint32_t threads = 0;
  std::size_t min_cell = 5;
  std::string curves;
  std::string logrank;
  std::string ranks;
  std::string replicates;
};

void add_seed_threads(CLI::App* cmd, Flags& f) {
  cmd->add_option("--seed", f.seed, "Random seed (overrides EXOTEST_SEED; default 42)");
  cmd->add_option("--threads", f.threads, "Worker threads, 0 = all cores")->capture_default_str();
}

int run_describe(const Flags& f) {
  const OwnedDataset data = load(f.input);
  const OwnedString cells = take_string([&](char** s) { return exo_cell_table_csv(data.get(), s); });
  const OwnedString curves =
      take_string([&](char** s) { return exo_survival_curves_csv(data.get(), s); });

  std::size_t small_count = 0;
  const OwnedString small = take_string(
      [&](char** s) { return exo_small_cells_csv(data.get(), f.min_cell, s, &small_count); });
  if (small_count > 0) {
    std::cerr << "warning: " << small_count << " cell(s) with fewer than " << f.min_cell
              << " observations:\n"
              << small.get();
  }

  if (f.output.empty() || f.output == "-") {
    write_output("", std::string(cells.get()) + "\n" + curves.get());
  } else {
    write_output(f.output, cells.get());
    write_output(f.curves.empty() ? curves_path_for(f.output) : f.curves, curves.get());
  }
  if (!f.logrank.empty()) {
    const OwnedString lr = take_string([&](char** s) { return exo_logrank_csv(data.get(), s); });
    write_output(f.logrank, lr.get());
  }
  return kExitOk;
}

int run_test(const Flags& f) {
  exo_test_options options;
  exo_test_options_default(&options);
  options.statistic = parse_statistic(f.statistic.empty() ? "cm" : f.statistic);
  options.kind = parse_kind(f.boot.empty() ? "a" : f.boot);
  options.weights = parse_weights(f.weights);
  if (f.reps == 0) throw UsageError("--reps must be positive");
  options.replicates = f.reps;
  options.seed = resolve_seed(f.seed, options.seed);
  options.gamma = f.gamma;
  options.threads = f.threads;

  const OwnedDataset data = load(f.input);
  exo_report* raw = nullptr;
  check(exo_run_test(data.get(), &options, &raw));
  const OwnedReport report(raw);
  const OwnedString json =
      take_string([&](char** s) { return exo_report_json(report.get(), f.no_t_star ? 0 : 1, s); });
  write_output(f.output, json.get());
  return kExitOk;
}

exo_dgp_params single_design(const Flags& f) {
  exo_dgp_params p;
  exo_dgp_params_default(&p);
  p.alpha = parse_value<double>(f.alpha, "--alpha");
  p.eta = parse_value<double>(f.eta, "--eta");
  p.lambda = parse_value<double>(f.lambda, "--lambda");
  p.n = parse_value<std::uint64_t>(f.n, "--n");
  if (p.n == 0) throw UsageError("--n must be positive");
  return p;
}

int run_simulate(const Flags& f) {
  const exo_dgp_params p = single_design(f);
  const std::uint64_t seed = resolve_seed(f.seed, 42);
  const OwnedString csv =
      take_string([&](char** s) { return exo_simulate_csv(&p, seed, f.latent ? 1 : 0, s); });
  write_output(f.output, csv.get());
  return kExitOk;
}

int run_power(const Flags& f) {
  const auto alphas = parse_list<double>(f.alpha, "--alpha");
  const auto etas = parse_list<double>(f.eta, "--eta");
  const auto lambdas = parse_list<double>(f.lambda, "--lambda");
  const auto ns = parse_list<std::uint64_t>(f.n, "--n");

  std::vector<exo_dgp_params> grid;
  for (const auto n : ns) {
    if (n == 0) throw UsageError("--n must be positive");
    for (const double lambda : lambdas)
      for (const double eta : etas)
        for (const double alpha : alphas) grid.push_back({alpha, eta, lambda, n});
  }

  std::vector<exo_statistic> statistics;
  for (const auto& s : split_list(f.statistic.empty() ? "ks,cm" : f.statistic, "--statistic"))
    statistics.push_back(parse_statistic(s));
  std::vector<exo_boot_kind> kinds;
  for (const auto& k : split_list(f.boot.empty() ? "a,b" : f.boot, "--boot"))
    kinds.push_back(parse_kind(k));
  if (f.mc == 0) throw UsageError("--mc must be positive");
  if (!(f.nominal > 0.0 && f.nominal < 1.0)) throw UsageError("--nominal must lie in (0, 1)");

  exo_study_options options;
  exo_study_options_default(&options);
  options.statistics = statistics.data();
  options.n_statistics = statistics.size();
  options.kinds = kinds.data();
  options.n_kinds = kinds.size();
  options.mc = f.mc;
  options.nominal = f.nominal;
  options.gamma = f.gamma;
  options.weights = parse_weights(f.weights);
  options.seed = resolve_seed(f.seed, options.seed);
  options.threads = f.threads;

  char* summary = nullptr;
  char* replicates = nullptr;
  check(exo_power_study_csv(grid.data(), grid.size(), &options, &summary,
                            f.replicates.empty() ? nullptr : &replicates));
  const OwnedString owned_summary(summary);
  const OwnedString owned_replicates(replicates);
  write_output(f.output, summary);
  if (!f.replicates.empty()) write_output(f.replicates, replicates);
  return kExitOk;
}

int run_plot_data(const Flags& f) {
  const OwnedDataset data = load(f.input);
  const OwnedString surface =
      take_string([&](char** s) { return exo_d_surface_csv(data.get(), f.gamma, s); });
  write_output(f.output, surface.get());
  if (!f.ranks.empty()) {
    const OwnedString ranks = take_string([&](char** s) { return exo_ranks_csv(data.get(), s); });
    write_output(f.ranks, ranks.get());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric exogeneity tests for censored duration data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", exo_version());
  Flags f;

  auto* describe = app.add_subcommand("describe", "Cell counts, censoring rates and KM curves");
  describe->add_option("--input", f.input, "Input CSV (y,delta,x,w,z)")->required();
  describe->add_option("--output", f.output, "Cell table CSV (default stdout)");
  describe->add_option("--curves", f.curves, "KM curve CSV (default <output>.curves.csv)");
  describe->add_option("--logrank", f.logrank, "Log-rank tests across z, overall and per x");
  describe->add_option("--min-cell", f.min_cell, "Warn about cells smaller than this")
      ->capture_default_str();

  auto* test = app.add_subcommand("test", "Bootstrap exogeneity test");
  test->add_option("--input", f.input, "Input CSV (y,delta,x,w,z)")->required();
  test->add_option("--output", f.output, "Report JSON (default stdout)");
  test->add_option("--statistic", f.statistic, "ks or cm (default cm)");
  test->add_option("--boot", f.boot, "Bootstrap type a or b (default a)");
  test->add_option("--reps", f.reps, "Bootstrap replicates B")->capture_default_str();
  test->add_option("--gamma", f.gamma, "Trimming bound")->capture_default_str();
  test->add_option("--weights", f.weights, "constant or empirical")->capture_default_str();
  test->add_flag("--no-t-star", f.no_t_star, "Omit replicate statistics from the report");
  add_seed_threads(test, f);

  auto* simulate = app.add_subcommand("simulate", "Draw one dataset from the simulation design");
  simulate->add_option("--output", f.output, "Dataset CSV (default stdout)");
  simulate->add_option("--n", f.n, "Sample size")->capture_default_str();
  simulate->add_option("--alpha", f.alpha, "Endogeneity")->capture_default_str();
  simulate->add_option("--eta", f.eta, "Instrument strength")->capture_default_str();
  simulate->add_option("--lambda", f.lambda, "Censoring level")->capture_default_str();
  simulate->add_flag("--latent", f.latent, "Append the latent u_t column");
  simulate->add_option("--seed", f.seed, "Random seed (overrides EXOTEST_SEED; default 42)");

  auto* power = app.add_subcommand("power", "Warp-speed size/power study");
  power->add_option("--output", f.output, "Summary CSV (default stdout)");
  power->add_option("--replicates", f.replicates, "Per-replication CSV");
  power->add_option("--n", f.n, "Sample sizes (comma list)")->capture_default_str();
  power->add_option("--alpha", f.alpha, "Endogeneity values (comma list)")->capture_default_str();
  power->add_option("--eta", f.eta, "Instrument strengths (comma list)")->capture_default_str();
  power->add_option("--lambda", f.lambda, "Censoring levels (comma list)")->capture_default_str();
  power->add_option("--statistic", f.statistic, "ks, cm or a comma list (default ks,cm)");
  power->add_option("--boot", f.boot, "a, b or a comma list (default a,b)");
  power->add_option("--mc", f.mc, "Monte Carlo replications M")->capture_default_str();
  power->add_option("--nominal", f.nominal, "Nominal level")->capture_default_str();
  power->add_option("--gamma", f.gamma, "Trimming bound")->capture_default_str();
  power->add_option("--weights", f.weights, "constant or empirical")->capture_default_str();
  add_seed_threads(power, f);

  auto* plot = app.add_subcommand("plot-data", "D(v,x,w) surface and estimated ranks");
  plot->add_option("--input", f.input, "Input CSV (y,delta,x,w,z)")->required();
  plot->add_option("--output", f.output, "Surface CSV v,x,w,d_hat (default stdout)");
  plot->add_option("--ranks", f.ranks, "Ranks CSV v_hat,delta,x,w,z");
  plot->add_option("--gamma", f.gamma, "Trimming bound")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*describe) return run_describe(f);
    if (*test) return run_test(f);
    if (*simulate) return run_simulate(f);
    if (*power) return run_power(f);
    if (*plot) return run_plot_data(f);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StatusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.status) {
      case EXO_ERR_DEGENERATE: return kExitDegenerate;
      case EXO_ERR_INTERNAL: return kExitInternal;
      default: return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
