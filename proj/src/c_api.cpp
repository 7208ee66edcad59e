#include "exotest/exotest.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "exotest/bootstrap.hpp"
#include "exotest/dataset.hpp"
#include "exotest/error.hpp"
#include "exotest/montecarlo.hpp"
#include "exotest/ranks.hpp"
#include "exotest/survival.hpp"
#include "exotest/teststats.hpp"

struct exo_dataset {
  exotest::Dataset data;
};

struct exo_report {
  exotest::TestReport report;
};

namespace {

thread_local std::string g_last_error;

exo_status fail(exo_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
exo_status guarded(Body&& body) noexcept {
  try {
    body();
    return EXO_OK;
  } catch (const exotest::ParseError& e) {
    return fail(EXO_ERR_PARSE, e.what());
  } catch (const exotest::IoError& e) {
    return fail(EXO_ERR_IO, e.what());
  } catch (const exotest::DegenerateData& e) {
    return fail(EXO_ERR_DEGENERATE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(EXO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(EXO_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(EXO_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EXO_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw std::invalid_argument(std::string(what) + " must not be null");
}

exotest::Statistic to_statistic(exo_statistic s) {
  switch (s) {
    case EXO_STAT_KS: return exotest::Statistic::kKS;
    case EXO_STAT_CM: return exotest::Statistic::kCM;
  }
  throw std::invalid_argument("unknown statistic");
}

exotest::BootstrapKind to_kind(exo_boot_kind k) {
  switch (k) {
    case EXO_BOOT_A: return exotest::BootstrapKind::kA;
    case EXO_BOOT_B: return exotest::BootstrapKind::kB;
  }
  throw std::invalid_argument("unknown bootstrap kind");
}

exotest::WeightScheme to_weights(exo_weight_scheme w) {
  switch (w) {
    case EXO_WEIGHTS_CONSTANT: return exotest::WeightScheme::kConstant;
    case EXO_WEIGHTS_EMPIRICAL: return exotest::WeightScheme::kEmpirical;
  }
  throw std::invalid_argument("unknown weight scheme");
}

exotest::DgpParams to_params(const exo_dgp_params& p) {
  return {p.alpha, p.eta, p.lambda, static_cast<std::size_t>(p.n)};
}

std::string logrank_csv(const exotest::Dataset& data) {
  std::string out = "stratum,chi_square,df,p_value\n";
  auto add = [&](const std::string& label, bool (*keep)(const exotest::Observation&, exotest::Level),
                 exotest::Level level) {
    std::vector<double> t;
    std::vector<int> d;
    std::vector<exotest::Level> g;
    for (const auto& o : data.observations()) {
      if (!keep(o, level)) continue;
      t.push_back(o.y);
      d.push_back(o.delta);
      g.push_back(o.z);
    }
    std::vector<exotest::Level> groups = g;
    std::sort(groups.begin(), groups.end());
    if (t.empty() || groups.front() == groups.back()) return;
    const exotest::LogRankResult r = exotest::logrank(t, d, g);
    out += label + ',' + exotest::format_double(r.chi_square) + ',' + std::to_string(r.df) + ',' +
           exotest::format_double(r.p_value) + '\n';
  };
  add("all", [](const exotest::Observation&, exotest::Level) { return true; }, 0);
  for (const exotest::Level x : data.levels_x())
    add("x=" + std::to_string(x),
        [](const exotest::Observation& o, exotest::Level level) { return o.x == level; }, x);
  return out;
}

const exo_statistic kAllStatistics[] = {EXO_STAT_KS, EXO_STAT_CM};
const exo_boot_kind kAllKinds[] = {EXO_BOOT_A, EXO_BOOT_B};

}  // namespace

extern "C" {

const char* exo_version(void) { return "1.0.0"; }

const char* exo_last_error(void) { return g_last_error.c_str(); }

void exo_string_free(char* s) { std::free(s); }

exo_status exo_dataset_parse(const char* text, size_t len, exo_dataset** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (len > 0) require(text, "text");
    *out = new exo_dataset{exotest::parse_csv(std::string_view(text == nullptr ? "" : text, len))};
  });
}

exo_status exo_dataset_read(const char* path, exo_dataset** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    *out = nullptr;
    *out = new exo_dataset{exotest::read_csv_file(path)};
  });
}

void exo_dataset_free(exo_dataset* data) { delete data; }

size_t exo_dataset_size(const exo_dataset* data) { return data == nullptr ? 0 : data->data.size(); }

exo_status exo_dataset_to_csv(const exo_dataset* data, char** csv) {
  return guarded([&] {
    require(data, "data");
    require(csv, "csv");
    *csv = copy_string(exotest::to_csv(data->data));
  });
}

exo_status exo_cell_table_csv(const exo_dataset* data, char** csv) {
  return guarded([&] {
    require(data, "data");
    require(csv, "csv");
    *csv = copy_string(exotest::to_csv(exotest::cell_audit(data->data)));
  });
}

exo_status exo_small_cells_csv(const exo_dataset* data, size_t threshold, char** csv, size_t* count) {
  return guarded([&] {
    require(data, "data");
    require(csv, "csv");
    const auto small = exotest::min_cell_check(data->data, threshold);
    if (count != nullptr) *count = small.size();
    *csv = copy_string(exotest::to_csv(small));
  });
}

exo_status exo_survival_curves_csv(const exo_dataset* data, char** csv) {
  return guarded([&] {
    require(data, "data");
    require(csv, "csv");
    *csv = copy_string(exotest::to_csv(exotest::conditional_km(data->data, exotest::Scheme::kXZ, 1)));
  });
}

exo_status exo_logrank_csv(const exo_dataset* data, char** csv) {
  return guarded([&] {
    require(data, "data");
    require(csv, "csv");
    *csv = copy_string(logrank_csv(data->data));
  });
}

exo_status exo_ranks_csv(const exo_dataset* data, char** csv) {
  return guarded([&] {
    require(data, "data");
    require(csv, "csv");
    const exotest::StratifiedFit fit = exotest::conditional_km(data->data, exotest::Scheme::kXZ, 1);
    *csv = copy_string(exotest::to_csv(exotest::estimate_ranks(data->data, fit)));
  });
}

exo_status exo_d_surface_csv(const exo_dataset* data, double gamma, char** csv) {
  return guarded([&] {
    require(data, "data");
    require(csv, "csv");
    exotest::StatisticOptions options;
    options.gamma = gamma;
    *csv = copy_string(exotest::to_csv(exotest::evaluate(data->data, options).surface));
  });
}

void exo_test_options_default(exo_test_options* options) {
  if (options == nullptr) return;
  const exotest::BootstrapConfig defaults;
  options->statistic = EXO_STAT_CM;
  options->kind = EXO_BOOT_A;
  options->replicates = static_cast<uint32_t>(defaults.replicates);
  options->seed = defaults.seed;
  options->gamma = defaults.gamma;
  options->weights = EXO_WEIGHTS_CONSTANT;
  options->threads = 0;
}

exo_status exo_run_test(const exo_dataset* data, const exo_test_options* options, exo_report** out) {
  return guarded([&] {
    require(data, "data");
    require(options, "options");
    require(out, "out");
    *out = nullptr;
    exotest::BootstrapConfig config;
    config.statistic = to_statistic(options->statistic);
    config.kind = to_kind(options->kind);
    config.replicates = options->replicates;
    config.seed = options->seed;
    config.gamma = options->gamma;
    config.weights = to_weights(options->weights);
    config.threads = options->threads;
    *out = new exo_report{exotest::run_test(data->data, config)};
  });
}

void exo_report_free(exo_report* report) { delete report; }

double exo_report_statistic(const exo_report* report) {
  return report == nullptr ? 0.0 : report->report.t_obs;
}

double exo_report_p_value(const exo_report* report) {
  return report == nullptr ? 0.0 : report->report.p_value;
}

size_t exo_report_warnings(const exo_report* report) {
  return report == nullptr ? 0 : report->report.warnings;
}

exo_status exo_report_json(const exo_report* report, int include_t_star, char** json) {
  return guarded([&] {
    require(report, "report");
    require(json, "json");
    *json = copy_string(exotest::to_json(report->report, include_t_star != 0));
  });
}

void exo_dgp_params_default(exo_dgp_params* params) {
  if (params == nullptr) return;
  const exotest::DgpParams defaults;
  params->alpha = defaults.alpha;
  params->eta = defaults.eta;
  params->lambda = defaults.lambda;
  params->n = defaults.n;
}

exo_status exo_simulate_csv(const exo_dgp_params* params, uint64_t seed, int include_latent,
                            char** csv) {
  return guarded([&] {
    require(params, "params");
    require(csv, "csv");
    const exotest::StreamId stream{seed, exotest::StreamDomain::kSimulation, 0, 0, 0};
    const auto sample = exotest::dgp_sample(to_params(*params), stream);
    *csv = copy_string(exotest::to_csv(sample, include_latent != 0));
  });
}

void exo_study_options_default(exo_study_options* options) {
  if (options == nullptr) return;
  const exotest::StudyConfig defaults;
  options->statistics = kAllStatistics;
  options->n_statistics = 2;
  options->kinds = kAllKinds;
  options->n_kinds = 2;
  options->mc = static_cast<uint32_t>(defaults.mc);
  options->nominal = defaults.nominal;
  options->gamma = defaults.gamma;
  options->weights = EXO_WEIGHTS_CONSTANT;
  options->seed = defaults.seed;
  options->threads = 0;
}

exo_status exo_power_study_csv(const exo_dgp_params* grid, size_t n_grid,
                               const exo_study_options* options, char** summary,
                               char** replicates) {
  return guarded([&] {
    require(options, "options");
    require(summary, "summary");
    if (n_grid > 0) require(grid, "grid");
    if (n_grid == 0) throw std::invalid_argument("empty design grid");
    if (options->n_statistics > 0) require(options->statistics, "statistics");
    if (options->n_kinds > 0) require(options->kinds, "kinds");

    std::vector<exotest::DgpParams> points;
    for (size_t g = 0; g < n_grid; ++g) points.push_back(to_params(grid[g]));
    exotest::StudyConfig config;
    config.statistics.clear();
    for (size_t k = 0; k < options->n_statistics; ++k)
      config.statistics.push_back(to_statistic(options->statistics[k]));
    config.kinds.clear();
    for (size_t k = 0; k < options->n_kinds; ++k) config.kinds.push_back(to_kind(options->kinds[k]));
    config.mc = options->mc;
    config.nominal = options->nominal;
    config.gamma = options->gamma;
    config.weights = to_weights(options->weights);
    config.seed = options->seed;
    config.threads = options->threads;

    const exotest::StudyResult result = exotest::warp_speed_study(points, config);
    std::string replicate_text;
    if (replicates != nullptr) replicate_text = exotest::replicates_to_csv(result);
    char* s = copy_string(exotest::to_csv(result));
    if (replicates != nullptr) {
      try {
        *replicates = copy_string(replicate_text);
      } catch (...) {
        std::free(s);
        throw;
      }
    }
    *summary = s;
  });
}

}  // extern "C"
