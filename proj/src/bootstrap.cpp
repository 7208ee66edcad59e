#include "exotest/bootstrap.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "json.hpp"

#include "exotest/error.hpp"
#include "exotest/parallel.hpp"

namespace exotest {

std::string to_string(BootstrapKind kind) { return kind == BootstrapKind::kA ? "a" : "b"; }

StratifiedFit censoring_fit(const Dataset& data) { return conditional_km(data, Scheme::kXZ, 0); }

Resample resample(const Dataset& data, const StratifiedFit& fit_t, const StratifiedFit& fit_c,
                  BootstrapKind kind, const StreamId& stream) {
  std::map<Cell, double> cell_max;
  for (const auto& o : data.observations()) {
    double& m = cell_max[cell_of(o, Scheme::kXZ)];
    m = std::max(m, o.y);
  }

  std::size_t unbounded = 0;
  std::vector<Observation> rows;
  rows.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Observation& o = data[i];
    const Cell cell = cell_of(o, Scheme::kXZ);
    const SurvivalCurve& duration = fit_t.at(cell);
    const SurvivalCurve& censoring = fit_c.at(cell);

    UniformStream draws(stream, static_cast<std::uint32_t>(i));
    const double u_t = draws.next();
    const double u_c = draws.next();

    const double t_star = km_quantile(duration, u_t);
    double c_star;
    if (kind == BootstrapKind::kA) {
      c_star = km_quantile(censoring, u_c);
    } else if (o.delta == 1) {
      const double floor = km_eval(censoring, o.y);
      c_star = km_quantile(censoring, floor + (1.0 - floor) * u_c);
    } else {
      c_star = o.y;
    }

    Observation out = o;
    if (t_star == kInfiniteTime && c_star == kInfiniteTime) {
      out.y = cell_max.at(cell);
      out.delta = 0;
      ++unbounded;
    } else {
      out.y = std::min(t_star, c_star);
      out.delta = out.y == t_star ? 1 : 0;
    }
    rows.push_back(out);
  }
  return {Dataset(std::move(rows)), unbounded};
}

ReplicateOutcome bootstrap_replicate(const Dataset& data, const StratifiedFit& fit_t,
                                     const StratifiedFit& fit_c, BootstrapKind kind,
                                     const StatisticOptions& options, StreamId stream) {
  ReplicateOutcome outcome;
  for (std::uint32_t attempt = 0; attempt < kMaxDegenerateAttempts; ++attempt) {
    Resample sample = resample(data, fit_t, fit_c, kind, stream);
    outcome.warnings += sample.unbounded_rows;
    try {
      outcome.statistics = compute_statistics(sample.data, options);
      return outcome;
    } catch (const DegenerateData&) {
      ++outcome.warnings;
      ++stream.attempt;
    }
  }
  throw DegenerateData("bootstrap replicate degenerated " + std::to_string(kMaxDegenerateAttempts) +
                       " times in a row (a (x,z) stratum keeps drawing no events)");
}

double bootstrap_p_value(double t_obs, const std::vector<double>& t_star) {
  if (t_star.empty()) throw std::invalid_argument("bootstrap_p_value: no replicates");
  const auto exceed = std::count_if(t_star.begin(), t_star.end(), [&](double t) { return t > t_obs; });
  return static_cast<double>(exceed) / static_cast<double>(t_star.size());
}

TestReport run_test(const Dataset& data, const BootstrapConfig& config) {
  if (config.replicates == 0) throw std::invalid_argument("at least one bootstrap replicate is required");
  const StatisticOptions options{config.gamma, config.weights};

  const Evaluation original = evaluate(data, options);
  const StratifiedFit fit_c = censoring_fit(data);

  TestReport report;
  report.config = config;
  report.n = data.size();
  report.t_obs = original.statistics[config.statistic];
  report.t_star.resize(config.replicates);
  std::vector<std::size_t> warnings(config.replicates, 0);

  parallel_for(config.replicates, config.threads, [&](std::size_t b) {
    StreamId stream{config.seed, StreamDomain::kBootstrap, 0, 0, b};
    const ReplicateOutcome r =
        bootstrap_replicate(data, original.duration_fit, fit_c, config.kind, options, stream);
    report.t_star[b] = r.statistics[config.statistic];
    warnings[b] = r.warnings;
  });

  for (const std::size_t w : warnings) report.warnings += w;
  report.p_value = bootstrap_p_value(report.t_obs, report.t_star);
  return report;
}

std::string to_json(const TestReport& report, bool include_t_star) {
  nlohmann::ordered_json j;
  j["statistic"] = to_string(report.config.statistic);
  j["kind"] = to_string(report.config.kind);
  j["B"] = report.config.replicates;
  j["seed"] = report.config.seed;
  j["gamma"] = report.config.gamma;
  j["weights"] = report.config.weights == WeightScheme::kConstant ? "constant" : "empirical";
  j["n"] = report.n;
  j["t_obs"] = report.t_obs;
  j["p_value"] = report.p_value;
  j["warnings"] = report.warnings;
  if (include_t_star) j["t_star"] = report.t_star;
  return j.dump(2) + "\n";
}

}  // namespace exotest
