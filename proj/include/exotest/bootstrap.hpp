#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "exotest/dataset.hpp"
#include "exotest/random.hpp"
#include "exotest/survival.hpp"
#include "exotest/teststats.hpp"

namespace exotest {

// kA draws both durations and censoring times from the conditional KM fits.
// kB keeps observed censoring times and, for observed events, draws a
// censoring time beyond the observed duration.
enum class BootstrapKind { kA, kB };

std::string to_string(BootstrapKind kind);

struct BootstrapConfig {
  BootstrapKind kind = BootstrapKind::kA;
  std::size_t replicates = 1000;
  Statistic statistic = Statistic::kCM;
  std::uint64_t seed = 42;
  double gamma = 0.0;
  WeightScheme weights = WeightScheme::kConstant;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct TestReport {
  BootstrapConfig config;
  std::size_t n = 0;
  double t_obs = 0.0;
  std::vector<double> t_star;
  double p_value = 0.0;
  // Degenerate replicates that were redrawn plus rows whose duration and
  // censoring draws were both unbounded.
  std::size_t warnings = 0;
};

// Conditional KM of the censoring time per (x, z), with delta == 0 as the event.
StratifiedFit censoring_fit(const Dataset& data);

struct Resample {
  Dataset data;
  std::size_t unbounded_rows = 0;
};

// One bootstrap sample. Row i consumes exactly two uniforms from
// UniformStream(stream, i): the duration draw, then the censoring draw.
Resample resample(const Dataset& data, const StratifiedFit& fit_t, const StratifiedFit& fit_c,
                  BootstrapKind kind, const StreamId& stream);

inline constexpr std::uint32_t kMaxDegenerateAttempts = 100;

struct ReplicateOutcome {
  StatisticValues statistics;
  std::size_t warnings = 0;
};

// Resamples and re-runs the whole estimator. A sample with a (x, z) stratum
// lacking events is redrawn from the next attempt substream; throws
// DegenerateData after kMaxDegenerateAttempts consecutive failures.
ReplicateOutcome bootstrap_replicate(const Dataset& data, const StratifiedFit& fit_t,
                                     const StratifiedFit& fit_c, BootstrapKind kind,
                                     const StatisticOptions& options, StreamId stream);

// B^-1 * #{b : t_star[b] > t_obs}.
double bootstrap_p_value(double t_obs, const std::vector<double>& t_star);

TestReport run_test(const Dataset& data, const BootstrapConfig& config);

// {statistic, kind, B, seed, gamma, weights, n, t_obs, p_value, warnings, t_star}
std::string to_json(const TestReport& report, bool include_t_star = true);

}  // namespace exotest
