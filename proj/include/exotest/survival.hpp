#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "exotest/dataset.hpp"

namespace exotest {

// Right-continuous product-limit estimate F(t) = 1 - prod_{t_i <= t}(1 - d_i/r_i)
// stored at its jump times only. A curve with no jumps is the zero function.
struct SurvivalCurve {
  std::vector<double> jump_times;      // strictly increasing
  std::vector<double> cdf_values;      // nondecreasing, in [0, 1]
  std::vector<std::size_t> at_risk;    // r_i
  std::vector<std::size_t> events;     // d_i >= 1
  std::size_t n_total = 0;

  bool empty() const noexcept { return jump_times.empty(); }
  // Value reached after the last jump (0 for an empty curve).
  double plateau() const noexcept { return cdf_values.empty() ? 0.0 : cdf_values.back(); }
};

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

// Kaplan-Meier fit counting rows with delta == event_code as events. Rows with
// the other code sharing an event time stay in that time's risk set.
// Throws std::invalid_argument on empty or mismatched input.
SurvivalCurve km_fit(std::span<const double> times, std::span<const int> deltas, int event_code = 1);

double km_eval(const SurvivalCurve& curve, double t) noexcept;

// Generalized inverse inf{t_i : F(t_i) >= u}; kInfiniteTime when the curve
// never reaches u.
double km_quantile(const SurvivalCurve& curve, double u) noexcept;

// CSV with columns t,cdf,at_risk,events.
std::string to_csv(const SurvivalCurve& curve);

struct StratifiedFit {
  Scheme scheme = Scheme::kXZ;
  std::map<Cell, SurvivalCurve> curves;

  // Throws std::out_of_range when the cell was not fitted.
  const SurvivalCurve& at(const Cell& cell) const;
};

// One km_fit per nonempty cell of `scheme`.
StratifiedFit conditional_km(const Dataset& data, Scheme scheme, int event_code = 1);

// CSV with columns x,w,z,t,cdf,at_risk,events (unused coordinates written as *).
std::string to_csv(const StratifiedFit& fit);

struct LogRankResult {
  double chi_square = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// k-sample log-rank test; group codes are arbitrary labels.
// Throws std::invalid_argument for empty input, mismatched lengths or < 2 groups.
LogRankResult logrank(std::span<const double> times, std::span<const int> deltas,
                      std::span<const Level> groups);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_upper_tail(double statistic, int df);

}  // namespace exotest
