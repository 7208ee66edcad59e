#pragma once

#include <map>
#include <string>
#include <vector>

#include "exotest/dataset.hpp"
#include "exotest/ranks.hpp"

namespace exotest {

// Evaluation points for the sup and the integral over [0, 1 - gamma]. Both
// rank CDFs are constant between distinct v_hat values, so the distinct
// ranks (plus 0) are an exact grid.
struct EvalGrid {
  std::vector<double> points;  // strictly increasing, points[0] == 0
  double gamma = 0.0;

  double upper() const noexcept { return 1.0 - gamma; }
};

// Throws std::invalid_argument when gamma is outside [0, 1) or no point survives.
EvalGrid make_grid(const RankedSample& ranks, double gamma);

// D(v, x, w) = F_{V|X,W}(v | x, w) - F_V(v) on every grid point and (x, w) cell.
struct DSurface {
  std::vector<double> grid;
  double gamma = 0.0;
  std::vector<Cell> cells;                   // (x, w, *) in map order
  std::vector<std::vector<double>> values;   // values[cell][grid point]

  // Index of `v` in the grid, or npos when absent.
  std::size_t grid_index(double v) const noexcept;
};

DSurface d_surface(const RankCdfSet& cdfs, const EvalGrid& grid);

// CSV with columns v,x,w,d_hat.
std::string to_csv(const DSurface& surface);

enum class WeightScheme { kConstant, kEmpirical };

struct WeightTable {
  WeightScheme scheme = WeightScheme::kConstant;
  std::map<Cell, double> weights;  // keyed by (x, w, *)
};

// kConstant gives every cell `constant`; kEmpirical uses n(x,w)/n.
WeightTable make_weights(const RankedSample& ranks, WeightScheme scheme, double constant = 1.0);

// sqrt(n) * max |D|.
double ks_statistic(const DSurface& d, std::size_t n);

// n * sum_{(x,w)} weight * sum_j D(v_j)^2 * (jump of F_{V|X,W} at v_j), over
// the conditional curve's jump points v_j <= 1 - d.gamma. Throws
// std::invalid_argument for a negative or missing weight, or a jump point
// that is not on the surface's grid.
double cm_statistic(const DSurface& d, const RankCdfSet& cdfs, const WeightTable& weights,
                    std::size_t n);

enum class Statistic { kKS, kCM };

std::string to_string(Statistic s);

struct StatisticOptions {
  double gamma = 0.0;
  WeightScheme weights = WeightScheme::kConstant;
};

struct StatisticValues {
  double ks = 0.0;
  double cm = 0.0;

  double operator[](Statistic s) const noexcept { return s == Statistic::kKS ? ks : cm; }
};

// Intermediate products of one pass through the estimator, kept for
// inspection and plotting.
struct Evaluation {
  StratifiedFit duration_fit;
  RankedSample ranks;
  RankCdfSet cdfs;
  EvalGrid grid;
  DSurface surface;
  StatisticValues statistics;
};

// The (x, z) strata without any event; the ranks are undefined there.
std::vector<Cell> strata_without_events(const StratifiedFit& duration_fit);

// Duration fit, ranks, rank CDFs, D surface and both statistics. Throws
// DegenerateData when a (x, z) stratum has no events.
Evaluation evaluate(const Dataset& data, const StatisticOptions& options);

// evaluate() without the intermediates; the bootstrap hot path.
StatisticValues compute_statistics(const Dataset& data, const StatisticOptions& options);

}  // namespace exotest
