#pragma once

#include <map>
#include <string>
#include <vector>

#include "exotest/dataset.hpp"
#include "exotest/survival.hpp"

namespace exotest {

// Estimated conditional rank v_hat = F_{T|X,Z}(y | x, z) of one observation.
// v_hat is censored by the same indicator as y.
struct RankedObservation {
  double v_hat = 0.0;
  int delta = 0;
  Level x = 0;
  Level w = 0;
  Level z = 0;
};

// Same length and order as the source Dataset.
using RankedSample = std::vector<RankedObservation>;

// Ranks closer than this are treated as one tied value (the largest of them).
inline constexpr double kRankTieTolerance = 1e-12;

// Throws std::invalid_argument if `fit_txz` lacks a (x,z) cell present in data.
RankedSample estimate_ranks(const Dataset& data, const StratifiedFit& fit_txz);

// CSV with columns v_hat,delta,x,w,z.
std::string to_csv(const RankedSample& ranks);

// Product-limit CDF of v_hat pooled over all rows.
SurvivalCurve rank_marginal_cdf(const RankedSample& ranks);

// p(z | x, w) keyed by the (x, w, *) cell.
using CondProbTable = std::map<Cell, std::map<Level, double>>;

CondProbTable p_z_given_xw(const Dataset& data);
CondProbTable p_z_given_xw(const RankedSample& ranks);

// Right-continuous step function, zero before the first point.
struct StepFunction {
  std::vector<double> points;  // strictly increasing
  std::vector<double> values;  // nondecreasing

  double operator()(double v) const noexcept;
  // Size of the jump at points[k].
  double jump(std::size_t k) const noexcept { return values[k] - (k == 0 ? 0.0 : values[k - 1]); }
};

struct RankCdfSet {
  SurvivalCurve marginal;
  // Mixture over z of the (x,w,z) rank curves, keyed by (x, w, *), stored on
  // the union of the component jump points.
  std::map<Cell, StepFunction> conditional;
  // The (x,w,z) product-limit curves the mixtures are built from.
  std::map<Cell, SurvivalCurve> components;
  // Nonempty (x,w,z) cells whose rows are all censored; they enter the
  // mixture as the zero function.
  std::vector<Cell> all_censored_cells;
};

// Fills `conditional`, `components` and `all_censored_cells`; leaves `marginal`
// untouched. Throws std::invalid_argument when a cell with positive probability
// has no rows.
RankCdfSet rank_conditional_cdf(const RankedSample& ranks, const CondProbTable& probs);

// Marginal plus conditional curves in one call.
RankCdfSet rank_cdfs(const RankedSample& ranks);

}  // namespace exotest
