#include "exotest/teststats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exotest/error.hpp"

namespace exotest {

EvalGrid make_grid(const RankedSample& ranks, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  EvalGrid grid;
  grid.gamma = gamma;
  const double upper = grid.upper();
  grid.points.reserve(ranks.size() + 1);
  grid.points.push_back(0.0);
  for (const auto& r : ranks)
    if (r.v_hat <= upper) grid.points.push_back(r.v_hat);
  std::sort(grid.points.begin(), grid.points.end());
  grid.points.erase(std::unique(grid.points.begin(), grid.points.end()), grid.points.end());
  return grid;
}

std::size_t DSurface::grid_index(double v) const noexcept {
  const auto it = std::lower_bound(grid.begin(), grid.end(), v);
  if (it == grid.end() || *it != v) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - grid.begin());
}

DSurface d_surface(const RankCdfSet& cdfs, const EvalGrid& grid) {
  DSurface d;
  d.grid = grid.points;
  d.gamma = grid.gamma;

  std::vector<double> marginal(grid.points.size());
  for (std::size_t k = 0; k < grid.points.size(); ++k)
    marginal[k] = km_eval(cdfs.marginal, grid.points[k]);

  for (const auto& [cell, f] : cdfs.conditional) {
    std::vector<double> row(grid.points.size());
    for (std::size_t k = 0; k < grid.points.size(); ++k) row[k] = f(grid.points[k]) - marginal[k];
    d.cells.push_back(cell);
    d.values.push_back(std::move(row));
  }
  return d;
}

std::string to_csv(const DSurface& surface) {
  std::string out = "v,x,w,d_hat\n";
  for (std::size_t c = 0; c < surface.cells.size(); ++c) {
    const std::string cell =
        std::to_string(surface.cells[c].x) + ',' + std::to_string(surface.cells[c].w) + ',';
    for (std::size_t k = 0; k < surface.grid.size(); ++k)
      out += format_double(surface.grid[k]) + ',' + cell + format_double(surface.values[c][k]) + '\n';
  }
  return out;
}

WeightTable make_weights(const RankedSample& ranks, WeightScheme scheme, double constant) {
  WeightTable table;
  table.scheme = scheme;
  std::map<Cell, std::size_t> counts;
  for (const auto& r : ranks) ++counts[Cell{r.x, r.w, kAnyLevel}];
  for (const auto& [cell, count] : counts) {
    table.weights[cell] = scheme == WeightScheme::kConstant
                              ? constant
                              : static_cast<double>(count) / static_cast<double>(ranks.size());
  }
  return table;
}

double ks_statistic(const DSurface& d, std::size_t n) {
  double sup = 0.0;
  for (const auto& row : d.values)
    for (const double v : row) sup = std::max(sup, std::abs(v));
  return std::sqrt(static_cast<double>(n)) * sup;
}

double cm_statistic(const DSurface& d, const RankCdfSet& cdfs, const WeightTable& weights,
                    std::size_t n) {
  const double upper = 1.0 - d.gamma;
  double total = 0.0;
  for (std::size_t c = 0; c < d.cells.size(); ++c) {
    const Cell& cell = d.cells[c];
    const auto w = weights.weights.find(cell);
    if (w == weights.weights.end())
      throw std::invalid_argument("cm_statistic: no weight for cell " + to_string(cell));
    if (w->second < 0.0) throw std::invalid_argument("cm_statistic: negative weight");
    const auto f = cdfs.conditional.find(cell);
    if (f == cdfs.conditional.end())
      throw std::invalid_argument("cm_statistic: no conditional CDF for cell " + to_string(cell));

    double integral = 0.0;
    const StepFunction& cdf = f->second;
    for (std::size_t j = 0; j < cdf.points.size() && cdf.points[j] <= upper; ++j) {
      const std::size_t k = d.grid_index(cdf.points[j]);
      if (k == static_cast<std::size_t>(-1))
        throw std::invalid_argument("cm_statistic: jump point missing from the grid");
      const double dv = d.values[c][k];
      integral += dv * dv * cdf.jump(j);
    }
    total += w->second * integral;
  }
  return static_cast<double>(n) * total;
}

std::string to_string(Statistic s) { return s == Statistic::kKS ? "ks" : "cm"; }

std::vector<Cell> strata_without_events(const StratifiedFit& duration_fit) {
  std::vector<Cell> out;
  for (const auto& [cell, curve] : duration_fit.curves)
    if (curve.empty()) out.push_back(cell);
  return out;
}

Evaluation evaluate(const Dataset& data, const StatisticOptions& options) {
  Evaluation e;
  e.duration_fit = conditional_km(data, Scheme::kXZ, 1);
  if (const auto bad = strata_without_events(e.duration_fit); !bad.empty())
    throw DegenerateData("stratum " + to_string(bad.front()) + " has no events");
  e.ranks = estimate_ranks(data, e.duration_fit);
  e.cdfs = rank_cdfs(e.ranks);
  e.grid = make_grid(e.ranks, options.gamma);
  e.surface = d_surface(e.cdfs, e.grid);
  const WeightTable weights = make_weights(e.ranks, options.weights);
  e.statistics.ks = ks_statistic(e.surface, data.size());
  e.statistics.cm = cm_statistic(e.surface, e.cdfs, weights, data.size());
  return e;
}

StatisticValues compute_statistics(const Dataset& data, const StatisticOptions& options) {
  return evaluate(data, options).statistics;
}

}  // namespace exotest
