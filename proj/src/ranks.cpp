#include "exotest/ranks.hpp"

#include <algorithm>
#include <stdexcept>

namespace exotest {

RankedSample estimate_ranks(const Dataset& data, const StratifiedFit& fit_txz) {
  RankedSample ranks;
  ranks.reserve(data.size());
  const SurvivalCurve* curve = nullptr;
  Cell current{kAnyLevel - 1, kAnyLevel - 1, kAnyLevel - 1};
  for (const auto& o : data.observations()) {
    const Cell cell = cell_of(o, Scheme::kXZ);
    if (curve == nullptr || cell != current) {
      const auto it = fit_txz.curves.find(cell);
      if (it == fit_txz.curves.end())
        throw std::invalid_argument("estimate_ranks: no duration fit for cell " + to_string(cell));
      curve = &it->second;
      current = cell;
    }
    ranks.push_back({km_eval(*curve, o.y), o.delta, o.x, o.w, o.z});
  }

  // Equal product-limit values reached through different cells can differ in
  // the last bits; pool them so that ties are ties in the rank curves.
  std::vector<double> distinct;
  distinct.reserve(ranks.size());
  for (const auto& r : ranks) distinct.push_back(r.v_hat);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> representative(distinct.size());
  for (std::size_t end = distinct.size(); end > 0;) {
    std::size_t begin = end - 1;
    while (begin > 0 && distinct[begin] - distinct[begin - 1] <= kRankTieTolerance) --begin;
    std::fill(representative.begin() + static_cast<std::ptrdiff_t>(begin),
              representative.begin() + static_cast<std::ptrdiff_t>(end), distinct[end - 1]);
    end = begin;
  }
  for (auto& r : ranks) {
    const auto k = std::lower_bound(distinct.begin(), distinct.end(), r.v_hat) - distinct.begin();
    r.v_hat = representative[static_cast<std::size_t>(k)];
  }
  return ranks;
}

std::string to_csv(const RankedSample& ranks) {
  std::string out = "v_hat,delta,x,w,z\n";
  for (const auto& r : ranks) {
    out += format_double(r.v_hat) + ',' + std::to_string(r.delta) + ',' + std::to_string(r.x) +
           ',' + std::to_string(r.w) + ',' + std::to_string(r.z) + '\n';
  }
  return out;
}

SurvivalCurve rank_marginal_cdf(const RankedSample& ranks) {
  std::vector<double> v(ranks.size());
  std::vector<int> d(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    v[i] = ranks[i].v_hat;
    d[i] = ranks[i].delta;
  }
  return km_fit(v, d, 1);
}

namespace {

template <typename Rows>
CondProbTable conditional_probabilities(const Rows& rows) {
  std::map<Cell, std::map<Level, std::size_t>> counts;
  for (const auto& r : rows) ++counts[Cell{r.x, r.w, kAnyLevel}][r.z];
  CondProbTable table;
  for (const auto& [cell, by_z] : counts) {
    std::size_t total = 0;
    for (const auto& [z, c] : by_z) total += c;
    auto& probs = table[cell];
    for (const auto& [z, c] : by_z) probs[z] = static_cast<double>(c) / static_cast<double>(total);
  }
  return table;
}

}  // namespace

CondProbTable p_z_given_xw(const Dataset& data) {
  return conditional_probabilities(data.observations());
}

CondProbTable p_z_given_xw(const RankedSample& ranks) { return conditional_probabilities(ranks); }

double StepFunction::operator()(double v) const noexcept {
  const auto it = std::upper_bound(points.begin(), points.end(), v);
  if (it == points.begin()) return 0.0;
  return values[static_cast<std::size_t>(it - points.begin()) - 1];
}

RankCdfSet rank_conditional_cdf(const RankedSample& ranks, const CondProbTable& probs) {
  std::map<Cell, std::pair<std::vector<double>, std::vector<int>>> groups;
  for (const auto& r : ranks) {
    auto& [v, d] = groups[Cell{r.x, r.w, r.z}];
    v.push_back(r.v_hat);
    d.push_back(r.delta);
  }

  RankCdfSet set;
  for (const auto& [cell, g] : groups) {
    SurvivalCurve curve = km_fit(g.first, g.second, 1);
    if (curve.empty()) set.all_censored_cells.push_back(cell);
    set.components.emplace(cell, std::move(curve));
  }

  for (const auto& [xw, by_z] : probs) {
    std::vector<std::pair<const SurvivalCurve*, double>> mixture;
    std::vector<double> points;
    for (const auto& [z, p] : by_z) {
      if (p <= 0.0) continue;
      const auto it = set.components.find(Cell{xw.x, xw.w, z});
      if (it == set.components.end())
        throw std::invalid_argument("rank_conditional_cdf: no rows in cell " +
                                    to_string(Cell{xw.x, xw.w, z}));
      mixture.emplace_back(&it->second, p);
      points.insert(points.end(), it->second.jump_times.begin(), it->second.jump_times.end());
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    StepFunction f;
    f.values.reserve(points.size());
    for (const double v : points) {
      double value = 0.0;
      for (const auto& [curve, p] : mixture) value += p * km_eval(*curve, v);
      f.values.push_back(value);
    }
    f.points = std::move(points);
    set.conditional.emplace(xw, std::move(f));
  }
  return set;
}

RankCdfSet rank_cdfs(const RankedSample& ranks) {
  RankCdfSet set = rank_conditional_cdf(ranks, p_z_given_xw(ranks));
  set.marginal = rank_marginal_cdf(ranks);
  return set;
}

}  // namespace exotest
