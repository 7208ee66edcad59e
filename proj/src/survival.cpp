#include "exotest/survival.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

namespace exotest {

SurvivalCurve km_fit(std::span<const double> times, std::span<const int> deltas, int event_code) {
  if (times.empty()) throw std::invalid_argument("km_fit: empty input");
  if (times.size() != deltas.size()) throw std::invalid_argument("km_fit: length mismatch");

  const std::size_t n = times.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  SurvivalCurve curve;
  curve.n_total = n;
  const double total = static_cast<double>(n);

  // S(t_k) = corr * (r_k - d_k) / n, where corr accumulates
  // (r_j - d_j) / (r_j - d_j - c_j) over earlier times with c_j censorings.
  // Without censoring corr stays exactly 1 and F reproduces the ECDF bit for bit.
  double corr = 1.0;
  std::size_t at_risk = n;
  std::size_t i = 0;
  while (i < n) {
    const double t = times[order[i]];
    std::size_t d = 0;
    std::size_t c = 0;
    for (; i < n && times[order[i]] == t; ++i) (deltas[order[i]] == event_code ? d : c) += 1;

    if (d > 0) {
      const double survivors = corr * static_cast<double>(at_risk - d);
      curve.jump_times.push_back(t);
      curve.cdf_values.push_back(std::clamp((total - survivors) / total, 0.0, 1.0));
      curve.at_risk.push_back(at_risk);
      curve.events.push_back(d);
    }
    const std::size_t remaining = at_risk - d - c;
    if (c > 0 && remaining > 0)
      corr *= static_cast<double>(at_risk - d) / static_cast<double>(remaining);
    at_risk = remaining;
  }
  return curve;
}

double km_eval(const SurvivalCurve& curve, double t) noexcept {
  const auto it = std::upper_bound(curve.jump_times.begin(), curve.jump_times.end(), t);
  if (it == curve.jump_times.begin()) return 0.0;
  return curve.cdf_values[static_cast<std::size_t>(it - curve.jump_times.begin()) - 1];
}

double km_quantile(const SurvivalCurve& curve, double u) noexcept {
  const auto it = std::lower_bound(curve.cdf_values.begin(), curve.cdf_values.end(), u);
  if (it == curve.cdf_values.end()) return kInfiniteTime;
  return curve.jump_times[static_cast<std::size_t>(it - curve.cdf_values.begin())];
}

std::string to_csv(const SurvivalCurve& curve) {
  std::string out = "t,cdf,at_risk,events\n";
  for (std::size_t k = 0; k < curve.jump_times.size(); ++k) {
    out += format_double(curve.jump_times[k]) + ',' + format_double(curve.cdf_values[k]) + ',' +
           std::to_string(curve.at_risk[k]) + ',' + std::to_string(curve.events[k]) + '\n';
  }
  return out;
}

const SurvivalCurve& StratifiedFit::at(const Cell& cell) const {
  const auto it = curves.find(cell);
  if (it == curves.end()) throw std::out_of_range("no survival curve for cell " + to_string(cell));
  return it->second;
}

StratifiedFit conditional_km(const Dataset& data, Scheme scheme, int event_code) {
  std::map<Cell, std::pair<std::vector<double>, std::vector<int>>> groups;
  for (const auto& o : data.observations()) {
    auto& [t, d] = groups[cell_of(o, scheme)];
    t.push_back(o.y);
    d.push_back(o.delta);
  }
  StratifiedFit fit;
  fit.scheme = scheme;
  for (const auto& [cell, g] : groups) fit.curves.emplace(cell, km_fit(g.first, g.second, event_code));
  return fit;
}

std::string to_csv(const StratifiedFit& fit) {
  auto code = [](Level v) { return v == kAnyLevel ? std::string("*") : std::to_string(v); };
  std::string out = "x,w,z,t,cdf,at_risk,events\n";
  for (const auto& [cell, curve] : fit.curves) {
    const std::string prefix = code(cell.x) + ',' + code(cell.w) + ',' + code(cell.z) + ',';
    for (std::size_t k = 0; k < curve.jump_times.size(); ++k) {
      out += prefix + format_double(curve.jump_times[k]) + ',' +
             format_double(curve.cdf_values[k]) + ',' + std::to_string(curve.at_risk[k]) + ',' +
             std::to_string(curve.events[k]) + '\n';
    }
  }
  return out;
}

double chi_square_upper_tail(double statistic, int df) {
  if (df <= 0) throw std::invalid_argument("chi-square: df must be positive");
  if (!(statistic > 0.0)) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

LogRankResult logrank(std::span<const double> times, std::span<const int> deltas,
                      std::span<const Level> groups) {
  if (times.empty()) throw std::invalid_argument("logrank: empty input");
  if (times.size() != deltas.size() || times.size() != groups.size())
    throw std::invalid_argument("logrank: length mismatch");

  std::vector<Level> labels(groups.begin(), groups.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const auto k = static_cast<Eigen::Index>(labels.size());
  if (k < 2) throw std::invalid_argument("logrank: need at least two groups");

  const std::size_t n = times.size();
  std::vector<Eigen::Index> group_of(n);
  for (std::size_t i = 0; i < n; ++i)
    group_of[i] = std::lower_bound(labels.begin(), labels.end(), groups[i]) - labels.begin();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  Eigen::VectorXd at_risk = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < n; ++i) at_risk[group_of[i]] += 1.0;

  Eigen::VectorXd observed_minus_expected = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd covariance = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd events(k), leaving(k);

  std::size_t i = 0;
  while (i < n) {
    const double t = times[order[i]];
    events.setZero();
    leaving.setZero();
    for (; i < n && times[order[i]] == t; ++i) {
      const auto g = group_of[order[i]];
      leaving[g] += 1.0;
      if (deltas[order[i]] == 1) events[g] += 1.0;
    }
    const double d = events.sum();
    const double r = at_risk.sum();
    if (d > 0.0) {
      const Eigen::VectorXd share = at_risk / r;
      observed_minus_expected += events - d * share;
      if (r > 1.0) {
        const double scale = d * (r - d) / (r - 1.0);
        covariance += scale * (Eigen::MatrixXd(share.asDiagonal()) - share * share.transpose());
      }
    }
    at_risk -= leaving;
  }

  // The full covariance is singular (rows sum to zero); drop the last group.
  const Eigen::VectorXd u = observed_minus_expected.head(k - 1);
  const Eigen::MatrixXd v = covariance.topLeftCorner(k - 1, k - 1);
  LogRankResult result;
  result.df = static_cast<int>(k - 1);
  const Eigen::VectorXd solved = v.completeOrthogonalDecomposition().solve(u);
  result.chi_square = std::max(0.0, u.dot(solved));
  result.p_value = chi_square_upper_tail(result.chi_square, result.df);
  return result;
}

}  // namespace exotest
