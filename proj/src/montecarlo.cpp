#include "exotest/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "exotest/error.hpp"
#include "exotest/parallel.hpp"

namespace exotest {
namespace {

template <std::size_t N>
double polynomial(const double (&coef)[N], double r) {
  double acc = coef[N - 1];
  for (std::size_t k = N - 1; k-- > 0;) acc = acc * r + coef[k];
  return acc;
}

constexpr double kCentralNum[] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                                  1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                  4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                  3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kCentralDen[] = {1.0,
                                  4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                  5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                  3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                  5.2264952788528545610e+3};
constexpr double kNearNum[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                               5.76949722146069140550e0, 3.64784832476320460504e0,
                               1.27045825245236838258e0, 2.41780725177450611770e-1,
                               2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kNearDen[] = {1.0,
                               2.05319162663775882187e0, 1.67638483018380384940e0,
                               6.89767334985100004550e-1, 1.48103976427480074590e-1,
                               1.51986665636164571966e-2, 5.47593808499534494600e-4,
                               1.05075007164441684324e-9};
constexpr double kFarNum[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                              1.78482653991729133580e0, 2.96560571828504891230e-1,
                              2.65321895265761230930e-2, 1.24266094738807843860e-3,
                              2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kFarDen[] = {1.0,
                              5.99832206555887937690e-1, 1.36929880922735805310e-1,
                              1.48753612908506148525e-2, 7.86869131145613259100e-4,
                              1.84631831751005468180e-5, 1.42151175831644588870e-7,
                              2.04426310338993978564e-15};

std::uint64_t design_key(const DgpParams& p) {
  // +0.0 folds -0.0 into 0.0 so equal designs hash equally.
  std::uint64_t h = hash_combine(0x6578'6f74'6573'74ull, std::bit_cast<std::uint64_t>(p.alpha + 0.0));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(p.eta + 0.0));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(p.lambda + 0.0));
  return hash_combine(h, p.n);
}

double mean_of_finite(const std::vector<double>& v) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const double x : v) {
    if (std::isfinite(x)) {
      sum += x;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

// Number of adjacent-run tie pairs sum t(t-1)/2 in a sorted sequence.
template <typename Eq>
std::int64_t tie_pairs(std::size_t n, Eq equal) {
  std::int64_t pairs = 0;
  std::int64_t run = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (equal(i - 1, i)) {
      ++run;
    } else {
      pairs += run * (run - 1) / 2;
      run = 1;
    }
  }
  return pairs + run * (run - 1) / 2;
}

// Stable merge sort of `v`; returns the number of inversions (strict).
std::int64_t sort_count_inversions(std::vector<double>& v, std::vector<double>& buffer) {
  const std::size_t n = v.size();
  std::int64_t swaps = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += static_cast<std::int64_t>(mid - i);
          buffer[k++] = v[j++];
        } else {
          buffer[k++] = v[i++];
        }
      }
      while (i < mid) buffer[k++] = v[i++];
      while (j < hi) buffer[k++] = v[j++];
    }
    std::swap(v, buffer);
  }
  return swaps;
}

}  // namespace

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("inverse_normal_cdf: u must lie in (0, 1)");
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * polynomial(kCentralNum, r) / polynomial(kCentralDen, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? u : 1.0 - u));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = polynomial(kNearNum, r) / polynomial(kNearDen, r);
  } else {
    r -= 5.0;
    value = polynomial(kFarNum, r) / polynomial(kFarDen, r);
  }
  return q < 0.0 ? -value : value;
}

double expit(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LatentDataset dgp_sample(const DgpParams& params, const StreamId& stream) {
  if (params.n == 0) throw std::invalid_argument("dgp_sample: n must be positive");
  std::vector<Observation> rows;
  std::vector<double> latent;
  rows.reserve(params.n);
  latent.reserve(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    UniformStream draws(stream, static_cast<std::uint32_t>(i));
    const double u_t = draws.next_open();
    const double u_c = draws.next_open();
    const int x = draws.next() < 0.45 ? 1 : 0;
    const int w = draws.next() < expit(0.9 - 0.3 * x) ? 1 : 0;
    const int z =
        draws.next() < expit(-2.0 + 0.2 * x + params.eta * w + params.alpha * (u_t - 0.5)) ? 1 : 0;

    const double t = std::exp(4.0 - 0.5 * x - z + inverse_normal_cdf(u_t));
    const double c = -std::log1p(-u_c) / std::exp(params.lambda + 0.9 * x + 0.8 * z);
    const bool event = t <= c;
    rows.push_back({event ? t : c, event ? 1 : 0, x, w, z});
    latent.push_back(u_t);
  }
  return {Dataset(std::move(rows)), std::move(latent)};
}

std::string to_csv(const LatentDataset& sample, bool include_latent) {
  if (!include_latent) return to_csv(sample.data);
  std::string out = "y,delta,x,w,z,u_t\n";
  for (std::size_t i = 0; i < sample.data.size(); ++i) {
    const Observation& o = sample.data[i];
    out += format_double(o.y) + ',' + std::to_string(o.delta) + ',' + std::to_string(o.x) + ',' +
           std::to_string(o.w) + ',' + std::to_string(o.z) + ',' + format_double(sample.u_t[i]) +
           '\n';
  }
  return out;
}

double kendall_tau_b(std::span<const double> a, std::span<const double> b) {
  if (a.empty()) throw std::invalid_argument("kendall_tau_b: empty input");
  if (a.size() != b.size()) throw std::invalid_argument("kendall_tau_b: length mismatch");
  const std::size_t n = a.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i] < a[j] || (a[i] == a[j] && b[i] < b[j]);
  });

  const std::int64_t ties_a =
      tie_pairs(n, [&](std::size_t i, std::size_t j) { return a[order[i]] == a[order[j]]; });
  const std::int64_t ties_joint = tie_pairs(n, [&](std::size_t i, std::size_t j) {
    return a[order[i]] == a[order[j]] && b[order[i]] == b[order[j]];
  });

  std::vector<double> sorted_b(n), buffer(n);
  for (std::size_t i = 0; i < n; ++i) sorted_b[i] = b[order[i]];
  const std::int64_t discordant = sort_count_inversions(sorted_b, buffer);
  const std::int64_t ties_b =
      tie_pairs(n, [&](std::size_t i, std::size_t j) { return sorted_b[i] == sorted_b[j]; });

  const auto nn = static_cast<std::int64_t>(n);
  const std::int64_t pairs = nn * (nn - 1) / 2;
  const std::int64_t concordant_minus_discordant =
      pairs - ties_a - ties_b + ties_joint - 2 * discordant;
  const double denom =
      std::sqrt(static_cast<double>(pairs - ties_a)) * std::sqrt(static_cast<double>(pairs - ties_b));
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(concordant_minus_discordant) / denom;
}

double warp_critical_value(std::vector<double> t_star, double nominal) {
  if (t_star.empty()) throw std::invalid_argument("warp_critical_value: no statistics");
  if (!(nominal > 0.0 && nominal < 1.0)) throw std::invalid_argument("nominal level must lie in (0, 1)");
  std::sort(t_star.begin(), t_star.end());
  const double position = (1.0 - nominal) * static_cast<double>(t_star.size());
  auto rank = static_cast<std::size_t>(std::ceil(position - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, t_star.size());
  return t_star[rank - 1];
}

std::vector<double> monte_carlo_p_values(std::span<const double> reference,
                                         std::span<const double> t_obs) {
  if (reference.empty()) throw std::invalid_argument("monte_carlo_p_values: empty reference");
  std::vector<double> sorted(reference.begin(), reference.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> p;
  p.reserve(t_obs.size());
  for (const double t : t_obs) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
    p.push_back(static_cast<double>(above) / static_cast<double>(sorted.size()));
  }
  return p;
}

std::vector<double> warp_p_values(const WarpSample& sample) {
  return monte_carlo_p_values(sample.t_star, sample.t_obs);
}

StudyResult warp_speed_study(const std::vector<DgpParams>& grid, const StudyConfig& config) {
  if (config.mc == 0) throw std::invalid_argument("warp_speed_study: need at least one replication");
  if (!(config.nominal > 0.0 && config.nominal < 1.0))
    throw std::invalid_argument("nominal level must lie in (0, 1)");
  if (config.statistics.empty() || config.kinds.empty())
    throw std::invalid_argument("warp_speed_study: no statistic or bootstrap kind selected");
  for (const auto& p : grid)
    if (p.n == 0) throw std::invalid_argument("warp_speed_study: n must be positive");

  const StatisticOptions options{config.gamma, config.weights};
  const std::size_t n_kinds = config.kinds.size();
  const std::size_t M = config.mc;

  struct Replication {
    StatisticValues observed;
    std::vector<StatisticValues> bootstrap;  // per kind
    double censoring = 0.0;
    double tau_wz = 0.0;
    double tau_zu = 0.0;
    std::size_t warnings = 0;
  };
  std::vector<Replication> reps(grid.size() * M);

  parallel_for(reps.size(), config.threads, [&](std::size_t job) {
    const DgpParams& params = grid[job / M];
    const std::uint64_t m = job % M;
    const std::uint64_t group = design_key(params);
    Replication& rep = reps[job];

    StreamId sim{config.seed, StreamDomain::kSimulation, group, 0, m};
    std::optional<LatentDataset> sample;
    std::optional<Evaluation> eval;
    for (; sim.attempt < kMaxDegenerateAttempts; ++sim.attempt) {
      sample.emplace(dgp_sample(params, sim));
      try {
        eval.emplace(evaluate(sample->data, options));
        break;
      } catch (const DegenerateData&) {
        ++rep.warnings;
      }
    }
    if (!eval) throw DegenerateData("simulated datasets keep degenerating; check the design");

    const Dataset& data = sample->data;
    rep.observed = eval->statistics;
    const StratifiedFit fit_c = censoring_fit(data);
    rep.bootstrap.resize(n_kinds);
    for (std::size_t k = 0; k < n_kinds; ++k) {
      const StreamId boot{config.seed, StreamDomain::kBootstrap, group, 0, m};
      const ReplicateOutcome r =
          bootstrap_replicate(data, eval->duration_fit, fit_c, config.kinds[k], options, boot);
      rep.bootstrap[k] = r.statistics;
      rep.warnings += r.warnings;
    }

    std::vector<double> w(data.size()), z(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      w[i] = data[i].w;
      z[i] = data[i].z;
    }
    rep.censoring = data.censoring_rate();
    rep.tau_wz = kendall_tau_b(w, z);
    rep.tau_zu = kendall_tau_b(z, sample->u_t);
  });

  StudyResult result;
  for (const auto& r : reps) result.warnings += r.warnings;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> cens(M), tau_wz(M), tau_zu(M);
    for (std::size_t m = 0; m < M; ++m) {
      const Replication& r = reps[g * M + m];
      cens[m] = r.censoring;
      tau_wz[m] = r.tau_wz;
      tau_zu[m] = r.tau_zu;
    }
    const double mean_cens = mean_of_finite(cens);
    const double mean_wz = mean_of_finite(tau_wz);
    const double mean_zu = mean_of_finite(tau_zu);

    for (const Statistic s : config.statistics) {
      for (std::size_t k = 0; k < n_kinds; ++k) {
        WarpSample sample{grid[g], s, config.kinds[k], std::vector<double>(M), std::vector<double>(M)};
        for (std::size_t m = 0; m < M; ++m) {
          sample.t_obs[m] = reps[g * M + m].observed[s];
          sample.t_star[m] = reps[g * M + m].bootstrap[k][s];
        }
        StudyRow row;
        row.params = grid[g];
        row.statistic = s;
        row.kind = config.kinds[k];
        row.mc = M;
        row.critical_value = warp_critical_value(sample.t_star, config.nominal);
        const auto rejections = std::count_if(sample.t_obs.begin(), sample.t_obs.end(),
                                              [&](double t) { return t > row.critical_value; });
        row.reject_rate = static_cast<double>(rejections) / static_cast<double>(M);
        row.mean_censoring = mean_cens;
        row.mean_tau_wz = mean_wz;
        row.mean_tau_zu = mean_zu;
        result.rows.push_back(row);
        result.samples.push_back(std::move(sample));
      }
    }
  }
  return result;
}

namespace {

std::string design_prefix(const DgpParams& p, Statistic s, BootstrapKind k) {
  return format_double(p.alpha) + ',' + format_double(p.eta) + ',' + format_double(p.lambda) + ',' +
         std::to_string(p.n) + ',' + to_string(s) + ',' + to_string(k) + ',';
}

}  // namespace

std::string to_csv(const StudyResult& result) {
  std::string out =
      "alpha,eta,lambda,n,statistic,boot_kind,reject_rate,mean_cens,tau_wz,tau_zu,crit_value\n";
  for (const auto& r : result.rows) {
    out += design_prefix(r.params, r.statistic, r.kind) + format_double(r.reject_rate) + ',' +
           format_double(r.mean_censoring) + ',' + format_double(r.mean_tau_wz) + ',' +
           format_double(r.mean_tau_zu) + ',' + format_double(r.critical_value) + '\n';
  }
  return out;
}

std::string replicates_to_csv(const StudyResult& result) {
  std::string out = "alpha,eta,lambda,n,statistic,boot_kind,m,t_obs,t_star,p_boot\n";
  for (const auto& s : result.samples) {
    const std::string prefix = design_prefix(s.params, s.statistic, s.kind);
    const std::vector<double> p = warp_p_values(s);
    for (std::size_t m = 0; m < s.t_obs.size(); ++m) {
      out += prefix + std::to_string(m) + ',' + format_double(s.t_obs[m]) + ',' +
             format_double(s.t_star[m]) + ',' + format_double(p[m]) + '\n';
    }
  }
  return out;
}

}  // namespace exotest
