#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exotest/bootstrap.hpp"
#include "exotest/dataset.hpp"
#include "exotest/random.hpp"
#include "exotest/teststats.hpp"

namespace exotest {

// Standard normal quantile (Wichura's AS 241, PPND16). Throws
// std::invalid_argument unless 0 < u < 1.
double inverse_normal_cdf(double u);

// 1 / (1 + exp(-x)) without overflow for large |x|.
double expit(double x) noexcept;

// Simulation design. Per row, with U_T, U_C ~ U(0,1):
//   X ~ Bernoulli(0.45)
//   W ~ Bernoulli(expit(0.9 - 0.3 X))
//   Z ~ Bernoulli(expit(-2 + 0.2 X + eta W + alpha (U_T - 0.5)))
//   T = exp(4 - 0.5 X - Z + Phi^-1(U_T))
//   C = -log(1 - U_C) / exp(lambda + 0.9 X + 0.8 Z)
// alpha drives endogeneity (0 = exogenous), eta instrument strength and
// lambda the censoring rate.
struct DgpParams {
  double alpha = 0.0;
  double eta = 2.4;
  double lambda = -5.7;
  std::size_t n = 1000;
};

struct LatentDataset {
  Dataset data;
  std::vector<double> u_t;  // the duration's latent uniform, per row
};

// Row i consumes five uniforms from UniformStream(stream, i) in the order
// U_T, U_C, X, W, Z.
LatentDataset dgp_sample(const DgpParams& params, const StreamId& stream);

// CSV `y,delta,x,w,z[,u_t]`.
std::string to_csv(const LatentDataset& sample, bool include_latent);

// Tie-corrected Kendall tau-b in O(n log n) (Knight's merge-sort count).
// Returns NaN when either input is constant. Throws std::invalid_argument on
// empty or mismatched input.
double kendall_tau_b(std::span<const double> a, std::span<const double> b);

struct StudyConfig {
  std::vector<Statistic> statistics = {Statistic::kKS, Statistic::kCM};
  std::vector<BootstrapKind> kinds = {BootstrapKind::kA, BootstrapKind::kB};
  std::size_t mc = 1000;
  double nominal = 0.05;
  double gamma = 0.0;
  WeightScheme weights = WeightScheme::kConstant;
  std::uint64_t seed = 42;
  unsigned threads = 0;
};

struct StudyRow {
  DgpParams params;
  Statistic statistic = Statistic::kCM;
  BootstrapKind kind = BootstrapKind::kA;
  double reject_rate = 0.0;
  double mean_censoring = 0.0;
  double mean_tau_wz = 0.0;
  double mean_tau_zu = 0.0;
  std::size_t mc = 0;
  double critical_value = 0.0;
};

// Per-replication statistics behind one StudyRow: t_obs[m] on the m-th
// simulated dataset and the single bootstrap statistic t_star[m] drawn from it.
struct WarpSample {
  DgpParams params;
  Statistic statistic = Statistic::kCM;
  BootstrapKind kind = BootstrapKind::kA;
  std::vector<double> t_obs;
  std::vector<double> t_star;
};

struct StudyResult {
  std::vector<StudyRow> rows;         // grid order, then statistic, then kind
  std::vector<WarpSample> samples;    // parallel to rows
  std::size_t warnings = 0;           // redrawn datasets and replicates
};

// Warp-speed Monte Carlo: for every design point, M simulated datasets each
// contribute their statistic and one bootstrap statistic; the critical value
// is the ceil((1 - nominal) M)-th smallest pooled bootstrap statistic. Streams
// are keyed by the design point's values, so a point's result does not depend
// on its position in the grid.
StudyResult warp_speed_study(const std::vector<DgpParams>& grid, const StudyConfig& config);

// Order statistic used as the warp-speed critical value.
double warp_critical_value(std::vector<double> t_star, double nominal);

// p_m = M^-1 #{m' : t_star[m'] > t_obs[m]}: the bootstrap p-value of each
// replication against the pooled bootstrap distribution.
std::vector<double> warp_p_values(const WarpSample& sample);

// p_m = M^-1 #{m' : reference[m'] > t_obs[m]}: the p-value against a Monte
// Carlo null distribution of the statistic.
std::vector<double> monte_carlo_p_values(std::span<const double> reference,
                                         std::span<const double> t_obs);

// CSV: alpha,eta,lambda,n,statistic,boot_kind,reject_rate,mean_cens,tau_wz,tau_zu,crit_value
std::string to_csv(const StudyResult& result);

// CSV: alpha,eta,lambda,n,statistic,boot_kind,m,t_obs,t_star,p_boot
std::string replicates_to_csv(const StudyResult& result);

}  // namespace exotest
