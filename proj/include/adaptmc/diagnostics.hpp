#pragma once

#include "adaptmc/controller.hpp"

#include <array>

namespace adaptmc {

using TestFunction = std::function<double(const Vector&)>;

// Shipped test-function ids: "const", "x1", "x2", "x1sq", "x1x2", "tanh_x1".
TestFunction test_function(const std::string& id);

// Exact pi(f) for the shipped ids: moments come from exact_moments, and
// "tanh_x1" integrates against the (analytic) first-marginal mixture by
// dense trapezoid quadrature.
double exact_pi_f(const TargetModel& t, const std::string& id);

struct ErgodicReport {
  std::string function_id;
  std::vector<std::pair<long, double>> running;  // (k, S_k)
  double final_average = 0.0;
  double target_value = 0.0;
  double error = 0.0;
};

ErgodicReport ergodic_average(const RunTrace& trace, const std::string& function_id,
                              long burn_in, double pi_f);

// Consistent single-run estimator of the CLT asymptotic variance:
// batch-size times the sample variance of the B batch means.
double batch_means_variance(const std::vector<double>& values, int batch_count = 30);

struct CltReport {
  int replicates = 0;
  long chain_length = 0;
  std::vector<double> z;
  double sigma_hat = 0.0;
  std::string sigma_method;
  double ks_stat = 0.0;
  double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov statistic against the standard normal.
double ks_statistic_normal(std::vector<double> z);
// Asymptotic Kolmogorov p-value with the finite-sample size correction.
double ks_pvalue(double d, int n);

// Runs R seeded replicates of run_chain (seed -> (S_n(f), per-run batch
// means sigma)) and standardizes sqrt(n) (S_n - pi_f). sigma_method
// "replication" divides by the across-replicate sample standard deviation of
// sqrt(n) (S_n - pi_f); "batch_means" divides by each run's own batch-means
// sigma. Requires R >= 100. Replicates run concurrently; the report is
// assembled in replicate order.
CltReport clt_test(
    const std::function<std::pair<double, double>(std::uint64_t)>& run_chain,
    double pi_f, int replicates, long chain_length,
    const std::vector<std::uint64_t>& seeds,
    const std::string& sigma_method = "replication");

struct DriftProbeRow {
  Vector x;
  double ratio = 0.0;      // Monte Carlo estimate of P V(x) / V(x)
  double std_error = 0.0;
};

// Monte Carlo drift-ratio probe: averages V(X') / V(x) over draws_per_point
// independent kernel steps from each probe point. log_v returns log V.
std::vector<DriftProbeRow> drift_probe(
    const std::function<StepOutcome(const Vector&, RngStream&)>& step,
    const std::function<double(const Vector&)>& log_v,
    const std::vector<Vector>& points, int draws_per_point, std::uint64_t seed);

// log V for V = (pi / sup pi)^{-eta}.
std::function<double(const Vector&)> srwm_drift_log_v(const TargetModel& t, double eta);

struct MinorizationReport {
  double eps_hat = 0.0;
  Vector min_location;
};

// Minimum of q(x)/pi(x) over exact target samples plus a coarse grid spanning
// +/- 8 marginal standard deviations around the target mean.
MinorizationReport minorization_probe(const std::function<double(const Vector&)>& log_q,
                                      const TargetModel& t, int sample_count,
                                      std::uint64_t seed);

// Infimum of zeta/pi on a dense 1D grid (the analytic lower-bound ingredient
// e in eps = e * iota for shipped 1D setups).
double safeguard_ratio_infimum_1d(const FactoredGaussian& zeta, const TargetModel& t,
                                  double lo, double hi, int grid_points = 200001);

struct LipschitzProbeReport {
  double max_observed_ratio = 0.0;   // max over x of |P f - P' f| / |G - G'|_F
  double max_ratio_std_error = 0.0;  // Monte Carlo SE at the maximizing point
  double bound = 0.0;                // 2 n_x / lambda_min(K) * sup|f|
};

// Spot-check of kernel Lipschitz continuity in the increment covariance for
// SRWM, using common random numbers across the two covariances.
LipschitzProbeReport kernel_lipschitz_probe(
    const TargetModel& t, const std::vector<std::pair<Matrix, Matrix>>& gamma_pairs,
    const TestFunction& f, double f_sup, const std::vector<Vector>& points,
    double lambda_min_k, int draws, std::uint64_t seed);

struct TwoStateReport {
  std::array<double, 2> invariant_adaptive;   // invariant of the state-dependent chain
  std::array<double, 2> invariant_fixed;      // invariant of P_theta for fixed theta
};

// The two-state chain where the flip probability depends on the current
// state: theta(1) from state 1, theta(2) from state 2. Fixed-theta kernels
// all leave (1/2, 1/2) invariant; the state-dependent chain does not.
// Invariants solved from the stationarity equations.
TwoStateReport two_state_oracle(double theta1, double theta2);

std::array<double, 2> two_state_simulate(double theta1, double theta2, long steps,
                                         std::uint64_t seed);

}  // namespace adaptmc
