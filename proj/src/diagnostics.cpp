#include "adaptmc/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <numeric>
#include <thread>

namespace adaptmc {

TestFunction test_function(const std::string& id) {
  if (id == "const") return [](const Vector&) { return 1.0; };
  if (id == "x1") return [](const Vector& x) { return x[0]; };
  if (id == "x2") return [](const Vector& x) { return x[1]; };
  if (id == "x1sq") return [](const Vector& x) { return x[0] * x[0]; };
  if (id == "x1x2") return [](const Vector& x) { return x[0] * x[1]; };
  if (id == "tanh_x1") return [](const Vector& x) { return std::tanh(x[0]); };
  throw std::invalid_argument("test_function: unknown id " + id);
}

double exact_pi_f(const TargetModel& t, const std::string& id) {
  const Vector mu = t.mean_pi();
  const Matrix cov = t.cov_pi();
  if (id == "const") return 1.0;
  if (id == "x1") return mu[0];
  if (id == "x2") return mu[1];
  if (id == "x1sq") return cov(0, 0) + mu[0] * mu[0];
  if (id == "x1x2") return cov(0, 1) + mu[0] * mu[1];
  if (id == "tanh_x1") {
    // First marginal of a Gaussian mixture is a 1D Gaussian mixture.
    double lo = mu[0], hi = mu[0];
    for (std::size_t j = 0; j < t.component_count(); ++j) {
      const double mj = t.components()[j].mean[0];
      const Matrix cj = t.components()[j].lower * t.components()[j].lower.transpose();
      const double sj = std::sqrt(cj(0, 0));
      lo = std::min(lo, mj - 12.0 * sj);
      hi = std::max(hi, mj + 12.0 * sj);
    }
    const int n = 200001;
    const double h = (hi - lo) / (n - 1);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = lo + i * h;
      double density = 0.0;
      for (std::size_t j = 0; j < t.component_count(); ++j) {
        const double mj = t.components()[j].mean[0];
        const Matrix cj = t.components()[j].lower * t.components()[j].lower.transpose();
        const double vj = cj(0, 0);
        density += t.weights()[j] *
                   std::exp(-0.5 * (x - mj) * (x - mj) / vj) / std::sqrt(2.0 * M_PI * vj);
      }
      const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      acc += w * std::tanh(x) * density;
    }
    return acc * h;
  }
  throw std::invalid_argument("exact_pi_f: unknown id " + id);
}

ErgodicReport ergodic_average(const RunTrace& trace, const std::string& function_id,
                              long burn_in, double pi_f) {
  const TestFunction f = test_function(function_id);
  ErgodicReport rep;
  rep.function_id = function_id;
  rep.target_value = pi_f;
  double sum = 0.0;
  long count = 0;
  long total = 0;
  for (const auto& r : trace.records) {
    if (r.k > burn_in) ++total;
  }
  if (total == 0) throw InsufficientLength("ergodic_average: empty trace after burn-in");
  const long cadence = std::max<long>(1, total / 20);
  for (const auto& r : trace.records) {
    if (r.k <= burn_in) continue;
    sum += f(r.x);
    ++count;
    if (count % cadence == 0 || count == total) {
      rep.running.emplace_back(r.k, sum / count);
    }
  }
  rep.final_average = sum / count;
  rep.error = rep.final_average - pi_f;
  return rep;
}

double batch_means_variance(const std::vector<double>& values, int batch_count) {
  const long n = static_cast<long>(values.size());
  const long b = batch_count;
  if (n < 2 * b) throw InsufficientLength("batch_means_variance: need at least 2B values");
  const long m = n / b;  // batch size; trailing remainder dropped
  std::vector<double> means(b, 0.0);
  for (long i = 0; i < b; ++i) {
    double s = 0.0;
    for (long j = 0; j < m; ++j) s += values[static_cast<std::size_t>(i * m + j)];
    means[static_cast<std::size_t>(i)] = s / static_cast<double>(m);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / b;
  double var = 0.0;
  for (double v : means) var += (v - grand) * (v - grand);
  var /= static_cast<double>(b - 1);
  return static_cast<double>(m) * var;
}

double ks_statistic_normal(std::vector<double> z) {
  std::sort(z.begin(), z.end());
  const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = phi(z[i]);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
  }
  return d;
}

double ks_pvalue(double d, int n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  // The alternating series needs lambda bounded away from zero; below 0.3
  // the p-value is 1 to better than 1e-4.
  if (lambda < 0.3) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

CltReport clt_test(
    const std::function<std::pair<double, double>(std::uint64_t)>& run_chain,
    double pi_f, int replicates, long chain_length,
    const std::vector<std::uint64_t>& seeds, const std::string& sigma_method) {
  if (replicates < 100) {
    throw std::invalid_argument("clt_test: at least 100 replicates required");
  }
  if (static_cast<int>(seeds.size()) < replicates) {
    throw std::invalid_argument("clt_test: not enough seeds");
  }
  if (sigma_method != "replication" && sigma_method != "batch_means") {
    throw std::invalid_argument("clt_test: unknown sigma method " + sigma_method);
  }
  std::vector<std::pair<double, double>> results(static_cast<std::size_t>(replicates));
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> futures;
  std::atomic<int> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= replicates) return;
        results[static_cast<std::size_t>(i)] = run_chain(seeds[static_cast<std::size_t>(i)]);
      }
    }));
  }
  for (auto& f : futures) f.get();

  CltReport rep;
  rep.replicates = replicates;
  rep.chain_length = chain_length;
  rep.sigma_method = sigma_method;
  const double sqrt_n = std::sqrt(static_cast<double>(chain_length));
  std::vector<double> scaled(static_cast<std::size_t>(replicates));
  for (int i = 0; i < replicates; ++i) {
    scaled[static_cast<std::size_t>(i)] =
        sqrt_n * (results[static_cast<std::size_t>(i)].first - pi_f);
  }
  if (sigma_method == "replication") {
    const double mean = std::accumulate(scaled.begin(), scaled.end(), 0.0) / replicates;
    double var = 0.0;
    for (double v : scaled) var += (v - mean) * (v - mean);
    var /= static_cast<double>(replicates - 1);
    rep.sigma_hat = std::sqrt(var);
    for (double v : scaled) rep.z.push_back(v / rep.sigma_hat);
  } else {
    double acc = 0.0;
    for (int i = 0; i < replicates; ++i) {
      const double s = results[static_cast<std::size_t>(i)].second;
      rep.z.push_back(scaled[static_cast<std::size_t>(i)] / s);
      acc += s;
    }
    rep.sigma_hat = acc / replicates;
  }
  rep.ks_stat = ks_statistic_normal(rep.z);
  rep.p_value = ks_pvalue(rep.ks_stat, replicates);
  return rep;
}

std::vector<DriftProbeRow> drift_probe(
    const std::function<StepOutcome(const Vector&, RngStream&)>& step,
    const std::function<double(const Vector&)>& log_v,
    const std::vector<Vector>& points, int draws_per_point, std::uint64_t seed) {
  std::vector<DriftProbeRow> rows;
  for (std::size_t p = 0; p < points.size(); ++p) {
    RngStream rng(seed + p);
    const double lv_x = log_v(points[p]);
    double sum = 0.0;
    double sumsq = 0.0;
    for (int i = 0; i < draws_per_point; ++i) {
      const StepOutcome out = step(points[p], rng);
      const double r = std::exp(log_v(out.new_x) - lv_x);
      sum += r;
      sumsq += r * r;
    }
    const double mean = sum / draws_per_point;
    const double var = std::max(0.0, sumsq / draws_per_point - mean * mean);
    rows.push_back({points[p], mean, std::sqrt(var / draws_per_point)});
  }
  return rows;
}

std::function<double(const Vector&)> srwm_drift_log_v(const TargetModel& t, double eta) {
  const double log_max = t.log_density_max();
  return [&t, eta, log_max](const Vector& x) {
    return -eta * (t.log_density(x) - log_max);
  };
}

MinorizationReport minorization_probe(const std::function<double(const Vector&)>& log_q,
                                      const TargetModel& t, int sample_count,
                                      std::uint64_t seed) {
  RngStream rng(seed);
  MinorizationReport rep;
  rep.eps_hat = std::numeric_limits<double>::infinity();
  const auto consider = [&](const Vector& x) {
    const double r = std::exp(log_q(x) - t.log_density(x));
    if (r < rep.eps_hat) {
      rep.eps_hat = r;
      rep.min_location = x;
    }
  };
  for (int i = 0; i < sample_count; ++i) consider(t.sample(rng));
  if (t.dim() == 1) {
    const double mu = t.mean_pi()[0];
    const double sd = std::sqrt(t.cov_pi()(0, 0));
    const int n = 1601;
    for (int i = 0; i < n; ++i) {
      Vector x(1);
      x[0] = mu - 8.0 * sd + 16.0 * sd * i / (n - 1);
      consider(x);
    }
  }
  return rep;
}

double safeguard_ratio_infimum_1d(const FactoredGaussian& zeta, const TargetModel& t,
                                  double lo, double hi, int grid_points) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    Vector x(1);
    x[0] = lo + (hi - lo) * i / (grid_points - 1);
    best = std::min(best, std::exp(mvn_logpdf(zeta, x) - t.log_density(x)));
  }
  return best;
}

LipschitzProbeReport kernel_lipschitz_probe(
    const TargetModel& t, const std::vector<std::pair<Matrix, Matrix>>& gamma_pairs,
    const TestFunction& f, double f_sup, const std::vector<Vector>& points,
    double lambda_min_k, int draws, std::uint64_t seed) {
  LipschitzProbeReport rep;
  rep.bound = 2.0 * static_cast<double>(t.dim()) / lambda_min_k * f_sup;
  for (std::size_t pi_idx = 0; pi_idx < gamma_pairs.size(); ++pi_idx) {
    const auto& [g1, g2] = gamma_pairs[pi_idx];
    const double dist = (g1 - g2).norm();
    const FactoredGaussian inc1 = factorize(Vector::Zero(t.dim()), g1);
    const FactoredGaussian inc2 = factorize(Vector::Zero(t.dim()), g2);
    for (std::size_t xp = 0; xp < points.size(); ++xp) {
      const Vector& x = points[xp];
      RngStream rng(seed + 1000 * pi_idx + xp);
      double sum_diff = 0.0;
      double sumsq_diff = 0.0;
      for (int i = 0; i < draws; ++i) {
        // Common random numbers: one standard-normal increment and one
        // uniform shared across both kernels.
        const Vector z = draw_normal_vec(rng, t.dim());
        const double log_u = std::log(draw_uniform(rng));
        double vals[2];
        const FactoredGaussian* incs[2] = {&inc1, &inc2};
        for (int k = 0; k < 2; ++k) {
          const Vector y = x + incs[k]->lower.triangularView<Eigen::Lower>() * z;
          const bool accepted = log_u < srwm_log_accept(t, x, y);
          vals[k] = f(accepted ? y : x);
        }
        const double diff = vals[0] - vals[1];
        sum_diff += diff;
        sumsq_diff += diff * diff;
      }
      const double mean = sum_diff / draws;
      const double var = std::max(0.0, sumsq_diff / draws - mean * mean);
      const double se = std::sqrt(var / draws);
      const double ratio = dist > 0.0 ? std::abs(mean) / dist : 0.0;
      if (ratio > rep.max_observed_ratio) {
        rep.max_observed_ratio = ratio;
        rep.max_ratio_std_error = dist > 0.0 ? se / dist : 0.0;
      }
    }
  }
  return rep;
}

namespace {

std::array<double, 2> invariant_of(double p01, double p10) {
  // Solve stationarity pi = pi P for the 2-state chain with off-diagonal
  // transition probabilities p01 (state 0 -> 1) and p10 (state 1 -> 0),
  // together with the normalization constraint.
  Eigen::Matrix2d a;
  a << p01, -p10, 1.0, 1.0;
  Eigen::Vector2d b(0.0, 1.0);
  const Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
  return {sol[0], sol[1]};
}

}  // namespace

TwoStateReport two_state_oracle(double theta1, double theta2) {
  if (!(theta1 > 0.0 && theta1 < 1.0 && theta2 > 0.0 && theta2 < 1.0)) {
    throw std::invalid_argument("two_state_oracle: parameters must lie in (0, 1)");
  }
  TwoStateReport rep;
  rep.invariant_adaptive = invariant_of(theta1, theta2);
  // Fixed theta: both flip probabilities equal; any theta gives (1/2, 1/2).
  rep.invariant_fixed = invariant_of(theta1, theta1);
  return rep;
}

std::array<double, 2> two_state_simulate(double theta1, double theta2, long steps,
                                         std::uint64_t seed) {
  RngStream rng(seed);
  int state = 0;
  std::array<long, 2> counts{0, 0};
  for (long k = 0; k < steps; ++k) {
    const double flip = state == 0 ? theta1 : theta2;
    if (draw_uniform(rng) < flip) state = 1 - state;
    ++counts[static_cast<std::size_t>(state)];
  }
  return {static_cast<double>(counts[0]) / steps, static_cast<double>(counts[1]) / steps};
}

}  // namespace adaptmc
