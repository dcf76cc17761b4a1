#include "adaptmc/controller.hpp"

namespace adaptmc {

StepsizeSchedule::StepsizeSchedule(double c0, double alpha, long shift)
    : c0_(c0), alpha_(alpha), shift_(shift) {
  if (!(c0 > 0.0)) {
    throw std::invalid_argument("StepsizeSchedule: c0 must be positive");
  }
  if (!(alpha > 0.5) || !(alpha <= 1.0)) {
    throw std::invalid_argument(
        "StepsizeSchedule: alpha must lie in (1/2, 1] so that sum gamma_k "
        "diverges while sum (gamma_k^2 + k^{-1/2} gamma_k) converges");
  }
  if (shift < 0) {
    throw std::invalid_argument("StepsizeSchedule: shift must be nonnegative");
  }
}

bool NsrwmCoverage::contains(long q, const AdaptParamNsrwm& theta) const {
  if (!theta.mu.allFinite() || !theta.gamma.allFinite()) return false;
  const double scale = std::pow(2.0, static_cast<double>(q));
  if (theta.mu.norm() > M0 * scale) return false;
  const auto [lo, hi] = eigen_bounds(theta.gamma);
  return lo >= eps0 / scale && hi <= M1 * scale;
}

bool MixtureCoverage::contains(long q, const MixtureSuffStats& theta) const {
  const double scale = std::pow(2.0, static_cast<double>(q));
  for (std::size_t j = 0; j < theta.component_count(); ++j) {
    if (!std::isfinite(theta.s0[j]) || !theta.s1[j].allFinite() ||
        !theta.s2[j].allFinite()) {
      return false;
    }
    if (theta.s0[j] < f0 / scale) return false;
    const Vector mj = theta.s1[j] / theta.s0[j];
    if (mj.norm() > M0 * scale) return false;
    Matrix cj = theta.s2[j] / theta.s0[j] - mj * mj.transpose();
    cj = 0.5 * (cj + cj.transpose()).eval();
    const auto [lo, hi] = eigen_bounds(cj);
    if (lo < eps0 / scale || hi > M1 * scale) return false;
  }
  return true;
}

StepOutcome NsrwmAlgorithm::sample(const Theta& theta, const Vector& x,
                                   RngStream& rng) const {
  const SrwmKernel k = kernel_of(theta, *target, lambda);
  return srwm_step(k, x, rng);
}

AdaptParamNsrwm NsrwmAlgorithm::updated(const Theta& theta, const Vector& x_new,
                                        double step, bool* valid,
                                        bool* floors_active) const {
  const AdaptParamNsrwm incr = update_field(theta, x_new);
  AdaptParamNsrwm out = apply_update(theta, incr, step);
  *valid = out.mu.allFinite() && out.gamma.allFinite();
  *floors_active = false;
  return out;
}

std::vector<double> NsrwmAlgorithm::flatten(const Theta& theta) const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(theta.mu.size() + theta.gamma.size()));
  for (Eigen::Index i = 0; i < theta.mu.size(); ++i) v.push_back(theta.mu[i]);
  for (Eigen::Index i = 0; i < theta.gamma.rows(); ++i)
    for (Eigen::Index j = 0; j < theta.gamma.cols(); ++j)
      v.push_back(theta.gamma(i, j));
  return v;
}

NsrwmAlgorithm make_nsrwm_algorithm(const TargetModel& t, const Vector& x0,
                                    const Vector& mu0, const Matrix& gamma0,
                                    double lambda) {
  NsrwmAlgorithm alg;
  alg.target = &t;
  alg.lambda = lambda > 0.0 ? lambda : default_srwm_lambda(t.dim());
  const auto [lo, hi] = eigen_bounds(gamma0);
  if (!(lo > 0.0)) {
    throw std::invalid_argument("make_nsrwm_algorithm: gamma0 must be positive definite");
  }
  alg.coverage = NsrwmCoverage{10.0 * (1.0 + mu0.norm()), 100.0 * hi, 1e-2 * lo};
  alg.x0 = x0;
  alg.theta0 = AdaptParamNsrwm{mu0, gamma0};
  if (!alg.in_coverage(0, alg.theta0)) {
    throw std::invalid_argument("make_nsrwm_algorithm: theta0 outside K_0");
  }
  return alg;
}

MixtureProposal EmImhAlgorithm::proposal_of(const Theta& theta) const {
  const MixtureXi xi = mstep(theta, floors);
  MixtureProposal p;
  p.weights = xi.weights;
  for (std::size_t j = 0; j < xi.component_count(); ++j) {
    p.comps.push_back(factorize(xi.means[j], xi.covs[j]));
  }
  p.safeguard = safeguard;
  p.iota = iota;
  return p;
}

StepOutcome EmImhAlgorithm::sample(const Theta& theta, const Vector& x,
                                   RngStream& rng) const {
  const ImhKernel k{target, proposal_of(theta)};
  return imh_step(k, x, rng);
}

MixtureSuffStats EmImhAlgorithm::updated(const Theta& theta, const Vector& x_new,
                                         double step, bool* valid,
                                         bool* floors_active) const {
  const MixtureSuffStats incr = em_update_field(theta, x_new, floors, floors_active);
  MixtureSuffStats out = apply_update(theta, incr, step);
  *valid = true;
  for (std::size_t j = 0; j < out.component_count(); ++j) {
    if (!std::isfinite(out.s0[j]) || !out.s1[j].allFinite() || !out.s2[j].allFinite()) {
      *valid = false;
    }
  }
  return out;
}

std::vector<double> EmImhAlgorithm::flatten(const Theta& theta) const {
  std::vector<double> v;
  for (std::size_t j = 0; j < theta.component_count(); ++j) {
    v.push_back(theta.s0[j]);
    for (Eigen::Index i = 0; i < theta.s1[j].size(); ++i) v.push_back(theta.s1[j][i]);
    for (Eigen::Index r = 0; r < theta.s2[j].rows(); ++r)
      for (Eigen::Index c = 0; c < theta.s2[j].cols(); ++c)
        v.push_back(theta.s2[j](r, c));
  }
  return v;
}

EmImhAlgorithm make_em_imh_algorithm(const TargetModel& t, const Vector& x0,
                                     const MixtureXi& xi0,
                                     const FactoredGaussian& safeguard,
                                     double iota) {
  if (!(iota > 0.0) || !(iota < 1.0)) {
    throw std::invalid_argument("make_em_imh_algorithm: iota must lie in (0, 1)");
  }
  EmImhAlgorithm alg;
  alg.target = &t;
  alg.safeguard = safeguard;
  alg.iota = iota;
  const std::size_t m = xi0.component_count();
  double max_mean = 0.0;
  double max_eig = 0.0;
  double min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m; ++j) {
    max_mean = std::max(max_mean, xi0.means[j].norm());
    const auto [lo, hi] = eigen_bounds(xi0.covs[j]);
    max_eig = std::max(max_eig, hi);
    min_eig = std::min(min_eig, lo);
  }
  if (!(min_eig > 0.0)) {
    throw std::invalid_argument("make_em_imh_algorithm: initial covariances must be PD");
  }
  alg.floors = default_floors(m, max_eig);
  alg.coverage = MixtureCoverage{10.0 * (1.0 + max_mean), 100.0 * max_eig,
                                 1e-2 * min_eig, 0.5 / static_cast<double>(m)};
  alg.x0 = x0;
  alg.theta0 = suffstats_of(xi0);
  if (!alg.in_coverage(0, alg.theta0)) {
    throw std::invalid_argument("make_em_imh_algorithm: theta0 outside K_0");
  }
  return alg;
}

}  // namespace adaptmc
