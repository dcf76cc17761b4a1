#pragma once

#include "adaptmc/target.hpp"

namespace adaptmc {

// Normalized running sufficient statistics of an m-component Gaussian
// mixture: per component (mass, first moment, second moment). The masses of
// a valid parameter sum to 1.
struct MixtureSuffStats {
  std::vector<double> s0;
  std::vector<Vector> s1;
  std::vector<Matrix> s2;

  std::size_t component_count() const { return s0.size(); }
};

struct MixtureXi {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covs;

  std::size_t component_count() const { return weights.size(); }
};

// Floors realizing a compact image for the M-step: weights clamped below by
// weight_floor (then renormalized), covariance eigenvalues clamped below by
// cov_floor.
struct MixtureFloors {
  double weight_floor;
  double cov_floor;
};

MixtureFloors default_floors(std::size_t m, double gamma0_scale);

// Sufficient statistics whose M-step image is the given mixture.
MixtureSuffStats suffstats_of(const MixtureXi& xi);

double mixture_logpdf(const MixtureXi& xi, const Vector& x);

Vector mixture_sample(const MixtureXi& xi, RngStream& rng);

// Posterior component probabilities at x, via log-sum-exp.
Vector responsibilities(const MixtureXi& xi, const Vector& x);

// Per component (r_j, r_j x, r_j x xᵀ).
MixtureSuffStats suffstat_expectation(const MixtureXi& xi, const Vector& x);

// Closed-form M-step w_j = s0_j, m_j = s1_j/s0_j, C_j = s2_j/s0_j - m_j m_jᵀ,
// then floors. Throws DegenerateComponent when some s0_j <= 0; the controller
// treats that as theta outside the parameter space. floors_active, when
// non-null, reports whether any floor fired.
MixtureXi mstep(const MixtureSuffStats& theta, const MixtureFloors& floors,
                bool* floors_active = nullptr);

// H(theta, x) = suffstat_expectation(mstep(theta), x) - theta.
MixtureSuffStats em_update_field(const MixtureSuffStats& theta, const Vector& x,
                                 const MixtureFloors& floors,
                                 bool* floors_active = nullptr);

MixtureSuffStats apply_update(const MixtureSuffStats& theta,
                              const MixtureSuffStats& increment, double step);

// Monte Carlo estimate of K(pi || q_xi) from exact target samples, with
// standard error. Uses the target's exact sampler, never chain output.
struct KlEstimate {
  double estimate;
  double std_error;
};

KlEstimate kl_estimate(const TargetModel& t, const MixtureXi& xi, int n, RngStream& rng);

}  // namespace adaptmc
