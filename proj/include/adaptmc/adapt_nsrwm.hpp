#pragma once

#include "adaptmc/kernels.hpp"

namespace adaptmc {

// Covariance-adaptation parameter theta = (mu, Gamma). The same struct is
// used for the parameter and its increments.
struct AdaptParamNsrwm {
  Vector mu;
  Matrix gamma;
};

// H(theta, x) = (x - mu, (x - mu)(x - mu)ᵀ - Gamma).
AdaptParamNsrwm update_field(const AdaptParamNsrwm& theta, const Vector& x);

// h(theta) = (mu_pi - mu, (mu_pi - mu)(mu_pi - mu)ᵀ + Gamma_pi - Gamma)
// from the target's exact moments.
AdaptParamNsrwm mean_field(const AdaptParamNsrwm& theta, const TargetModel& t);

// theta + step * increment, with Gamma re-symmetrized to stop floating-point
// drift over long runs.
AdaptParamNsrwm apply_update(const AdaptParamNsrwm& theta,
                             const AdaptParamNsrwm& increment, double step);

// w(theta) = log det Gamma + (mu - mu_pi)ᵀ Gamma⁻¹ (mu - mu_pi)
//          + Tr(Gamma⁻¹ Gamma_pi).
double lyapunov(const AdaptParamNsrwm& theta, const TargetModel& t);

// -2 uᵀ Gamma⁻¹ u - Tr(Gamma⁻¹ (Gamma - Gamma_pi) Gamma⁻¹ (Gamma - Gamma_pi))
// - (uᵀ Gamma⁻¹ u)² with u = mu - mu_pi. Always <= 0, zero only at
// (mu_pi, Gamma_pi).
double lyapunov_decay(const AdaptParamNsrwm& theta, const TargetModel& t);

// SRWM kernel with increment covariance lambda * Gamma.
SrwmKernel kernel_of(const AdaptParamNsrwm& theta, const TargetModel& t, double lambda);

// Default scaling 2.38^2 / n_x.
double default_srwm_lambda(Eigen::Index dim);

}  // namespace adaptmc
