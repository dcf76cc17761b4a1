#pragma once

#include "adaptmc/target.hpp"

namespace adaptmc {

struct StepOutcome {
  Vector new_x;
  Vector proposed_x;
  bool accepted = false;
  double log_accept = 0.0;  // always <= 0
};

// Symmetric random-walk MH with Gaussian increments. The increment mean must
// be exactly zero so the proposal terms cancel in the acceptance ratio.
struct SrwmKernel {
  const TargetModel* target = nullptr;
  FactoredGaussian increment;
};

SrwmKernel make_srwm_kernel(const TargetModel& t, const Matrix& increment_cov);

double srwm_log_accept(const TargetModel& t, const Vector& x, const Vector& y);

// One MH step. Draw order is fixed: increment first, acceptance uniform
// second. Ties log(U) == threshold reject.
StepOutcome srwm_step(const SrwmKernel& k, const Vector& x, RngStream& rng);

// Safeguarded mixture proposal for the independence sampler:
// q = (1 - iota) * sum_j w_j N(m_j, C_j) + iota * safeguard.
struct MixtureProposal {
  std::vector<double> weights;
  std::vector<FactoredGaussian> comps;
  FactoredGaussian safeguard;
  double iota = 0.1;
};

double mixture_proposal_logpdf(const MixtureProposal& p, const Vector& x);

// Draw order: safeguard-vs-adaptive indicator, then component, then Gaussian.
Vector mixture_proposal_sample(const MixtureProposal& p, RngStream& rng);

struct ImhKernel {
  const TargetModel* target = nullptr;
  MixtureProposal proposal;
};

double imh_log_accept(const TargetModel& t, const MixtureProposal& p,
                      const Vector& x, const Vector& y);

StepOutcome imh_step(const ImhKernel& k, const Vector& x, RngStream& rng);

}  // namespace adaptmc
