#include "adaptmc/kernels.hpp"

#include <algorithm>

namespace adaptmc {

SrwmKernel make_srwm_kernel(const TargetModel& t, const Matrix& increment_cov) {
  return SrwmKernel{&t, factorize(Vector::Zero(t.dim()), increment_cov)};
}

double srwm_log_accept(const TargetModel& t, const Vector& x, const Vector& y) {
  return std::min(0.0, t.log_density(y) - t.log_density(x));
}

StepOutcome srwm_step(const SrwmKernel& k, const Vector& x, RngStream& rng) {
  const Vector y = x + mvn_sample(k.increment, rng);
  const double la = srwm_log_accept(*k.target, x, y);
  const double u = draw_uniform(rng);
  const bool accepted = std::log(u) < la;
  return StepOutcome{accepted ? y : x, y, accepted, la};
}

double mixture_proposal_logpdf(const MixtureProposal& p, const Vector& x) {
  std::vector<double> terms;
  terms.reserve(p.comps.size() + 1);
  const double log_adapt = std::log1p(-p.iota);
  for (std::size_t j = 0; j < p.comps.size(); ++j) {
    terms.push_back(log_adapt + std::log(p.weights[j]) + mvn_logpdf(p.comps[j], x));
  }
  terms.push_back(std::log(p.iota) + mvn_logpdf(p.safeguard, x));
  const double m = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

Vector mixture_proposal_sample(const MixtureProposal& p, RngStream& rng) {
  const double indicator = draw_uniform(rng);
  if (indicator < p.iota) {
    return mvn_sample(p.safeguard, rng);
  }
  std::size_t j = 0;
  if (p.comps.size() > 1) {
    const double u = draw_uniform(rng);
    double acc = 0.0;
    for (; j + 1 < p.comps.size(); ++j) {
      acc += p.weights[j];
      if (u < acc) break;
    }
  }
  return mvn_sample(p.comps[j], rng);
}

double imh_log_accept(const TargetModel& t, const MixtureProposal& p,
                      const Vector& x, const Vector& y) {
  const double ratio_y = t.log_density(y) - mixture_proposal_logpdf(p, y);
  const double ratio_x = t.log_density(x) - mixture_proposal_logpdf(p, x);
  return std::min(0.0, ratio_y - ratio_x);
}

StepOutcome imh_step(const ImhKernel& k, const Vector& x, RngStream& rng) {
  const Vector y = mixture_proposal_sample(k.proposal, rng);
  const double la = imh_log_accept(*k.target, k.proposal, x, y);
  const double u = draw_uniform(rng);
  const bool accepted = std::log(u) < la;
  return StepOutcome{accepted ? y : x, y, accepted, la};
}

}  // namespace adaptmc
