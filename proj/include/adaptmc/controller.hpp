#pragma once

#include "adaptmc/adapt_nsrwm.hpp"
#include "adaptmc/mixture_em.hpp"

#include <functional>
#include <limits>

namespace adaptmc {

// gamma_k = c0 / (k + shift)^alpha. The constructor enforces the summability
// condition: alpha in (1/2, 1] gives sum gamma_k = inf and
// sum (gamma_k^2 + k^{-1/2} gamma_k) < inf.
class StepsizeSchedule {
 public:
  StepsizeSchedule(double c0, double alpha, long shift = 0);

  double at(long k) const { return c0_ / std::pow(static_cast<double>(k + shift_), alpha_); }
  double c0() const { return c0_; }
  double alpha() const { return alpha_; }
  long shift() const { return shift_; }

 private:
  double c0_;
  double alpha_;
  long shift_;
};

// Nested exhausting truncation sets for theta = (mu, Gamma):
// K_q = { |mu| <= M0 2^q, lambda_min(Gamma) >= eps0 2^{-q},
//         lambda_max(Gamma) <= M1 2^q }. Closed sets: boundary included.
struct NsrwmCoverage {
  double M0;
  double M1;
  double eps0;

  bool contains(long q, const AdaptParamNsrwm& theta) const;
};

// Truncation sets for mixture sufficient statistics: per component,
// s0_j >= f0 2^{-q}, |s1_j / s0_j| <= M0 2^q, eigenvalues of
// s2_j/s0_j - m_j m_jᵀ within [eps0 2^{-q}, M1 2^q].
struct MixtureCoverage {
  double M0;
  double M1;
  double eps0;
  double f0;

  bool contains(long q, const MixtureSuffStats& theta) const;
};

template <class Theta>
struct ChainState {
  Vector x;
  Theta theta;
  long kappa = 0;
  long nu = 0;
};

struct StepRecord {
  long k = 0;
  Vector x;
  bool accepted = false;
  double log_accept = 0.0;
  long kappa = 0;
  long nu = 0;
  bool reinit = false;       // a reinitialization was applied at this step
  bool theta_exit = false;   // theta left the active truncation set this step
  bool floors_active = false;
};

struct RunTrace {
  std::vector<StepRecord> records;
  // (step index, row-major flattened theta) at the configured cadence, plus
  // always the final step.
  std::vector<std::pair<long, std::vector<double>>> theta_snapshots;
  std::vector<double> final_theta;
  long total_reinits = 0;
  long final_kappa = 0;
  double acceptance_rate = 0.0;

  std::vector<double> function_values(const std::function<double(const Vector&)>& f,
                                      long burn_in = 0) const {
    std::vector<double> out;
    for (const auto& r : records) {
      if (r.k > burn_in) out.push_back(f(r.x));
    }
    return out;
  }
};

// An adaptive algorithm plugs a kernel family and an update field into the
// controller. Requirements on Alg:
//   typename Alg::Theta
//   StepOutcome Alg::sample(const Theta&, const Vector& x, RngStream&) const
//   Theta Alg::updated(const Theta&, const Vector& x_new, double step,
//                      bool* valid, bool* floors_active) const
//   bool Alg::in_coverage(long q, const Theta&) const
//   std::vector<double> Alg::flatten(const Theta&) const
//   Vector Alg::x0;  Theta Alg::theta0;
//
// One transition of the homogeneous chain Z = (x, theta, kappa, nu):
//   1. if nu == 0 reset (x, theta) to (x0, theta0);
//   2. effective stepsize c0 / (kappa + nu + 1 + shift)^alpha;
//   3. draw x' from P_theta(x, .), tentative theta' = theta + step * H;
//   4. theta' in K_kappa: nu' = nu + 1; otherwise kappa' = kappa + 1,
//      nu' = 0 and theta' is kept only for the record (the next transition's
//      reset supplies the restart).
// A degenerate or non-finite theta' is treated as the cemetery point, which
// is contained in no truncation set; the previous theta is carried so that
// emitted states never hold the cemetery.
template <class Alg>
std::pair<ChainState<typename Alg::Theta>, StepRecord> transition(
    const ChainState<typename Alg::Theta>& z, const Alg& alg,
    const StepsizeSchedule& schedule, RngStream& rng) {
  ChainState<typename Alg::Theta> cur = z;
  StepRecord rec;
  if (cur.nu == 0) {
    cur.x = alg.x0;
    cur.theta = alg.theta0;
    rec.reinit = true;
  }
  const double step = schedule.at(cur.kappa + cur.nu + 1);
  StepOutcome out;
  bool kernel_ok = true;
  try {
    out = alg.sample(cur.theta, cur.x, rng);
  } catch (const NotPositiveDefinite&) {
    kernel_ok = false;
  }
  ChainState<typename Alg::Theta> next = cur;
  if (!kernel_ok) {
    // Kernel construction failed: treat as a truncation exit without moving.
    next.kappa = cur.kappa + 1;
    next.nu = 0;
    rec.theta_exit = true;
  } else {
    next.x = out.new_x;
    rec.accepted = out.accepted;
    rec.log_accept = out.log_accept;
    bool valid = true;
    bool floors = false;
    typename Alg::Theta theta_new{};
    try {
      theta_new = alg.updated(cur.theta, out.new_x, step, &valid, &floors);
    } catch (const DegenerateComponent&) {
      valid = false;
    } catch (const NotPositiveDefinite&) {
      valid = false;
    }
    rec.floors_active = floors;
    const bool in_set = valid && alg.in_coverage(cur.kappa, theta_new);
    if (in_set) {
      next.theta = theta_new;
      next.kappa = cur.kappa;
      next.nu = cur.nu + 1;
    } else {
      if (valid) next.theta = theta_new;  // carried for the record only
      next.kappa = cur.kappa + 1;
      next.nu = 0;
      rec.theta_exit = true;
    }
  }
  rec.x = next.x;
  rec.kappa = next.kappa;
  rec.nu = next.nu;
  return {next, rec};
}

template <class Alg>
RunTrace run(const Alg& alg, const StepsizeSchedule& schedule, long steps,
             std::uint64_t seed, long theta_cadence = 1000) {
  RngStream rng(seed);
  ChainState<typename Alg::Theta> z{alg.x0, alg.theta0, 0, 0};
  RunTrace trace;
  trace.records.reserve(static_cast<std::size_t>(steps));
  long accepted = 0;
  for (long k = 1; k <= steps; ++k) {
    auto [next, rec] = transition(z, alg, schedule, rng);
    z = next;
    rec.k = k;
    if (rec.reinit && k > 1) ++trace.total_reinits;
    if (rec.accepted) ++accepted;
    if (theta_cadence > 0 && k % theta_cadence == 0) {
      trace.theta_snapshots.emplace_back(k, alg.flatten(z.theta));
    }
    trace.records.push_back(std::move(rec));
  }
  trace.final_theta = alg.flatten(z.theta);
  trace.final_kappa = z.kappa;
  trace.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(steps);
  if (trace.theta_snapshots.empty() || trace.theta_snapshots.back().first != steps) {
    trace.theta_snapshots.emplace_back(steps, trace.final_theta);
  }
  return trace;
}

// Adaptive N-SRWM: theta = (mu, Gamma), kernel increment N(0, lambda Gamma),
// running-moment update field.
struct NsrwmAlgorithm {
  using Theta = AdaptParamNsrwm;

  const TargetModel* target = nullptr;
  double lambda = 0.0;
  NsrwmCoverage coverage;
  Vector x0;
  Theta theta0;

  StepOutcome sample(const Theta& theta, const Vector& x, RngStream& rng) const;
  Theta updated(const Theta& theta, const Vector& x_new, double step,
                bool* valid, bool* floors_active) const;
  bool in_coverage(long q, const Theta& theta) const { return coverage.contains(q, theta); }
  std::vector<double> flatten(const Theta& theta) const;
};

NsrwmAlgorithm make_nsrwm_algorithm(const TargetModel& t, const Vector& x0,
                                    const Vector& mu0, const Matrix& gamma0,
                                    double lambda = 0.0);

// Adaptive IMH with online-EM mixture fitting: theta = mixture sufficient
// statistics, proposal (1 - iota) * mixture(mstep(theta)) + iota * safeguard.
struct EmImhAlgorithm {
  using Theta = MixtureSuffStats;

  const TargetModel* target = nullptr;
  FactoredGaussian safeguard;
  double iota = 0.1;
  MixtureFloors floors{};
  MixtureCoverage coverage;
  Vector x0;
  Theta theta0;

  MixtureProposal proposal_of(const Theta& theta) const;
  StepOutcome sample(const Theta& theta, const Vector& x, RngStream& rng) const;
  Theta updated(const Theta& theta, const Vector& x_new, double step,
                bool* valid, bool* floors_active) const;
  bool in_coverage(long q, const Theta& theta) const { return coverage.contains(q, theta); }
  std::vector<double> flatten(const Theta& theta) const;
};

EmImhAlgorithm make_em_imh_algorithm(const TargetModel& t, const Vector& x0,
                                     const MixtureXi& xi0,
                                     const FactoredGaussian& safeguard,
                                     double iota = 0.1);

}  // namespace adaptmc
