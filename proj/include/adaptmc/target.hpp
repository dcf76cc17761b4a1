#pragma once

#include "adaptmc/linalg.hpp"

#include <vector>

namespace adaptmc {

// Target distribution with normalized log-density, analytic gradient, exact
// moments and an exact sampler. Supported kinds: single Gaussian and finite
// Gaussian mixtures. Both are super-exponential, which is what the shipped
// drift probes assume.
class TargetModel {
 public:
  static TargetModel gaussian(const Vector& mean, const Matrix& cov);
  static TargetModel gaussian_mixture(const std::vector<double>& weights,
                                      const std::vector<Vector>& means,
                                      const std::vector<Matrix>& covs);

  Eigen::Index dim() const { return components_[0].dim(); }
  std::size_t component_count() const { return components_.size(); }

  double log_density(const Vector& x) const;
  Vector grad_log_density(const Vector& x) const;

  // (mu_pi, gamma_pi) in closed form. For mixtures
  // gamma_pi = sum w_j (C_j + m_j m_jᵀ) - mu_pi mu_piᵀ.
  Vector mean_pi() const { return mean_pi_; }
  Matrix cov_pi() const { return cov_pi_; }

  Vector sample(RngStream& rng) const;

  // sup_x log pi(x); exact for Gaussians, local ascent from each component
  // mean for mixtures.
  double log_density_max() const { return log_density_max_; }

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<FactoredGaussian>& components() const { return components_; }

 private:
  TargetModel() = default;
  void finalize();

  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<FactoredGaussian> components_;
  Vector mean_pi_;
  Matrix cov_pi_;
  double log_density_max_ = 0.0;
};

struct SuperexpProbeRow {
  Vector direction;
  double radius;
  double inner_product;  // <x/|x|, grad log pi(x)> at x = radius * direction
};

// Super-exponential-tail diagnostic: the radial derivative of log pi
// along each ray. A limit at infinity cannot be certified numerically, so
// this only tabulates values for inspection.
std::vector<SuperexpProbeRow> superexp_probe(const TargetModel& t,
                                             const std::vector<Vector>& directions,
                                             const std::vector<double>& radii);

}  // namespace adaptmc
