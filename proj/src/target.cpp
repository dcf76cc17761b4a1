#include "adaptmc/target.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace adaptmc {

namespace {

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

TargetModel TargetModel::gaussian(const Vector& mean, const Matrix& cov) {
  return gaussian_mixture({1.0}, {mean}, {cov});
}

TargetModel TargetModel::gaussian_mixture(const std::vector<double>& weights,
                                          const std::vector<Vector>& means,
                                          const std::vector<Matrix>& covs) {
  if (weights.empty() || weights.size() != means.size() || weights.size() != covs.size()) {
    throw std::invalid_argument("gaussian_mixture: inconsistent component counts");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("gaussian_mixture: weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::invalid_argument("gaussian_mixture: weights must sum to 1");
  }
  TargetModel t;
  t.weights_ = weights;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    t.log_weights_.push_back(std::log(weights[j]));
    t.components_.push_back(factorize(means[j], covs[j]));
  }
  t.finalize();
  return t;
}

void TargetModel::finalize() {
  const Eigen::Index d = dim();
  mean_pi_ = Vector::Zero(d);
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    mean_pi_ += weights_[j] * components_[j].mean;
  }
  cov_pi_ = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const Matrix cj = components_[j].lower * components_[j].lower.transpose();
    cov_pi_ += weights_[j] * (cj + components_[j].mean * components_[j].mean.transpose());
  }
  cov_pi_ -= mean_pi_ * mean_pi_.transpose();
  cov_pi_ = 0.5 * (cov_pi_ + cov_pi_.transpose());

  if (components_.size() == 1) {
    log_density_max_ = log_density(components_[0].mean);
  } else {
    // Gradient ascent with backtracking from each component mean; the mixture
    // mode lies near one of them for the shipped desk-scale targets.
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& comp : components_) {
      Vector x = comp.mean;
      double fx = log_density(x);
      double step = 1.0;
      for (int it = 0; it < 400; ++it) {
        const Vector g = grad_log_density(x);
        if (g.norm() < 1e-13) break;
        Vector cand = x + step * g;
        double fc = log_density(cand);
        if (fc > fx) {
          x = cand;
          fx = fc;
          step *= 1.5;
        } else {
          step *= 0.5;
          if (step < 1e-14) break;
        }
      }
      best = std::max(best, fx);
    }
    log_density_max_ = best;
  }
}

double TargetModel::log_density(const Vector& x) const {
  if (components_.size() == 1) return mvn_logpdf(components_[0], x);
  std::vector<double> terms(components_.size());
  for (std::size_t j = 0; j < components_.size(); ++j) {
    terms[j] = log_weights_[j] + mvn_logpdf(components_[j], x);
  }
  return log_sum_exp(terms);
}

Vector TargetModel::grad_log_density(const Vector& x) const {
  // grad log pi = sum_j r_j(x) * (-C_j^{-1} (x - m_j)) with r_j the
  // posterior component probabilities, computed in log domain.
  std::vector<double> terms(components_.size());
  for (std::size_t j = 0; j < components_.size(); ++j) {
    terms[j] = log_weights_[j] + mvn_logpdf(components_[j], x);
  }
  const double lse = log_sum_exp(terms);
  Vector g = Vector::Zero(dim());
  for (std::size_t j = 0; j < components_.size(); ++j) {
    const double rj = std::exp(terms[j] - lse);
    const auto& L = components_[j].lower;
    const Vector u = L.triangularView<Eigen::Lower>().solve(x - components_[j].mean);
    const Vector cinv_dx = L.transpose().triangularView<Eigen::Upper>().solve(u);
    g -= rj * cinv_dx;
  }
  return g;
}

Vector TargetModel::sample(RngStream& rng) const {
  std::size_t j = 0;
  if (components_.size() > 1) {
    const double u = draw_uniform(rng);
    double acc = 0.0;
    for (; j + 1 < components_.size(); ++j) {
      acc += weights_[j];
      if (u < acc) break;
    }
  }
  return mvn_sample(components_[j], rng);
}

std::vector<SuperexpProbeRow> superexp_probe(const TargetModel& t,
                                             const std::vector<Vector>& directions,
                                             const std::vector<double>& radii) {
  std::vector<SuperexpProbeRow> rows;
  for (const auto& d : directions) {
    const Vector unit = d / d.norm();
    for (double r : radii) {
      const Vector x = r * unit;
      rows.push_back({unit, r, unit.dot(t.grad_log_density(x))});
    }
  }
  return rows;
}

}  // namespace adaptmc
