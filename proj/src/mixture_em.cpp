#include "adaptmc/mixture_em.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace adaptmc {

MixtureFloors default_floors(std::size_t m, double gamma0_scale) {
  return MixtureFloors{1e-3 / static_cast<double>(m), 1e-4 * gamma0_scale};
}

MixtureSuffStats suffstats_of(const MixtureXi& xi) {
  MixtureSuffStats th;
  for (std::size_t j = 0; j < xi.component_count(); ++j) {
    th.s0.push_back(xi.weights[j]);
    th.s1.push_back(xi.weights[j] * xi.means[j]);
    th.s2.push_back(xi.weights[j] *
                    (xi.covs[j] + xi.means[j] * xi.means[j].transpose()));
  }
  return th;
}

namespace {

std::vector<double> component_log_terms(const MixtureXi& xi, const Vector& x) {
  std::vector<double> terms(xi.component_count());
  for (std::size_t j = 0; j < xi.component_count(); ++j) {
    terms[j] = std::log(xi.weights[j]) +
               mvn_logpdf(factorize(xi.means[j], xi.covs[j]), x);
  }
  return terms;
}

}  // namespace

double mixture_logpdf(const MixtureXi& xi, const Vector& x) {
  const auto terms = component_log_terms(xi, x);
  const double m = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

Vector mixture_sample(const MixtureXi& xi, RngStream& rng) {
  std::size_t j = 0;
  if (xi.component_count() > 1) {
    const double u = draw_uniform(rng);
    double acc = 0.0;
    for (; j + 1 < xi.component_count(); ++j) {
      acc += xi.weights[j];
      if (u < acc) break;
    }
  }
  return mvn_sample(factorize(xi.means[j], xi.covs[j]), rng);
}

Vector responsibilities(const MixtureXi& xi, const Vector& x) {
  const auto terms = component_log_terms(xi, x);
  const double m = *std::max_element(terms.begin(), terms.end());
  Vector r(static_cast<Eigen::Index>(terms.size()));
  double s = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    r[static_cast<Eigen::Index>(j)] = std::exp(terms[j] - m);
    s += r[static_cast<Eigen::Index>(j)];
  }
  return r / s;
}

MixtureSuffStats suffstat_expectation(const MixtureXi& xi, const Vector& x) {
  const Vector r = responsibilities(xi, x);
  MixtureSuffStats th;
  const Matrix xxT = x * x.transpose();
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    th.s0.push_back(r[j]);
    th.s1.push_back(r[j] * x);
    th.s2.push_back(r[j] * xxT);
  }
  return th;
}

MixtureXi mstep(const MixtureSuffStats& theta, const MixtureFloors& floors,
                bool* floors_active) {
  bool fired = false;
  MixtureXi xi;
  for (std::size_t j = 0; j < theta.component_count(); ++j) {
    if (!(theta.s0[j] > 0.0)) {
      throw DegenerateComponent("mstep: component " + std::to_string(j) +
                                " has nonpositive mass");
    }
    const Vector mj = theta.s1[j] / theta.s0[j];
    Matrix cj = theta.s2[j] / theta.s0[j] - mj * mj.transpose();
    cj = 0.5 * (cj + cj.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(cj);
    Vector ev = es.eigenvalues();
    bool clamped = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev[i] < floors.cov_floor) {
        ev[i] = floors.cov_floor;
        clamped = true;
      }
    }
    if (clamped) {
      cj = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      cj = 0.5 * (cj + cj.transpose()).eval();
      fired = true;
    }
    xi.weights.push_back(theta.s0[j]);
    xi.means.push_back(mj);
    xi.covs.push_back(cj);
  }
  double wsum = 0.0;
  for (double& w : xi.weights) {
    if (w < floors.weight_floor) {
      w = floors.weight_floor;
      fired = true;
    }
    wsum += w;
  }
  for (double& w : xi.weights) w /= wsum;
  if (floors_active) *floors_active = fired;
  return xi;
}

MixtureSuffStats em_update_field(const MixtureSuffStats& theta, const Vector& x,
                                 const MixtureFloors& floors, bool* floors_active) {
  const MixtureXi xi = mstep(theta, floors, floors_active);
  MixtureSuffStats incr = suffstat_expectation(xi, x);
  for (std::size_t j = 0; j < theta.component_count(); ++j) {
    incr.s0[j] -= theta.s0[j];
    incr.s1[j] -= theta.s1[j];
    incr.s2[j] -= theta.s2[j];
  }
  return incr;
}

MixtureSuffStats apply_update(const MixtureSuffStats& theta,
                              const MixtureSuffStats& increment, double step) {
  MixtureSuffStats out;
  for (std::size_t j = 0; j < theta.component_count(); ++j) {
    out.s0.push_back(theta.s0[j] + step * increment.s0[j]);
    out.s1.push_back(theta.s1[j] + step * increment.s1[j]);
    Matrix s2 = theta.s2[j] + step * increment.s2[j];
    out.s2.push_back(0.5 * (s2 + s2.transpose()).eval());
  }
  return out;
}

KlEstimate kl_estimate(const TargetModel& t, const MixtureXi& xi, int n, RngStream& rng) {
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector x = t.sample(rng);
    const double v = t.log_density(x) - mixture_logpdf(xi, x);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double var = std::max(0.0, sumsq / n - mean * mean);
  return KlEstimate{mean, std::sqrt(var / n)};
}

}  // namespace adaptmc
