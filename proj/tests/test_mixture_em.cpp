#include "adaptmc/mixture_em.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace adaptmc;

namespace {

Vector vec1(double x) {
  Vector v(1);
  v << x;
  return v;
}

MixtureXi two_comp_1d(double w1, double m1, double c1, double m2, double c2) {
  MixtureXi xi;
  xi.weights = {w1, 1.0 - w1};
  xi.means = {vec1(m1), vec1(m2)};
  xi.covs = {(Matrix(1, 1) << c1).finished(), (Matrix(1, 1) << c2).finished()};
  return xi;
}

TargetModel bimodal_target() {
  return TargetModel::gaussian_mixture(
      {0.5, 0.5}, {vec1(-2), vec1(2)},
      {(Matrix(1, 1) << 0.8).finished(), (Matrix(1, 1) << 1.2).finished()});
}

double avg_loglik(const MixtureXi& xi, const std::vector<Vector>& data) {
  double acc = 0.0;
  for (const auto& x : data) acc += mixture_logpdf(xi, x);
  return acc / static_cast<double>(data.size());
}

}  // namespace

TEST_CASE("responsibilities normalize and match closed forms") {
  const MixtureXi xi = two_comp_1d(0.5, -2, 1, 2, 1);
  // Symmetric setup: equal responsibilities at the midpoint.
  const Vector r0 = responsibilities(xi, vec1(0));
  CHECK(r0.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r0[0] == doctest::Approx(0.5).epsilon(1e-12));

  // At x the log odds are log w1/w2 - (x-m1)^2/2 + (x-m2)^2/2.
  const MixtureXi xi2 = two_comp_1d(0.3, -1, 1, 1, 1);
  const double x = 0.4;
  const double logodds = std::log(0.3 / 0.7) -
                         0.5 * (x + 1) * (x + 1) + 0.5 * (x - 1) * (x - 1);
  const Vector r = responsibilities(xi2, vec1(x));
  CHECK(r[0] / r[1] == doctest::Approx(std::exp(logodds)).epsilon(1e-12));
  CHECK(r.sum() == doctest::Approx(1.0).epsilon(1e-14));

  RngStream rng(3);
  for (int it = 0; it < 100; ++it) {
    const Vector y = 5.0 * draw_normal_vec(rng, 1);
    const Vector rr = responsibilities(xi2, y);
    CHECK(rr.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rr.minCoeff() >= 0.0);
  }
}

TEST_CASE("mixture_logpdf integrates to one") {
  const MixtureXi xi = two_comp_1d(0.4, -2, 0.6, 1.5, 2.0);
  const double lo = -20, hi = 20;
  const int n = 100001;
  const double h = (hi - lo) / (n - 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * std::exp(mixture_logpdf(xi, vec1(lo + i * h)));
  }
  CHECK(acc * h == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("mstep inverts suffstats_of away from the floors") {
  const MixtureXi xi = two_comp_1d(0.35, -1.5, 0.9, 2.5, 1.7);
  const MixtureFloors floors = default_floors(2, 2.0);
  bool active = true;
  const MixtureXi back = mstep(suffstats_of(xi), floors, &active);
  CHECK_FALSE(active);
  for (int j = 0; j < 2; ++j) {
    CHECK(back.weights[j] == doctest::Approx(xi.weights[j]).epsilon(1e-12));
    CHECK((back.means[j] - xi.means[j]).norm() < 1e-12);
    CHECK((back.covs[j] - xi.covs[j]).norm() < 1e-12);
  }
}

TEST_CASE("mstep hand-computed from raw statistics") {
  MixtureSuffStats s;
  s.s0 = {0.25, 0.75};
  s.s1 = {vec1(0.5), vec1(1.5)};
  s.s2 = {(Matrix(1, 1) << 1.25).finished(), (Matrix(1, 1) << 3.75).finished()};
  const MixtureFloors floors{1e-4, 1e-6};
  const MixtureXi xi = mstep(s, floors);
  // m1 = 0.5/0.25 = 2, C1 = 1.25/0.25 - 4 = 1.
  CHECK(xi.weights[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(xi.means[0][0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(xi.covs[0](0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  // m2 = 2, C2 = 5 - 4 = 1.
  CHECK(xi.means[1][0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(xi.covs[1](0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mstep floors fire and renormalize") {
  // Tiny second mass: weight floor kicks in and weights still sum to one.
  MixtureXi xi = two_comp_1d(0.9999, -1, 1, 1, 1);
  xi.weights = {0.99999, 0.00001};
  const MixtureFloors floors{1e-3, 1e-6};
  bool active = false;
  const MixtureXi out = mstep(suffstats_of(xi), floors, &active);
  CHECK(active);
  // Renormalization after clamping can shave at most a factor 1/(1 + m f).
  CHECK(out.weights[1] >= 1e-3 / (1.0 + 2e-3));
  CHECK(out.weights[0] + out.weights[1] == doctest::Approx(1.0).epsilon(1e-12));

  // Collapsed covariance is clamped at the floor.
  MixtureXi narrow = two_comp_1d(0.5, -1, 1e-9, 1, 1);
  bool active2 = false;
  const MixtureXi out2 = mstep(suffstats_of(narrow), MixtureFloors{1e-4, 1e-4}, &active2);
  CHECK(active2);
  CHECK(out2.covs[0](0, 0) >= 1e-4 * (1.0 - 1e-9));
}

TEST_CASE("mstep rejects empty components") {
  MixtureSuffStats s;
  s.s0 = {1.0, 0.0};
  s.s1 = {vec1(0), vec1(0)};
  s.s2 = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
  CHECK_THROWS_AS(mstep(s, MixtureFloors{1e-3, 1e-6}), DegenerateComponent);
}

TEST_CASE("suffstat_expectation components") {
  const MixtureXi xi = two_comp_1d(0.5, -2, 1, 2, 1);
  const Vector x = vec1(0.7);
  const Vector r = responsibilities(xi, x);
  const MixtureSuffStats s = suffstat_expectation(xi, x);
  for (int j = 0; j < 2; ++j) {
    CHECK(s.s0[j] == doctest::Approx(r[j]).epsilon(1e-14));
    CHECK(s.s1[j][0] == doctest::Approx(r[j] * 0.7).epsilon(1e-14));
    CHECK(s.s2[j](0, 0) == doctest::Approx(r[j] * 0.49).epsilon(1e-14));
  }
  CHECK(s.s0[0] + s.s0[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("apply_update recursion identity") {
  const MixtureXi xi = two_comp_1d(0.4, -1, 0.8, 1.2, 1.1);
  const MixtureSuffStats theta = suffstats_of(xi);
  const MixtureFloors floors = default_floors(2, 1.1);
  const Vector x = vec1(0.3);
  const double step = 0.05;
  const MixtureSuffStats h = em_update_field(theta, x, floors);
  const MixtureSuffStats next = apply_update(theta, h, step);
  const MixtureSuffStats sx = suffstat_expectation(mstep(theta, floors), x);
  for (int j = 0; j < 2; ++j) {
    CHECK(next.s0[j] ==
          doctest::Approx((1 - step) * theta.s0[j] + step * sx.s0[j]).epsilon(1e-14));
    CHECK(next.s1[j][0] ==
          doctest::Approx((1 - step) * theta.s1[j][0] + step * sx.s1[j][0]).epsilon(1e-14));
    CHECK(next.s2[j](0, 0) ==
          doctest::Approx((1 - step) * theta.s2[j](0, 0) + step * sx.s2[j](0, 0))
              .epsilon(1e-14));
  }
}

TEST_CASE("batch em increases the average log-likelihood") {
  const TargetModel t = bimodal_target();
  RngStream rng(21);
  std::vector<Vector> data;
  for (int i = 0; i < 2000; ++i) data.push_back(t.sample(rng));

  MixtureXi xi = two_comp_1d(0.5, -0.5, 4.0, 0.5, 4.0);
  const MixtureFloors floors = default_floors(2, 4.0);
  double prev = avg_loglik(xi, data);
  for (int it = 0; it < 30; ++it) {
    MixtureSuffStats acc = suffstat_expectation(xi, data[0]);
    for (std::size_t i = 1; i < data.size(); ++i) {
      const MixtureSuffStats s = suffstat_expectation(xi, data[i]);
      for (std::size_t j = 0; j < acc.s0.size(); ++j) {
        acc.s0[j] += s.s0[j];
        acc.s1[j] += s.s1[j];
        acc.s2[j] += s.s2[j];
      }
    }
    const double n = static_cast<double>(data.size());
    for (std::size_t j = 0; j < acc.s0.size(); ++j) {
      acc.s0[j] /= n;
      acc.s1[j] /= n;
      acc.s2[j] /= n;
    }
    xi = mstep(acc, floors);
    const double cur = avg_loglik(xi, data);
    CHECK(cur >= prev - 1e-10);  // monotone ascent, floors inactive here
    prev = cur;
  }
  // The fit separates the two modes.
  CHECK(xi.means[0][0] * xi.means[1][0] < 0.0);
}

TEST_CASE("kl_estimate is near zero for the true mixture and positive otherwise") {
  const TargetModel t = bimodal_target();
  MixtureXi truth;
  truth.weights = t.weights();
  for (const auto& c : t.components()) {
    truth.means.push_back(c.mean);
    truth.covs.push_back(c.lower * c.lower.transpose());
  }
  RngStream rng(8);
  const KlEstimate zero = kl_estimate(t, truth, 20000, rng);
  CHECK(std::abs(zero.estimate) < 1e-10);

  const MixtureXi off = two_comp_1d(0.5, -2, 0.8, 3, 1.2);
  const KlEstimate pos = kl_estimate(t, off, 50000, rng);
  CHECK(pos.estimate > 3.0 * pos.std_error);
  CHECK(pos.std_error > 0.0);
}

TEST_CASE("kl_estimate matches the closed form for shifted gaussians") {
  // KL(N(0,1) || N(1,1)) = 1/2.
  const TargetModel t = TargetModel::gaussian(Vector::Zero(1), Matrix::Identity(1, 1));
  MixtureXi xi;
  xi.weights = {1.0};
  xi.means = {vec1(1)};
  xi.covs = {Matrix::Identity(1, 1)};
  RngStream rng(15);
  const KlEstimate kl = kl_estimate(t, xi, 200000, rng);
  CHECK(std::abs(kl.estimate - 0.5) < 3.0 * kl.std_error);
  CHECK(kl.std_error < 0.01);
}

TEST_CASE("online em from exact target draws reduces the kl divergence") {
  const TargetModel t = bimodal_target();
  MixtureXi xi = two_comp_1d(0.5, -1, 3.0, 1, 3.0);
  const MixtureFloors floors = default_floors(2, 3.0);
  MixtureSuffStats theta = suffstats_of(xi);
  RngStream rng(33);
  RngStream kl_rng(34);
  const double init_kl = kl_estimate(t, mstep(theta, floors), 20000, kl_rng).estimate;
  for (long k = 1; k <= 20000; ++k) {
    const double step = 0.5 / std::pow(static_cast<double>(k), 0.7);
    theta = apply_update(theta, em_update_field(theta, t.sample(rng), floors), step);
  }
  const KlEstimate fin = kl_estimate(t, mstep(theta, floors), 20000, kl_rng);
  CHECK(fin.estimate < 0.5 * init_kl);
  CHECK(fin.estimate < 0.05);
}

TEST_CASE("default_floors formulas") {
  const MixtureFloors f = default_floors(4, 2.5);
  CHECK(f.weight_floor == doctest::Approx(1e-3 / 4.0).epsilon(1e-14));
  CHECK(f.cov_floor == doctest::Approx(1e-4 * 2.5).epsilon(1e-14));
}

TEST_CASE("mixture_sample empirical moments") {
  const MixtureXi xi = two_comp_1d(0.3, -2, 1, 2, 1);
  RngStream rng(44);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += mixture_sample(xi, rng)[0];
  // E X = 0.3 * (-2) + 0.7 * 2 = 0.8.
  CHECK(sum / n == doctest::Approx(0.8).epsilon(0.03));
}
