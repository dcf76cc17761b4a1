#include "adaptmc/kernels.hpp"

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

TargetModel std_normal_1d() {
  return TargetModel::gaussian(Vector::Zero(1), Matrix::Identity(1, 1));
}

// Proposal with the safeguard equal to the single adaptive component, so the
// effective density is that Gaussian for any iota.
MixtureProposal plain_gaussian_proposal(double mean, double var, double iota) {
  Vector m(1);
  m << mean;
  Matrix c(1, 1);
  c << var;
  const FactoredGaussian g = factorize(m, c);
  return MixtureProposal{{1.0}, {g}, g, iota};
}

}  // namespace

TEST_CASE("srwm_log_accept closed forms") {
  const TargetModel t = std_normal_1d();
  // Uphill move accepts with probability one.
  CHECK(srwm_log_accept(t, vec1(1), vec1(0)) == 0.0);
  // Downhill by log pi(0) - log pi(1) = 1/2.
  CHECK(srwm_log_accept(t, vec1(0), vec1(1)) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("srwm acceptance satisfies detailed balance pointwise") {
  Vector mu(2);
  mu << 0.5, -1;
  Matrix cov(2, 2);
  cov << 1.5, 0.4, 0.4, 0.8;
  const TargetModel t = TargetModel::gaussian(mu, cov);
  Matrix inc(2, 2);
  inc << 0.7, 0.1, 0.1, 0.5;
  const FactoredGaussian q = factorize(Vector::Zero(2), inc);
  RngStream rng(31);
  for (int it = 0; it < 200; ++it) {
    const Vector x = mu + 2.0 * draw_normal_vec(rng, 2);
    const Vector y = mu + 2.0 * draw_normal_vec(rng, 2);
    const double lhs = t.log_density(x) + mvn_logpdf(q, (y - x).eval()) +
                       srwm_log_accept(t, x, y);
    const double rhs = t.log_density(y) + mvn_logpdf(q, (x - y).eval()) +
                       srwm_log_accept(t, y, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("discretized srwm kernel leaves the discretized target invariant") {
  const TargetModel t = std_normal_1d();
  const int n = 161;
  const double lo = -8.0, hi = 8.0;
  const double h = (hi - lo) / (n - 1);
  std::vector<double> grid(n), pi(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    grid[i] = lo + i * h;
    pi[i] = std::exp(t.log_density(vec1(grid[i])));
    z += pi[i];
  }
  for (double& p : pi) p /= z;

  const FactoredGaussian q = factorize(Vector::Zero(1), Matrix::Identity(1, 1));
  // Row-stochastic discretization: off-diagonal mass h q(dx) alpha, remainder
  // on the diagonal. Detailed balance of the acceptance rule makes the
  // discretized target exactly invariant.
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double away = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double move =
          h * std::exp(mvn_logpdf(q, vec1(grid[j] - grid[i])) +
                       srwm_log_accept(t, vec1(grid[i]), vec1(grid[j])));
      out[j] += pi[i] * move;
      away += move;
    }
    out[i] += pi[i] * (1.0 - away);
  }
  double tv = 0.0;
  for (int i = 0; i < n; ++i) tv += std::abs(out[i] - pi[i]);
  CHECK(0.5 * tv < 1e-12);
}

TEST_CASE("srwm_step mechanics") {
  const TargetModel t = std_normal_1d();
  const SrwmKernel k = make_srwm_kernel(t, Matrix::Identity(1, 1));
  RngStream rng(2);
  Vector x = vec1(0.3);
  for (int it = 0; it < 500; ++it) {
    const StepOutcome out = srwm_step(k, x, rng);
    CHECK(out.log_accept <= 0.0);
    if (out.accepted) {
      CHECK(out.new_x == out.proposed_x);
    } else {
      CHECK(out.new_x == x);
    }
    x = out.new_x;
  }
}

TEST_CASE("one srwm step preserves the stationary distribution") {
  const TargetModel t = std_normal_1d();
  const SrwmKernel k = make_srwm_kernel(t, (Matrix(1, 1) << 2.0).finished());
  RngStream rng(13);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector x = t.sample(rng);
    const Vector y = srwm_step(k, x, rng).new_x;
    sum += y[0];
    sumsq += y[0] * y[0];
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sumsq / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("srwm_step golden value for fixed seed") {
  const TargetModel t = std_normal_1d();
  const SrwmKernel k = make_srwm_kernel(t, Matrix::Identity(1, 1));
  RngStream rng(42);
  const StepOutcome out = srwm_step(k, vec1(0), rng);
  // Locked after the first verified run; guards the draw order against drift.
  CHECK(out.proposed_x[0] == doctest::Approx(1.2938204232729367).epsilon(1e-14));
  CHECK_FALSE(out.accepted);
  CHECK(out.new_x[0] == 0.0);
}

TEST_CASE("mixture_proposal_logpdf matches a direct two-term sum") {
  Vector m1(1), m2(1), ms(1);
  m1 << -1;
  m2 << 2;
  ms << 0;
  const FactoredGaussian g1 = factorize(m1, (Matrix(1, 1) << 0.5).finished());
  const FactoredGaussian g2 = factorize(m2, (Matrix(1, 1) << 1.5).finished());
  const FactoredGaussian gs = factorize(ms, (Matrix(1, 1) << 9.0).finished());
  const MixtureProposal p{{0.3, 0.7}, {g1, g2}, gs, 0.1};
  for (double x : {-2.0, 0.0, 0.7, 3.5}) {
    const double direct =
        0.9 * (0.3 * std::exp(mvn_logpdf(g1, vec1(x))) +
               0.7 * std::exp(mvn_logpdf(g2, vec1(x)))) +
        0.1 * std::exp(mvn_logpdf(gs, vec1(x)));
    CHECK(mixture_proposal_logpdf(p, vec1(x)) ==
          doctest::Approx(std::log(direct)).epsilon(1e-12));
  }
}

TEST_CASE("mixture_proposal_logpdf integrates to one") {
  Vector m1(1), ms(1);
  m1 << 1;
  ms << -1;
  const MixtureProposal p{
      {1.0},
      {factorize(m1, (Matrix(1, 1) << 0.7).finished())},
      factorize(ms, (Matrix(1, 1) << 4.0).finished()),
      0.25};
  const double lo = -25.0, hi = 25.0;
  const int n = 100001;
  const double h = (hi - lo) / (n - 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * std::exp(mixture_proposal_logpdf(p, vec1(lo + i * h)));
  }
  CHECK(acc * h == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("mixture_proposal_sample empirical mean") {
  Vector m1(1), m2(1), ms(1);
  m1 << -2;
  m2 << 2;
  ms << 5;
  const MixtureProposal p{
      {0.5, 0.5},
      {factorize(m1, Matrix::Identity(1, 1)), factorize(m2, Matrix::Identity(1, 1))},
      factorize(ms, Matrix::Identity(1, 1)),
      0.1};
  // E X = 0.9 * 0 + 0.1 * 5 = 0.5.
  RngStream rng(77);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += mixture_proposal_sample(p, rng)[0];
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("imh_log_accept is zero when the proposal equals the target") {
  const TargetModel t = std_normal_1d();
  const MixtureProposal p = plain_gaussian_proposal(0.0, 1.0, 0.1);
  RngStream rng(5);
  for (int it = 0; it < 100; ++it) {
    const Vector x = draw_normal_vec(rng, 1);
    const Vector y = draw_normal_vec(rng, 1);
    CHECK(std::abs(imh_log_accept(t, p, x, y)) < 1e-12);
  }
}

TEST_CASE("imh acceptance satisfies detailed balance pointwise") {
  const TargetModel t = std_normal_1d();
  const MixtureProposal p = plain_gaussian_proposal(0.5, 4.0, 0.2);
  RngStream rng(19);
  for (int it = 0; it < 200; ++it) {
    const Vector x = 2.0 * draw_normal_vec(rng, 1);
    const Vector y = 2.0 * draw_normal_vec(rng, 1);
    const double lhs = t.log_density(x) + mixture_proposal_logpdf(p, y) +
                       imh_log_accept(t, p, x, y);
    const double rhs = t.log_density(y) + mixture_proposal_logpdf(p, x) +
                       imh_log_accept(t, p, y, x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("one imh step preserves the stationary distribution") {
  const TargetModel t = std_normal_1d();
  ImhKernel k{&t, plain_gaussian_proposal(0.0, 4.0, 0.1)};
  RngStream rng(29);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector x = t.sample(rng);
    const Vector y = imh_step(k, x, rng).new_x;
    sum += y[0];
    sumsq += y[0] * y[0];
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(sumsq / n - mean * mean == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("imh_step golden value for fixed seed") {
  const TargetModel t = std_normal_1d();
  ImhKernel k{&t, plain_gaussian_proposal(0.0, 4.0, 0.1)};
  RngStream rng(42);
  const StepOutcome out = imh_step(k, vec1(0.5), rng);
  CHECK(out.proposed_x[0] == doctest::Approx(1.4348162484857943).epsilon(1e-14));
  CHECK(out.accepted);
  CHECK(out.new_x[0] == doctest::Approx(1.4348162484857943).epsilon(1e-14));
}
