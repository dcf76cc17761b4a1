#include "adaptmc/adapt_nsrwm.hpp"

namespace adaptmc {

namespace {

Matrix gamma_inverse(const AdaptParamNsrwm& theta) {
  const Matrix L = cholesky_lower(theta.gamma);
  const Matrix linv = L.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(theta.gamma.rows(), theta.gamma.cols()));
  return linv.transpose() * linv;
}

}  // namespace

AdaptParamNsrwm update_field(const AdaptParamNsrwm& theta, const Vector& x) {
  const Vector d = x - theta.mu;
  return AdaptParamNsrwm{d, d * d.transpose() - theta.gamma};
}

AdaptParamNsrwm mean_field(const AdaptParamNsrwm& theta, const TargetModel& t) {
  const Vector d = t.mean_pi() - theta.mu;
  return AdaptParamNsrwm{d, d * d.transpose() + t.cov_pi() - theta.gamma};
}

AdaptParamNsrwm apply_update(const AdaptParamNsrwm& theta,
                             const AdaptParamNsrwm& increment, double step) {
  AdaptParamNsrwm out;
  out.mu = theta.mu + step * increment.mu;
  out.gamma = theta.gamma + step * increment.gamma;
  out.gamma = 0.5 * (out.gamma + out.gamma.transpose()).eval();
  return out;
}

double lyapunov(const AdaptParamNsrwm& theta, const TargetModel& t) {
  const Matrix L = cholesky_lower(theta.gamma);
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) log_det += 2.0 * std::log(L(i, i));
  const Vector u = theta.mu - t.mean_pi();
  const Vector w = L.triangularView<Eigen::Lower>().solve(u);
  const Matrix s = L.triangularView<Eigen::Lower>().solve(t.cov_pi());
  const Matrix ginv_gpi = L.transpose().triangularView<Eigen::Upper>().solve(s);
  return log_det + w.squaredNorm() + ginv_gpi.trace();
}

double lyapunov_decay(const AdaptParamNsrwm& theta, const TargetModel& t) {
  const Matrix ginv = gamma_inverse(theta);
  const Vector u = theta.mu - t.mean_pi();
  const double quad = u.dot(ginv * u);
  const Matrix d = theta.gamma - t.cov_pi();
  const Matrix gd = ginv * d;
  return -2.0 * quad - (gd * gd).trace() - quad * quad;
}

SrwmKernel kernel_of(const AdaptParamNsrwm& theta, const TargetModel& t, double lambda) {
  return make_srwm_kernel(t, lambda * theta.gamma);
}

double default_srwm_lambda(Eigen::Index dim) {
  return 2.38 * 2.38 / static_cast<double>(dim);
}

}  // namespace adaptmc
