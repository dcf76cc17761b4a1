#include "adaptmc/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace adaptmc {

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol) return false;
  return true;
}

Matrix cholesky_lower(const Matrix& m) {
  if (!is_symmetric(m)) {
    throw std::invalid_argument("cholesky_lower: matrix not symmetric");
  }
  const Eigen::Index n = m.rows();
  Matrix lower = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = m(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (!(pivot > 1e-300)) {
      throw NotPositiveDefinite("cholesky pivot <= 1e-300 at index " + std::to_string(j));
    }
    lower(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / lower(j, j);
    }
  }
  return lower;
}

FactoredGaussian factorize(const Vector& mean, const Matrix& cov) {
  return FactoredGaussian{mean, cholesky_lower(cov)};
}

Vector mvn_sample(const FactoredGaussian& g, RngStream& rng) {
  const Vector z = draw_normal_vec(rng, g.dim());
  return g.mean + g.lower.triangularView<Eigen::Lower>() * z;
}

double mvn_logpdf(const FactoredGaussian& g, const Vector& x) {
  const Eigen::Index n = g.dim();
  const Vector u = g.lower.triangularView<Eigen::Lower>().solve(x - g.mean);
  double log_det_l = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det_l += std::log(g.lower(i, i));
  return -0.5 * static_cast<double>(n) * kLog2Pi - log_det_l - 0.5 * u.squaredNorm();
}

std::pair<double, double> eigen_bounds(const Matrix& m) {
  if (!is_symmetric(m)) {
    throw std::invalid_argument("eigen_bounds: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace adaptmc
