#pragma once

#include "adaptmc/common.hpp"

#include <utility>

namespace adaptmc {

// Gaussian in sampling form: mean + L z with L lower-triangular, L Lᵀ = cov.
struct FactoredGaussian {
  Vector mean;
  Matrix lower;

  Eigen::Index dim() const { return mean.size(); }
};

bool is_symmetric(const Matrix& m, double tol = 1e-12);

// Cholesky factor of a symmetric positive definite matrix. Throws
// NotPositiveDefinite when a pivot falls at or below 1e-300, which callers
// (the controller) must treat as the parameter leaving the positive cone.
Matrix cholesky_lower(const Matrix& m);

FactoredGaussian factorize(const Vector& mean, const Matrix& cov);

Vector mvn_sample(const FactoredGaussian& g, RngStream& rng);

double mvn_logpdf(const FactoredGaussian& g, const Vector& x);

// Extreme eigenvalues (lambda_min, lambda_max) of a symmetric matrix.
std::pair<double, double> eigen_bounds(const Matrix& m);

}  // namespace adaptmc
