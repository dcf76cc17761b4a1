#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace adaptmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// All randomness flows through explicitly-passed streams; no global state.
using RngStream = std::mt19937_64;

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateComponent : std::runtime_error {
  explicit DegenerateComponent(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientLength : std::runtime_error {
  explicit InsufficientLength(const std::string& what) : std::runtime_error(what) {}
};

// Uniform draw on [0, 1) with 53 bits of precision.
inline double draw_uniform(RngStream& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via the polar method. The second variate of each accepted
// pair is discarded so the function is stateless and draws are reproducible
// given the stream position.
inline double draw_normal(RngStream& rng) {
  for (;;) {
    const double u = 2.0 * draw_uniform(rng) - 1.0;
    const double v = 2.0 * draw_uniform(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

inline Vector draw_normal_vec(RngStream& rng, Eigen::Index n) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = draw_normal(rng);
  return z;
}

inline constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace adaptmc
