// Shared test utilities: deterministic RNG, randomized mesh states, and
// finite-difference checks for residual/Jacobian and energy/residual pairs.
#pragma once

#include <Eigen/Dense>
#include <random>

#include "pressfrac/fem.hpp"
#include "pressfrac/mesh.hpp"

namespace testutil {

inline std::mt19937& rng() {
  static std::mt19937 gen(20260826u);
  return gen;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Eigen::VectorXd random_vector(int n, double scale) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
  return v;
}

/// Random admissible damage field in (margin, 1 - margin).
inline Eigen::VectorXd random_damage(int n, double margin = 0.05) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(margin, 1.0 - margin);
  return v;
}

/// Central finite difference of a scalar functional along direction dir.
template <class F>
inline double directional_fd(const F& f, const Eigen::VectorXd& x, const Eigen::VectorXd& dir,
                             double h) {
  return (f(x + h * dir) - f(x - h * dir)) / (2.0 * h);
}

/// Max relative error between two values with an absolute floor.
inline double rel_err(double got, double want, double floor_scale) {
  return std::abs(got - want) / std::max(std::abs(want), floor_scale);
}

}  // namespace testutil
