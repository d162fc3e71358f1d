/** @file quadrature1d.hpp
 *  @brief Adaptive 1D quadrature (Gauss-Kronrod 7-15) used by the
 *         analytic fracture-mechanics routines.
 */
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pressfrac {

namespace detail {

// Nodes/weights of the 15-point Kronrod rule on [-1,1]; the embedded
// 7-point Gauss rule uses the odd-indexed nodes.
inline constexpr double gk15_nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,
    0.741531185599394,  0.864864423359769,  0.949107912342759,
    0.991455371120813};

inline constexpr double gk15_weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};

inline constexpr double g7_weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct GKResult {
  double value;
  double error;
  double magnitude;  ///< integral of |f|, the rounding-noise scale
};

template <class F>
GKResult gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0, mag = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(c + h * gk15_nodes[i]);
    kron += gk15_weights[i] * fx;
    mag += gk15_weights[i] * std::abs(fx);
    if (i % 2 == 1) gauss += g7_weights[(i - 1) / 2] * fx;
  }
  kron *= h;
  gauss *= h;
  mag *= h;
  return {kron, std::abs(kron - gauss), mag};
}

template <class F>
double adaptive_gk(const F& f, double a, double b, double abs_tol, int depth) {
  GKResult r = gk15(f, a, b);
  // Never chase tolerances below the rounding noise of the two embedded
  // rules (a safe multiple of eps times the integral of |f|); without
  // this floor an unreachable tolerance degenerates into 2^depth
  // subdivisions.
  const double floor_tol = 64.0 * std::numeric_limits<double>::epsilon() * r.magnitude;
  if (r.error <= std::max(abs_tol, floor_tol) || depth <= 0) return r.value;
  const double c = 0.5 * (a + b);
  if (!(a < c && c < b)) return r.value;  // interval at machine resolution
  return adaptive_gk(f, a, c, 0.5 * abs_tol, depth - 1) +
         adaptive_gk(f, c, b, 0.5 * abs_tol, depth - 1);
}

}  // namespace detail

/// Adaptive quadrature of f over [a,b] to an absolute tolerance.
/// Handles integrable endpoint singularities through bisection; the
/// recursion depth bounds the work on genuinely divergent integrands.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-12,
                 int max_depth = 48) {
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate: empty interval");
  }
  return detail::adaptive_gk(f, a, b, abs_tol, max_depth);
}

/// Same, but the integrand is singular (or merely nasty) at the listed
/// interior points; the interval is split there first.
template <class F>
double integrate_split(const F& f, double a, double b,
                       const std::vector<double>& split_points,
                       double abs_tol = 1e-12, int max_depth = 48) {
  std::vector<double> pts{a};
  for (double s : split_points)
    if (s > a && s < b) pts.push_back(s);
  pts.push_back(b);
  double total = 0.0;
  const double tol_each = abs_tol / static_cast<double>(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += detail::adaptive_gk(f, pts[i], pts[i + 1], tol_each, max_depth);
  return total;
}

}  // namespace pressfrac
