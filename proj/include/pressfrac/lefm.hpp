/** @file lefm.hpp
 *  @brief Analytic plane-strain reference solutions for a straight crack
 *         of half-length a in an infinite plate under an internal
 *         pressure profile p(x): Sneddon-Lowengrub aperture, stress
 *         intensity factor, energy release rate, critical pressure, and
 *         the translating near-tip ("surfing") displacement field.
 */
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "pressfrac/quadrature1d.hpp"

namespace pressfrac::lefm {

inline constexpr double kPi = 3.14159265358979323846;

/// Plane-strain elastic constants derived from (E, nu).
struct PlaneStrainConstants {
  double E;
  double nu;

  PlaneStrainConstants(double E_, double nu_) : E(E_), nu(nu_) {
    if (E <= 0.0) throw std::invalid_argument("PlaneStrainConstants: E must be positive");
    if (nu < 0.0 || nu >= 0.5)
      throw std::invalid_argument("PlaneStrainConstants: nu must be in [0, 0.5)");
  }

  double Eprime() const { return E / (1.0 - nu * nu); }
  double mu() const { return E / (2.0 + 2.0 * nu); }
  double kolosov() const { return 3.0 - 4.0 * nu; }
};

/// Pressure profile on the crack faces, restricted to symmetric loads
/// p(x) = p(-x); both crack tips then see the same energy release rate.
class PressureProfile {
 public:
  explicit PressureProfile(std::function<double(double)> p, double half_length)
      : p_(std::move(p)), a_(half_length) {
    if (a_ <= 0.0) throw std::invalid_argument("PressureProfile: a must be positive");
    // Sampled symmetry check; asymmetric profiles are not supported.
    for (int i = 1; i <= 7; ++i) {
      const double x = a_ * i / 8.0;
      const double pl = p_(-x), pr = p_(x);
      const double scale = std::max({std::abs(pl), std::abs(pr), 1e-30});
      if (std::abs(pl - pr) > 1e-10 * scale)
        throw std::invalid_argument("PressureProfile: profile must satisfy p(x) = p(-x)");
    }
  }

  static PressureProfile uniform(double p, double a) {
    return PressureProfile([p](double) { return p; }, a);
  }

  double operator()(double x) const { return p_(x); }
  double half_length() const { return a_; }

 private:
  std::function<double(double)> p_;
  double a_;
};

/// Sneddon-Lowengrub convolution kernel
///   Z(r,s) = log| (sqrt(1-r^2)+sqrt(1-s^2)) / (sqrt(1-r^2)-sqrt(1-s^2)) |.
/// Singular on the diagonal r = s, which callers must avoid.
inline double kernel_Z(double r, double s) {
  if (!(r >= 0.0 && r < 1.0 && s > 0.0 && s < 1.0))
    throw std::invalid_argument("kernel_Z: r, s must lie in (0,1)");
  if (r == s) throw std::invalid_argument("kernel_Z: singular at r == s");
  const double qr = std::sqrt(1.0 - r * r);
  const double qs = std::sqrt(1.0 - s * s);
  // qr - qs = (s^2 - r^2) / (qr + qs) avoids cancellation for r,s both
  // near 0 (or near each other), where the direct difference underflows.
  return std::log((qr + qs) * (qr + qs) / std::abs(s * s - r * r));
}

/// Crack aperture w(x) = (4a / pi E') \int_0^1 p(sa) Z(|x|/a, s) ds.
/// The integrand has an integrable log singularity at s = |x|/a, and a
/// log divergence at s -> |x|/a handled by splitting the interval there.
inline double aperture_sneddon(const PressureProfile& p, double a,
                               const PlaneStrainConstants& c, double x) {
  if (std::abs(x) >= a)
    throw std::invalid_argument("aperture_sneddon: |x| must be less than a");
  const double r = std::abs(x) / a;
  // Scale for the absolute quadrature tolerance.
  const double p_scale = std::max(std::abs(p(0.0)), std::abs(p(0.5 * a))) + 1e-30;
  const double tol = 1e-10 * p_scale;
  auto f = [&](double s) {
    if (s <= 0.0 || s >= 1.0 || s == r) return 0.0;  // measure-zero guards
    return p(s * a) * kernel_Z(r, s);
  };
  double integral;
  if (r > 0.0)
    integral = integrate_split(f, 0.0, 1.0, {r}, tol);
  else
    integral = integrate(f, 0.0, 1.0, tol);
  return 4.0 * a / (kPi * c.Eprime()) * integral;
}

/// Mode-I stress intensity factor
///   K_I = 2 sqrt(a/pi) \int_0^1 p(as) / sqrt(1-s^2) ds,
/// evaluated with the substitution s = sin(theta) that removes the
/// endpoint singularity.
inline double sif(const PressureProfile& p, double a) {
  if (a <= 0.0) throw std::invalid_argument("sif: a must be positive");
  const double p_scale = std::max(std::abs(p(0.0)), std::abs(p(0.5 * a))) + 1e-30;
  auto f = [&](double theta) { return p(a * std::sin(theta)); };
  const double integral = integrate(f, 0.0, 0.5 * kPi, 1e-12 * p_scale);
  if (!std::isfinite(integral)) throw std::runtime_error("sif: divergent pressure profile");
  return 2.0 * std::sqrt(a / kPi) * integral;
}

/// Single-tip energy release rate from the double-integral form
///   2G = (8a / pi E') \iint p(ar) p(as) / (sqrt(1-r^2) sqrt(1-s^2)) dr ds,
/// evaluated on a tensor-product grid after r = sin(u), s = sin(v).
/// (The appendix expression counts both crack tips; a factor of two is
/// removed here so that G = K_I^2 / E' holds, which tests verify.)
inline double energy_release_rate(const PressureProfile& p, double a,
                                  const PlaneStrainConstants& c) {
  if (a <= 0.0) throw std::invalid_argument("energy_release_rate: a must be positive");
  const double p_scale = std::max(std::abs(p(0.0)), std::abs(p(0.5 * a))) + 1e-30;
  const double tol = 1e-12 * p_scale * p_scale;
  auto outer = [&](double u) {
    auto inner = [&](double v) { return p(a * std::sin(u)) * p(a * std::sin(v)); };
    return integrate(inner, 0.0, 0.5 * kPi, tol, 24);
  };
  const double double_integral = integrate(outer, 0.0, 0.5 * kPi, tol, 24);
  const double two_G = 8.0 * a / (kPi * c.Eprime()) * double_integral;
  return 0.5 * two_G;
}

struct CriticalPressure {
  double p_c;      ///< pressure at which G reaches Gc for a uniform load
  double surfing;  ///< p_c / 2, the load used by the steady-growth benchmark
};

/// Critical uniform pressure p_c = sqrt(Gc E' / (pi a)) from G(p_c) = Gc.
inline CriticalPressure critical_pressure_uniform(double a, const PlaneStrainConstants& c,
                                                  double Gc) {
  if (a <= 0.0 || Gc <= 0.0)
    throw std::invalid_argument("critical_pressure_uniform: a and Gc must be positive");
  const double p_c = std::sqrt(Gc * c.Eprime() / (kPi * a));
  return {p_c, 0.5 * p_c};
}

struct Vec2 {
  double x = 0.0, y = 0.0;
};

/// Translating mode-I near-tip displacement imposed as the surfing
/// boundary condition.  Only the y-component is prescribed:
///   U_y = sqrt(Gc E') / (2 mu) * sqrt(r / 2 pi) * (kappa - cos th) * sin(th/2)
/// with (r, th) taken about the moving origin (Vt, 0).
inline Vec2 surfing_displacement(double x, double y, double t, double V,
                                 const PlaneStrainConstants& c, double Gc) {
  const double dx = x - V * t;
  const double r = std::hypot(dx, y);
  if (r == 0.0) throw std::invalid_argument("surfing_displacement: singular at the moving origin");
  const double theta = std::atan2(y, dx);
  const double amp = std::sqrt(Gc * c.Eprime()) / (2.0 * c.mu());
  Vec2 u;
  u.x = 0.0;
  u.y = amp * std::sqrt(r / (2.0 * kPi)) * (c.kolosov() - std::cos(theta)) *
        std::sin(0.5 * theta);
  return u;
}

}  // namespace pressfrac::lefm
