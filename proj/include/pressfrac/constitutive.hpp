/** @file constitutive.hpp
 *  @brief Pointwise material laws: dissipation and indicator functions,
 *         degradation functions, strain-energy splits with stress and
 *         consistent tangent, and the derived constants c0, m, sigma_c.
 *
 *  All operations are pure functions; plane strain is assumed
 *  throughout.  Voigt convention: strain [exx, eyy, gxy] with
 *  engineering shear, stress [sxx, syy, sxy].
 */
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pressfrac {

enum class Dissipation { AT1, AT2 };
enum class Indicator { linear, quadratic, two_d_minus_d2 };
enum class Degradation { quadratic, cohesive };
enum class Split { none, spectral };
enum class VirtualCrack { UVC, LVC };

/// Elastic + fracture constants.  Units: MPa, mm, mJ.
struct Material {
  double E = 0.0;        ///< Young's modulus (MPa)
  double nu = 0.0;       ///< Poisson's ratio
  double Gc = 0.0;       ///< critical fracture energy (mJ/mm^2)
  double ell = 0.0;      ///< regularization length (mm)
  double psi_c = 0.0;    ///< nucleation energy (mJ/mm^3), cohesive model only
  double xi = 0.0;       ///< residual stiffness
  double p_shape = 1.0;  ///< cohesive shape parameter
  double eta = 0.0;      ///< viscosity (mJ s / mm^3)

  void validate(bool cohesive) const {
    if (E <= 0.0) throw std::invalid_argument("Material: E must be positive");
    if (nu < 0.0 || nu >= 0.5) throw std::invalid_argument("Material: nu must be in [0, 0.5)");
    if (Gc <= 0.0) throw std::invalid_argument("Material: Gc must be positive");
    if (ell <= 0.0) throw std::invalid_argument("Material: ell must be positive");
    if (xi < 0.0) throw std::invalid_argument("Material: xi must be nonnegative");
    if (eta < 0.0) throw std::invalid_argument("Material: eta must be nonnegative");
    if (cohesive && psi_c <= 0.0)
      throw std::invalid_argument("Material: psi_c must be positive for the cohesive model");
  }

  double lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double mu() const { return E / (2.0 + 2.0 * nu); }
  double Eprime() const { return E / (1.0 - nu * nu); }
};

/// Model selectors, immutable per run.
struct Formulation {
  VirtualCrack virtual_crack = VirtualCrack::UVC;
  Indicator indicator = Indicator::linear;
  Dissipation dissipation = Dissipation::AT1;
  Degradation degradation = Degradation::quadratic;
  Split split = Split::none;

  void validate() const {
    // The cohesive degradation is only defined against linear dissipation.
    if (degradation == Degradation::cohesive && dissipation != Dissipation::AT1)
      throw std::invalid_argument("Formulation: cohesive degradation requires AT1 dissipation");
  }
};

namespace detail {
inline void check_damage_range(double d, const char* who) {
  if (!(d >= 0.0 && d <= 1.0))
    throw std::invalid_argument(std::string(who) + ": damage must lie in [0,1], got " +
                                std::to_string(d));
}
}  // namespace detail

/// Local dissipation alpha(d): AT1 -> d, AT2 -> d^2.
inline double alpha(double d, Dissipation diss) {
  detail::check_damage_range(d, "alpha");
  return diss == Dissipation::AT1 ? d : d * d;
}

inline double alpha_prime(double d, Dissipation diss) {
  detail::check_damage_range(d, "alpha_prime");
  return diss == Dissipation::AT1 ? 1.0 : 2.0 * d;
}

inline double alpha_second(Dissipation diss) {
  return diss == Dissipation::AT1 ? 0.0 : 2.0;
}

/// Normalization c0 = 4 \int_0^1 sqrt(alpha(s)) ds: AT1 -> 8/3, AT2 -> 2.
inline double c0(Dissipation diss) {
  return diss == Dissipation::AT1 ? 8.0 / 3.0 : 2.0;
}

struct IndicatorValue {
  double I;
  double Ip;   ///< dI/dd
  double Ipp;  ///< d2I/dd2 (constant for all supported kinds)
};

/// Indicator I(d) with I(0)=0, I(1)=1, monotone increasing.
inline IndicatorValue indicator(double d, Indicator kind) {
  detail::check_damage_range(d, "indicator");
  switch (kind) {
    case Indicator::linear:
      return {d, 1.0, 0.0};
    case Indicator::quadratic:
      return {d * d, 2.0 * d, 2.0};
    case Indicator::two_d_minus_d2:
      return {2.0 * d - d * d, 2.0 - 2.0 * d, -2.0};
  }
  throw std::logic_error("indicator: unknown kind");
}

/// Cohesive slope parameter m = Gc / (c0 * ell * psi_c).
inline double m_param(const Material& mat, Dissipation diss) {
  if (mat.psi_c <= 0.0) throw std::invalid_argument("m_param: psi_c must be positive");
  return mat.Gc / (c0(diss) * mat.ell * mat.psi_c);
}

struct DegradationValue {
  double g;
  double gp;   ///< dg/dd
  double gpp;  ///< d2g/dd2
};

/// Stiffness degradation g(d).  Quadratic: xi + (1-xi)(1-d)^2.
/// Cohesive (quasi-quadratic): xi + (1-xi)(1-d)^2 / ((1-d)^2 + m d (1 + p d)).
inline DegradationValue degradation(double d, const Material& mat, const Formulation& form) {
  detail::check_damage_range(d, "degradation");
  const double xi = mat.xi;
  if (form.degradation == Degradation::quadratic) {
    const double omd = 1.0 - d;
    return {xi + (1.0 - xi) * omd * omd, -2.0 * (1.0 - xi) * omd, 2.0 * (1.0 - xi)};
  }
  if (mat.psi_c <= 0.0)
    throw std::invalid_argument("degradation: cohesive model requires psi_c > 0");
  const double m = m_param(mat, form.dissipation);
  const double pp = mat.p_shape;
  const double omd = 1.0 - d;
  const double N = omd * omd;
  const double Np = -2.0 * omd;
  const double Npp = 2.0;
  const double D = N + m * d * (1.0 + pp * d);
  const double Dp = Np + m * (1.0 + 2.0 * pp * d);
  const double Dpp = Npp + 2.0 * m * pp;
  const double h = N / D;
  const double hp = (Np * D - N * Dp) / (D * D);
  const double hpp = (Npp * D - N * Dpp) / (D * D) - 2.0 * Dp * (Np * D - N * Dp) / (D * D * D);
  return {xi + (1.0 - xi) * h, (1.0 - xi) * hp, (1.0 - xi) * hpp};
}

/// Plane-strain cohesive strength sigma_c = sqrt(2 E psi_c / (1 - nu^2)).
inline double sigma_c(const Material& mat) {
  if (mat.psi_c <= 0.0) throw std::invalid_argument("sigma_c: psi_c must be positive");
  return std::sqrt(2.0 * mat.E * mat.psi_c / (1.0 - mat.nu * mat.nu));
}

/// Result of the pointwise energy split at a given strain and damage.
struct SplitResult {
  double psi_plus = 0.0;            ///< active (degraded) energy density
  double psi_minus = 0.0;           ///< inactive energy density
  Eigen::Matrix2d sigma;            ///< stress at the given damage (MPa)
  Eigen::Matrix2d dpsi_plus_deps;   ///< undegraded active stress
  Eigen::Matrix3d tangent;          ///< d sigma / d eps, Voigt, engineering shear
};

namespace detail {

inline double macaulay_pos(double x) { return x > 0.0 ? x : 0.0; }
inline double macaulay_neg(double x) { return x < 0.0 ? x : 0.0; }
// Subgradient convention: derivative of <x>_+ is 0 at x = 0.
inline double heaviside_pos(double x) { return x > 0.0 ? 1.0 : 0.0; }
inline double heaviside_neg(double x) { return x < 0.0 ? 1.0 : 0.0; }

inline Eigen::Vector3d voigt_stress(const Eigen::Matrix2d& A) {
  return {A(0, 0), A(1, 1), A(0, 1)};
}

}  // namespace detail

/// Energy split, stress and consistent tangent at strain eps and damage d.
///
/// split = none:    psi+ = (1/2) eps:C:eps, psi- = 0.
/// split = spectral (Miehe): psi± = (1/2) lambda <tr eps>±^2 + mu eps±:eps±
/// with eps± assembled from the signed eigenvalues of eps.  At repeated
/// eigenvalues the tangent uses the limit value of the eigenvalue-difference
/// quotient, which keeps all entries finite.
inline SplitResult split_energy(const Eigen::Matrix2d& eps, double d, const Material& mat,
                                const Formulation& form) {
  detail::check_damage_range(d, "split_energy");
  if (std::abs(eps(0, 1) - eps(1, 0)) >
      1e-12 * (1.0 + eps.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("split_energy: strain must be symmetric");

  const double lam = mat.lambda();
  const double mu = mat.mu();
  const double g = degradation(d, mat, form).g;
  const double tr = eps(0, 0) + eps(1, 1);  // eps_zz = 0 under plane strain

  SplitResult out;
  const Eigen::Vector3d iv(1.0, 1.0, 0.0);

  if (form.split == Split::none) {
    out.psi_plus = 0.5 * lam * tr * tr + mu * (eps.array() * eps.array()).sum();
    out.psi_minus = 0.0;
    out.dpsi_plus_deps = lam * tr * Eigen::Matrix2d::Identity() + 2.0 * mu * eps;
    out.sigma = g * out.dpsi_plus_deps;
    Eigen::Matrix3d C;
    C << lam + 2.0 * mu, lam, 0.0,
         lam, lam + 2.0 * mu, 0.0,
         0.0, 0.0, mu;
    out.tangent = g * C;
    return out;
  }

  // Spectral split.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
  es.computeDirect(0.5 * (eps + eps.transpose()));
  const double l1 = es.eigenvalues()(0);
  const double l2 = es.eigenvalues()(1);
  const Eigen::Vector2d n1 = es.eigenvectors().col(0);
  const Eigen::Vector2d n2 = es.eigenvectors().col(1);

  const Eigen::Matrix2d M1 = n1 * n1.transpose();
  const Eigen::Matrix2d M2 = n2 * n2.transpose();
  const Eigen::Matrix2d S = 0.5 * (n1 * n2.transpose() + n2 * n1.transpose());

  const Eigen::Matrix2d eps_pos = detail::macaulay_pos(l1) * M1 + detail::macaulay_pos(l2) * M2;
  const Eigen::Matrix2d eps_neg = detail::macaulay_neg(l1) * M1 + detail::macaulay_neg(l2) * M2;

  const double trp = detail::macaulay_pos(tr);
  const double trn = detail::macaulay_neg(tr);

  out.psi_plus = 0.5 * lam * trp * trp + mu * (eps_pos.array() * eps_pos.array()).sum();
  out.psi_minus = 0.5 * lam * trn * trn + mu * (eps_neg.array() * eps_neg.array()).sum();
  out.dpsi_plus_deps = lam * trp * Eigen::Matrix2d::Identity() + 2.0 * mu * eps_pos;
  const Eigen::Matrix2d sig_neg = lam * trn * Eigen::Matrix2d::Identity() + 2.0 * mu * eps_neg;
  out.sigma = g * out.dpsi_plus_deps + sig_neg;

  // Projector derivatives d eps± / d eps in Voigt form.
  const double f1p = detail::heaviside_pos(l1), f2p = detail::heaviside_pos(l2);
  const double f1n = detail::heaviside_neg(l1), f2n = detail::heaviside_neg(l2);
  const double eig_scale = std::max({std::abs(l1), std::abs(l2), 1e-30});
  double theta_pos, theta_neg;
  if (std::abs(l1 - l2) > 1e-10 * eig_scale) {
    theta_pos = (detail::macaulay_pos(l1) - detail::macaulay_pos(l2)) / (l1 - l2);
    theta_neg = (detail::macaulay_neg(l1) - detail::macaulay_neg(l2)) / (l1 - l2);
  } else {
    theta_pos = 0.5 * (f1p + f2p);
    theta_neg = 0.5 * (f1n + f2n);
  }

  const Eigen::Vector3d m1 = detail::voigt_stress(M1);
  const Eigen::Vector3d m2 = detail::voigt_stress(M2);
  const Eigen::Vector3d sv = detail::voigt_stress(S);

  const Eigen::Matrix3d Ppos =
      f1p * m1 * m1.transpose() + f2p * m2 * m2.transpose() + 2.0 * theta_pos * sv * sv.transpose();
  const Eigen::Matrix3d Pneg =
      f1n * m1 * m1.transpose() + f2n * m2 * m2.transpose() + 2.0 * theta_neg * sv * sv.transpose();

  const Eigen::Matrix3d Cpos =
      lam * detail::heaviside_pos(tr) * iv * iv.transpose() + 2.0 * mu * Ppos;
  const Eigen::Matrix3d Cneg =
      lam * detail::heaviside_neg(tr) * iv * iv.transpose() + 2.0 * mu * Pneg;
  out.tangent = g * Cpos + Cneg;
  return out;
}

}  // namespace pressfrac
