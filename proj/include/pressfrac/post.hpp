/** @file post.hpp
 *  @brief Post-processing: domain-form J-integral for pressurized
 *         phase-field cracks, crack aperture, reaction forces, and the
 *         mesh-corrected fracture energy.
 */
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pressfrac/fem.hpp"

namespace pressfrac {

/// Axis-aligned rectangle selecting the q = 1 node set of the domain
/// J-integral.  Nodes strictly inside get q = 1; the crack tip to probe
/// must lie inside and the rectangle must not touch the current damage
/// front ahead of the region of interest.
struct JDomain {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

  static JDomain centered(double cx, double cy, double width, double height) {
    return {cx - 0.5 * width, cx + 0.5 * width, cy - 0.5 * height, cy + 0.5 * height};
  }

  void validate() const {
    if (xmax <= xmin || ymax <= ymin)
      throw std::invalid_argument("JDomain: rectangle is empty");
  }
};

/// Nodal q field: 1 inside the rectangle, 0 on and outside it.
inline Eigen::VectorXd build_q(const Mesh& mesh, const JDomain& box) {
  box.validate();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(mesh.nodes.size());
  const double tol = 1e-9 * std::max(box.xmax - box.xmin, box.ymax - box.ymin);
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const Node& nd = mesh.nodes[i];
    if (nd.x > box.xmin + tol && nd.x < box.xmax - tol && nd.y > box.ymin + tol &&
        nd.y < box.ymax - tol)
      q[i] = 1.0;
  }
  return q;
}

/** Domain form of the J-integral for a crack advancing along `dir`
 *  (unit vector).  Translation invariance of the coupled density
 *  L = psi_e(eps, d) + p I'(d) u . grad d (elastic energy plus the
 *  crack-pressure potential, matching the momentum residual) gives the
 *  pressure-modified Eshelby tensor
 *
 *    T_p = (psi_e + p (grad d . u) I'(d)) I - grad(u)^T sigma
 *          - p I'(d) grad d (x) u
 *
 *  and J = - dir . int_Omega T_p grad q dV.  Fracture-energy terms are
 *  deliberately excluded so that J measures the crack driving force and
 *  compares against Gc.  For half models the caller doubles the result.
 */
inline double j_integral(const FemSystem& sys, const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                         const Eigen::VectorXd& q, double p, const Material& mat,
                         const Formulation& form,
                         const Eigen::Vector2d& dir = Eigen::Vector2d(1.0, 0.0)) {
  const Mesh& mesh = *sys.mesh;
  double J = 0.0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = el.nnodes();
    // Skip elements with uniformly constant q (grad q = 0).
    bool mixed = false;
    for (int a = 1; a < nn && !mixed; ++a) mixed = (q[el.n[a]] != q[el.n[0]]);
    if (!mixed) continue;
    for (const FemCache::QP& qp : sys.cache.elems[e].qps) {
      Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
      Eigen::Vector2d uq = Eigen::Vector2d::Zero();
      double dq = 0.0;
      Eigen::Vector2d grad_d = Eigen::Vector2d::Zero();
      Eigen::Vector2d grad_q = Eigen::Vector2d::Zero();
      for (int a = 0; a < nn; ++a) {
        const int n = el.n[a];
        const Eigen::Vector2d ua(u[2 * n], u[2 * n + 1]);
        grad_u += ua * qp.gradN.row(a);
        uq += qp.N[a] * ua;
        dq += qp.N[a] * d[n];
        grad_d += d[n] * qp.gradN.row(a).transpose();
        grad_q += q[n] * qp.gradN.row(a).transpose();
      }
      const double dq_cl = std::clamp(dq, 0.0, 1.0);
      const Eigen::Matrix2d eps = 0.5 * (grad_u + grad_u.transpose());
      const SplitResult sr = split_energy(eps, dq_cl, mat, form);
      const DegradationValue gv = degradation(dq_cl, mat, form);
      const IndicatorValue iv = indicator(dq_cl, form.indicator);
      const double psi_e = gv.g * sr.psi_plus + sr.psi_minus;
      const Eigen::Matrix2d Tp = (psi_e + p * grad_d.dot(uq) * iv.Ip) * Eigen::Matrix2d::Identity() -
                                 grad_u.transpose() * sr.sigma -
                                 p * iv.Ip * (grad_d * uq.transpose());
      J -= dir.dot(Tp * grad_q) * qp.dvol;
    }
  }
  return J;
}

/// Crack opening ("separation") of a phase-field crack,
/// s = -int u . grad I(d) dV, evaluated as an area integral.  For a bar
/// strip of unit height this equals the line integral along the axis;
/// symmetry factors are applied by the caller.
inline double crack_opening(const FemSystem& sys, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& d, const Formulation& form) {
  const Mesh& mesh = *sys.mesh;
  double s = 0.0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = el.nnodes();
    for (const FemCache::QP& qp : sys.cache.elems[e].qps) {
      Eigen::Vector2d uq = Eigen::Vector2d::Zero();
      double dq = 0.0;
      Eigen::Vector2d grad_d = Eigen::Vector2d::Zero();
      for (int a = 0; a < nn; ++a) {
        const int n = el.n[a];
        uq += qp.N[a] * Eigen::Vector2d(u[2 * n], u[2 * n + 1]);
        dq += qp.N[a] * d[n];
        grad_d += d[n] * qp.gradN.row(a).transpose();
      }
      const IndicatorValue iv = indicator(std::clamp(dq, 0.0, 1.0), form.indicator);
      s -= iv.Ip * uq.dot(grad_d) * qp.dvol;
    }
  }
  return s;
}

/// Crack opening along a mesh line: picks the row (axis = 0, integrate
/// along x at fixed y) or column (axis = 1) of nodes nearest `line_coord`
/// and evaluates s = -int u . dI(d) by nodal trapezoid,
/// s = -sum 1/2 (u_k + u_{k+1}) . e_axis (I_{k+1} - I_k).
/// `symmetry_factor` doubles the half-opening of symmetric half-models.
inline double aperture(const Mesh& mesh, const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                       const Formulation& form, int axis, double line_coord,
                       double symmetry_factor = 1.0) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("aperture: axis must be 0 or 1");
  const std::array<double, 4> bb = mesh.bounding_box();  // xmin xmax ymin ymax
  const double cmin = axis == 0 ? bb[2] : bb[0];
  const double cmax = axis == 0 ? bb[3] : bb[1];
  if (line_coord < cmin - 1e-12 || line_coord > cmax + 1e-12)
    throw std::invalid_argument("aperture: line outside mesh");
  // Nearest line of nodes in the transverse coordinate.
  double best = std::numeric_limits<double>::max();
  for (const Node& nd : mesh.nodes) {
    const double c = axis == 0 ? nd.y : nd.x;
    if (std::abs(c - line_coord) < std::abs(best - line_coord)) best = c;
  }
  const double tol = 1e-9 * std::max(1.0, std::max(bb[1] - bb[0], bb[3] - bb[2]));
  std::vector<int> line;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double c = axis == 0 ? mesh.nodes[i].y : mesh.nodes[i].x;
    if (std::abs(c - best) <= tol) line.push_back(static_cast<int>(i));
  }
  std::sort(line.begin(), line.end(), [&](int a, int b) {
    return (axis == 0 ? mesh.nodes[a].x : mesh.nodes[a].y) <
           (axis == 0 ? mesh.nodes[b].x : mesh.nodes[b].y);
  });
  if (line.size() < 2) throw std::invalid_argument("aperture: line has fewer than two nodes");

  double s = 0.0;
  for (std::size_t k = 0; k + 1 < line.size(); ++k) {
    const int a = line[k], b = line[k + 1];
    const double Ia = indicator(std::clamp(d[a], 0.0, 1.0), form.indicator).I;
    const double Ib = indicator(std::clamp(d[b], 0.0, 1.0), form.indicator).I;
    const double ua = u[2 * a + axis], ub = u[2 * b + axis];
    s -= 0.5 * (ua + ub) * (Ib - Ia);
  }
  return symmetry_factor * s;
}

/// Sum of internal nodal forces (reactions) of one displacement
/// component over a node set, from the assembled momentum residual at
/// the converged state.
inline double reaction_force(FemSystem& sys, const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                             double p, const Material& mat, const Formulation& form,
                             const std::vector<NeumannBC>& tractions, double time,
                             const std::string& node_set, int comp) {
  Eigen::VectorXd residual;
  assemble_momentum(sys, u, d, p, mat, form, tractions, time, residual, false);
  double f = 0.0;
  for (int n : sys.mesh->node_set(node_set)) f += residual[2 * n + comp];
  return f;
}

/// Fracture toughness corrected for the finite width of the discrete
/// damage band: Gc_eff = (1 + 2h / (c0 ell)) Gc.
inline double effective_gc(const Material& mat, const Formulation& form, double h) {
  if (h <= 0.0) throw std::invalid_argument("effective_gc: h must be positive");
  return (1.0 + 2.0 * h / (c0(form.dissipation) * mat.ell)) * mat.Gc;
}

/// Total phase-field fracture energy, int Gc/(c0 l) (alpha + l^2 |grad d|^2).
inline double fracture_energy(const FemSystem& sys, const Eigen::VectorXd& d, const Material& mat,
                              const Formulation& form) {
  const Mesh& mesh = *sys.mesh;
  const double c0v = c0(form.dissipation);
  double E = 0.0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = el.nnodes();
    for (const FemCache::QP& qp : sys.cache.elems[e].qps) {
      double dq = 0.0;
      Eigen::Vector2d grad_d = Eigen::Vector2d::Zero();
      for (int a = 0; a < nn; ++a) {
        dq += qp.N[a] * d[el.n[a]];
        grad_d += d[el.n[a]] * qp.gradN.row(a).transpose();
      }
      E += mat.Gc / (c0v * mat.ell) *
           (alpha(std::clamp(dq, 0.0, 1.0), form.dissipation) +
            mat.ell * mat.ell * grad_d.squaredNorm()) *
           qp.dvol;
    }
  }
  return E;
}

}  // namespace pressfrac
