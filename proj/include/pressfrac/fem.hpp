/** @file fem.hpp
 *  @brief Element shape functions, quadrature, and global assembly of
 *         the momentum and damage residuals / Jacobians for the UVC and
 *         LVC formulations.
 *
 *  Sign conventions (variationally consistent with the total potential):
 *    momentum residual  R_u(w) = (grad w, sigma) + (w, p I'(d) grad d) - <w, t>
 *    damage residual    R_d(c) = (2 Gc l / c0)(grad c, grad d)
 *                              + (c, Gc/(c0 l) alpha'(d) + g'(d) psi+ )
 *                              [+ (c, eta (d - d_prev)/dt)]
 *    LVC adds           + (grad c, p u I'(d)) + (c, p grad d . u I''(d))
 *  so that R_u and the LVC R_d are exact gradients of potential_energy.
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pressfrac/constitutive.hpp"
#include "pressfrac/mesh.hpp"

namespace pressfrac {

/// Scalar (damage) or 2-vector (displacement) degrees of freedom on mesh nodes.
struct NodalField {
  const Mesh* mesh = nullptr;
  int comps = 1;
  Eigen::VectorXd values;

  NodalField() = default;
  NodalField(const Mesh& m, int c) : mesh(&m), comps(c) {
    values = Eigen::VectorXd::Zero(c * static_cast<int>(m.nodes.size()));
  }
};

/// Prescribed displacement component on a node set; value of (x, y, t).
struct DirichletBC {
  std::string node_set;
  int comp = 0;
  std::function<double(double, double, double)> value;
};

/// Prescribed traction on a boundary set; value of (x, y, t).
struct NeumannBC {
  std::string boundary_set;
  std::function<Eigen::Vector2d(double, double, double)> traction;
};

/// Prescribed damage value on a node set (crack seeds, initial defects).
struct DamageBC {
  std::string node_set;
  double value = 1.0;
  bool first_step_only = false;
};

struct ShapeEval {
  Eigen::VectorXd N;        ///< shape values
  Eigen::MatrixXd dN_ref;   ///< reference gradients, nn x 2
};

/// Shape functions on the reference element.
inline ShapeEval element_shape(ElemKind kind, double xi, double eta) {
  ShapeEval s;
  if (kind == ElemKind::quad4) {
    s.N.resize(4);
    s.dN_ref.resize(4, 2);
    const double xm = 1.0 - xi, xp = 1.0 + xi, em = 1.0 - eta, ep = 1.0 + eta;
    s.N << 0.25 * xm * em, 0.25 * xp * em, 0.25 * xp * ep, 0.25 * xm * ep;
    s.dN_ref << -0.25 * em, -0.25 * xm,
                 0.25 * em, -0.25 * xp,
                 0.25 * ep,  0.25 * xp,
                -0.25 * ep,  0.25 * xm;
    return s;
  }
  if (kind == ElemKind::tri3) {
    s.N.resize(3);
    s.dN_ref.resize(3, 2);
    s.N << 1.0 - xi - eta, xi, eta;
    s.dN_ref << -1.0, -1.0, 1.0, 0.0, 0.0, 1.0;
    return s;
  }
  throw std::invalid_argument("element_shape: unknown element kind");
}

struct QuadPointRef {
  double xi, eta, w;
};

/// quad4: 2x2 Gauss; tri3: one-point centroid rule (weight = ref area).
inline std::vector<QuadPointRef> quadrature(ElemKind kind) {
  if (kind == ElemKind::quad4) {
    const double g = 1.0 / std::sqrt(3.0);
    return {{-g, -g, 1.0}, {g, -g, 1.0}, {g, g, 1.0}, {-g, g, 1.0}};
  }
  return {{1.0 / 3.0, 1.0 / 3.0, 0.5}};
}

/// Precomputed per-quadrature-point data for one mesh.
struct FemCache {
  struct QP {
    Eigen::VectorXd N;       ///< nn
    Eigen::MatrixXd gradN;   ///< nn x 2, physical gradients
    double dvol;             ///< detJ * weight
    double x, y;             ///< physical position
  };
  struct Elem {
    std::vector<QP> qps;
  };
  const Mesh* mesh = nullptr;
  std::vector<Elem> elems;

  FemCache() = default;

  explicit FemCache(const Mesh& m) : mesh(&m) {
    elems.resize(m.elements.size());
    for (std::size_t e = 0; e < m.elements.size(); ++e) {
      const Element& el = m.elements[e];
      const int nn = el.nnodes();
      Eigen::MatrixXd X(nn, 2);
      for (int i = 0; i < nn; ++i) {
        X(i, 0) = m.nodes[el.n[i]].x;
        X(i, 1) = m.nodes[el.n[i]].y;
      }
      for (const QuadPointRef& q : quadrature(el.kind)) {
        ShapeEval s = element_shape(el.kind, q.xi, q.eta);
        Eigen::Matrix2d J = s.dN_ref.transpose() * X;  // dX/dxi
        const double detJ = J.determinant();
        if (detJ <= 0.0)
          throw std::runtime_error("FemCache: nonpositive Jacobian in element " +
                                   std::to_string(e));
        QP qp;
        qp.N = s.N;
        // J(i,j) = dx_j/dxi_i, so dxi_i/dx_k is (J^{-T})_{ik}.
        qp.gradN = s.dN_ref * J.transpose().inverse();  // nn x 2 physical gradients
        qp.dvol = detJ * q.w;
        qp.x = s.N.dot(X.col(0));
        qp.y = s.N.dot(X.col(1));
        elems[e].qps.push_back(std::move(qp));
      }
    }
  }
};

namespace detail {

/// Sparse matrix with a fixed pattern covering all element couplings of
/// a field with `comps` components per node.
inline Eigen::SparseMatrix<double> build_pattern(const Mesh& mesh, int comps) {
  const int ndof = comps * static_cast<int>(mesh.nodes.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.elements.size() * 16 * comps * comps);
  for (const Element& el : mesh.elements) {
    const int nn = el.nnodes();
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nn; ++b)
        for (int ci = 0; ci < comps; ++ci)
          for (int cj = 0; cj < comps; ++cj)
            trips.emplace_back(comps * el.n[a] + ci, comps * el.n[b] + cj, 0.0);
  }
  Eigen::SparseMatrix<double> A(ndof, ndof);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();
  return A;
}

}  // namespace detail

/// Reusable assembly workspace for one mesh (pattern + cache).
struct FemSystem {
  const Mesh* mesh = nullptr;
  FemCache cache;
  Eigen::SparseMatrix<double> Ku;  ///< displacement-block pattern
  Eigen::SparseMatrix<double> Kd;  ///< damage-block pattern

  FemSystem() = default;
  explicit FemSystem(const Mesh& m)
      : mesh(&m), cache(m), Ku(detail::build_pattern(m, 2)), Kd(detail::build_pattern(m, 1)) {}
};

/// Zero rows and columns of constrained dofs symmetrically (unit
/// diagonal), and zero the matching residual entries.
inline void apply_dirichlet_elimination(Eigen::SparseMatrix<double>& A, Eigen::VectorXd& r,
                                        const std::vector<int>& constrained) {
  std::vector<char> is_bc(A.rows(), 0);
  for (int dof : constrained) is_bc[dof] = 1;
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      if (is_bc[it.row()] || is_bc[it.col()]) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
  for (int dof : constrained) r[dof] = 0.0;
}

/// Resolve a displacement Dirichlet list to dof indices and write the
/// prescribed values into u.
inline std::vector<int> apply_displacement_bcs(const Mesh& mesh,
                                               const std::vector<DirichletBC>& bcs,
                                               double time, Eigen::VectorXd& u) {
  std::vector<int> dofs;
  for (const DirichletBC& bc : bcs) {
    for (int n : mesh.node_set(bc.node_set)) {
      const int dof = 2 * n + bc.comp;
      u[dof] = bc.value(mesh.nodes[n].x, mesh.nodes[n].y, time);
      dofs.push_back(dof);
    }
  }
  std::sort(dofs.begin(), dofs.end());
  dofs.erase(std::unique(dofs.begin(), dofs.end()), dofs.end());
  return dofs;
}

namespace detail {

/// Integrate a traction over one boundary edge with 2-point Gauss,
/// accumulating nodal forces.  CCW element ordering makes the outward
/// normal (dy, -dx)/len should it be needed by callers.
template <class Accumulate>
inline void integrate_edge(const Mesh& mesh, const BoundaryEdge& be, const Accumulate& acc) {
  const Element& el = mesh.elements[be.element];
  auto [la, lb] = Mesh::edge_local_nodes(el.kind, be.edge);
  const int na = el.n[la], nb = el.n[lb];
  const Node& A = mesh.nodes[na];
  const Node& B = mesh.nodes[nb];
  const double len = std::hypot(B.x - A.x, B.y - A.y);
  const double nx = (B.y - A.y) / len, ny = -(B.x - A.x) / len;  // outward
  const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  for (double s : gp) {
    const double x = A.x + s * (B.x - A.x);
    const double y = A.y + s * (B.y - A.y);
    const double w = 0.5 * len;
    acc(na, 1.0 - s, nb, s, x, y, nx, ny, w);
  }
}

}  // namespace detail

/// Assembled residual and Jacobian of one subproblem.
struct Assembled {
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double>* jacobian = nullptr;
};

/// Momentum residual and exact Jacobian w.r.t. u at fixed damage.
/// The pressure enters as the volumetric term (w, p I'(d) grad d),
/// identical for UVC and LVC.  Dirichlet dofs are handled by the caller
/// via apply_dirichlet_elimination.
inline void assemble_momentum(FemSystem& sys, const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                              double p, const Material& mat, const Formulation& form,
                              const std::vector<NeumannBC>& tractions, double time,
                              Eigen::VectorXd& residual, bool with_jacobian = true) {
  const Mesh& mesh = *sys.mesh;
  const int ndof = 2 * static_cast<int>(mesh.nodes.size());
  if (u.size() != ndof || d.size() != static_cast<int>(mesh.nodes.size()))
    throw std::invalid_argument("assemble_momentum: field sizes do not match mesh");
  residual.setZero(ndof);
  if (with_jacobian) {
    Eigen::Map<Eigen::VectorXd>(sys.Ku.valuePtr(), sys.Ku.nonZeros()).setZero();
  }

  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = el.nnodes();
    for (const FemCache::QP& qp : sys.cache.elems[e].qps) {
      // Interpolate strain, damage, damage gradient.
      Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
      double dq = 0.0;
      Eigen::Vector2d grad_d = Eigen::Vector2d::Zero();
      for (int a = 0; a < nn; ++a) {
        const int n = el.n[a];
        const Eigen::Vector2d ua(u[2 * n], u[2 * n + 1]);
        grad_u += ua * qp.gradN.row(a);  // du_i/dx_j
        dq += qp.N[a] * d[n];
        grad_d += d[n] * qp.gradN.row(a).transpose();
      }
      dq = std::clamp(dq, 0.0, 1.0);
      const Eigen::Matrix2d eps = 0.5 * (grad_u + grad_u.transpose());
      const SplitResult sr = split_energy(eps, dq, mat, form);
      const Eigen::Vector3d sig_v(sr.sigma(0, 0), sr.sigma(1, 1), sr.sigma(0, 1));
      const double Ip = indicator(dq, form.indicator).Ip;

      for (int a = 0; a < nn; ++a) {
        const int n = el.n[a];
        const double bx = qp.gradN(a, 0), by = qp.gradN(a, 1);
        residual[2 * n] += (bx * sig_v[0] + by * sig_v[2] + qp.N[a] * p * Ip * grad_d[0]) * qp.dvol;
        residual[2 * n + 1] +=
            (by * sig_v[1] + bx * sig_v[2] + qp.N[a] * p * Ip * grad_d[1]) * qp.dvol;
      }
      if (with_jacobian) {
        for (int a = 0; a < nn; ++a) {
          Eigen::Matrix<double, 3, 2> Ba;
          Ba << qp.gradN(a, 0), 0.0, 0.0, qp.gradN(a, 1), qp.gradN(a, 1), qp.gradN(a, 0);
          for (int b = 0; b < nn; ++b) {
            Eigen::Matrix<double, 3, 2> Bb;
            Bb << qp.gradN(b, 0), 0.0, 0.0, qp.gradN(b, 1), qp.gradN(b, 1), qp.gradN(b, 0);
            const Eigen::Matrix2d Kab = Ba.transpose() * sr.tangent * Bb * qp.dvol;
            for (int i = 0; i < 2; ++i)
              for (int j = 0; j < 2; ++j)
                sys.Ku.coeffRef(2 * el.n[a] + i, 2 * el.n[b] + j) += Kab(i, j);
          }
        }
      }
    }
  }

  // External tractions.
  for (const NeumannBC& bc : tractions) {
    auto it = mesh.boundary_sets.find(bc.boundary_set);
    if (it == mesh.boundary_sets.end())
      throw std::invalid_argument("assemble_momentum: unknown boundary set '" + bc.boundary_set +
                                  "'");
    for (const BoundaryEdge& be : it->second)
      detail::integrate_edge(mesh, be,
                             [&](int na, double Na, int nb, double Nb, double x, double y,
                                 double, double, double w) {
                               const Eigen::Vector2d t = bc.traction(x, y, time);
                               residual[2 * na] -= Na * t[0] * w;
                               residual[2 * na + 1] -= Na * t[1] * w;
                               residual[2 * nb] -= Nb * t[0] * w;
                               residual[2 * nb + 1] -= Nb * t[1] * w;
                             });
  }
}

/// Damage residual and exact Jacobian w.r.t. d at fixed displacement.
/// UVC terms always; LVC adds the pressure-work variation terms.  The
/// optional flux_edges list subtracts <c, p I'(d) u . n> on the listed
/// boundary edges, switching the natural boundary condition from the
/// variationally consistent combined flux to plain grad d . n = 0.
inline void assemble_damage(FemSystem& sys, const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                            const Eigen::VectorXd& d_prev, double dt, double p,
                            const Material& mat, const Formulation& form,
                            Eigen::VectorXd& residual, bool with_jacobian = true,
                            const std::vector<BoundaryEdge>* flux_edges = nullptr) {
  const Mesh& mesh = *sys.mesh;
  const int nnode = static_cast<int>(mesh.nodes.size());
  if (u.size() != 2 * nnode || d.size() != nnode || d_prev.size() != nnode)
    throw std::invalid_argument("assemble_damage: field sizes do not match mesh");
  if (mat.eta > 0.0 && dt <= 0.0)
    throw std::invalid_argument("assemble_damage: dt must be positive with viscosity");
  residual.setZero(nnode);
  if (with_jacobian) {
    Eigen::Map<Eigen::VectorXd>(sys.Kd.valuePtr(), sys.Kd.nonZeros()).setZero();
  }

  const double c0v = c0(form.dissipation);
  const double kgrad = 2.0 * mat.Gc * mat.ell / c0v;
  const double kloc = mat.Gc / (c0v * mat.ell);
  const double kvisc = mat.eta > 0.0 ? mat.eta / dt : 0.0;
  const bool lvc = form.virtual_crack == VirtualCrack::LVC;

  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = el.nnodes();
    for (const FemCache::QP& qp : sys.cache.elems[e].qps) {
      Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
      Eigen::Vector2d uq = Eigen::Vector2d::Zero();
      double dq = 0.0, dq_prev = 0.0;
      Eigen::Vector2d grad_d = Eigen::Vector2d::Zero();
      for (int a = 0; a < nn; ++a) {
        const int n = el.n[a];
        const Eigen::Vector2d ua(u[2 * n], u[2 * n + 1]);
        grad_u += ua * qp.gradN.row(a);
        uq += qp.N[a] * ua;
        dq += qp.N[a] * d[n];
        dq_prev += qp.N[a] * d_prev[n];
        grad_d += d[n] * qp.gradN.row(a).transpose();
      }
      const double dq_cl = std::clamp(dq, 0.0, 1.0);
      const Eigen::Matrix2d eps = 0.5 * (grad_u + grad_u.transpose());
      const SplitResult sr = split_energy(eps, dq_cl, mat, form);
      const DegradationValue gv = degradation(dq_cl, mat, form);
      const IndicatorValue iv = indicator(dq_cl, form.indicator);
      const double ap = alpha_prime(dq_cl, form.dissipation);
      const double app = alpha_second(form.dissipation);

      const double local = kloc * ap + gv.gp * sr.psi_plus + kvisc * (dq - dq_prev);
      const double local_jac = kloc * app + gv.gpp * sr.psi_plus + kvisc;

      for (int a = 0; a < nn; ++a) {
        const int n = el.n[a];
        double r = qp.gradN.row(a).dot(kgrad * grad_d) + qp.N[a] * local;
        if (lvc) r += qp.gradN.row(a).dot(p * iv.Ip * uq) + qp.N[a] * p * grad_d.dot(uq) * iv.Ipp;
        residual[n] += r * qp.dvol;
      }
      if (with_jacobian) {
        for (int a = 0; a < nn; ++a)
          for (int b = 0; b < nn; ++b) {
            double k = kgrad * qp.gradN.row(a).dot(qp.gradN.row(b)) +
                       qp.N[a] * qp.N[b] * local_jac;
            if (lvc)
              // I''' = 0 for all supported indicators.
              k += p * iv.Ipp *
                   (qp.gradN.row(a).dot(uq) * qp.N[b] + qp.N[a] * uq.dot(qp.gradN.row(b)));
            sys.Kd.coeffRef(el.n[a], el.n[b]) += k * qp.dvol;
          }
      }
    }
  }

  if (lvc && flux_edges != nullptr) {
    for (const BoundaryEdge& be : *flux_edges)
      detail::integrate_edge(mesh, be,
                             [&](int na, double Na, int nb, double Nb, double, double,
                                 double nx, double ny, double w) {
                               const double dgp = std::clamp(Na * d[na] + Nb * d[nb], 0.0, 1.0);
                               const IndicatorValue ivg = indicator(dgp, form.indicator);
                               const double un_dot_n =
                                   Na * (u[2 * na] * nx + u[2 * na + 1] * ny) +
                                   Nb * (u[2 * nb] * nx + u[2 * nb + 1] * ny);
                               residual[na] -= Na * p * ivg.Ip * un_dot_n * w;
                               residual[nb] -= Nb * p * ivg.Ip * un_dot_n * w;
                               if (with_jacobian) {
                                 const double c = p * ivg.Ipp * un_dot_n * w;
                                 sys.Kd.coeffRef(na, na) -= Na * c * Na;
                                 sys.Kd.coeffRef(na, nb) -= Na * c * Nb;
                                 sys.Kd.coeffRef(nb, na) -= Nb * c * Na;
                                 sys.Kd.coeffRef(nb, nb) -= Nb * c * Nb;
                               }
                             });
  }
}

/// Total regularized potential at the given state; its u- and
/// d-directional derivatives reproduce the momentum and LVC damage
/// residuals (eta = 0), which the gradient tests exercise.
inline double potential_energy(const FemSystem& sys, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& d, double p, const Material& mat,
                               const Formulation& form,
                               const std::vector<NeumannBC>& tractions = {}, double time = 0.0) {
  const Mesh& mesh = *sys.mesh;
  const double c0v = c0(form.dissipation);
  double U = 0.0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Element& el = mesh.elements[e];
    const int nn = el.nnodes();
    for (const FemCache::QP& qp : sys.cache.elems[e].qps) {
      Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
      Eigen::Vector2d uq = Eigen::Vector2d::Zero();
      double dq = 0.0;
      Eigen::Vector2d grad_d = Eigen::Vector2d::Zero();
      for (int a = 0; a < nn; ++a) {
        const int n = el.n[a];
        const Eigen::Vector2d ua(u[2 * n], u[2 * n + 1]);
        grad_u += ua * qp.gradN.row(a);
        uq += qp.N[a] * ua;
        dq += qp.N[a] * d[n];
        grad_d += d[n] * qp.gradN.row(a).transpose();
      }
      const double dq_cl = std::clamp(dq, 0.0, 1.0);
      const Eigen::Matrix2d eps = 0.5 * (grad_u + grad_u.transpose());
      const SplitResult sr = split_energy(eps, dq_cl, mat, form);
      const DegradationValue gv = degradation(dq_cl, mat, form);
      const IndicatorValue iv = indicator(dq_cl, form.indicator);
      const double psi_e = gv.g * sr.psi_plus + sr.psi_minus;
      const double psi_f =
          mat.Gc / (c0v * mat.ell) *
          (alpha(dq_cl, form.dissipation) + mat.ell * mat.ell * grad_d.squaredNorm());
      U += (psi_e + p * grad_d.dot(uq) * iv.Ip + psi_f) * qp.dvol;
    }
  }
  for (const NeumannBC& bc : tractions) {
    auto it = mesh.boundary_sets.find(bc.boundary_set);
    if (it == mesh.boundary_sets.end())
      throw std::invalid_argument("potential_energy: unknown boundary set");
    for (const BoundaryEdge& be : it->second)
      detail::integrate_edge(mesh, be,
                             [&](int na, double Na, int nb, double Nb, double x, double y,
                                 double, double, double w) {
                               const Eigen::Vector2d t = bc.traction(x, y, time);
                               const Eigen::Vector2d ua(u[2 * na], u[2 * na + 1]);
                               const Eigen::Vector2d ub(u[2 * nb], u[2 * nb + 1]);
                               U -= (Na * t.dot(ua) + Nb * t.dot(ub)) * w;
                             });
  }
  return U;
}

}  // namespace pressfrac
