// Finite-difference verification of every residual/Jacobian and
// energy/residual pair on a small randomized mesh, across formulations.
// Shared by the fem unit tests and the acceptance suite.
#pragma once

#include <Eigen/Dense>

#include "helpers.hpp"
#include "pressfrac/fem.hpp"

namespace testutil {

struct GradientErrors {
  double momentum_jacobian = 0.0;
  double damage_jacobian = 0.0;
  double potential_u = 0.0;
  double potential_d = 0.0;  ///< only meaningful for LVC (gradient of the potential)
};

inline pressfrac::Material gradient_test_material() {
  pressfrac::Material m;
  m.E = 1000.0;
  m.nu = 0.25;
  m.Gc = 0.1;
  m.ell = 0.3;
  m.psi_c = 0.005;
  m.xi = 1e-6;
  m.p_shape = 1.0;
  m.eta = 0.0;
  return m;
}

/// Max relative FD errors over `n_states` randomized states on a 4x4
/// unit-square mesh.  Strain scale ~1e-2, FD step 1e-6 of it.
inline GradientErrors check_gradients(const pressfrac::Formulation& form, int n_states = 10) {
  using namespace pressfrac;
  const Material mat = gradient_test_material();

  MeshSpec ms;
  ms.variant = MeshVariant::rect_uniform;
  ms.W = 1.0;
  ms.H = 1.0;
  ms.h_coarse = 0.25;
  const Mesh mesh = generate_mesh(ms);
  FemSystem sys(mesh);
  const int nnode = static_cast<int>(mesh.nodes.size());

  GradientErrors err;
  for (int trial = 0; trial < n_states; ++trial) {
    const Eigen::VectorXd u = random_vector(2 * nnode, 1e-2);
    const Eigen::VectorXd d = random_damage(nnode);
    const Eigen::VectorXd d_prev = Eigen::VectorXd::Zero(nnode);
    const double p = uniform(0.5, 3.0);

    Eigen::VectorXd r_u, r_d, rp, rm;

    // Momentum Jacobian vs FD of the momentum residual.
    assemble_momentum(sys, u, d, p, mat, form, {}, 0.0, r_u, true);
    const Eigen::SparseMatrix<double> Ju = sys.Ku;
    {
      const Eigen::VectorXd du = random_vector(2 * nnode, 1.0);
      const double h = 1e-8;  // 1e-6 of the displacement scale
      assemble_momentum(sys, u + h * du, d, p, mat, form, {}, 0.0, rp, false);
      assemble_momentum(sys, u - h * du, d, p, mat, form, {}, 0.0, rm, false);
      const Eigen::VectorXd fd = (rp - rm) / (2.0 * h);
      const Eigen::VectorXd an = Ju * du;
      err.momentum_jacobian =
          std::max(err.momentum_jacobian, (an - fd).norm() / std::max(fd.norm(), 1e-12));
    }

    // Damage Jacobian vs FD of the damage residual.
    assemble_damage(sys, u, d, d_prev, 1.0, p, mat, form, r_d, true);
    const Eigen::SparseMatrix<double> Jd = sys.Kd;
    {
      const Eigen::VectorXd dd = random_vector(nnode, 1.0);
      const double h = 1e-7;
      assemble_damage(sys, u, d + h * dd, d_prev, 1.0, p, mat, form, rp, false);
      assemble_damage(sys, u, d - h * dd, d_prev, 1.0, p, mat, form, rm, false);
      const Eigen::VectorXd fd = (rp - rm) / (2.0 * h);
      const Eigen::VectorXd an = Jd * dd;
      err.damage_jacobian =
          std::max(err.damage_jacobian, (an - fd).norm() / std::max(fd.norm(), 1e-12));
    }

    // Potential energy directional derivatives.
    {
      const Eigen::VectorXd du = random_vector(2 * nnode, 1.0);
      const double h = 1e-8;
      const double fd = (potential_energy(sys, u + h * du, d, p, mat, form) -
                         potential_energy(sys, u - h * du, d, p, mat, form)) /
                        (2.0 * h);
      const double an = r_u.dot(du);
      err.potential_u = std::max(err.potential_u, rel_err(an, fd, 1e-12));
    }
    if (form.virtual_crack == VirtualCrack::LVC) {
      const Eigen::VectorXd dd = random_vector(nnode, 1.0);
      // The potential is a smooth polynomial in d, so a larger step keeps
      // truncation negligible while avoiding subtraction cancellation.
      const double h = 1e-5;
      const double fd = (potential_energy(sys, u, d + h * dd, p, mat, form) -
                         potential_energy(sys, u, d - h * dd, p, mat, form)) /
                        (2.0 * h);
      const double an = r_d.dot(dd);
      err.potential_d = std::max(err.potential_d, rel_err(an, fd, 1e-12));
    }
  }
  return err;
}

}  // namespace testutil
