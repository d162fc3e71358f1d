/** @file solver.hpp
 *  @brief Alternating-minimization solver: Newton on the momentum
 *         equation, reduced-space active-set Newton on the bound-
 *         constrained damage problem, and an adaptive load-stepping
 *         driver.
 */
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pressfrac/fem.hpp"
#include "pressfrac/linalg.hpp"

namespace pressfrac {

/// Thrown when an inner solve fails to converge; the load-stepping
/// driver responds by cutting the step back.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

struct SolverConfig {
  double newton_tol = 1e-8;      ///< relative residual drop per Newton solve
  int newton_max_iter = 25;
  double am_tol = 1e-6;          ///< combined-residual drop for the staggered loop
  int am_max_iter = 800;         ///< critically loaded first steps contract slowly (~0.96/iter)
  int active_set_max_cycles = 50;
  double kkt_abs_tol = 1e-9;     ///< absolute nodewise KKT/complementarity tolerance
  double cg_tol = 1e-10;
  double reg_shift_init = 1e-8;  ///< first diagonal shift on indefinite damage Hessians
  int reg_max_tries = 40;
  double dt_init = 1.0;
  double dt_min = 1e-6;
  double dt_max = 1.0;
  double cutback = 0.5;
  double growth = 1.2;

  void validate() const {
    if (newton_tol <= 0 || am_tol <= 0 || cg_tol <= 0)
      throw std::invalid_argument("SolverConfig: tolerances must be positive");
    if (dt_init <= 0 || dt_min <= 0 || dt_max < dt_init)
      throw std::invalid_argument("SolverConfig: invalid step-size bounds");
    if (cutback <= 0 || cutback >= 1 || growth < 1)
      throw std::invalid_argument("SolverConfig: cutback must be in (0,1) and growth >= 1");
  }
};

/// Everything that defines one quasi-static boundary value problem.
struct Problem {
  const Mesh* mesh = nullptr;
  Material mat;
  Formulation form;
  std::vector<DirichletBC> disp_bcs;
  std::vector<NeumannBC> tractions;
  std::function<double(double)> pressure;  ///< p(t); null means zero
  std::vector<DamageBC> damage_bcs;
  std::vector<BoundaryEdge> lvc_flux_edges;  ///< boundary term switch; empty = consistent form
  double t_end = 1.0;
};

struct SolveState {
  Eigen::VectorXd u;
  Eigen::VectorXd d;
  Eigen::VectorXd d_prev;
  double t = 0.0;
  double dt = 0.0;
  int step = -1;
};

struct StepRecord {
  int step = 0;
  double t = 0.0;
  double dt = 0.0;
  int am_iters = 0;
  int newton_iters_u = 0;
  int newton_iters_d = 0;
  double ru_norm = 0.0;
  double rd_norm = 0.0;
  double pressure = 0.0;
};

struct RunResult {
  SolveState state;
  std::vector<StepRecord> records;
};

namespace detail {

inline double free_norm(const Eigen::VectorXd& r, const std::vector<char>& is_bc) {
  double s = 0.0;
  for (int i = 0; i < r.size(); ++i)
    if (!is_bc[i]) s += r[i] * r[i];
  return std::sqrt(s);
}

inline double free_inf_norm(const Eigen::VectorXd& r, const std::vector<char>& is_bc) {
  double s = 0.0;
  for (int i = 0; i < r.size(); ++i)
    if (!is_bc[i]) s = std::max(s, std::abs(r[i]));
  return s;
}

/// Solve J dx = r with diagonal-shift retries on negative curvature.
inline Eigen::VectorXd regularized_solve(Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& r,
                                         const SolverConfig& cfg) {
  double shift = 0.0;
  for (int attempt = 0; attempt < cfg.reg_max_tries; ++attempt) {
    try {
      return sparse_solve(J, r, cfg.cg_tol);
    } catch (const NegativeCurvatureError&) {
      const double next = (shift == 0.0) ? cfg.reg_shift_init : shift * 10.0;
      const double add = next - shift;
      for (int i = 0; i < J.rows(); ++i) J.coeffRef(i, i) += add;
      shift = next;
    }
  }
  throw ConvergenceError("regularized_solve: Hessian remained indefinite after " +
                         std::to_string(cfg.reg_max_tries) + " diagonal shifts");
}

}  // namespace detail

/// Newton iteration on the momentum residual at fixed damage.  Writes
/// the prescribed displacement values into u before iterating.  Returns
/// the iteration count; the final free-dof residual norm is stored in
/// *out_rnorm if given.
inline int newton_solve_displacement(FemSystem& sys, const Problem& prob, Eigen::VectorXd& u,
                                     const Eigen::VectorXd& d, double p, double t,
                                     const SolverConfig& cfg, double* out_rnorm = nullptr,
                                     double* out_r0 = nullptr) {
  const std::vector<int> bc_dofs = apply_displacement_bcs(*prob.mesh, prob.disp_bcs, t, u);
  std::vector<char> is_bc(u.size(), 0);
  for (int dof : bc_dofs) is_bc[dof] = 1;

  Eigen::VectorXd residual;
  double ref = -1.0;
  for (int it = 0; it < cfg.newton_max_iter; ++it) {
    assemble_momentum(sys, u, d, p, prob.mat, prob.form, prob.tractions, t, residual, true);
    const double rnorm = detail::free_norm(residual, is_bc);
    if (ref < 0.0) {
      ref = std::max(rnorm, 1e-14);
      if (out_r0) *out_r0 = rnorm;
    }
    if (out_rnorm) *out_rnorm = rnorm;
    if (rnorm <= cfg.newton_tol * ref || rnorm < 1e-14) return it;
    apply_dirichlet_elimination(sys.Ku, residual, bc_dofs);
    u -= detail::regularized_solve(sys.Ku, residual, cfg);
  }
  // Accept a stagnated but accurate solve (e.g. near floating-point
  // limits on refined meshes); otherwise signal a cutback.
  if (out_rnorm && *out_rnorm <= std::sqrt(cfg.newton_tol) * ref) return cfg.newton_max_iter;
  throw ConvergenceError("newton_solve_displacement: no convergence in " +
                         std::to_string(cfg.newton_max_iter) + " iterations");
}

/// Reduced-space active-set Newton for the damage problem with bounds
/// d_prev <= d <= 1 (irreversibility) and optional Dirichlet damage
/// values from seeds/defects.  `fixed_nodes` holds (node, value) pairs.
inline int active_set_solve_damage(FemSystem& sys, const Problem& prob, const Eigen::VectorXd& u,
                                   Eigen::VectorXd& d, const Eigen::VectorXd& d_prev, double dt,
                                   double p, const SolverConfig& cfg,
                                   const std::vector<std::pair<int, double>>& fixed_nodes,
                                   double* out_rnorm = nullptr) {
  const int n = static_cast<int>(d.size());
  enum : char { FREE = 0, LOWER = 1, UPPER = 2, FIXED = 3 };
  std::vector<char> state(n, FREE);
  Eigen::VectorXd lo = d_prev.cwiseMax(0.0);

  for (const auto& [node, value] : fixed_nodes) {
    d[node] = value;
    state[node] = FIXED;
  }
  for (int i = 0; i < n; ++i)
    if (state[i] == FREE) d[i] = std::clamp(d[i], lo[i], 1.0);

  const std::vector<BoundaryEdge>* flux =
      prob.lvc_flux_edges.empty() ? nullptr : &prob.lvc_flux_edges;
  Eigen::VectorXd residual;
  int total_newton = 0;
  double gref = -1.0;

  for (int cycle = 0; cycle < cfg.active_set_max_cycles; ++cycle) {
    // Newton on the current free set.
    std::vector<int> constrained;
    std::vector<char> is_bc(n, 0);
    auto rebuild_constrained = [&]() {
      constrained.clear();
      for (int i = 0; i < n; ++i) {
        is_bc[i] = (state[i] != FREE);
        if (is_bc[i]) constrained.push_back(i);
      }
    };
    rebuild_constrained();

    bool newton_ok = false;
    double rnorm = 0.0;
    for (int it = 0; it < cfg.newton_max_iter; ++it) {
      assemble_damage(sys, u, d, d_prev, dt, p, prob.mat, prob.form, residual, true, flux);
      rnorm = detail::free_norm(residual, is_bc);
      const double rinf = detail::free_inf_norm(residual, is_bc);
      if (gref < 0.0) gref = std::max(residual.cwiseAbs().maxCoeff(), 1e-12);
      // Relative drop plus an absolute nodewise bound so that the
      // converged state satisfies KKT complementarity to kkt_abs_tol.
      if (rnorm <= cfg.newton_tol * std::max(gref, 1e-14) && rinf <= cfg.kkt_abs_tol) {
        newton_ok = true;
        break;
      }
      ++total_newton;
      apply_dirichlet_elimination(sys.Kd, residual, constrained);
      const Eigen::VectorXd delta = detail::regularized_solve(sys.Kd, residual, cfg);
      bool clamped = false;
      for (int i = 0; i < n; ++i) {
        if (state[i] != FREE) continue;
        d[i] -= delta[i];
        if (d[i] <= lo[i]) {
          d[i] = lo[i];
          state[i] = LOWER;
          clamped = true;
        } else if (d[i] >= 1.0) {
          d[i] = 1.0;
          state[i] = UPPER;
          clamped = true;
        }
      }
      if (clamped) rebuild_constrained();
    }

    // KKT check: release bound nodes whose multiplier has the wrong sign.
    assemble_damage(sys, u, d, d_prev, dt, p, prob.mat, prob.form, residual, false, flux);
    const double kkt_tol = cfg.kkt_abs_tol;
    int changes = 0;
    for (int i = 0; i < n; ++i) {
      if (state[i] == LOWER && residual[i] < -kkt_tol) {
        state[i] = FREE;
        ++changes;
      } else if (state[i] == UPPER && residual[i] > kkt_tol) {
        state[i] = FREE;
        ++changes;
      }
    }
    if (out_rnorm) *out_rnorm = rnorm;
    if (changes == 0) {
      if (!newton_ok)
        throw ConvergenceError("active_set_solve_damage: Newton stalled on fixed active set");
      return total_newton;
    }
  }
  throw ConvergenceError("active_set_solve_damage: active set did not settle in " +
                         std::to_string(cfg.active_set_max_cycles) + " cycles");
}

/// One staggered (alternating minimization) solve of both fields at a
/// fixed load.  Fills the iteration counters of `rec`.
inline void alternate_minimize(FemSystem& sys, const Problem& prob, SolveState& st, double p,
                               const SolverConfig& cfg,
                               const std::vector<std::pair<int, double>>& fixed_damage,
                               StepRecord& rec) {
  rec.am_iters = 0;
  rec.newton_iters_u = 0;
  rec.newton_iters_d = 0;
  // Staggered convergence is judged on the combined residual of both
  // subproblems, relative to the momentum residual at the start of the
  // step (the load scale).
  double ref = -1.0;
  std::vector<char> is_bc_u;
  for (int am = 0; am < cfg.am_max_iter; ++am) {
    double r0 = 0.0;
    rec.newton_iters_u +=
        newton_solve_displacement(sys, prob, st.u, st.d, p, st.t, cfg, &rec.ru_norm, &r0);
    if (ref < 0.0) ref = std::max(r0, 1e-14);
    rec.newton_iters_d += active_set_solve_damage(sys, prob, st.u, st.d, st.d_prev, st.dt, p, cfg,
                                                  fixed_damage, &rec.rd_norm);
    rec.am_iters = am + 1;

    // Momentum residual at the updated damage field.
    if (is_bc_u.empty()) {
      is_bc_u.assign(st.u.size(), 0);
      for (int dof : apply_displacement_bcs(*prob.mesh, prob.disp_bcs, st.t, st.u))
        is_bc_u[dof] = 1;
    }
    Eigen::VectorXd residual;
    assemble_momentum(sys, st.u, st.d, p, prob.mat, prob.form, prob.tractions, st.t, residual,
                      false);
    rec.ru_norm = detail::free_norm(residual, is_bc_u);
    const double combined = std::hypot(rec.ru_norm, rec.rd_norm);
    if (combined <= cfg.am_tol * ref) return;
  }
  throw ConvergenceError("alternate_minimize: staggered loop did not converge in " +
                         std::to_string(cfg.am_max_iter) + " iterations");
}

/// Adaptive quasi-static load stepping from t = 0 to prob.t_end.
/// Failed steps (any ConvergenceError) are retried with dt * cutback;
/// successful steps grow dt up to dt_max.  `on_step` runs after each
/// committed step, before irreversibility bounds advance to the next one.
inline RunResult run_load_program(
    FemSystem& sys, const Problem& prob, const SolverConfig& cfg,
    const std::function<void(const SolveState&, const StepRecord&)>& on_step = nullptr) {
  cfg.validate();
  prob.mat.validate(prob.form.degradation == Degradation::cohesive);
  prob.form.validate();
  const Mesh& mesh = *prob.mesh;
  const int nnode = static_cast<int>(mesh.nodes.size());

  RunResult out;
  SolveState& st = out.state;
  st.u = Eigen::VectorXd::Zero(2 * nnode);
  st.d = Eigen::VectorXd::Zero(nnode);
  st.d_prev = st.d;

  double t = 0.0, dt = cfg.dt_init;
  int step = 0;
  const double t_end = prob.t_end;

  while (t < t_end * (1.0 - 1e-12)) {
    dt = std::min(dt, t_end - t);
    std::vector<std::pair<int, double>> fixed_damage;
    for (const DamageBC& bc : prob.damage_bcs) {
      if (bc.first_step_only && step > 0) continue;
      for (int node : mesh.node_set(bc.node_set)) fixed_damage.emplace_back(node, bc.value);
    }

    bool committed = false;
    while (!committed) {
      SolveState trial = st;
      trial.t = t + dt;
      trial.dt = dt;
      trial.step = step;
      StepRecord rec;
      rec.step = step;
      rec.t = trial.t;
      rec.dt = dt;
      rec.pressure = prob.pressure ? prob.pressure(trial.t) : 0.0;
      try {
        alternate_minimize(sys, prob, trial, rec.pressure, cfg, fixed_damage, rec);
        st = trial;
        out.records.push_back(rec);
        if (on_step) on_step(st, rec);
        st.d_prev = st.d;
        t = st.t;
        ++step;
        dt = std::min(dt * cfg.growth, cfg.dt_max);
        dt = std::min(dt, t_end - t > 0 ? t_end - t : dt);
        committed = true;
      } catch (const ConvergenceError& e) {
        dt *= cfg.cutback;
        if (dt < cfg.dt_min)
          throw ConvergenceError("run_load_program: step " + std::to_string(step) +
                                 " failed to converge above the minimum step size (" + e.what() +
                                 ")");
      }
    }
  }
  return out;
}

}  // namespace pressfrac
