/** @file bench.hpp
 *  @brief The three benchmark drivers (pressurized bar, pressurized
 *         hole nucleation, surfing crack propagation) plus their file
 *         outputs: history.tsv, traction_separation.tsv, j_history.tsv,
 *         aperture.tsv, VTK snapshots, and run_meta.txt.
 */
#pragma once

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pressfrac/config.hpp"
#include "pressfrac/io.hpp"
#include "pressfrac/lefm.hpp"
#include "pressfrac/post.hpp"
#include "pressfrac/solver.hpp"

namespace pressfrac {

inline constexpr const char* kVersion = "pressfrac 1.0.0";

namespace detail {

/// Shared per-run output machinery: scalar history + periodic snapshots.
struct RunWriter {
  std::string dir;  ///< empty = no file output
  const Mesh* mesh = nullptr;
  int stride = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  RunWriter(const std::string& out_dir, const Mesh& m, int snapshot_stride,
            const std::vector<std::string>& extra_cols)
      : dir(out_dir), mesh(&m), stride(snapshot_stride) {
    header = {"step", "t", "dt", "am_iters", "newton_iters_u", "newton_iters_d", "|r_u|", "|r_d|"};
    header.insert(header.end(), extra_cols.begin(), extra_cols.end());
    if (!dir.empty()) {
      std::filesystem::create_directories(dir);
      if (stride > 0) std::filesystem::create_directories(dir + "/snapshots");
    }
  }

  void record(const SolveState& st, const StepRecord& rec, const std::vector<double>& extras) {
    std::vector<double> row = {static_cast<double>(rec.step),
                               rec.t,
                               rec.dt,
                               static_cast<double>(rec.am_iters),
                               static_cast<double>(rec.newton_iters_u),
                               static_cast<double>(rec.newton_iters_d),
                               rec.ru_norm,
                               rec.rd_norm};
    row.insert(row.end(), extras.begin(), extras.end());
    rows.push_back(std::move(row));
    if (!dir.empty() && stride > 0 && rec.step % stride == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "/snapshots/step_%04d.vtk", rec.step);
      write_vtk(*mesh, st.u, st.d, dir + name);
    }
  }

  void finish(const ProblemConfig& cfg, double wall_seconds, const SolveState& final_state) {
    if (dir.empty()) return;
    write_tsv(header, rows, dir + "/history.tsv");
    if (stride > 0) {
      char name[32];
      std::snprintf(name, sizeof name, "/snapshots/step_%04d.vtk",
                    final_state.step >= 0 ? final_state.step : 0);
      write_vtk(*mesh, final_state.u, final_state.d, dir + name);
    }
    std::ofstream meta(dir + "/run_meta.txt");
    meta << "# " << kVersion << "\n# wall_seconds = " << wall_seconds
         << "\n# resolved configuration follows\n\n"
         << write_config(cfg);
  }
};

inline std::vector<int> nodes_where(const Mesh& mesh, const std::function<bool(double, double)>& f) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    if (f(mesh.nodes[i].x, mesh.nodes[i].y)) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace detail

/// Worst-case solver-invariant violations observed over the accepted
/// steps of a run: irreversibility (d >= d_prev) and the KKT conditions
/// of the bound-constrained damage solve.
struct InvariantMonitor {
  double irreversibility = 0.0;  ///< max over steps/nodes of (d_prev - d)
  double complementarity = 0.0;  ///< max KKT violation at converged damage solves

  void update(FemSystem& sys, const Problem& prob, const SolveState& st, double p) {
    const Mesh& mesh = *prob.mesh;
    const int n = static_cast<int>(st.d.size());
    irreversibility = std::max(irreversibility, (st.d_prev - st.d).maxCoeff());

    std::vector<char> fixed(n, 0);
    for (const DamageBC& bc : prob.damage_bcs) {
      if (bc.first_step_only && st.step > 0) continue;
      for (int node : mesh.node_set(bc.node_set)) fixed[node] = 1;
    }
    const std::vector<BoundaryEdge>* flux =
        prob.lvc_flux_edges.empty() ? nullptr : &prob.lvc_flux_edges;
    Eigen::VectorXd r;
    assemble_damage(sys, st.u, st.d, st.d_prev, st.dt, p, prob.mat, prob.form, r, false, flux);
    for (int i = 0; i < n; ++i) {
      if (fixed[i]) continue;
      const double lo = std::max(st.d_prev[i], 0.0);
      double v;
      if (st.d[i] <= lo + 1e-12)
        v = std::max(0.0, -r[i]);  // at the lower bound the multiplier must push down
      else if (st.d[i] >= 1.0 - 1e-12)
        v = std::max(0.0, r[i]);
      else
        v = std::abs(r[i]);  // free nodes are stationary
      complementarity = std::max(complementarity, v);
    }
  }
};

// ---------------------------------------------------------------------------
// Bar: displacement-controlled quarter model in a pressurized chamber.
// ---------------------------------------------------------------------------

struct BarResult {
  RunResult run;
  Mesh mesh;
  double sigma_c = 0.0;
  double peak_traction = 0.0;
  bool jump_flag = false;
  double damage_before_jump = 0.0;  ///< center damage at the step preceding the first jump
  bool truncated = false;           ///< stopped early after complete rupture
  std::vector<double> separations;  ///< per accepted step
  std::vector<double> tractions;
  InvariantMonitor invariants;
  double wall_seconds = 0.0;
};

/// Pseudo-time is the applied end displacement (mm).  The chamber
/// pressure acts only through the phase-field pressure terms.
inline BarResult run_bar(const ProblemConfig& cfg, const std::string& out_dir = "") {
  if (cfg.benchmark != Benchmark::bar) throw std::invalid_argument("run_bar: wrong benchmark");
  if (cfg.bar.pressure < 0.0)
    throw std::invalid_argument("run_bar: pressure must be nonnegative");
  cfg.formulation.validate();
  if (cfg.formulation.degradation != Degradation::cohesive ||
      cfg.formulation.dissipation != Dissipation::AT1)
    throw std::invalid_argument("run_bar: requires cohesive degradation with AT1 dissipation");

  BarResult res;
  res.sigma_c = sigma_c(cfg.material);
  if (cfg.bar.pressure > res.sigma_c / 3.0 + 1e-12)
    throw std::invalid_argument("run_bar: pressure exceeds sigma_c / 3");

  MeshSpec ms;
  ms.variant = MeshVariant::rect_uniform;
  ms.W = cfg.bar.length;
  ms.H = cfg.bar.width;
  ms.h_coarse = cfg.mesh.h > 0.0 ? cfg.mesh.h : 1.0;
  res.mesh = generate_mesh(ms);
  FemSystem sys(res.mesh);

  Problem prob;
  prob.mesh = &res.mesh;
  prob.mat = cfg.material;
  prob.form = cfg.formulation;
  prob.disp_bcs = {
      {"left", 0, [](double, double, double) { return 0.0; }},
      {"bottom", 1, [](double, double, double) { return 0.0; }},
      {"right", 0, [](double, double, double t) { return t; }},
  };
  prob.damage_bcs = {{"left", cfg.bar.defect, true}};
  const double p = cfg.bar.pressure;
  prob.pressure = [p](double) { return p; };
  prob.t_end = cfg.bar.u_end;

  const double t0 = static_cast<double>(clock());
  detail::RunWriter writer(out_dir, res.mesh, cfg.output.snapshot_stride,
                           {"pressure", "traction", "separation", "d_center"});
  const double width = cfg.bar.width;
  double d_center_prev = 0.0;
  SolveState last_state;
  std::vector<StepRecord> records;

  auto on_step = [&](const SolveState& st, const StepRecord& rec) {
    // Transmitted force across the crack plane (symmetry edge) per unit width.
    // The outward normal of the symmetry edge points in -x, so the nodal
    // reaction there is minus the transmitted tensile force.
    const double traction =
        -reaction_force(sys, st.u, st.d, rec.pressure, prob.mat, prob.form, prob.tractions, st.t,
                        "left", 0) /
        width;
    // Mid-bar opening: integrate along the bar axis, doubled for the
    // half-length symmetry.
    const double s = aperture(res.mesh, st.u, st.d, prob.form, 0, 0.0, 2.0);
    double d_center = 0.0;
    for (int n : res.mesh.node_set("left")) d_center = std::max(d_center, st.d[n]);
    // Aperture-jump detector.  A snap instability shows up as a burst in
    // the aperture increment between accepted steps.  The macroscopic
    // floor (a fraction of the cohesive opening Gc/sigma_c) masks damage
    // onset, where the aperture rises from numerical-noise level, and
    // the traction gate excludes the fully broken tail.
    if (res.separations.size() >= 2) {
      const std::size_t k = res.separations.size();
      const double s_prev = res.separations[k - 1];
      const double delta_prev = s_prev - res.separations[k - 2];
      const double delta = s - s_prev;
      const double s_floor = 0.05 * cfg.material.Gc / res.sigma_c;
      if (s_prev > s_floor && delta_prev > 0.0 && delta > 2.0 * delta_prev &&
          res.tractions.back() > 0.1 * res.sigma_c) {
        if (!res.jump_flag) res.damage_before_jump = d_center_prev;
        res.jump_flag = true;
      }
    }
    d_center_prev = d_center;
    res.tractions.push_back(traction);
    res.separations.push_back(s);
    res.peak_traction = std::max(res.peak_traction, traction);
    res.invariants.update(sys, prob, st, rec.pressure);
    writer.record(st, rec, {rec.pressure, traction, s, d_center});
    last_state = st;
    records.push_back(rec);
  };

  try {
    res.run = run_load_program(sys, prob, cfg.solver, on_step);
  } catch (const ConvergenceError&) {
    // Near complete rupture the alternating-minimization map loses
    // contraction, and since the problem is rate independent smaller
    // steps cannot restore it.  A run that has already broken the bar
    // (negligible transmitted traction, center damage at 1) is allowed
    // to stop there; anything else is a genuine solver failure.
    const bool ruptured = !res.tractions.empty() &&
                          res.tractions.back() < 0.08 * res.sigma_c && d_center_prev > 0.9;
    if (!ruptured) throw;
    res.run.state = last_state;
    res.run.records = std::move(records);
    res.truncated = true;
  }
  res.wall_seconds = (static_cast<double>(clock()) - t0) / CLOCKS_PER_SEC;

  if (!out_dir.empty()) {
    std::vector<std::vector<double>> ts;
    for (std::size_t i = 0; i < res.tractions.size(); ++i)
      ts.push_back({res.separations[i], res.tractions[i]});
    write_tsv({"separation", "traction"}, ts, out_dir + "/traction_separation.tsv");
    std::vector<std::vector<double>> ap;
    for (std::size_t i = 0; i < res.separations.size(); ++i)
      ap.push_back({static_cast<double>(i), res.separations[i]});
    write_tsv({"step", "s"}, ap, out_dir + "/aperture.tsv");
  }
  writer.finish(cfg, res.wall_seconds, res.run.state);
  return res;
}

// ---------------------------------------------------------------------------
// Surfing: steady pressurized crack growth driven by a translating
// near-tip displacement field on the top edge of a half model.
// ---------------------------------------------------------------------------

struct SurfingResult {
  RunResult run;
  Mesh mesh;
  double tau = 0.0;
  double pressure = 0.0;
  double gc_eff = 0.0;
  std::vector<double> t_over_tau;  ///< per accepted step
  std::vector<double> J;           ///< doubled (full-model) values
  std::vector<double> tip_x;
  double steady_error = 0.0;       ///< mean |J/Gc_eff - 1| over the plateau window
  InvariantMonitor invariants;
  double wall_seconds = 0.0;
};

inline double surfing_plateau_error(const SurfingResult& r, double t_lo = 1.15,
                                    double t_hi = 1.45) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < r.t_over_tau.size(); ++i)
    if (r.t_over_tau[i] >= t_lo && r.t_over_tau[i] <= t_hi) {
      sum += std::abs(r.J[i] / r.gc_eff - 1.0);
      ++n;
    }
  if (n == 0) throw std::runtime_error("surfing_plateau_error: no steps in plateau window");
  return sum / n;
}

inline SurfingResult run_surfing(const ProblemConfig& cfg, const std::string& out_dir = "") {
  if (cfg.benchmark != Benchmark::surfing)
    throw std::invalid_argument("run_surfing: wrong benchmark");
  cfg.formulation.validate();
  if (cfg.formulation.dissipation != Dissipation::AT1 ||
      cfg.formulation.degradation != Degradation::quadratic ||
      cfg.formulation.split != Split::none)
    throw std::invalid_argument(
        "run_surfing: requires AT1 dissipation, quadratic degradation, no split");

  SurfingResult res;
  const double a = cfg.surfing.a, W = cfg.surfing.W, H = cfg.surfing.H, V = cfg.surfing.V;
  const double ell = cfg.material.ell;
  const double h = cfg.mesh.h > 0.0 ? cfg.mesh.h : ell / 4.0;
  const double band = cfg.mesh.band > 0.0 ? cfg.mesh.band : 4.0 * ell;
  res.tau = a / V;

  MeshSpec ms;
  ms.variant = MeshVariant::rect_band_refined;
  ms.W = W;
  ms.H = H;
  ms.h_fine = h;
  ms.h_coarse = cfg.mesh.h_coarse > 0.0 ? cfg.mesh.h_coarse : 250.0;
  ms.band = band;
  res.mesh = generate_mesh(ms);
  res.mesh.node_sets["crack"] =
      detail::nodes_where(res.mesh, [&](double x, double y) { return y == 0.0 && x <= a + 1e-9; });
  FemSystem sys(res.mesh);

  const lefm::PlaneStrainConstants elast{cfg.material.E, cfg.material.nu};
  res.pressure = lefm::critical_pressure_uniform(a, elast, cfg.material.Gc).surfing;
  res.gc_eff = effective_gc(cfg.material, cfg.formulation, h);
  const double Gc = cfg.material.Gc;

  Problem prob;
  prob.mesh = &res.mesh;
  prob.mat = cfg.material;
  prob.form = cfg.formulation;
  prob.disp_bcs = {
      {"bottom", 1, [](double, double, double) { return 0.0; }},
      {"top", 0, [](double, double, double) { return 0.0; }},
      {"top", 1,
       [a, V, elast, Gc](double x, double y, double t) {
         return lefm::surfing_displacement(x - a, y, t, V, elast, Gc).y;
       }},
  };
  prob.damage_bcs = {{"crack", 1.0, false}};
  const double p = res.pressure;
  prob.pressure = [p](double) { return p; };
  prob.t_end = cfg.surfing.t_end_over_tau * res.tau;

  const double t0 = static_cast<double>(clock());
  detail::RunWriter writer(out_dir, res.mesh, cfg.output.snapshot_stride,
                           {"pressure", "t_over_tau", "J", "J_over_gc_eff", "tip_x"});
  const std::vector<int> bottom = res.mesh.node_set("bottom");

  auto on_step = [&](const SolveState& st, const StepRecord& rec) {
    // q-rectangle of size a x H/2 tracking the nominal tip x = a + V t.
    const double cx = a + V * st.t;
    JDomain box = JDomain::centered(cx, 0.0, a, H);
    // Extend below the symmetry line so that the crack-plane nodes are
    // strictly inside the box (q = 1 there); J is then doubled.
    box.ymin = -H;
    box.ymax = 0.5 * H;
    const Eigen::VectorXd q = build_q(res.mesh, box);
    const double J2 =
        2.0 * j_integral(sys, st.u, st.d, q, rec.pressure, prob.mat, prob.form);
    double tip = 0.0;
    for (int n : bottom)
      if (st.d[n] > 0.9) tip = std::max(tip, res.mesh.nodes[n].x);
    res.t_over_tau.push_back(st.t / res.tau);
    res.J.push_back(J2);
    res.tip_x.push_back(tip);
    res.invariants.update(sys, prob, st, rec.pressure);
    writer.record(st, rec, {rec.pressure, st.t / res.tau, J2, J2 / res.gc_eff, tip});
  };

  res.run = run_load_program(sys, prob, cfg.solver, on_step);
  res.wall_seconds = (static_cast<double>(clock()) - t0) / CLOCKS_PER_SEC;
  // Short runs that never reach the steady window report NaN instead of
  // failing the whole run.
  res.steady_error = std::numeric_limits<double>::quiet_NaN();
  for (double t : res.t_over_tau)
    if (t >= 1.15 && t <= 1.45) {
      res.steady_error = surfing_plateau_error(res);
      break;
    }

  if (!out_dir.empty()) {
    std::vector<std::vector<double>> jh;
    for (std::size_t i = 0; i < res.J.size(); ++i)
      jh.push_back({res.t_over_tau[i], res.J[i], res.J[i] / res.gc_eff});
    write_tsv({"t_over_tau", "J", "J_over_gc_eff"}, jh, out_dir + "/j_history.tsv");
  }
  writer.finish(cfg, res.wall_seconds, res.run.state);
  return res;
}

// ---------------------------------------------------------------------------
// Hole: pressurized circular hole under biaxial far-field compression,
// quarter model; nucleation on the horizontal midplane.
// ---------------------------------------------------------------------------

struct HoleResult {
  RunResult run;
  Mesh mesh;
  double sigma_c = 0.0;
  std::vector<double> pressures;   ///< per accepted step
  std::vector<double> hoop;        ///< sigma_yy element average at (-R, 0)
  std::vector<double> d_mid_max;   ///< max damage on the midplane (excluding hole rim)
  std::vector<double> d_hole_max;  ///< max damage on the hole boundary away from the midplane
  int midplane_onset_step = -1;    ///< first step with midplane localization (d > 0.5)
  int hole_damage_step = -1;       ///< first step with hole-boundary damage (d > 0.1)
  double onset_hoop = 0.0;         ///< peak hoop stress up to the onset step
  InvariantMonitor invariants;
  double wall_seconds = 0.0;
};

inline HoleResult run_hole(const ProblemConfig& cfg, const std::string& out_dir = "") {
  if (cfg.benchmark != Benchmark::hole) throw std::invalid_argument("run_hole: wrong benchmark");
  cfg.formulation.validate();
  if (cfg.formulation.degradation != Degradation::cohesive)
    throw std::invalid_argument("run_hole: requires cohesive degradation");

  HoleResult res;
  res.sigma_c = sigma_c(cfg.material);
  const double R = cfg.hole.R, L = cfg.hole.L;

  MeshSpec ms;
  ms.variant = MeshVariant::quarter_hole_mapped;
  ms.R = R;
  ms.L = L;
  ms.h_fine = cfg.mesh.h > 0.0 ? cfg.mesh.h : 2.5;
  ms.h_coarse = cfg.mesh.h_coarse > 0.0 ? cfg.mesh.h_coarse : 50.0;
  // Keep elements at h_fine within a band around the hole rim wide
  // enough to resolve the damage length scale.
  ms.band = cfg.mesh.band > 0.0 ? cfg.mesh.band : 4.0 * cfg.material.ell;
  res.mesh = generate_mesh(ms);
  FemSystem sys(res.mesh);

  const double sH = cfg.hole.sigma_H, sV = cfg.hole.sigma_V;
  const double p_rate = cfg.hole.p_rate;

  Problem prob;
  prob.mesh = &res.mesh;
  prob.mat = cfg.material;
  prob.form = cfg.formulation;
  prob.disp_bcs = {
      {"symmetry_y", 0, [](double, double, double) { return 0.0; }},  // x = 0 plane
      {"symmetry_x", 1, [](double, double, double) { return 0.0; }},  // y = 0 plane
  };
  // Far-field compression t = sigma . n and the direct pressure push on
  // the hole surface t = -p n; the same p also enters the phase-field
  // pressure terms (crack-following pressure).
  prob.tractions = {
      {"outer_left", [sH](double, double, double) { return Eigen::Vector2d(sH, 0.0); }},
      {"outer_top", [sV](double, double, double) { return Eigen::Vector2d(0.0, -sV); }},
      {"hole",
       [R, p_rate](double x, double y, double t) {
         const double r = std::hypot(x, y);
         return Eigen::Vector2d(p_rate * t * x / r, p_rate * t * y / r);
       }},
  };
  prob.pressure = [p_rate](double t) { return p_rate * t; };
  prob.t_end = cfg.hole.p_max / p_rate;

  // Element nearest the hole/midplane intersection (-R, 0) for the hoop
  // stress probe.
  int probe_elem = -1;
  double best = 1e300;
  for (std::size_t e = 0; e < res.mesh.elements.size(); ++e) {
    const Element& el = res.mesh.elements[e];
    double cx = 0.0, cy = 0.0;
    for (int i = 0; i < el.nnodes(); ++i) {
      cx += res.mesh.nodes[el.n[i]].x;
      cy += res.mesh.nodes[el.n[i]].y;
    }
    cx /= el.nnodes();
    cy /= el.nnodes();
    const double dist = std::hypot(cx + R, cy);
    if (dist < best) {
      best = dist;
      probe_elem = static_cast<int>(e);
    }
  }

  const std::vector<int> mid_nodes = detail::nodes_where(res.mesh, [&](double x, double y) {
    return std::abs(y) < 1e-9 && x < -R - 0.5 * ms.h_fine;  // midplane, rim excluded
  });
  const std::vector<int> hole_nodes = detail::nodes_where(res.mesh, [&](double x, double y) {
    return std::abs(std::hypot(x, y) - R) < 1e-6 * R && y > 0.5 * ms.h_fine;  // rim, off-midplane
  });

  auto hoop_probe = [&](const SolveState& st) {
    const Element& el = res.mesh.elements[probe_elem];
    double num = 0.0, den = 0.0;
    for (const FemCache::QP& qp : sys.cache.elems[probe_elem].qps) {
      Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
      double dq = 0.0;
      for (int a = 0; a < el.nnodes(); ++a) {
        const int n = el.n[a];
        grad_u += Eigen::Vector2d(st.u[2 * n], st.u[2 * n + 1]) * qp.gradN.row(a);
        dq += qp.N[a] * st.d[n];
      }
      const Eigen::Matrix2d eps = 0.5 * (grad_u + grad_u.transpose());
      const SplitResult sr = split_energy(eps, std::clamp(dq, 0.0, 1.0), prob.mat, prob.form);
      num += sr.sigma(1, 1) * qp.dvol;
      den += qp.dvol;
    }
    return num / den;
  };

  const double t0 = static_cast<double>(clock());
  detail::RunWriter writer(out_dir, res.mesh, cfg.output.snapshot_stride,
                           {"pressure", "hoop", "d_mid_max", "d_hole_max"});

  auto on_step = [&](const SolveState& st, const StepRecord& rec) {
    const double hoop = hoop_probe(st);
    double dm = 0.0, dh = 0.0;
    for (int n : mid_nodes) dm = std::max(dm, st.d[n]);
    for (int n : hole_nodes) dh = std::max(dh, st.d[n]);
    res.pressures.push_back(rec.pressure);
    res.hoop.push_back(hoop);
    res.d_mid_max.push_back(dm);
    res.d_hole_max.push_back(dh);
    const int step = static_cast<int>(res.hoop.size()) - 1;
    if (res.midplane_onset_step < 0 && dm > 0.5) {
      res.midplane_onset_step = step;
      for (int i = 0; i <= step; ++i) res.onset_hoop = std::max(res.onset_hoop, res.hoop[i]);
    }
    if (res.hole_damage_step < 0 && dh > 0.1) res.hole_damage_step = step;
    res.invariants.update(sys, prob, st, rec.pressure);
    writer.record(st, rec, {rec.pressure, hoop, dm, dh});
  };

  res.run = run_load_program(sys, prob, cfg.solver, on_step);
  res.wall_seconds = (static_cast<double>(clock()) - t0) / CLOCKS_PER_SEC;
  writer.finish(cfg, res.wall_seconds, res.run.state);
  return res;
}

}  // namespace pressfrac
