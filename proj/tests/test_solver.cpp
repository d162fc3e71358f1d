#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "helpers.hpp"
#include "pressfrac/solver.hpp"

using namespace pressfrac;

namespace {

Mesh small_square(double h) {
  MeshSpec s;
  s.variant = MeshVariant::rect_uniform;
  s.W = 1.0;
  s.H = 1.0;
  s.h_coarse = h;
  return generate_mesh(s);
}

Material soft_material() {
  Material m;
  m.E = 100.0;
  m.nu = 0.25;
  m.Gc = 0.05;
  m.ell = 0.3;
  m.psi_c = 0.0;
  m.xi = 1e-8;
  m.p_shape = 1.0;
  m.eta = 0.0;
  return m;
}

Formulation uvc_at2() {
  Formulation f;
  f.virtual_crack = VirtualCrack::UVC;
  f.indicator = Indicator::linear;
  f.dissipation = Dissipation::AT2;
  f.degradation = Degradation::quadratic;
  f.split = Split::none;
  return f;
}

}  // namespace

TEST_CASE("damage solve returns the lower bound when nothing drives it") {
  // Zero displacement, AT1: the local term pushes d down everywhere, so
  // the irreversibility bound d >= d_prev must hold with equality.
  const Mesh mesh = small_square(0.25);
  FemSystem sys(mesh);
  Problem prob;
  prob.mesh = &mesh;
  prob.mat = soft_material();
  prob.form = uvc_at2();
  prob.form.dissipation = Dissipation::AT1;
  SolverConfig cfg;

  const int n = static_cast<int>(mesh.nodes.size());
  Eigen::VectorXd d = Eigen::VectorXd::Constant(n, 0.5);
  const Eigen::VectorXd d_prev = Eigen::VectorXd::Constant(n, 0.3);
  active_set_solve_damage(sys, prob, Eigen::VectorXd::Zero(2 * n), d, d_prev, 1.0, 0.0, cfg, {});
  CHECK((d - d_prev).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("active-set solution matches a projected-gradient oracle") {
  // UVC + AT2 + quadratic degradation makes the damage residual linear
  // in d, so projected gradient descent on the same residual converges
  // to the unique constrained minimizer.
  const Mesh mesh = small_square(0.25);
  FemSystem sys(mesh);
  Problem prob;
  prob.mesh = &mesh;
  prob.mat = soft_material();
  prob.form = uvc_at2();
  SolverConfig cfg;

  const int n = static_cast<int>(mesh.nodes.size());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n);
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double x = mesh.nodes[i].x;
    u[2 * i] = 0.04 * x * x;  // strain ramps in x: zero driving force at x = 0
  }
  const Eigen::VectorXd d_prev = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  active_set_solve_damage(sys, prob, u, d, d_prev, 1.0, 0.0, cfg, {});

  // Projected gradient with step 1/lambda_max(Kd).
  Eigen::VectorXd r;
  Eigen::VectorXd dg = Eigen::VectorXd::Zero(n);
  assemble_damage(sys, u, dg, d_prev, 1.0, 0.0, prob.mat, prob.form, r, true);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lam = 0.0;
  for (int k = 0; k < 200; ++k) {
    v = (sys.Kd * v).normalized();
    lam = v.dot(sys.Kd * v);
  }
  const double tau = 1.0 / lam;
  for (int k = 0; k < 200000; ++k) {
    assemble_damage(sys, u, dg, d_prev, 1.0, 0.0, prob.mat, prob.form, r, false);
    Eigen::VectorXd next = (dg - tau * r).cwiseMax(d_prev).cwiseMin(1.0);
    const double move = (next - dg).cwiseAbs().maxCoeff();
    dg = next;
    if (move < 1e-14) break;
  }

  CHECK(dg.maxCoeff() > 0.05);  // the load actually produced damage
  CHECK((d - dg).cwiseAbs().maxCoeff() < 1e-8);

  // KKT at the active-set solution.
  assemble_damage(sys, u, d, d_prev, 1.0, 0.0, prob.mat, prob.form, r, false);
  for (int i = 0; i < n; ++i) {
    if (d[i] <= d_prev[i] + 1e-12)
      CHECK(r[i] > -1e-8);
    else if (d[i] >= 1.0 - 1e-12)
      CHECK(r[i] < 1e-8);
    else
      CHECK(std::abs(r[i]) < 1e-8);
  }
}

TEST_CASE("load program reproduces linear elasticity when damage is inactive") {
  const Mesh mesh = small_square(0.25);
  FemSystem sys(mesh);
  Problem prob;
  prob.mesh = &mesh;
  prob.mat = soft_material();
  prob.mat.Gc = 1e3;  // far from the damage threshold
  prob.form = uvc_at2();
  prob.form.dissipation = Dissipation::AT1;
  prob.mat.psi_c = 1.0;
  prob.form.degradation = Degradation::cohesive;
  const double eps = 1e-4;
  prob.disp_bcs = {{"left", 0, [](double, double, double) { return 0.0; }},
                   {"bottom", 1, [](double, double, double) { return 0.0; }},
                   {"right", 0, [eps](double, double, double t) { return eps * t; }}};
  prob.t_end = 1.0;
  SolverConfig cfg;
  cfg.dt_init = 0.25;
  cfg.dt_max = 0.25;

  const RunResult res = run_load_program(sys, prob, cfg);
  REQUIRE(res.records.size() == 4);
  CHECK(res.state.d.cwiseAbs().maxCoeff() == 0.0);
  // Uniaxial plane-strain stretch with free top: u_x = eps x, u_y = -nu/(1-nu) eps y.
  const double lat = -prob.mat.nu / (1.0 - prob.mat.nu) * eps;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    CHECK(std::abs(res.state.u[2 * i] - eps * mesh.nodes[i].x) < 1e-10);
    CHECK(std::abs(res.state.u[2 * i + 1] - lat * mesh.nodes[i].y) < 1e-10);
  }
}

TEST_CASE("repeated runs are bitwise deterministic") {
  const Mesh mesh = small_square(0.25);
  Problem prob;
  prob.mesh = &mesh;
  prob.mat = soft_material();
  prob.form = uvc_at2();
  prob.disp_bcs = {{"left", 0, [](double, double, double) { return 0.0; }},
                   {"left", 1, [](double, double, double) { return 0.0; }},
                   {"right", 0, [](double, double, double t) { return 0.05 * t; }}};
  prob.t_end = 1.0;
  SolverConfig cfg;
  cfg.dt_init = 0.5;
  cfg.dt_max = 0.5;

  FemSystem sys_a(mesh);
  const RunResult a = run_load_program(sys_a, prob, cfg);
  FemSystem sys_b(mesh);
  const RunResult b = run_load_program(sys_b, prob, cfg);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.state.u == b.state.u);
  CHECK(a.state.d == b.state.d);
}

TEST_CASE("irreversibility holds across decreasing loads") {
  const Mesh mesh = small_square(0.25);
  FemSystem sys(mesh);
  Problem prob;
  prob.mesh = &mesh;
  prob.mat = soft_material();
  prob.form = uvc_at2();
  // Load up, then fully unload.
  prob.disp_bcs = {{"left", 0, [](double, double, double) { return 0.0; }},
                   {"left", 1, [](double, double, double) { return 0.0; }},
                   {"right", 0, [](double, double, double t) {
                      return 0.06 * (t <= 0.5 ? t : 1.0 - t) * 2.0;
                    }}};
  prob.t_end = 1.0;
  SolverConfig cfg;
  cfg.dt_init = 0.125;
  cfg.dt_max = 0.125;

  Eigen::VectorXd prev;
  double peak = 0.0;
  run_load_program(sys, prob, cfg, [&](const SolveState& st, const StepRecord&) {
    if (prev.size() > 0) CHECK((st.d - prev).minCoeff() > -1e-12);
    peak = std::max(peak, st.d.maxCoeff());
    prev = st.d;
  });
  CHECK(peak > 0.01);
  CHECK(prev.maxCoeff() == Catch::Approx(peak));
}

TEST_CASE("hopeless steps abort below the minimum step size") {
  const Mesh mesh = small_square(0.5);
  FemSystem sys(mesh);
  Problem prob;
  prob.mesh = &mesh;
  prob.mat = soft_material();
  prob.form = uvc_at2();
  prob.disp_bcs = {{"left", 0, [](double, double, double) { return 0.0; }},
                   {"left", 1, [](double, double, double) { return 0.0; }},
                   {"right", 0, [](double, double, double t) { return 0.05 * t; }}};
  prob.t_end = 1.0;
  SolverConfig cfg;
  cfg.am_max_iter = 1;  // the staggered loop cannot converge in one pass here
  cfg.am_tol = 1e-14;
  cfg.dt_init = 1.0;
  cfg.dt_min = 0.5;
  CHECK_THROWS_AS(run_load_program(sys, prob, cfg), ConvergenceError);
}

TEST_CASE("solver configuration is validated") {
  SolverConfig cfg;
  cfg.cutback = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.dt_max = 0.1;  // below dt_init
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
