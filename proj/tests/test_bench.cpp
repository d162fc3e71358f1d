#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <string>

#include "pressfrac/bench.hpp"

using namespace pressfrac;
namespace fs = std::filesystem;

namespace {

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TmpDir {
  fs::path path;
  explicit TmpDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TmpDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("short bar run stays elastic and writes its output files") {
  TmpDir tmp("pressfrac_test_bar");
  ProblemConfig cfg = default_config(Benchmark::bar);
  cfg.bar.u_end = 0.002;  // well below the strength limit
  cfg.output.snapshot_stride = 2;
  const BarResult res = run_bar(cfg, tmp.path.string());

  REQUIRE(res.run.records.size() == 4);
  CHECK_FALSE(res.jump_flag);
  // Elastic stage: traction tracks the uniaxial plane-strain stiffness.
  const double Ep = cfg.material.E / (1.0 - cfg.material.nu * cfg.material.nu);
  const double expect = Ep * cfg.bar.u_end / cfg.bar.length;
  CHECK(res.tractions.back() == Catch::Approx(expect).epsilon(0.02));
  CHECK(res.peak_traction == Catch::Approx(res.tractions.back()));
  CHECK(res.sigma_c == Catch::Approx(6.8313005106397).epsilon(1e-10));
  // The end-defect seed produces a small but nonzero opening.
  CHECK(res.separations.back() > 0.0);
  CHECK(res.separations.back() < 1e-4);

  CHECK(fs::exists(tmp.path / "history.tsv"));
  CHECK(fs::exists(tmp.path / "traction_separation.tsv"));
  CHECK(fs::exists(tmp.path / "aperture.tsv"));
  CHECK(fs::exists(tmp.path / "run_meta.txt"));
  CHECK(fs::exists(tmp.path / "snapshots" / "step_0000.vtk"));
  CHECK(first_line(tmp.path / "history.tsv") ==
        "step\tt\tdt\tam_iters\tnewton_iters_u\tnewton_iters_d\t|r_u|\t|r_d|\tpressure\ttraction"
        "\tseparation\td_center");
  CHECK(first_line(tmp.path / "traction_separation.tsv") == "separation\ttraction");
  CHECK(first_line(tmp.path / "snapshots" / "step_0000.vtk") == "# vtk DataFile Version 3.0");
  const std::string vtk = read_all(tmp.path / "snapshots" / "step_0000.vtk");
  CHECK(vtk.find("SCALARS damage double 1") != std::string::npos);
  CHECK(vtk.find("VECTORS displacement double") != std::string::npos);
  const std::string meta = read_all(tmp.path / "run_meta.txt");
  CHECK(meta.find(kVersion) != std::string::npos);
  CHECK(meta.find("[material]") != std::string::npos);
}

TEST_CASE("bar run input validation") {
  ProblemConfig cfg = default_config(Benchmark::bar);
  cfg.bar.pressure = 3.0;  // > sigma_c / 3 = 2.277
  CHECK_THROWS_AS(run_bar(cfg), std::invalid_argument);
  CHECK_THROWS_AS(run_bar(default_config(Benchmark::hole)), std::invalid_argument);
}

TEST_CASE("short sub-critical hole run stays elastic with compressive hoop stress") {
  TmpDir tmp("pressfrac_test_hole");
  ProblemConfig cfg = default_config(Benchmark::hole);
  cfg.hole.R = 20.0;
  cfg.hole.L = 100.0;
  cfg.hole.p_max = 1.0;  // far below the nucleation pressure
  cfg.mesh.h = 5.0;
  cfg.mesh.h_coarse = 20.0;
  cfg.material.ell = 10.0;
  cfg.solver.dt_init = 0.5;
  cfg.solver.dt_max = 0.5;
  cfg.output.snapshot_stride = 0;
  const HoleResult res = run_hole(cfg, tmp.path.string());

  REQUIRE(res.pressures.size() >= 2);
  CHECK(res.pressures.back() == Catch::Approx(1.0));
  CHECK(res.midplane_onset_step == -1);
  CHECK(res.hole_damage_step == -1);
  CHECK(res.d_mid_max.back() < 1e-6);
  // Kirsch estimate at (-R, 0): hoop ~ sigma_H - 3 sigma_V + p = -1.5 MPa
  // (compressive); the coarse finite mesh only needs the right ballpark.
  CHECK(res.hoop.back() < 0.0);
  CHECK(res.hoop.back() > -4.0);
  CHECK(fs::exists(tmp.path / "history.tsv"));
}

TEST_CASE("short surfing run produces a positive J history") {
  TmpDir tmp("pressfrac_test_surfing");
  ProblemConfig cfg = default_config(Benchmark::surfing);
  cfg.surfing = {40.0, 200.0, 100.0, 10.0, 0.5};
  cfg.material.ell = 10.0;
  cfg.mesh.h = 2.5;
  cfg.mesh.h_coarse = 25.0;
  cfg.mesh.band = 40.0;
  const double tau = cfg.surfing.a / cfg.surfing.V;
  cfg.solver.dt_init = 0.1 * tau;
  cfg.solver.dt_max = 0.1 * tau;
  cfg.solver.dt_min = 1e-3 * tau;
  cfg.output.snapshot_stride = 0;
  const SurfingResult res = run_surfing(cfg, tmp.path.string());

  REQUIRE(!res.J.empty());
  CHECK(res.tau == Catch::Approx(4.0));
  CHECK(std::isnan(res.steady_error));  // run ends before the steady window
  // The seeded crack is loaded near criticality from the start.
  CHECK(res.J.back() > 0.1 * res.gc_eff);
  CHECK(res.J.back() < 10.0 * res.gc_eff);
  CHECK(res.tip_x.back() >= cfg.surfing.a - 1e-9);
  CHECK(res.gc_eff == Catch::Approx((1.0 + 2.0 * 2.5 / ((8.0 / 3.0) * 10.0)) * 0.12));
  CHECK(fs::exists(tmp.path / "j_history.tsv"));
  CHECK(first_line(tmp.path / "j_history.tsv") == "t_over_tau\tJ\tJ_over_gc_eff");
}

TEST_CASE("formulation guards on the drivers") {
  ProblemConfig cfg = default_config(Benchmark::surfing);
  cfg.formulation.degradation = Degradation::cohesive;
  CHECK_THROWS_AS(run_surfing(cfg), std::invalid_argument);
  ProblemConfig ch = default_config(Benchmark::hole);
  ch.formulation.degradation = Degradation::quadratic;
  CHECK_THROWS_AS(run_hole(ch), std::invalid_argument);
}
