// Command-line front end: `pressfrac run <config> [...]` executes a
// benchmark described by an INI config; `pressfrac oracle [...]` prints
// the closed-form pressurized-crack quantities as TSV.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pressfrac/bench.hpp"
#include "pressfrac/config.hpp"
#include "pressfrac/lefm.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& formulation, const std::string& indicator, double ell) {
  using namespace pressfrac;
  ProblemConfig cfg = parse_config(config_path);
  if (!formulation.empty()) {
    cfg.formulation.virtual_crack =
        formulation == "uvc" ? VirtualCrack::UVC
        : formulation == "lvc"
            ? VirtualCrack::LVC
            : throw std::runtime_error("--formulation must be uvc or lvc, got '" + formulation +
                                       "'");
  }
  if (!indicator.empty()) {
    if (indicator == "d")
      cfg.formulation.indicator = Indicator::linear;
    else if (indicator == "d2")
      cfg.formulation.indicator = Indicator::quadratic;
    else if (indicator == "2d-d2")
      cfg.formulation.indicator = Indicator::two_d_minus_d2;
    else
      throw std::runtime_error("--indicator must be d, d2 or 2d-d2, got '" + indicator + "'");
  }
  if (ell > 0.0) cfg.material.ell = ell;
  if (!out_override.empty()) cfg.output.directory = out_override;
  cfg.formulation.validate();
  const std::string out = cfg.output.directory;

  switch (cfg.benchmark) {
    case Benchmark::bar: {
      const BarResult r = run_bar(cfg, out);
      std::printf("bar: steps=%zu peak_traction=%.6g MPa sigma_c=%.6g MPa jump_flag=%d\n",
                  r.run.records.size(), r.peak_traction, r.sigma_c, r.jump_flag ? 1 : 0);
      break;
    }
    case Benchmark::surfing: {
      const SurfingResult r = run_surfing(cfg, out);
      std::printf("surfing: steps=%zu p=%.6g MPa Gc_eff=%.6g steady_error=%.4f\n",
                  r.run.records.size(), r.pressure, r.gc_eff, r.steady_error);
      break;
    }
    case Benchmark::hole: {
      const HoleResult r = run_hole(cfg, out);
      std::printf(
          "hole: steps=%zu sigma_c=%.6g MPa onset_step=%d onset_hoop=%.6g hole_damage_step=%d\n",
          r.run.records.size(), r.sigma_c, r.midplane_onset_step, r.onset_hoop,
          r.hole_damage_step);
      break;
    }
  }
  std::printf("outputs written to %s\n", out.c_str());
  return 0;
}

int cmd_oracle(const std::vector<double>& a_list, double E, double nu, double Gc, double p) {
  using namespace pressfrac;
  const lefm::PlaneStrainConstants c{E, nu};
  std::printf("a\tp\tK_I\tG\tw0\tp_c\tp_surfing\n");
  for (double a : a_list) {
    const lefm::PressureProfile prof = lefm::PressureProfile::uniform(p, a);
    const double K = lefm::sif(prof, a);
    const double G = lefm::energy_release_rate(prof, a, c);
    const double w0 = lefm::aperture_sneddon(prof, a, c, 0.0);
    const lefm::CriticalPressure pc = lefm::critical_pressure_uniform(a, c, Gc);
    std::printf("%.12g\t%.12g\t%.12g\t%.12g\t%.12g\t%.12g\t%.12g\n", a, p, K, G, w0, pc.p_c,
                pc.surfing);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pressfrac: phase-field solver for pressurized fractures"};
  app.require_subcommand(1);

  std::string config_path, out_dir, formulation, indicator;
  double ell = 0.0;
  CLI::App* run = app.add_subcommand("run", "run a benchmark from a config file");
  run->add_option("config", config_path, "INI config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");
  run->add_option("--formulation", formulation, "uvc|lvc (overrides config)");
  run->add_option("--indicator", indicator, "d|d2|2d-d2 (overrides config)");
  run->add_option("--ell", ell, "regularization length in mm (overrides config)");

  std::vector<double> a_list{1600.0};
  double E = 3e4, nu = 0.2, Gc = 0.12, p = 1.0;
  CLI::App* oracle = app.add_subcommand("oracle", "print closed-form LEFM quantities as TSV");
  oracle->add_option("--a", a_list, "crack half-lengths in mm");
  oracle->add_option("--E", E, "Young's modulus in MPa");
  oracle->add_option("--nu", nu, "Poisson's ratio");
  oracle->add_option("--Gc", Gc, "critical fracture energy in mJ/mm^2");
  oracle->add_option("--p", p, "uniform pressure in MPa");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, formulation, indicator, ell);
    return cmd_oracle(a_list, E, nu, Gc, p);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
