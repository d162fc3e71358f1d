/** @file config.hpp
 *  @brief INI-style run configuration: strict parser (unknown keys and
 *         sections rejected, errors carry line numbers), writer, and the
 *         typed ProblemConfig consumed by the benchmark drivers.
 */
#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pressfrac/constitutive.hpp"
#include "pressfrac/solver.hpp"

namespace pressfrac {

enum class Benchmark { bar, hole, surfing };

struct MeshConfig {
  double h = 0.0;         ///< fine element size; 0 = benchmark default
  double h_coarse = 0.0;  ///< far-field size for graded meshes; 0 = default
  double band = 0.0;      ///< refined band height; 0 = default

  bool operator==(const MeshConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  int snapshot_stride = 10;  ///< write a VTK snapshot every N steps; 0 disables

  bool operator==(const OutputConfig&) const = default;
};

struct BarConfig {
  double length = 200.0;     ///< quarter-model length (mm)
  double width = 1.0;        ///< quarter-model height (mm)
  double pressure = 0.0;     ///< chamber pressure (MPa)
  double du = 5e-4;          ///< initial end-displacement increment (mm)
  double u_end = 0.04;       ///< final end displacement (mm)
  double defect = 1e-3;      ///< initial defect damage value

  bool operator==(const BarConfig&) const = default;
};

struct HoleConfig {
  double R = 100.0;          ///< hole radius (mm)
  double L = 1250.0;         ///< half-width of the square plate (mm)
  double sigma_H = 5.0;      ///< horizontal far-field compression (MPa)
  double sigma_V = 2.5;      ///< vertical far-field compression (MPa)
  double p_rate = 1.0;       ///< hole pressure ramp rate (MPa per unit t)
  double p_max = 12.0;       ///< final hole pressure (MPa)

  bool operator==(const HoleConfig&) const = default;
};

struct SurfingConfig {
  double a = 1600.0;         ///< initial crack length (mm)
  double W = 8000.0;         ///< strip width (mm)
  double H = 4000.0;         ///< half-model height (mm)
  double V = 400.0;          ///< surfing velocity (mm/s)
  double t_end_over_tau = 1.5;

  bool operator==(const SurfingConfig&) const = default;
};

struct ProblemConfig {
  Benchmark benchmark = Benchmark::bar;
  Material material;
  Formulation formulation;
  MeshConfig mesh;
  SolverConfig solver;
  OutputConfig output;
  BarConfig bar;
  HoleConfig hole;
  SurfingConfig surfing;

  bool operator==(const ProblemConfig& o) const {
    auto mat_eq = [](const Material& a, const Material& b) {
      return a.E == b.E && a.nu == b.nu && a.Gc == b.Gc && a.ell == b.ell && a.psi_c == b.psi_c &&
             a.xi == b.xi && a.p_shape == b.p_shape && a.eta == b.eta;
    };
    auto form_eq = [](const Formulation& a, const Formulation& b) {
      return a.virtual_crack == b.virtual_crack && a.indicator == b.indicator &&
             a.dissipation == b.dissipation && a.degradation == b.degradation &&
             a.split == b.split;
    };
    auto sol_eq = [](const SolverConfig& a, const SolverConfig& b) {
      return a.newton_tol == b.newton_tol && a.newton_max_iter == b.newton_max_iter &&
             a.am_tol == b.am_tol && a.am_max_iter == b.am_max_iter &&
             a.active_set_max_cycles == b.active_set_max_cycles &&
             a.kkt_abs_tol == b.kkt_abs_tol && a.cg_tol == b.cg_tol &&
             a.dt_init == b.dt_init && a.dt_min == b.dt_min && a.dt_max == b.dt_max &&
             a.cutback == b.cutback && a.growth == b.growth;
    };
    return benchmark == o.benchmark && mat_eq(material, o.material) &&
           form_eq(formulation, o.formulation) && mesh == o.mesh && sol_eq(solver, o.solver) &&
           output == o.output && bar == o.bar && hole == o.hole && surfing == o.surfing;
  }
};

/// Fully resolved defaults for each benchmark: material values, mesh
/// sizes, and load-stepping scales.  A config file must declare its
/// blocks ([problem], [formulation], [material], [mesh], and the
/// benchmark's own block) but within them every key is an optional
/// override of these defaults.
inline ProblemConfig default_config(Benchmark b) {
  ProblemConfig c;
  c.benchmark = b;
  switch (b) {
    case Benchmark::bar:
      c.material = {4e5, 0.2, 0.12, 10.0, 5.6e-5, 1e-8, 1.0, 0.0};
      c.formulation.dissipation = Dissipation::AT1;
      c.formulation.degradation = Degradation::cohesive;
      c.formulation.split = Split::none;
      c.mesh.h = 1.0;
      c.solver.dt_init = c.bar.du;
      c.solver.dt_max = c.bar.du;
      c.solver.dt_min = c.bar.du / 64.0;
      c.output.snapshot_stride = 0;
      break;
    case Benchmark::hole:
      c.material = {1.9e4, 0.2, 0.077, 10.0, 7.96e-4, 1e-8, 1.0, 1e-3};
      c.formulation.dissipation = Dissipation::AT1;
      c.formulation.degradation = Degradation::cohesive;
      c.formulation.split = Split::spectral;
      c.mesh.h = 2.5;
      c.mesh.h_coarse = 50.0;
      // dt in pressure-ramp time units: ~0.1 MPa per step at p_rate = 1.
      c.solver.dt_init = 0.1;
      c.solver.dt_max = 0.1;
      c.solver.dt_min = 0.1 / 256.0;
      break;
    case Benchmark::surfing: {
      c.material = {3e4, 0.2, 0.12, 40.0, 1.0, 1e-8, 1.0, 0.0};
      c.formulation.dissipation = Dissipation::AT1;
      c.formulation.degradation = Degradation::quadratic;
      c.formulation.split = Split::none;
      c.mesh.h = 0.0;  // 0 = ell / 4
      c.mesh.h_coarse = 250.0;
      c.mesh.band = 0.0;  // 0 = 4 ell
      const double tau = c.surfing.a / c.surfing.V;
      c.solver.dt_init = 0.02 * tau;
      c.solver.dt_max = 0.02 * tau;
      c.solver.dt_min = 0.02 * tau / 64.0;
      break;
    }
  }
  return c;
}

namespace detail {

struct IniEntry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};
using IniSection = std::map<std::string, IniEntry>;
using IniFile = std::map<std::string, std::pair<IniSection, int>>;  // section -> (keys, line)

inline std::string ini_trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline IniFile parse_ini(std::istream& in, const std::string& origin) {
  IniFile file;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = ini_trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                 ": malformed section header '" + t + "'");
      section = ini_trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty section name");
      if (file.count(section))
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate section [" +
                                 section + "]");
      file[section] = {{}, lineno};
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'key = value', got '" + t + "'");
    if (section.empty())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": key outside any section");
    const std::string key = ini_trim(t.substr(0, eq));
    const std::string value = ini_trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
    auto& sec = file[section].first;
    if (sec.count(key))
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                               "' in [" + section + "]");
    sec[key] = {value, lineno, false};
  }
  return file;
}

/// Typed access with consumption tracking for strict-mode leftover checks.
class SectionReader {
 public:
  SectionReader(const IniFile& file, const std::string& origin, const std::string& name,
                bool required)
      : origin_(origin), name_(name) {
    auto it = file.find(name);
    if (it == file.end()) {
      if (required)
        throw std::runtime_error(origin + ": missing required section [" + name + "]");
      sec_ = nullptr;
    } else {
      sec_ = &it->second.first;
    }
  }

  bool present() const { return sec_ != nullptr; }

  double number(const std::string& key, double def) const {
    const IniEntry* e = find(key);
    if (!e) return def;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(e->value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != e->value.size())
      throw std::runtime_error(origin_ + ":" + std::to_string(e->line) + ": key '" + key +
                               "' is not a number: '" + e->value + "'");
    return v;
  }

  int integer(const std::string& key, int def) const {
    const double v = number(key, static_cast<double>(def));
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw std::runtime_error(origin_ + ": key '" + key + "' in [" + name_ +
                               "] must be an integer");
    return i;
  }

  std::string text(const std::string& key, const std::string& def) const {
    const IniEntry* e = find(key);
    return e ? e->value : def;
  }

  int line(const std::string& key) const {
    const IniEntry* e = find(key);
    return e ? e->line : 0;
  }

  void finish() const {
    if (!sec_) return;
    for (const auto& [key, entry] : *sec_)
      if (!entry.used)
        throw std::runtime_error(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" +
                                 key + "' in [" + name_ + "]");
  }

 private:
  const IniEntry* find(const std::string& key) const {
    if (!sec_) return nullptr;
    auto it = sec_->find(key);
    if (it == sec_->end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
  const IniSection* sec_;
  std::string origin_, name_;
};

template <class T>
inline T parse_enum(const SectionReader& sec, const std::string& origin, const std::string& key,
                    const std::string& value,
                    const std::vector<std::pair<std::string, T>>& table) {
  for (const auto& [name, v] : table)
    if (value == name) return v;
  std::string allowed;
  for (const auto& [name, v] : table) allowed += (allowed.empty() ? "" : "|") + name;
  throw std::runtime_error(origin + ":" + std::to_string(sec.line(key)) + ": key '" + key +
                           "' must be one of " + allowed + ", got '" + value + "'");
}

inline const std::vector<std::pair<std::string, Benchmark>>& benchmark_names() {
  static const std::vector<std::pair<std::string, Benchmark>> t = {
      {"bar", Benchmark::bar}, {"hole", Benchmark::hole}, {"surfing", Benchmark::surfing}};
  return t;
}
inline const std::vector<std::pair<std::string, VirtualCrack>>& vc_names() {
  static const std::vector<std::pair<std::string, VirtualCrack>> t = {
      {"uvc", VirtualCrack::UVC}, {"lvc", VirtualCrack::LVC}};
  return t;
}
inline const std::vector<std::pair<std::string, Indicator>>& indicator_names() {
  static const std::vector<std::pair<std::string, Indicator>> t = {
      {"d", Indicator::linear},
      {"d2", Indicator::quadratic},
      {"2d-d2", Indicator::two_d_minus_d2}};
  return t;
}
inline const std::vector<std::pair<std::string, Dissipation>>& dissipation_names() {
  static const std::vector<std::pair<std::string, Dissipation>> t = {{"at1", Dissipation::AT1},
                                                                     {"at2", Dissipation::AT2}};
  return t;
}
inline const std::vector<std::pair<std::string, Degradation>>& degradation_names() {
  static const std::vector<std::pair<std::string, Degradation>> t = {
      {"quadratic", Degradation::quadratic}, {"cohesive", Degradation::cohesive}};
  return t;
}
inline const std::vector<std::pair<std::string, Split>>& split_names() {
  static const std::vector<std::pair<std::string, Split>> t = {{"none", Split::none},
                                                               {"spectral", Split::spectral}};
  return t;
}

template <class T>
inline std::string enum_name(T v, const std::vector<std::pair<std::string, T>>& table) {
  for (const auto& [name, value] : table)
    if (value == v) return name;
  throw std::invalid_argument("enum_name: value not in table");
}

inline std::string num_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline ProblemConfig parse_config_stream(std::istream& in, const std::string& origin) {
  using detail::SectionReader;
  const detail::IniFile file = detail::parse_ini(in, origin);

  SectionReader problem(file, origin, "problem", true);
  const Benchmark bench = detail::parse_enum(
      problem, origin, "benchmark", problem.text("benchmark", ""), detail::benchmark_names());
  problem.finish();
  // All other keys override the benchmark's resolved defaults.
  ProblemConfig c = default_config(bench);

  SectionReader form(file, origin, "formulation", true);
  using detail::enum_name;
  c.formulation.virtual_crack = detail::parse_enum(
      form, origin, "virtual_crack",
      form.text("virtual_crack", enum_name(c.formulation.virtual_crack, detail::vc_names())),
      detail::vc_names());
  c.formulation.indicator = detail::parse_enum(
      form, origin, "indicator",
      form.text("indicator", enum_name(c.formulation.indicator, detail::indicator_names())),
      detail::indicator_names());
  c.formulation.dissipation = detail::parse_enum(
      form, origin, "dissipation",
      form.text("dissipation", enum_name(c.formulation.dissipation, detail::dissipation_names())),
      detail::dissipation_names());
  c.formulation.degradation = detail::parse_enum(
      form, origin, "degradation",
      form.text("degradation", enum_name(c.formulation.degradation, detail::degradation_names())),
      detail::degradation_names());
  c.formulation.split = detail::parse_enum(
      form, origin, "split",
      form.text("split", enum_name(c.formulation.split, detail::split_names())),
      detail::split_names());
  const std::string plane = form.text("plane", "strain");
  if (plane != "strain")
    throw std::runtime_error(origin + ":" + std::to_string(form.line("plane")) +
                             ": only plane = strain is supported (got '" + plane + "')");
  form.finish();
  c.formulation.validate();

  SectionReader mat(file, origin, "material", true);
  c.material.E = mat.number("E", c.material.E);
  c.material.nu = mat.number("nu", c.material.nu);
  c.material.Gc = mat.number("Gc", c.material.Gc);
  c.material.ell = mat.number("ell", c.material.ell);
  c.material.psi_c = mat.number("psi_c", c.material.psi_c);
  c.material.xi = mat.number("xi", c.material.xi);
  c.material.p_shape = mat.number("p_shape", c.material.p_shape);
  c.material.eta = mat.number("eta", c.material.eta);
  mat.finish();
  c.material.validate(c.formulation.degradation == Degradation::cohesive);

  SectionReader mesh(file, origin, "mesh", true);
  c.mesh.h = mesh.number("h", c.mesh.h);
  c.mesh.h_coarse = mesh.number("h_coarse", c.mesh.h_coarse);
  c.mesh.band = mesh.number("band", c.mesh.band);
  mesh.finish();

  SectionReader solver(file, origin, "solver", false);
  c.solver.newton_tol = solver.number("newton_tol", c.solver.newton_tol);
  c.solver.newton_max_iter = solver.integer("newton_max_iter", c.solver.newton_max_iter);
  c.solver.am_tol = solver.number("am_tol", c.solver.am_tol);
  c.solver.am_max_iter = solver.integer("am_max_iter", c.solver.am_max_iter);
  c.solver.active_set_max_cycles =
      solver.integer("active_set_max_cycles", c.solver.active_set_max_cycles);
  c.solver.kkt_abs_tol = solver.number("kkt_abs_tol", c.solver.kkt_abs_tol);
  c.solver.cg_tol = solver.number("cg_tol", c.solver.cg_tol);
  c.solver.dt_init = solver.number("dt_init", c.solver.dt_init);
  c.solver.dt_min = solver.number("dt_min", c.solver.dt_min);
  c.solver.dt_max = solver.number("dt_max", c.solver.dt_max);
  c.solver.cutback = solver.number("cutback", c.solver.cutback);
  c.solver.growth = solver.number("growth", c.solver.growth);
  solver.finish();
  c.solver.validate();

  SectionReader output(file, origin, "output", false);
  c.output.directory = output.text("directory", c.output.directory);
  c.output.snapshot_stride = output.integer("snapshot_stride", c.output.snapshot_stride);
  output.finish();

  const std::string bench_name = detail::enum_name(c.benchmark, detail::benchmark_names());
  SectionReader bar(file, origin, "bar", c.benchmark == Benchmark::bar);
  c.bar.length = bar.number("length", c.bar.length);
  c.bar.width = bar.number("width", c.bar.width);
  c.bar.pressure = bar.number("pressure", c.bar.pressure);
  c.bar.du = bar.number("du", c.bar.du);
  c.bar.u_end = bar.number("u_end", c.bar.u_end);
  c.bar.defect = bar.number("defect", c.bar.defect);
  bar.finish();

  SectionReader hole(file, origin, "hole", c.benchmark == Benchmark::hole);
  c.hole.R = hole.number("R", c.hole.R);
  c.hole.L = hole.number("L", c.hole.L);
  c.hole.sigma_H = hole.number("sigma_H", c.hole.sigma_H);
  c.hole.sigma_V = hole.number("sigma_V", c.hole.sigma_V);
  c.hole.p_rate = hole.number("p_rate", c.hole.p_rate);
  c.hole.p_max = hole.number("p_max", c.hole.p_max);
  hole.finish();

  SectionReader surfing(file, origin, "surfing", c.benchmark == Benchmark::surfing);
  c.surfing.a = surfing.number("a", c.surfing.a);
  c.surfing.W = surfing.number("W", c.surfing.W);
  c.surfing.H = surfing.number("H", c.surfing.H);
  c.surfing.V = surfing.number("V", c.surfing.V);
  c.surfing.t_end_over_tau = surfing.number("t_end_over_tau", c.surfing.t_end_over_tau);
  surfing.finish();

  // Strict mode: every section must be one of the known blocks.
  for (const auto& [name, sec] : file) {
    static const std::vector<std::string> known = {"problem", "formulation", "material", "mesh",
                                                   "solver",  "output",      "bar",      "hole",
                                                   "surfing"};
    bool ok = false;
    for (const std::string& k : known) ok = ok || (name == k);
    if (!ok)
      throw std::runtime_error(origin + ":" + std::to_string(sec.second) +
                               ": unknown section [" + name + "]");
  }
  (void)bench_name;
  return c;
}

inline ProblemConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_config: cannot open '" + path + "'");
  return parse_config_stream(in, path);
}

inline std::string write_config(const ProblemConfig& c) {
  using namespace detail;
  std::ostringstream out;
  out << "[problem]\n"
      << "benchmark = " << enum_name(c.benchmark, benchmark_names()) << "\n\n";
  out << "[formulation]\n"
      << "virtual_crack = " << enum_name(c.formulation.virtual_crack, vc_names()) << "\n"
      << "indicator = " << enum_name(c.formulation.indicator, indicator_names()) << "\n"
      << "dissipation = " << enum_name(c.formulation.dissipation, dissipation_names()) << "\n"
      << "degradation = " << enum_name(c.formulation.degradation, degradation_names()) << "\n"
      << "split = " << enum_name(c.formulation.split, split_names()) << "\n"
      << "plane = strain\n\n";
  out << "[material]\n"
      << "E = " << num_str(c.material.E) << "\nnu = " << num_str(c.material.nu)
      << "\nGc = " << num_str(c.material.Gc) << "\nell = " << num_str(c.material.ell)
      << "\npsi_c = " << num_str(c.material.psi_c) << "\nxi = " << num_str(c.material.xi)
      << "\np_shape = " << num_str(c.material.p_shape) << "\neta = " << num_str(c.material.eta)
      << "\n\n";
  out << "[mesh]\n"
      << "h = " << num_str(c.mesh.h) << "\nh_coarse = " << num_str(c.mesh.h_coarse)
      << "\nband = " << num_str(c.mesh.band) << "\n\n";
  out << "[solver]\n"
      << "newton_tol = " << num_str(c.solver.newton_tol)
      << "\nnewton_max_iter = " << c.solver.newton_max_iter
      << "\nam_tol = " << num_str(c.solver.am_tol) << "\nam_max_iter = " << c.solver.am_max_iter
      << "\nactive_set_max_cycles = " << c.solver.active_set_max_cycles
      << "\nkkt_abs_tol = " << num_str(c.solver.kkt_abs_tol)
      << "\ncg_tol = " << num_str(c.solver.cg_tol) << "\ndt_init = " << num_str(c.solver.dt_init)
      << "\ndt_min = " << num_str(c.solver.dt_min) << "\ndt_max = " << num_str(c.solver.dt_max)
      << "\ncutback = " << num_str(c.solver.cutback) << "\ngrowth = " << num_str(c.solver.growth)
      << "\n\n";
  out << "[output]\n"
      << "directory = " << c.output.directory
      << "\nsnapshot_stride = " << c.output.snapshot_stride << "\n\n";
  out << "[bar]\n"
      << "length = " << num_str(c.bar.length) << "\nwidth = " << num_str(c.bar.width)
      << "\npressure = " << num_str(c.bar.pressure) << "\ndu = " << num_str(c.bar.du)
      << "\nu_end = " << num_str(c.bar.u_end) << "\ndefect = " << num_str(c.bar.defect) << "\n\n";
  out << "[hole]\n"
      << "R = " << num_str(c.hole.R) << "\nL = " << num_str(c.hole.L)
      << "\nsigma_H = " << num_str(c.hole.sigma_H) << "\nsigma_V = " << num_str(c.hole.sigma_V)
      << "\np_rate = " << num_str(c.hole.p_rate) << "\np_max = " << num_str(c.hole.p_max)
      << "\n\n";
  out << "[surfing]\n"
      << "a = " << num_str(c.surfing.a) << "\nW = " << num_str(c.surfing.W)
      << "\nH = " << num_str(c.surfing.H) << "\nV = " << num_str(c.surfing.V)
      << "\nt_end_over_tau = " << num_str(c.surfing.t_end_over_tau) << "\n";
  return out.str();
}

}  // namespace pressfrac
