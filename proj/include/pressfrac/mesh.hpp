/** @file mesh.hpp
 *  @brief Structured 2D mesh generation (uniform / band-refined
 *         rectangles, mapped quarter plate with hole), a plain-text mesh
 *         format, and the named boundary / node sets used for boundary
 *         conditions and post-processing.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pressfrac {

enum class ElemKind { quad4, tri3 };

struct Element {
  ElemKind kind = ElemKind::quad4;
  std::array<int, 4> n{-1, -1, -1, -1};

  int nnodes() const { return kind == ElemKind::quad4 ? 4 : 3; }
};

struct Node {
  double x = 0.0, y = 0.0;
};

/// (element index, local edge index) pair naming one boundary edge.
struct BoundaryEdge {
  int element;
  int edge;
  bool operator==(const BoundaryEdge&) const = default;
};

struct Mesh {
  std::vector<Node> nodes;
  std::vector<Element> elements;
  std::map<std::string, std::vector<BoundaryEdge>> boundary_sets;
  std::map<std::string, std::vector<int>> node_sets;

  /// Local node pairs of an element edge, counter-clockwise.
  static std::pair<int, int> edge_local_nodes(ElemKind kind, int edge) {
    if (kind == ElemKind::quad4) {
      static constexpr int e[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
      return {e[edge][0], e[edge][1]};
    }
    static constexpr int e[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    return {e[edge][0], e[edge][1]};
  }

  double element_area(int e) const {
    const Element& el = elements[e];
    double a = 0.0;
    const int nn = el.nnodes();
    for (int i = 0; i < nn; ++i) {
      const Node& p = nodes[el.n[i]];
      const Node& q = nodes[el.n[(i + 1) % nn]];
      a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
  }

  double total_area() const {
    double a = 0.0;
    for (int e = 0; e < static_cast<int>(elements.size()); ++e) a += element_area(e);
    return a;
  }

  std::array<double, 4> bounding_box() const {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const Node& n : nodes) {
      xmin = std::min(xmin, n.x);
      xmax = std::max(xmax, n.x);
      ymin = std::min(ymin, n.y);
      ymax = std::max(ymax, n.y);
    }
    return {xmin, xmax, ymin, ymax};
  }

  const std::vector<int>& node_set(const std::string& name) const {
    auto it = node_sets.find(name);
    if (it == node_sets.end())
      throw std::invalid_argument("Mesh: unknown node set '" + name + "'");
    return it->second;
  }

  /// Minimum Jacobian determinant over the corners of every element.
  /// For bilinear quads the Jacobian is linear in each reference
  /// coordinate, so positivity at the corners implies positivity at any
  /// interior quadrature point.
  double min_corner_jacobian() const;

  void validate() const;
};

inline double Mesh::min_corner_jacobian() const {
  double jmin = 1e300;
  for (const Element& el : elements) {
    if (el.kind == ElemKind::tri3) {
      const Node& a = nodes[el.n[0]];
      const Node& b = nodes[el.n[1]];
      const Node& c = nodes[el.n[2]];
      jmin = std::min(jmin, (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
      continue;
    }
    for (int k = 0; k < 4; ++k) {
      const Node& prev = nodes[el.n[(k + 3) % 4]];
      const Node& cur = nodes[el.n[k]];
      const Node& next = nodes[el.n[(k + 1) % 4]];
      const double ax = next.x - cur.x, ay = next.y - cur.y;
      const double bx = prev.x - cur.x, by = prev.y - cur.y;
      jmin = std::min(jmin, 0.25 * (ax * by - ay * bx));
    }
  }
  return jmin;
}

inline void Mesh::validate() const {
  const int nn = static_cast<int>(nodes.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const Element& el = elements[e];
    for (int i = 0; i < el.nnodes(); ++i)
      if (el.n[i] < 0 || el.n[i] >= nn)
        throw std::runtime_error("Mesh: element " + std::to_string(e) +
                                 " references node " + std::to_string(el.n[i]) +
                                 " out of range [0," + std::to_string(nn) + ")");
    if (element_area(static_cast<int>(e)) <= 0.0)
      throw std::runtime_error("Mesh: element " + std::to_string(e) +
                               " is not counter-clockwise (nonpositive area)");
  }
  if (min_corner_jacobian() <= 0.0)
    throw std::runtime_error("Mesh: nonpositive Jacobian at an element corner");

  // Duplicate nodes within tolerance 1e-9 x bbox diagonal.
  const auto bb = bounding_box();
  const double diag = std::hypot(bb[1] - bb[0], bb[3] - bb[2]);
  const double tol = 1e-9 * (diag > 0.0 ? diag : 1.0);
  std::vector<int> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return nodes[a].x < nodes[b].x; });
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (nodes[order[j]].x - nodes[order[i]].x > tol) break;
      if (std::abs(nodes[order[j]].y - nodes[order[i]].y) <= tol)
        throw std::runtime_error("Mesh: duplicate nodes " + std::to_string(order[i]) + " and " +
                                 std::to_string(order[j]));
    }

  // Boundary edges must lie on exactly one element.
  std::map<std::pair<int, int>, int> edge_count;
  for (const Element& el : elements) {
    const int ne = el.nnodes();
    for (int k = 0; k < ne; ++k) {
      auto [a, b] = edge_local_nodes(el.kind, k);
      std::pair<int, int> key{std::min(el.n[a], el.n[b]), std::max(el.n[a], el.n[b])};
      edge_count[key]++;
    }
  }
  for (const auto& [name, edges] : boundary_sets)
    for (const BoundaryEdge& be : edges) {
      if (be.element < 0 || be.element >= static_cast<int>(elements.size()))
        throw std::runtime_error("Mesh: boundary set '" + name + "' references invalid element");
      const Element& el = elements[be.element];
      if (be.edge < 0 || be.edge >= el.nnodes())
        throw std::runtime_error("Mesh: boundary set '" + name + "' references invalid edge");
      auto [a, b] = edge_local_nodes(el.kind, be.edge);
      std::pair<int, int> key{std::min(el.n[a], el.n[b]), std::max(el.n[a], el.n[b])};
      if (edge_count.at(key) != 1)
        throw std::runtime_error("Mesh: boundary set '" + name + "' contains an interior edge");
    }
  for (const auto& [name, set] : node_sets)
    for (int n : set)
      if (n < 0 || n >= nn)
        throw std::runtime_error("Mesh: node set '" + name + "' references invalid node");
}

enum class MeshVariant { rect_uniform, rect_band_refined, quarter_hole_mapped, external_file };

struct MeshSpec {
  MeshVariant variant = MeshVariant::rect_uniform;
  double W = 0.0, H = 0.0;   ///< rectangle dimensions (mm)
  double R = 0.0, L = 0.0;   ///< hole radius and plate side (mm)
  double h_coarse = 0.0;     ///< coarse element size (mm)
  double h_fine = 0.0;       ///< fine element size (mm)
  double band = 0.0;         ///< band half-width around y = 0 (mm)

  void validate() const {
    if (h_coarse <= 0.0)
      throw std::invalid_argument("MeshSpec: element sizes must be positive");
    if (variant != MeshVariant::rect_uniform) {
      if (h_fine <= 0.0)
        throw std::invalid_argument("MeshSpec: element sizes must be positive");
      if (h_fine > h_coarse)
        throw std::invalid_argument("MeshSpec: h_fine must not exceed h_coarse");
    }
    switch (variant) {
      case MeshVariant::rect_uniform:
        if (W <= 0.0 || H <= 0.0)
          throw std::invalid_argument("MeshSpec: W, H must be positive");
        break;
      case MeshVariant::rect_band_refined:
        if (W <= 0.0 || H <= 0.0)
          throw std::invalid_argument("MeshSpec: W, H must be positive");
        if (band <= 0.0 || band > H)
          throw std::invalid_argument("MeshSpec: band must be in (0, H]");
        break;
      case MeshVariant::quarter_hole_mapped:
        if (R <= 0.0 || L <= 0.0) throw std::invalid_argument("MeshSpec: R, L must be positive");
        if (R >= 0.5 * L) throw std::invalid_argument("MeshSpec: hole radius must satisfy R < L/2");
        break;
      case MeshVariant::external_file:
        break;
    }
  }
};

namespace detail {

/// Geometric sequence of interval sizes starting at h0, growing by at
/// most a factor of two per step, capped at hmax, covering total
/// exactly.  Steps stay at h0 until `fine_band` is covered.  The closing
/// interval is balanced so no sliver is produced.
inline std::vector<double> graded_steps(double h0, double hmax, double total,
                                        double fine_band = 0.0) {
  std::vector<double> steps;
  double h = h0, done = 0.0;
  const double eps = 1e-12 * total;
  while (done < total - eps) {
    double rem = total - done;
    double next = (done + h0 < fine_band - eps) ? h0 : std::min(h * 2.0, hmax);
    if (steps.empty()) next = h0;  // the first interval is always h0-sized
    if (next >= rem) {
      next = rem;
    } else if (rem - next < 0.5 * next) {
      next = 0.5 * rem;  // split the remainder in two near-equal rows
    }
    steps.push_back(next);
    done += next;
    h = next;
  }
  return steps;
}

inline void add_structured_quads(Mesh& mesh, const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
  const int nx = static_cast<int>(xs.size()) - 1;
  const int ny = static_cast<int>(ys.size()) - 1;
  auto nid = [&](int i, int j) { return j * (nx + 1) + i; };
  mesh.nodes.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.nodes.push_back({xs[i], ys[j]});
  mesh.elements.reserve(nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      Element el;
      el.kind = ElemKind::quad4;
      el.n = {nid(i, j), nid(i + 1, j), nid(i + 1, j + 1), nid(i, j + 1)};
      mesh.elements.push_back(el);
    }
  auto eid = [&](int i, int j) { return j * nx + i; };
  auto& bs = mesh.boundary_sets;
  for (int j = 0; j < ny; ++j) {
    bs["left"].push_back({eid(0, j), 3});
    bs["right"].push_back({eid(nx - 1, j), 1});
  }
  for (int i = 0; i < nx; ++i) {
    bs["bottom"].push_back({eid(i, 0), 0});
    bs["top"].push_back({eid(i, ny - 1), 2});
  }
  auto& ns = mesh.node_sets;
  for (int j = 0; j <= ny; ++j) {
    ns["left"].push_back(nid(0, j));
    ns["right"].push_back(nid(nx, j));
  }
  for (int i = 0; i <= nx; ++i) {
    ns["bottom"].push_back(nid(i, 0));
    ns["top"].push_back(nid(i, ny));
  }
}

}  // namespace detail

/// Axis-aligned quad4 mesh of [0,W] x [0,H].  The band-refined variant
/// keeps rows of height h_fine within the band half-width of y = 0 and
/// grades geometrically to h_coarse above; columns are uniform at the
/// fine size so a crack can travel along y = 0 at constant resolution.
inline Mesh generate_rect(const MeshSpec& spec) {
  spec.validate();
  if (spec.variant != MeshVariant::rect_uniform && spec.variant != MeshVariant::rect_band_refined)
    throw std::invalid_argument("generate_rect: spec variant must be rectangular");

  Mesh mesh;
  std::vector<double> xs, ys;
  if (spec.variant == MeshVariant::rect_uniform) {
    const double h = spec.h_coarse;
    const int nx = std::max(1, static_cast<int>(std::lround(spec.W / h)));
    const int ny = std::max(1, static_cast<int>(std::lround(spec.H / h)));
    for (int i = 0; i <= nx; ++i) xs.push_back(spec.W * i / nx);
    for (int j = 0; j <= ny; ++j) ys.push_back(spec.H * j / ny);
  } else {
    const int nx = std::max(1, static_cast<int>(std::lround(spec.W / spec.h_fine)));
    for (int i = 0; i <= nx; ++i) xs.push_back(spec.W * i / nx);
    const double band = std::min(spec.band, spec.H);
    const int nb = std::max(1, static_cast<int>(std::lround(band / spec.h_fine)));
    ys.push_back(0.0);
    for (int j = 1; j <= nb; ++j) ys.push_back(band * j / nb);
    for (double h : detail::graded_steps(spec.h_fine, spec.h_coarse, spec.H - band))
      ys.push_back(ys.back() + h);
    ys.back() = spec.H;  // absorb rounding
  }
  detail::add_structured_quads(mesh, xs, ys);
  mesh.validate();
  return mesh;
}

/// Mapped quad4 mesh of the top-left quarter of an L x L plate with a
/// quarter-circular hole of radius R at the bottom-right corner of the
/// subdomain (the plate center).  Rays run from the hole arc to the
/// outer square boundary; angular spacing is graded fine toward the
/// x-axis and radial spacing fine toward the hole.
inline Mesh generate_quarter_hole(const MeshSpec& spec) {
  spec.validate();
  if (spec.variant != MeshVariant::quarter_hole_mapped)
    throw std::invalid_argument("generate_quarter_hole: wrong spec variant");

  const double R = spec.R, L = spec.L;
  const double half = 0.5 * L;
  constexpr double pi = 3.14159265358979323846;

  // Angular breakpoints on [pi/2, pi], corner ray at 3pi/4 kept exact.
  // Arc-length steps at the hole grow away from the x-axis (theta = pi).
  // Cap the angular step so that the hoop extent of the OUTERMOST
  // elements (at radius up to half*sqrt(2)) stays below h_coarse;
  // grading by the hole arc alone produces radian-sized steps and
  // hopelessly distorted outer quads.
  const double h_ang_max =
      std::max(spec.h_fine, spec.h_coarse * R / (half * std::sqrt(2.0)));
  auto graded_angles = [&](double th_from, double th_to, bool fine_at_to) {
    const double arc = R * std::abs(th_to - th_from);
    std::vector<double> steps = detail::graded_steps(spec.h_fine, h_ang_max, arc, spec.band);
    std::vector<double> th{th_from};
    double acc = 0.0;
    if (fine_at_to) std::reverse(steps.begin(), steps.end());
    for (double s : steps) {
      acc += s;
      th.push_back(th_from + (th_to - th_from) * acc / arc);
    }
    th.back() = th_to;
    return th;
  };
  std::vector<double> thetas = graded_angles(0.5 * pi, 0.75 * pi, false);
  {
    std::vector<double> lower = graded_angles(0.75 * pi, pi, true);
    thetas.insert(thetas.end(), lower.begin() + 1, lower.end());
  }

  // Radial fractions: fine layer h_fine at the hole, graded outward.
  const double ray_min = half - R;  // shortest ray, along the axes
  std::vector<double> fr{0.0};
  for (double s : detail::graded_steps(spec.h_fine, spec.h_coarse, ray_min, spec.band))
    fr.push_back(fr.back() + s / ray_min);
  fr.back() = 1.0;

  // Outer boundary point in direction theta on the square.
  auto square_pt = [&](double th) -> Node {
    const double c = std::cos(th), s = std::sin(th);
    const double tx = std::abs(c) > 1e-14 ? half / std::abs(c) : 1e300;
    const double ty = s > 1e-14 ? half / s : 1e300;
    const double t = std::min(tx, ty);
    return {t * c, t * s};
  };

  Mesh mesh;
  const int na = static_cast<int>(thetas.size());
  const int nr = static_cast<int>(fr.size());
  auto nid = [&](int ia, int jr) { return ia * nr + jr; };
  for (int ia = 0; ia < na; ++ia) {
    const double th = thetas[ia];
    const Node hole_pt{R * std::cos(th), R * std::sin(th)};
    const Node out_pt = square_pt(th);
    for (int jr = 0; jr < nr; ++jr) {
      const double f = fr[jr];
      mesh.nodes.push_back(
          {hole_pt.x + f * (out_pt.x - hole_pt.x), hole_pt.y + f * (out_pt.y - hole_pt.y)});
    }
  }
  for (int ia = 0; ia + 1 < na; ++ia)
    for (int jr = 0; jr + 1 < nr; ++jr) {
      Element el;
      el.kind = ElemKind::quad4;
      // theta increases from +y toward -x; this ordering is CCW.
      el.n = {nid(ia, jr), nid(ia, jr + 1), nid(ia + 1, jr + 1), nid(ia + 1, jr)};
      mesh.elements.push_back(el);
    }

  auto eid = [&](int ia, int jr) { return ia * (nr - 1) + jr; };
  auto& bs = mesh.boundary_sets;
  auto& ns = mesh.node_sets;
  for (int ia = 0; ia + 1 < na; ++ia) {
    bs["hole"].push_back({eid(ia, 0), 3});
    // Classify the outer edge by its midpoint.
    const Node& p = mesh.nodes[nid(ia, nr - 1)];
    const Node& q = mesh.nodes[nid(ia + 1, nr - 1)];
    const double mx = 0.5 * (p.x + q.x), my = 0.5 * (p.y + q.y);
    const bool on_top = std::abs(my - half) < std::abs(mx + half);
    bs[on_top ? "outer_top" : "outer_left"].push_back({eid(ia, nr - 2), 1});
  }
  for (int jr = 0; jr + 1 < nr; ++jr) {
    bs["symmetry_y"].push_back({eid(0, jr), 0});
    bs["symmetry_x"].push_back({eid(na - 2, jr), 2});
  }
  for (int ia = 0; ia < na; ++ia) {
    ns["hole"].push_back(nid(ia, 0));
    const Node& p = mesh.nodes[nid(ia, nr - 1)];
    if (std::abs(p.y - half) < 1e-9 * L) ns["outer_top"].push_back(nid(ia, nr - 1));
    if (std::abs(p.x + half) < 1e-9 * L) ns["outer_left"].push_back(nid(ia, nr - 1));
  }
  for (int jr = 0; jr < nr; ++jr) {
    ns["symmetry_y"].push_back(nid(0, jr));
    ns["symmetry_x"].push_back(nid(na - 1, jr));
  }
  mesh.validate();
  return mesh;
}

inline Mesh generate_mesh(const MeshSpec& spec) {
  if (spec.variant == MeshVariant::quarter_hole_mapped) return generate_quarter_hole(spec);
  return generate_rect(spec);
}

// ---------------------------------------------------------------------------
// Plain-text mesh format ("pfmesh 1"):
//   pfmesh 1
//   nodes N
//   <x y> x N
//   elements M
//   <quad4|tri3 i j k [l]> x M            (0-based node indices)
//   nodeset <name> <count> <idx...>       (optional, repeatable)
//   boundaryset <name> <count> <elem edge ...>
// ---------------------------------------------------------------------------

inline void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh_file: cannot open '" + path + "'");
  out.precision(17);
  out << "pfmesh 1\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (const Node& n : mesh.nodes) out << n.x << " " << n.y << "\n";
  out << "elements " << mesh.elements.size() << "\n";
  for (const Element& el : mesh.elements) {
    out << (el.kind == ElemKind::quad4 ? "quad4" : "tri3");
    for (int i = 0; i < el.nnodes(); ++i) out << " " << el.n[i];
    out << "\n";
  }
  for (const auto& [name, set] : mesh.node_sets) {
    out << "nodeset " << name << " " << set.size();
    for (int n : set) out << " " << n;
    out << "\n";
  }
  for (const auto& [name, set] : mesh.boundary_sets) {
    out << "boundaryset " << name << " " << set.size();
    for (const BoundaryEdge& be : set) out << " " << be.element << " " << be.edge;
    out << "\n";
  }
}

inline Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_mesh_file: cannot open '" + path + "'");

  int line_no = 0;
  std::string line;
  auto next_line = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return std::istringstream(line);
    }
    throw std::runtime_error("read_mesh_file: unexpected end of file at line " +
                             std::to_string(line_no));
  };
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("read_mesh_file: line " + std::to_string(line_no) + ": " + msg);
  };

  {
    auto ls = next_line();
    std::string magic;
    int version = 0;
    ls >> magic >> version;
    if (magic != "pfmesh" || version != 1) fail("expected header 'pfmesh 1'");
  }

  Mesh mesh;
  {
    auto ls = next_line();
    std::string kw;
    long n = -1;
    ls >> kw >> n;
    if (kw != "nodes" || n < 0) fail("expected 'nodes N'");
    mesh.nodes.reserve(n);
    for (long i = 0; i < n; ++i) {
      auto nl = next_line();
      Node node;
      if (!(nl >> node.x >> node.y)) fail("malformed node coordinates");
      mesh.nodes.push_back(node);
    }
  }
  {
    auto ls = next_line();
    std::string kw;
    long m = -1;
    ls >> kw >> m;
    if (kw != "elements" || m < 0) fail("expected 'elements M'");
    mesh.elements.reserve(m);
    for (long i = 0; i < m; ++i) {
      auto el_line = next_line();
      std::string kind;
      el_line >> kind;
      Element el;
      if (kind == "quad4")
        el.kind = ElemKind::quad4;
      else if (kind == "tri3")
        el.kind = ElemKind::tri3;
      else
        fail("unknown element kind '" + kind + "'");
      for (int k = 0; k < el.nnodes(); ++k)
        if (!(el_line >> el.n[k])) fail("too few node indices for " + kind);
      mesh.elements.push_back(el);
    }
  }
  std::string kw;
  while (in >> kw) {
    ++line_no;
    std::string name;
    long count = 0;
    if (!(in >> name >> count) || count < 0) fail("malformed set header");
    if (kw == "nodeset") {
      std::vector<int>& set = mesh.node_sets[name];
      for (long i = 0; i < count; ++i) {
        int idx;
        if (!(in >> idx)) fail("truncated nodeset '" + name + "'");
        set.push_back(idx);
      }
    } else if (kw == "boundaryset") {
      std::vector<BoundaryEdge>& set = mesh.boundary_sets[name];
      for (long i = 0; i < count; ++i) {
        BoundaryEdge be;
        if (!(in >> be.element >> be.edge)) fail("truncated boundaryset '" + name + "'");
        set.push_back(be);
      }
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }
  mesh.validate();
  return mesh;
}

}  // namespace pressfrac
