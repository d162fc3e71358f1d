#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pressfrac/mesh.hpp"

using namespace pressfrac;

namespace {

MeshSpec rect_spec(double W, double H, double h) {
  MeshSpec s;
  s.variant = MeshVariant::rect_uniform;
  s.W = W;
  s.H = H;
  s.h_coarse = h;
  return s;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("uniform rectangle generation") {
  const Mesh m = generate_mesh(rect_spec(2.0, 1.0, 1.0));
  CHECK(m.nodes.size() == 6);
  CHECK(m.elements.size() == 2);
  CHECK(m.total_area() == Catch::Approx(2.0).epsilon(1e-14));
  CHECK_NOTHROW(m.validate());
  CHECK(m.node_set("left").size() == 2);
  CHECK(m.node_set("right").size() == 2);
  CHECK(m.node_set("bottom").size() == 3);
  CHECK(m.boundary_sets.at("top").size() == 2);
}

TEST_CASE("bar-scale mesh: area and orientation invariants") {
  const Mesh m = generate_mesh(rect_spec(200.0, 1.0, 1.0));
  CHECK(m.elements.size() == 200);
  CHECK(std::abs(m.total_area() - 200.0) / 200.0 < 1e-8);
  CHECK(m.min_corner_jacobian() > 0.0);
}

TEST_CASE("band-refined rectangle: area exact, heights graded") {
  MeshSpec s;
  s.variant = MeshVariant::rect_band_refined;
  s.W = 400.0;
  s.H = 200.0;
  s.h_fine = 5.0;
  s.h_coarse = 40.0;
  s.band = 20.0;
  const Mesh m = generate_mesh(s);
  CHECK_NOTHROW(m.validate());
  CHECK(std::abs(m.total_area() - 400.0 * 200.0) / (400.0 * 200.0) < 1e-8);

  // Collect distinct row heights; adjacent ratio must stay <= 2.
  std::vector<double> ys;
  for (const Node& n : m.nodes)
    if (n.x == 0.0) ys.push_back(n.y);
  std::sort(ys.begin(), ys.end());
  for (std::size_t i = 0; i + 2 < ys.size(); ++i) {
    const double h0 = ys[i + 1] - ys[i], h1 = ys[i + 2] - ys[i + 1];
    CHECK(std::max(h0, h1) / std::min(h0, h1) <= 2.0 + 1e-9);
  }
  // Fine rows inside the band.
  CHECK(ys[1] - ys[0] == Catch::Approx(5.0));
}

TEST_CASE("quarter hole mesh: rim radius, area, node sets") {
  MeshSpec s;
  s.variant = MeshVariant::quarter_hole_mapped;
  s.R = 1.0;
  s.L = 10.0;
  s.h_fine = 0.25;
  s.h_coarse = 2.0;
  const Mesh m = generate_mesh(s);
  CHECK_NOTHROW(m.validate());

  for (int n : m.node_set("hole"))
    CHECK(std::hypot(m.nodes[n].x, m.nodes[n].y) == Catch::Approx(1.0).epsilon(1e-9));

  // Quarter of an L x L plate, i.e. [-L/2,0]x[0,L/2], minus the quarter
  // disc.  The coarse polygonal rim slightly under-resolves the arc.
  const double half = 0.5 * s.L;
  const double quarter_disc = 0.25 * 3.14159265358979324 * s.R * s.R;
  CHECK(std::abs(m.total_area() - (half * half - quarter_disc)) / (half * half) < 2e-3);

  CHECK(!m.node_set("symmetry_x").empty());
  CHECK(!m.node_set("symmetry_y").empty());
  for (int n : m.node_set("symmetry_x")) CHECK(m.nodes[n].y == Catch::Approx(0.0).margin(1e-12));
  for (int n : m.node_set("symmetry_y")) CHECK(m.nodes[n].x == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("mesh file round-trip is exact") {
  MeshSpec s;
  s.variant = MeshVariant::rect_band_refined;
  s.W = 8.0;
  s.H = 4.0;
  s.h_fine = 0.5;
  s.h_coarse = 2.0;
  s.band = 1.0;
  const Mesh m = generate_mesh(s);
  const std::string path = temp_path("pressfrac_roundtrip.pfmesh");
  write_mesh_file(m, path);
  const Mesh m2 = read_mesh_file(path);

  REQUIRE(m2.nodes.size() == m.nodes.size());
  REQUIRE(m2.elements.size() == m.elements.size());
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    CHECK(m2.nodes[i].x == m.nodes[i].x);
    CHECK(m2.nodes[i].y == m.nodes[i].y);
  }
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    CHECK(m2.elements[e].kind == m.elements[e].kind);
    for (int i = 0; i < m.elements[e].nnodes(); ++i)
      CHECK(m2.elements[e].n[i] == m.elements[e].n[i]);
  }
  CHECK(m2.node_sets == m.node_sets);
  std::filesystem::remove(path);
}

TEST_CASE("clockwise element is rejected naming the element index") {
  const char* text =
      "pfmesh 1\n"
      "nodes 4\n0 0\n1 0\n1 1\n0 1\n"
      "elements 1\nquad4 0 3 2 1\n";  // clockwise
  const std::string path = temp_path("pressfrac_cw.pfmesh");
  std::ofstream(path) << text;
  try {
    read_mesh_file(path);
    FAIL("expected an orientation error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("0") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("node index out of range is a parse-time error") {
  const char* text =
      "pfmesh 1\n"
      "nodes 4\n0 0\n1 0\n1 1\n0 1\n"
      "elements 1\nquad4 0 1 2 99\n";
  const std::string path = temp_path("pressfrac_oob.pfmesh");
  std::ofstream(path) << text;
  CHECK_THROWS_AS(read_mesh_file(path), std::runtime_error);
  std::filesystem::remove(path);
}

TEST_CASE("malformed header carries a line number") {
  const std::string path = temp_path("pressfrac_bad.pfmesh");
  std::ofstream(path) << "wrong 1\n";
  try {
    read_mesh_file(path);
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("1") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("mesh spec validation") {
  MeshSpec s;
  s.variant = MeshVariant::rect_band_refined;
  s.W = 10.0;
  s.H = 5.0;
  s.h_fine = 2.0;
  s.h_coarse = 1.0;  // fine > coarse
  s.band = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.h_fine = 0.5;
  s.band = 6.0;  // wider than H
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
