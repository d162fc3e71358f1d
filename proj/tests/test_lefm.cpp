#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "helpers.hpp"
#include "pressfrac/lefm.hpp"

using namespace pressfrac::lefm;

namespace {
const PlaneStrainConstants kElast{3e4, 0.2};
}

TEST_CASE("uniform pressure closed forms") {
  const double p = 0.7, a = 1600.0;
  const PressureProfile prof = PressureProfile::uniform(p, a);

  SECTION("K_I = p sqrt(pi a)") {
    CHECK(sif(prof, a) == Catch::Approx(p * std::sqrt(kPi * a)).epsilon(1e-8));
  }
  SECTION("aperture w(x) = (4p/E') sqrt(a^2 - x^2)") {
    for (double x : {0.0, 0.3 * a, 0.9 * a}) {
      const double want = 4.0 * p / kElast.Eprime() * std::sqrt(a * a - x * x);
      CHECK(aperture_sneddon(prof, a, kElast, x) == Catch::Approx(want).epsilon(1e-8));
    }
  }
  SECTION("G = p^2 pi a / E'") {
    const double want = p * p * kPi * a / kElast.Eprime();
    CHECK(energy_release_rate(prof, a, kElast) == Catch::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("identity G = K_I^2 / E' for randomized symmetric polynomial profiles") {
  for (int trial = 0; trial < 20; ++trial) {
    const double a = testutil::uniform(10.0, 2000.0);
    // Even polynomial in x/a with positive mean to keep the load opening.
    const double c0 = testutil::uniform(0.5, 2.0);
    const double c2 = testutil::uniform(-0.4, 0.4);
    const double c4 = testutil::uniform(-0.3, 0.3);
    const PressureProfile prof(
        [=](double x) {
          const double r2 = (x / a) * (x / a);
          return c0 + c2 * r2 + c4 * r2 * r2;
        },
        a);
    const double K = sif(prof, a);
    const double G = energy_release_rate(prof, a, kElast);
    CHECK(std::abs(G * kElast.Eprime() / (K * K) - 1.0) < 1e-8);
  }
}

TEST_CASE("point-symmetric wedge profile K_I against brute-force quadrature") {
  const double a = 100.0, c = 2.5;
  const PressureProfile prof([=](double x) { return c * (1.0 - std::abs(x) / a); }, a);
  // Direct integral without the sine substitution, split near the endpoint.
  auto raw = [&](double s) { return c * (1.0 - s) / std::sqrt(1.0 - s * s); };
  const double brute =
      2.0 * std::sqrt(a / kPi) * pressfrac::integrate(raw, 0.0, 1.0 - 1e-13, 1e-13);
  CHECK(sif(prof, a) == Catch::Approx(brute).epsilon(1e-9));
}

TEST_CASE("critical pressure round-trips through the energy release rate") {
  const double a = 800.0, Gc = 0.12;
  const CriticalPressure pc = critical_pressure_uniform(a, kElast, Gc);
  CHECK(pc.surfing == Catch::Approx(0.5 * pc.p_c));
  const double G = energy_release_rate(PressureProfile::uniform(pc.p_c, a), a, kElast);
  CHECK(G == Catch::Approx(Gc).epsilon(1e-10));
}

TEST_CASE("K_I is increasing in a for fixed positive uniform p") {
  double prev = 0.0;
  for (double a : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    const double K = sif(PressureProfile::uniform(1.0, a), a);
    CHECK(K > prev);
    prev = K;
  }
}

TEST_CASE("asymmetric profiles are rejected") {
  CHECK_THROWS_AS(PressureProfile([](double x) { return 1.0 + x; }, 10.0),
                  std::invalid_argument);
}

TEST_CASE("kernel domain errors") {
  CHECK_THROWS_AS(kernel_Z(0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(kernel_Z(-0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(kernel_Z(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("surfing displacement field") {
  const double Gc = 0.12, V = 400.0;
  SECTION("ahead of the tip on the crack plane U_y = 0") {
    CHECK(surfing_displacement(10.0, 0.0, 0.0, V, kElast, Gc).y == Catch::Approx(0.0).margin(1e-15));
    CHECK(surfing_displacement(10.0, 0.0, 0.0, V, kElast, Gc).x == 0.0);
  }
  SECTION("theta = pi, r = 2 pi substitution value") {
    const double want =
        std::sqrt(Gc * kElast.Eprime()) / (2.0 * kElast.mu()) * (kElast.kolosov() + 1.0);
    const double got = surfing_displacement(-2.0 * kPi, 0.0, 0.0, V, kElast, Gc).y;
    CHECK(got == Catch::Approx(want).epsilon(1e-12));
  }
  SECTION("sqrt(r) scaling: quadrupling r doubles U_y") {
    const double u1 = surfing_displacement(0.0, 5.0, 0.0, V, kElast, Gc).y;
    const double u2 = surfing_displacement(0.0, 20.0, 0.0, V, kElast, Gc).y;
    CHECK(u2 == Catch::Approx(2.0 * u1).epsilon(1e-12));
  }
  SECTION("origin translates with V t") {
    const double uy_static = surfing_displacement(-30.0, 7.0, 0.0, V, kElast, Gc).y;
    const double uy_moved = surfing_displacement(-30.0 + V * 0.25, 7.0, 0.25, V, kElast, Gc).y;
    CHECK(uy_moved == Catch::Approx(uy_static).epsilon(1e-13));
    CHECK_THROWS_AS(surfing_displacement(V * 0.25, 0.0, 0.25, V, kElast, Gc),
                    std::invalid_argument);
  }
}

TEST_CASE("quadrature paths converge under tolerance halving") {
  const double a = 50.0;
  const PressureProfile prof([=](double x) { return 1.0 + 0.3 * std::cos(kPi * x / a); }, a);
  const double ref = sif(prof, a);
  CHECK(std::isfinite(ref));
  const double G = energy_release_rate(prof, a, kElast);
  CHECK(std::abs(G * kElast.Eprime() / (ref * ref) - 1.0) < 1e-8);
}
