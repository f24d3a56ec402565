#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hmflow/bubble.hpp"
#include "hmflow/calculus.hpp"

using namespace hmflow;

TEST_CASE("bubble maps its center to the south pole", "[bubble]") {
  Grid g(8.0, 129);  // odd N: origin is a node
  SphereField u = make_bubble(g, 1, 0.3);
  Vec3 c = u.at(64, 64);
  CHECK(c.x == 0.0);
  CHECK(c.y == 0.0);
  CHECK(c.z == -1.0);
}

TEST_CASE("bubble density at the origin is 8/lambda^2", "[bubble]") {
  Grid g(8.0, 513);
  double lam = 0.64;  // h = lam/20.48
  SphereField u = make_bubble(g, 1, lam);
  CHECK(energy_density_at(u, 256, 256) ==
        Catch::Approx(8.0 / (lam * lam)).epsilon(0.02));
}

TEST_CASE("bubble blends to the north pole boundary", "[bubble]") {
  Grid g(8.0, 65);
  SphereField u = make_bubble(g, 1, 0.2);
  CHECK(u.boundary_value.z == 1.0);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      double x = g.x(i), y = g.y(j);
      if (x * x + y * y >= 0.81 * g.L * g.L) {
        CHECK(u.at(i, j).z == 1.0);
      }
    }
  CHECK(u.max_norm_defect() < 1e-12);
}

TEST_CASE("rotated bubble has an identical energy density field", "[bubble]") {
  Grid g(8.0, 129);
  SphereField u0 = make_bubble(g, 1, 0.3);

  SECTION("exact for quarter turns") {
    SphereField uq = make_bubble(g, 1, 0.3, {0, 0, 0}, Rot3::quarter_turn(0, 1));
    for (int j = 0; j < g.N; ++j)
      for (int i = 0; i < g.N; ++i)
        REQUIRE(energy_density_at(uq, i, j) == energy_density_at(u0, i, j));
  }
  SECTION("within rounding for a generic rotation") {
    Rot3 R = Rot3::axis_angle({1, 2, 3}, 0.7);
    SphereField ur = make_bubble(g, 1, 0.3, {0, 0, 0}, R);
    double worst = 0.0;
    for (int j = 0; j < g.N; ++j)
      for (int i = 0; i < g.N; ++i)
        worst = std::max(worst,
                         std::abs(energy_density_at(ur, i, j) - energy_density_at(u0, i, j)));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("off-center bubble, energy unchanged", "[bubble]") {
  Grid g(8.0, 513);
  SphereField u = make_bubble(g, 1, 0.2, {0.5, -0.3, 0});
  CHECK(local_energy(u, {0, 0, 0}, 8.0).value == Catch::Approx(4.0 * kPi).epsilon(0.01));
}

TEST_CASE("degree-2 bubble energy", "[bubble]") {
  Grid g(8.0, 2049);
  SphereField u = make_bubble(g, 2, 0.2);
  CHECK(local_energy(u, {0, 0, 0}, 8.0).value == Catch::Approx(8.0 * kPi).epsilon(0.01));
}

TEST_CASE("bubble warning metadata", "[bubble]") {
  Grid g(8.0, 129);
  CHECK(make_bubble(g, 1, 1.0).meta.count("warning_truncation") == 1);
  CHECK(make_bubble(g, 1, 0.2).meta.count("warning_truncation") == 0);
  CHECK(make_bubble(g, 1, 0.1).meta.count("warning_resolution") == 1);  // h = 0.125
  CHECK(make_bubble(g, 1, 0.3).meta.count("warning_resolution") == 0);
}

TEST_CASE("bubble rejects degenerate parameters", "[bubble]") {
  Grid g(8.0, 64);
  CHECK_THROWS_AS(make_bubble(g, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_bubble(g, 1, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(make_bubble(g, 0, 0.5), std::invalid_argument);
}

TEST_CASE("slerp endpoints and unit norm", "[bubble]") {
  Vec3 a = normalized(Vec3{1, 0.2, -0.3});
  Vec3 b = normalized(Vec3{-0.4, 1, 0.1});
  CHECK(norm(slerp(a, b, 0.0) - a) < 1e-15);
  CHECK(norm(slerp(a, b, 1.0) - b) < 1e-15);
  CHECK(norm(slerp(a, b, 0.37)) == Catch::Approx(1.0).epsilon(1e-14));
  // nearly parallel and antipodal degeneracies stay unit
  CHECK(norm(slerp(a, a, 0.5)) == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(norm(slerp(a, -1.0 * a, 0.5)) == Catch::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("quarter turns are exact rotations", "[bubble]") {
  Vec3 v{0.3, -0.4, 0.8};
  Vec3 r = Rot3::quarter_turn(2, 1).apply(v);  // z-axis: (x,y,z) -> (-y,x,z)
  CHECK(r.x == 0.4);
  CHECK(r.y == 0.3);
  CHECK(r.z == 0.8);
  Rot3 R = Rot3::axis_angle({0, 0, 1}, kPi / 2.0);
  CHECK(norm(R.apply(v) - r) < 1e-15);
}
