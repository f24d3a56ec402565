#include <catch2/catch_amalgamated.hpp>

#include "hmflow/core.hpp"

using namespace hmflow;

TEST_CASE("grid geometry", "[core]") {
  Grid g(8.0, 129);
  CHECK(g.h == Catch::Approx(16.0 / 128.0).epsilon(1e-15));
  CHECK(g.x(0) == -8.0);
  CHECK(g.y(0) == -8.0);
  CHECK(std::abs(g.x(g.N - 1) - 8.0) < 1e-13);
  CHECK(std::abs(g.y(g.N - 1) - 8.0) < 1e-13);
  CHECK(g.nodes() == 129u * 129u);
}

TEST_CASE("grid rejects degenerate parameters", "[core]") {
  CHECK_THROWS_AS(Grid(8.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid(8.0, 15), std::invalid_argument);
  CHECK_THROWS_AS(Grid(0.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(Grid(-2.0, 64), std::invalid_argument);
  CHECK_NOTHROW(Grid(8.0, 16));
}

TEST_CASE("constant field satisfies invariants", "[core]") {
  Grid g(4.0, 33);
  SphereField u = SphereField::constant(g, {0, 0, 2.0});
  CHECK(u.max_norm_defect() < 1e-15);
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i) {
      CHECK(u.at(i, j).z == 1.0);
    }
}

TEST_CASE("boundary ring predicate covers outer two rings", "[core]") {
  Grid g(1.0, 16);
  int count = 0;
  for (int j = 0; j < g.N; ++j)
    for (int i = 0; i < g.N; ++i)
      if (g.is_boundary(i, j)) ++count;
  // N^2 - (N-4)^2
  CHECK(count == 16 * 16 - 12 * 12);
}

TEST_CASE("normalized rejects the zero vector", "[core]") {
  CHECK_THROWS_AS(normalized(Vec3{0, 0, 0}), std::runtime_error);
}

TEST_CASE("sumsq3 is exactly invariant under sign flips and permutations", "[core]") {
  double a = 0.12345678901234, b = -3.14159, c = 1e-7;
  double ref = sumsq3(a, b, c);
  CHECK(sumsq3(b, a, c) == ref);
  CHECK(sumsq3(c, b, a) == ref);
  CHECK(sumsq3(-a, c, -b) == ref);
  CHECK(sumsq3(b, -c, a) == ref);
}

TEST_CASE("vector helpers", "[core]") {
  Vec3 a{1, 2, 3}, b{-2, 0.5, 4};
  CHECK(dot(a, b) == Catch::Approx(11.0));
  Vec3 c = cross(a, b);
  CHECK(dot(c, a) == Catch::Approx(0.0).margin(1e-14));
  CHECK(dot(c, b) == Catch::Approx(0.0).margin(1e-14));
  CHECK(norm(normalized(Vec3{3, -4, 12})) == Catch::Approx(1.0).epsilon(1e-15));
}
