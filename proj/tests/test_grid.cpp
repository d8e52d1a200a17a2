#include <stdexcept>

#include "doctest.h"

#include "fracnehari/grid.hpp"

using namespace fracnehari;

TEST_SUITE("grid") {
  TEST_CASE("uniform interior nodes at N = 3") {
    DomainGrid<double> g = build_grid(-1.0, 1.0, 3);
    CHECK(g.h == doctest::Approx(0.5).epsilon(1e-14));
    REQUIRE(g.nodes.size() == 3);
    CHECK(g.nodes[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(g.nodes[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(g.nodes[2] == doctest::Approx(0.5).epsilon(1e-14));
  }

  TEST_CASE("nodes are strictly increasing and interior") {
    DomainGrid<double> g = build_grid(-2.0, 3.0, 37);
    CHECK(g.nodes[0] > g.x_lo);
    CHECK(g.nodes[g.N - 1] < g.x_hi);
    for (Index i = 0; i + 1 < g.N; ++i) CHECK(g.nodes[i] < g.nodes[i + 1]);
    CHECK(g.h == doctest::Approx(5.0 / 38.0).epsilon(1e-14));
    CHECK(g.measure() == doctest::Approx(5.0).epsilon(1e-14));
  }

  TEST_CASE("quadrature weights are uniform with one-cell total defect") {
    DomainGrid<double> g = build_grid(-1.0, 1.0, 256);
    CHECK(g.quad_weights.minCoeff() == g.quad_weights.maxCoeff());
    CHECK(g.quad_weights[0] == doctest::Approx(g.h).epsilon(1e-14));
    const double W = g.quad_weights.sum();
    CHECK(W <= g.measure() + 1e-12);
    CHECK(W >= g.measure() - 2.0 * g.h - 1e-12);
    CHECK(W == doctest::Approx(g.measure() - g.h).epsilon(1e-12));
  }

  TEST_CASE("rejects degenerate intervals and undersized grids") {
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, -1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(-1.0, 1.0, 2), std::invalid_argument);
    CHECK_NOTHROW(build_grid(-1.0, 1.0, 3));
  }
}
