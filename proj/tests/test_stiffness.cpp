#include <random>
#include <stdexcept>

#include "doctest.h"

#include "fracnehari/grid.hpp"
#include "fracnehari/stiffness.hpp"
#include "oracle_gagliardo.hpp"

#include <Eigen/Eigenvalues>

using namespace fracnehari;

TEST_SUITE("stiffness") {
  TEST_CASE("exact symmetry and Toeplitz structure") {
    DomainGrid<double> g = build_grid(-1.0, 1.0, 24);
    StiffnessForm<double> K = assemble_stiffness(g, 0.25);
    CHECK((K.entries - K.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (Index i = 0; i < g.N; ++i)
      for (Index j = i; j < g.N; ++j)
        CHECK(K.entries(i, j) == K.entries(0, j - i));
  }

  TEST_CASE("positive definiteness") {
    DomainGrid<double> g = build_grid(-1.0, 1.0, 32);
    StiffnessForm<double> K = assemble_stiffness(g, 0.25);
    Eigen::SelfAdjointEigenSolver<Mat<double>> es(K.entries);
    REQUIRE(es.info() == Eigen::Success);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }

  TEST_CASE("off-diagonal entries are negative") {
    DomainGrid<double> g = build_grid(-1.0, 1.0, 16);
    StiffnessForm<double> K = assemble_stiffness(g, 0.25);
    for (Index j = 1; j < g.N; ++j) CHECK(K.entries(0, j) < 0.0);
    CHECK(K.entries(0, 0) > 0.0);
  }

  TEST_CASE("entries scale like h^{1-2s} under domain dilation") {
    const double s = 0.25;
    StiffnessForm<double> K1 = assemble_stiffness(build_grid(-1.0, 1.0, 20), s);
    StiffnessForm<double> K2 = assemble_stiffness(build_grid(-2.0, 2.0, 20), s);
    const double ratio = std::pow(2.0, 1.0 - 2.0 * s);
    for (Index j = 0; j < 20; ++j)
      CHECK(K2.entries(0, j) == doctest::Approx(ratio * K1.entries(0, j)).epsilon(1e-13));
  }

  TEST_CASE("entries match the double-quadrature reference") {
    DomainGrid<double> g = build_grid(-1.0, 1.0, 8);
    StiffnessForm<double> K = assemble_stiffness(g, 0.25);
    const std::pair<Index, Index> picks[] = {{0, 0}, {3, 3}, {0, 1}, {2, 4}, {1, 5}, {0, 7}};
    for (auto [i, j] : picks) {
      Vec<double> ei = Vec<double>::Zero(g.N), ej = Vec<double>::Zero(g.N);
      ei[i] = 1.0;
      ej[j] = 1.0;
      const double ref = i == j ? oracle::gagliardo_sq(ei, g, 0.25)
                                : oracle::bilinear(ei, ej, g, 0.25);
      CHECK(K.entries(i, j) ==
            doctest::Approx(ref).epsilon(1e-6).scale(std::abs(K.entries(0, 0))));
    }
  }

  TEST_CASE("quadratic form matches the double-quadrature reference") {
    DomainGrid<double> g = build_grid(-1.0, 1.0, 16);
    StiffnessForm<double> K = assemble_stiffness(g, 0.25);
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int rep = 0; rep < 2; ++rep) {
      Vec<double> u(g.N);
      for (Index i = 0; i < g.N; ++i) u[i] = dist(rng);
      const double form = u.dot(K.entries * u);
      const double ref = oracle::gagliardo_sq(u, g, 0.25);
      CHECK(std::abs(form - ref) <= 1e-6 * std::abs(ref));
    }
  }

  TEST_CASE("rejects fractional orders outside (0, 1/2)") {
    DomainGrid<double> g = build_grid(-1.0, 1.0, 8);
    CHECK_THROWS_AS(assemble_stiffness(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(assemble_stiffness(g, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(assemble_stiffness(g, 0.75), std::invalid_argument);
    CHECK_NOTHROW(assemble_stiffness(g, 0.49));
  }
}
