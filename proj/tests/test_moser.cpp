#include <random>
#include <stdexcept>

#include "doctest.h"

#include "common.hpp"

using namespace fracnehari;

TEST_SUITE("moser") {
  TEST_CASE("truncated power: branch values, C1 continuity, convexity") {
    const double beta = 2.5, T = 1.3;
    CHECK(truncation_phi(-1.0, beta, T) == 0.0);
    CHECK(truncation_phi(0.0, beta, T) == 0.0);
    CHECK(truncation_phi(0.7, beta, T) == doctest::Approx(std::pow(0.7, beta)).epsilon(1e-14));
    // continuity and matching slope at the truncation knot
    const double below = truncation_phi(T - 1e-9, beta, T);
    const double above = truncation_phi(T + 1e-9, beta, T);
    CHECK(std::abs(above - below) <= 1e-7);
    const double d = 1e-6;
    const double slope_in = (truncation_phi(T, beta, T) - truncation_phi(T - d, beta, T)) / d;
    const double slope_out = (truncation_phi(T + d, beta, T) - truncation_phi(T, beta, T)) / d;
    CHECK(slope_in == doctest::Approx(beta * std::pow(T, beta - 1.0)).epsilon(1e-4));
    CHECK(slope_out == doctest::Approx(beta * std::pow(T, beta - 1.0)).epsilon(1e-10));
    // convexity via second differences across the whole range
    for (double t = 0.1; t < 3.0 * T; t += 0.05) {
      const double h = 0.02;
      const double d2 = truncation_phi(t - h, beta, T) - 2.0 * truncation_phi(t, beta, T) +
                        truncation_phi(t + h, beta, T);
      CHECK(d2 >= -1e-12);
    }
    // global bound: linearized tail stays below the pure power
    for (double t : {T + 0.1, 2.0 * T, 10.0 * T})
      CHECK(truncation_phi(t, beta, T) <= std::pow(t, beta) + 1e-12);
    // Lipschitz constant of the whole function is the knot slope
    const double L = beta * std::pow(T, beta - 1.0);
    for (double t = 0.0; t < 3.0 * T; t += 0.07) {
      const double g = (truncation_phi(t + 1e-6, beta, T) - truncation_phi(t, beta, T)) / 1e-6;
      CHECK(g <= L + 1e-4);
    }
    CHECK_THROWS_AS(truncation_phi(1.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(truncation_phi(1.0, 2.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("exponent ladder: recursion, closed form, bootstrap identity") {
    const auto& c = testkit::context(48);
    auto P = testkit::params(c, 0.5, 2.0);
    Vec<double> u = Vec<double>::Constant(c.grid.N, 1.0);
    MoserLadder<double> lad = moser_ladder(u, P, c.grid, 8);
    REQUIRE(lad.beta_seq.size() == 8);
    const double p = P.two_star;
    for (std::size_t m = 0; m < lad.beta_seq.size(); ++m) {
      CHECK(lad.beta_seq[m] ==
            doctest::Approx(beta_closed_form(p, static_cast<int>(m) + 1)).epsilon(1e-12));
      CHECK(lad.exponents[m] == doctest::Approx(p * lad.beta_seq[m]).epsilon(1e-12));
      if (m + 1 < lad.beta_seq.size())
        CHECK(2.0 * lad.beta_seq[m + 1] + p - 2.0 ==
              doctest::Approx(p * lad.beta_seq[m]).epsilon(1e-12));
    }
    const std::vector<double> expect = {8, 12, 20, 36, 68, 132, 260, 516};
    for (std::size_t m = 0; m < expect.size(); ++m)
      CHECK(lad.exponents[m] == doctest::Approx(expect[m]).epsilon(1e-12));
    CHECK(lad.exponents[6] >= 200.0);
  }

  TEST_CASE("constant fields: every power mean equals the constant") {
    const auto& c = testkit::context(48);
    auto P = testkit::params(c, 0.5, 2.0);
    for (double value : {0.7, 1.3}) {
      Vec<double> u = Vec<double>::Constant(c.grid.N, value);
      MoserLadder<double> lad = moser_ladder(u, P, c.grid, 8);
      CHECK(lad.sup_norm == doctest::Approx(value).epsilon(1e-14));
      for (double mean : lad.lp_means)
        CHECK(mean == doctest::Approx(value).epsilon(1e-10));
      CHECK(lad.bounded);
    }
  }

  TEST_CASE("random fields: means climb to the max, norms stay finite") {
    const auto& c = testkit::context(48);
    auto P = testkit::params(c, 0.5, 2.0);
    std::mt19937_64 rng(314159);
    Vec<double> base = detail::random_positive_field<double>(c.grid.N, rng);
    for (double amp : {0.3, 30.0}) {
      Vec<double> u = amp * base;
      MoserLadder<double> lad = moser_ladder(u, P, c.grid, 8);
      CHECK(lad.bounded);
      CHECK(lad.depth_used == 8);
      for (std::size_t m = 1; m < lad.lp_means.size(); ++m)
        CHECK(lad.lp_means[m] >= lad.lp_means[m - 1] - 1e-12);
      CHECK(lad.lp_means.back() == doctest::Approx(lad.sup_norm).epsilon(0.05));
      for (double v : lad.lp_norms) CHECK(std::isfinite(v));
      // the derived bound-sequence never drops below 1 by construction
      for (double v : lad.lp_norms) CHECK(v >= 1.0 - 1e-12);
    }
  }

  TEST_CASE("log-domain evaluation survives enormous amplitudes") {
    const auto& c = testkit::context(48);
    auto P = testkit::params(c, 0.5, 2.0);
    Vec<double> u = Vec<double>::Constant(c.grid.N, 1e30);
    MoserLadder<double> lad = moser_ladder(u, P, c.grid, 6);
    CHECK(lad.bounded);
    for (double v : lad.lp_means) CHECK(std::isfinite(v));
    CHECK(lad.lp_means.back() == doctest::Approx(1e30).epsilon(1e-10));
  }

  TEST_CASE("input validation") {
    const auto& c = testkit::context(48);
    auto P = testkit::params(c, 0.5, 2.0);
    Vec<double> u = Vec<double>::Constant(c.grid.N, 1.0);
    CHECK_THROWS_AS(moser_ladder(u, P, c.grid, 0), std::invalid_argument);
    Vec<double> bad = Vec<double>::Constant(c.grid.N + 1, 1.0);
    CHECK_THROWS_AS(moser_ladder(bad, P, c.grid, 4), std::invalid_argument);
  }
}
