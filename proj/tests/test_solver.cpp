#include <random>
#include <stdexcept>

#include "doctest.h"

#include "common.hpp"

using namespace fracnehari;

TEST_SUITE("solver") {
  TEST_CASE("first branch: convergence, classification, monotone descent") {
    for (double q : {0.5, 1.0}) {
      const auto& bp = testkit::branches(96, q);
      const BranchSolution<double>& up = bp.up;
      REQUIRE(up.converged);
      CHECK(up.residual_dual <= 1e-6);
      CHECK(up.fiber.classification_at_1 == FiberClass::Nplus);
      CHECK(up.barrier_margin >= 0.0);
      CHECK(up.min_margin_iterates >= 0.0);
      for (std::size_t i = 1; i < up.energy_history.size(); ++i)
        CHECK(up.energy_history[i] <= up.energy_history[i - 1] + 1e-14);
      if (q < 1.0) CHECK(up.energy < 0.0);
    }
  }

  TEST_CASE("second branch: convergence, classification, energy ordering") {
    for (double q : {0.5, 1.0}) {
      const auto& bp = testkit::branches(96, q);
      const BranchSolution<double>& vm = bp.vm;
      REQUIRE(vm.converged);
      CHECK(vm.residual_dual <= 1e-6);
      CHECK(vm.fiber.classification_at_1 == FiberClass::Nminus);
      CHECK(vm.barrier_margin >= 0.0);
      CHECK(vm.min_margin_iterates >= 0.0);
      CHECK(bp.up.energy < vm.energy);
    }
  }

  TEST_CASE("second-branch initializer satisfies its defining signs") {
    const auto& c = testkit::context(96);
    for (double q : {0.5, 1.0}) {
      const auto& bp = testkit::branches(96, q);
      BubbleParams<double> bub;
      bub.delta = 0.24;
      bub.epsilon = 16.0 * c.grid.h;
      Vec<double> phi = truncated_bubble(c.grid, bp.P, bub, c.consts.S_d);
      NminusInit<double> ini = nminus_init_scale(bp.up.u, phi, bp.P, c.K);
      CHECK(ini.t0 > 0.0);
      CHECK(ini.t_prime > ini.t0);
      CHECK(std::abs(ini.sigma1_at_tprime) <= 1e-8 * std::max(1.0, ini.t_prime));
      CHECK(ini.sigma2_at_tprime < 0.0);
    }
  }

  TEST_CASE("solves are bitwise deterministic") {
    const auto& c = testkit::context(96);
    auto P = testkit::params(c, 0.5, 0.5 * testkit::lam_star(c, 0.5));
    BarrierConfig<double> barrier = barrier_height(P, c.eig);
    BranchSolution<double> s1 = minimize_Nplus(P, c.K, barrier);
    BranchSolution<double> s2 = minimize_Nplus(P, c.K, barrier);
    REQUIRE(s1.u.size() == s2.u.size());
    CHECK((s1.u - s2.u).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s1.energy == s2.energy);
  }

  TEST_CASE("floor mode demands an explicit initial field") {
    const auto& c = testkit::context(96);
    auto P = testkit::params(c, 0.5, 0.5 * testkit::lam_star(c, 0.5));
    BarrierConfig<double> floor;
    floor.eta = 0.0;
    floor.phi = Vec<double>::Constant(c.grid.N, 1e-12);
    floor.admissible = false;
    CHECK_THROWS_AS(minimize_Nplus(P, c.K, floor), std::invalid_argument);
  }

  TEST_CASE("root loss above the window surfaces as an error") {
    const auto& c = testkit::context(96);
    auto Pbase = testkit::params(c, 0.5, 1.0);
    const double mu = lambda_upper_bound(Pbase, c.eig);
    auto P = testkit::params(c, 0.5, 3.0 * mu);
    BarrierConfig<double> barrier = barrier_height(P, c.eig);
    CHECK_THROWS_AS(minimize_Nplus(P, c.K, barrier), std::runtime_error);
  }

  TEST_CASE("scalar window bound: bisection matches the closed form") {
    const auto& c = testkit::context(96);
    for (double q : {0.5, 1.0}) {
      auto P = testkit::params(c, q, 1.0);
      const double mu = lambda_upper_bound(P, c.eig);
      const double ccoef = c.eig.lambda1 * (1.0 + 1e-3);
      const double p = testkit::kTwoStar;
      const double closed =
          threshold_prefactor(q, p) * std::pow(ccoef, (p - 1.0 + q) / (p - 2.0));
      CHECK(mu == doctest::Approx(closed).epsilon(1e-6));

      // scalar verification on a wide logarithmic grid in t
      double worst = std::numeric_limits<double>::infinity();
      double worst_low = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= 10000; ++k) {
        const double t = std::pow(10.0, -4.0 + 8.0 * k / 10000.0);
        worst = std::min(worst,
                         mu * std::pow(t, -q) + std::pow(t, p - 1.0) - ccoef * t);
        worst_low = std::min(worst_low, 0.99 * mu * std::pow(t, -q) +
                                            std::pow(t, p - 1.0) - ccoef * t);
      }
      CHECK(worst > 0.0);
      CHECK(worst_low < 0.0);
    }
  }

  TEST_CASE("window ordering and empirical failure point") {
    const auto& c = testkit::context(96);
    const double q = 0.5;
    auto P = testkit::params(c, q, 1.0);
    const double ls = testkit::lam_star(c, q);
    const double mu = lambda_upper_bound(P, c.eig);
    CHECK(ls > 0.0);
    CHECK(std::isfinite(mu));
    CHECK(ls <= mu);
    const double edge =
        lambda_failure_bisect(P, c.K, c.eig, 0.5 * ls, 1.5 * mu, 10, 2500);
    CHECK(edge >= ls);
    CHECK(edge <= mu);
  }

  TEST_CASE("rescaling continuity under shrinking perturbations") {
    const auto& c = testkit::context(96);
    const auto& bp = testkit::branches(96, 0.5);
    std::mt19937_64 rng(31);
    std::normal_distribution<double> dist(0.0, 1.0);
    const std::vector<double> eps = {0.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    for (int dir = 0; dir < 3; ++dir) {
      Vec<double> w(c.grid.N);
      for (Index i = 0; i < c.grid.N; ++i) w[i] = dist(rng);
      w.array() -= w.mean();
      w /= std::sqrt(norm_sq(w, c.K));
      TepsReport<double> rep = t_epsilon_continuity(bp.vm, w, eps, bp.P, c.K);
      REQUIRE_FALSE(rep.truncated);
      REQUIRE(rep.rows.size() == eps.size());
      CHECK(rep.rows[0].t_eps == 1.0);  // exact at eps = 0
      for (std::size_t k = 2; k < rep.rows.size(); ++k)
        CHECK(rep.rows[k].deviation < rep.rows[k - 1].deviation);
      CHECK(std::isfinite(rep.slope_C));
      for (const auto& row : rep.rows)
        if (row.eps > 0.0)
          CHECK(row.deviation <= rep.slope_C * row.eps * (1.0 + 1e-12));
    }
  }
}
