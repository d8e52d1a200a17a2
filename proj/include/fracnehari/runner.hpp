#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "fracnehari/barrier.hpp"
#include "fracnehari/bubbles.hpp"
#include "fracnehari/constants.hpp"
#include "fracnehari/energy.hpp"
#include "fracnehari/fibering.hpp"
#include "fracnehari/grid.hpp"
#include "fracnehari/io.hpp"
#include "fracnehari/moser.hpp"
#include "fracnehari/problem.hpp"
#include "fracnehari/runconfig.hpp"
#include "fracnehari/solver.hpp"
#include "fracnehari/spectral.hpp"
#include "fracnehari/stiffness.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

namespace detail {

// One sweep row: formatted cells plus bookkeeping for exit status and the
// ordered post-pass that writes nodal field files.
struct SweepRow {
  double lambda{};
  std::string E_plus = "NA", E_minus = "NA";
  std::string residual_plus = "NA", residual_minus = "NA";
  std::string barrier_eta = "NA", gap_min_eps = "NA";
  std::string roots0 = "NA", roots1 = "NA", roots2 = "NA";
  bool branch_ok = false;
  bool failed = false;       // numerical failure somewhere in this row
  bool unexpected = false;   // failure below lambda_star, where success is guaranteed
  bool fiber_ok = true;
  bool gap_ok = true;
  int moser_bounded = -1;    // -1 not run, else 0/1
  std::string error;
  bool have_fields = false;
  Vec<double> u_plus, v_minus;
};

inline std::string suite_verdict(bool enabled, bool ok) {
  if (!enabled) return "skipped";
  return ok ? "pass" : "fail";
}

}  // namespace detail

// Execute a configured run: assemble the operator once, estimate the
// constants, then dispatch sweep points to a worker pool. Rows are written in
// lambda order regardless of completion order, and all numeric text goes
// through the deterministic formatter, so a given config + seed reproduces
// results.csv byte for byte. Returns the process exit code: 0 on success
// (including expected failures above the solvable window), 3 when a branch
// fails below lambda_star. Configuration problems throw ConfigError.
inline int run(const RunConfig& cfg) {
  using detail::SweepRow;
  namespace fs = std::filesystem;

  DomainGrid<double> grid;
  StiffnessForm<double> K;
  Vec<double> a;
  EigenPair<double> eig;
  EmbeddingConstants<double> consts;
  ProblemParams<double> P_base;
  double lam_star = 0, mu_star = 0;
  try {
    grid = build_grid(cfg.x_lo, cfg.x_hi, cfg.N);
    K = assemble_stiffness(grid, cfg.s);
    a = resolve_weight(cfg, grid);
    eig = principal_eigenpair(K);
    std::vector<double> alphas = {0.0, 2.0 / (1.0 - 2.0 * cfg.s)};
    alphas.push_back(cfg.q < 1.0 ? 1.0 - cfg.q : 1.0);
    consts = estimate_constants(K, alphas, cfg.constants_starts, cfg.seed);
    P_base = make_params(cfg.s, cfg.q, 1.0, a, cfg.theta);
    lam_star = lambda_star(P_base, consts);
    mu_star = lambda_upper_bound(P_base, eig);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    std::cerr << "fracnehari: setup failed: " << e.what() << "\n";
    return 3;
  }

  const std::vector<double> lambdas = lambda_values(cfg);
  const std::size_t count = lambdas.size();
  std::vector<SweepRow> rows(count);

  const double C_crit = consts.c_alpha(P_base.two_star);
  const double bubble_eps_init = cfg.eps_factors.front() * grid.h;

  auto compute_row = [&](std::size_t idx) {
    SweepRow row;
    row.lambda = lambdas[idx];
    std::mt19937_64 rng(cfg.seed + 1000003ull * static_cast<std::uint64_t>(idx));
    try {
      ProblemParams<double> P = make_params(cfg.s, cfg.q, lambdas[idx], a, cfg.theta);
      BarrierConfig<double> barrier = barrier_height(P, eig);
      row.barrier_eta = format_value(barrier.eta);

      if (cfg.suites.fiber) {
        int n0 = 0, n1 = 0, n2 = 0;
        try {
          for (int r = 0; r < 100; ++r) {
            Vec<double> u = detail::random_positive_field<double>(grid.N, rng);
            switch (fiber_roots(u, P, K).n_roots) {
              case 0: ++n0; break;
              case 1: ++n1; break;
              default: ++n2; break;
            }
          }
          row.roots0 = std::to_string(n0);
          row.roots1 = std::to_string(n1);
          row.roots2 = std::to_string(n2);
        } catch (const std::exception& e) {
          row.fiber_ok = false;
          row.failed = true;
          row.roots0 = row.roots1 = row.roots2 = "FAIL";
          row.error = e.what();
        }
      }

      if (cfg.suites.branches) {
        try {
          BranchSolution<double> up = minimize_Nplus(P, K, barrier);
          if (!up.converged)
            throw std::runtime_error("first branch did not reach the dual tolerance");
          BubbleParams<double> bp;
          bp.delta = cfg.delta;
          bp.center = 0.5 * (cfg.x_lo + cfg.x_hi);
          bp.epsilon = bubble_eps_init;
          Vec<double> bubble = truncated_bubble(grid, P, bp, consts.S_d);
          BranchSolution<double> vm = minimize_Nminus(P, K, barrier, up, bubble);
          if (!vm.converged)
            throw std::runtime_error("second branch did not reach the dual tolerance");
          row.E_plus = format_value(up.energy);
          row.E_minus = format_value(vm.energy);
          row.residual_plus = format_value(up.residual_dual);
          row.residual_minus = format_value(vm.residual_dual);
          row.branch_ok = true;
          row.have_fields = true;
          row.u_plus = up.u;
          row.v_minus = vm.u;

          if (cfg.suites.gap) {
            try {
              std::vector<double> eps_list;
              for (double f : cfg.eps_factors) eps_list.push_back(f * grid.h);
              BubbleParams<double> bg = bp;
              GapReport<double> gr =
                  energy_gap_check(up.u, P, K, eps_list, bg, consts.S_d, C_crit);
              double gmin = std::numeric_limits<double>::infinity();
              for (const auto& r : gr.rows) gmin = std::min(gmin, r.gap);
              if (!std::isfinite(gmin)) throw std::runtime_error("non-finite gap");
              row.gap_min_eps = format_value(gmin);
            } catch (const std::exception& e) {
              row.gap_ok = false;
              row.failed = true;
              row.gap_min_eps = "FAIL";
              if (row.error.empty()) row.error = e.what();
            }
          }
          if (cfg.suites.moser) {
            MoserLadder<double> ml = moser_ladder(up.u, P, grid, cfg.moser_depth);
            row.moser_bounded = ml.bounded ? 1 : 0;
          }
        } catch (const std::exception& e) {
          row.failed = true;
          row.unexpected = lambdas[idx] < lam_star;
          row.E_plus = row.E_minus = "FAIL";
          row.residual_plus = row.residual_minus = "FAIL";
          if (cfg.suites.gap) row.gap_min_eps = "FAIL";
          if (row.error.empty()) row.error = e.what();
        }
      }
    } catch (const std::exception& e) {
      row.failed = true;
      row.unexpected = lambdas[idx] < lam_star;
      row.error = e.what();
    }
    rows[idx] = std::move(row);
  };

  const unsigned jobs = static_cast<unsigned>(
      std::max(1, std::min<int>(cfg.jobs, static_cast<int>(count))));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) compute_row(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= count) break;
          compute_row(i);
        }
      });
    for (auto& th : pool) th.join();
  }

  fs::create_directories(cfg.out_dir);

  {
    std::ofstream csv(fs::path(cfg.out_dir) / "results.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("runner: cannot write results.csv");
    csv << "lambda,lambda_star,mu_star,E_plus,E_minus,residual_plus,"
           "residual_minus,barrier_eta,gap_min_eps,roots0,roots1,roots2\n";
    for (const auto& r : rows) {
      csv << format_value(r.lambda) << ',' << format_value(lam_star) << ','
          << format_value(mu_star) << ',' << r.E_plus << ',' << r.E_minus << ','
          << r.residual_plus << ',' << r.residual_minus << ',' << r.barrier_eta
          << ',' << r.gap_min_eps << ',' << r.roots0 << ',' << r.roots1 << ','
          << r.roots2 << '\n';
    }
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!rows[i].have_fields) continue;
    char tag[16];
    std::snprintf(tag, sizeof(tag), "%03zu", i);
    write_field((fs::path(cfg.out_dir) / ("u_plus_" + std::string(tag) + ".txt")).string(),
                rows[i].u_plus, grid, cfg.s);
    write_field((fs::path(cfg.out_dir) / ("v_minus_" + std::string(tag) + ".txt")).string(),
                rows[i].v_minus, grid, cfg.s);
  }

  std::size_t failures = 0, unexpected = 0;
  bool fiber_ok = true, branches_ok = true, gap_ok = true, moser_ok = true;
  for (const auto& r : rows) {
    failures += r.failed ? 1 : 0;
    unexpected += r.unexpected ? 1 : 0;
    fiber_ok = fiber_ok && r.fiber_ok;
    if (r.unexpected) branches_ok = false;
    gap_ok = gap_ok && r.gap_ok;
    if (r.moser_bounded == 0) moser_ok = false;
  }

  {
    nlohmann::json js;
    js["lambda1"] = eig.lambda1;
    js["S_d"] = consts.S_d;
    nlohmann::json jc;
    for (const auto& [alpha, value] : consts.C) jc[format_value(alpha)] = value;
    js["C"] = jc;
    js["lambda_star"] = lam_star;
    js["mu_star"] = mu_star;
    js["rows"] = count;
    js["failures"] = failures;
    js["unexpected_failures"] = unexpected;
    js["suites"] = {
        {"fiber", detail::suite_verdict(cfg.suites.fiber, fiber_ok)},
        {"branches", detail::suite_verdict(cfg.suites.branches, branches_ok)},
        {"gap", detail::suite_verdict(cfg.suites.gap && cfg.suites.branches, gap_ok)},
        {"moser",
         detail::suite_verdict(cfg.suites.moser && cfg.suites.branches, moser_ok)}};
    std::ofstream jf(fs::path(cfg.out_dir) / "summary.json", std::ios::binary);
    if (!jf) throw std::runtime_error("runner: cannot write summary.json");
    jf << js.dump(2) << '\n';
  }

  return unexpected > 0 ? 3 : 0;
}

}  // namespace fracnehari
