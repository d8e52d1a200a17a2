#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "fracnehari/fracnehari.hpp"

// Shared, lazily-built numerical contexts for the test binaries. Everything is
// keyed by (N, starts, seed) and cached for the lifetime of the process so
// repeated suites do not re-estimate the constants.
namespace testkit {

using namespace fracnehari;

constexpr double kS = 0.25;        // fractional order used throughout the tests
constexpr double kTwoStar = 4.0;   // 2/(1 - 2s) at s = 1/4

struct Context {
  DomainGrid<double> grid;
  StiffnessForm<double> K;
  EigenPair<double> eig;
  EmbeddingConstants<double> consts;
};

inline const Context& context(Index N, int starts = 5, std::uint64_t seed = 42) {
  static std::map<std::tuple<Index, int, std::uint64_t>, std::unique_ptr<Context>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_tuple(N, starts, seed);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto ctx = std::make_unique<Context>();
    ctx->grid = build_grid(-1.0, 1.0, N);
    ctx->K = assemble_stiffness(ctx->grid, kS);
    ctx->eig = principal_eigenpair(ctx->K);
    // alphas cover C_0, C_{1-q} for q in {1/2, 1}, C_1, and the critical C_p
    ctx->consts = estimate_constants(ctx->K, {0.0, 0.5, 1.0, kTwoStar}, starts, seed);
    it = cache.emplace(key, std::move(ctx)).first;
  }
  return *it->second;
}

inline ProblemParams<double> params(const Context& c, double q, double lambda) {
  return make_params(kS, q, lambda, Vec<double>(Vec<double>::Constant(c.grid.N, 1.0)), 1.0);
}

inline double lam_star(const Context& c, double q) {
  return lambda_star(params(c, q, 1.0), c.consts);
}

// Both converged branches at lambda = 0.5 lambda_star, cached per (N, q).
struct BranchPair {
  ProblemParams<double> P;
  BarrierConfig<double> barrier;
  BranchSolution<double> up, vm;
};

inline const BranchPair& branches(Index N, double q) {
  static std::map<std::pair<Index, double>, std::unique_ptr<BranchPair>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const auto key = std::make_pair(N, q);
  auto it = cache.find(key);
  if (it == cache.end()) {
    const Context& c = context(N);
    auto bp = std::make_unique<BranchPair>();
    bp->P = params(c, q, 0.5 * lam_star(c, q));
    bp->barrier = barrier_height(bp->P, c.eig);
    bp->up = minimize_Nplus(bp->P, c.K, bp->barrier);
    BubbleParams<double> bub;
    bub.delta = 0.24;
    bub.epsilon = 16.0 * c.grid.h;
    Vec<double> phi = truncated_bubble(c.grid, bp->P, bub, c.consts.S_d);
    bp->vm = minimize_Nminus(bp->P, c.K, bp->barrier, bp->up, phi);
    it = cache.emplace(key, std::move(bp)).first;
  }
  return *it->second;
}

}  // namespace testkit
