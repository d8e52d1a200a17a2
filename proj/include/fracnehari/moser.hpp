#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fracnehari/grid.hpp"
#include "fracnehari/problem.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

// Capped power used inside the iteration: zero on t <= 0, t^beta up to the cap
// T, then the tangent line at T. Continuously differentiable at T, globally
// Lipschitz, convex for beta >= 1, and bounded above by t^beta.
template <class Scalar>
Scalar truncation_phi(Scalar t, Scalar beta, Scalar T) {
  if (!(beta >= Scalar(1)) || !(T > Scalar(0)))
    throw std::invalid_argument("truncation_phi: requires beta >= 1 and T > 0");
  if (t <= Scalar(0)) return Scalar(0);
  if (t <= T) return std::pow(t, beta);
  return std::pow(T, beta) + beta * std::pow(T, beta - 1) * (t - T);
}

template <class Scalar>
struct MoserLadder {
  std::vector<Scalar> beta_seq;   // beta_m
  std::vector<Scalar> exponents;  // p_m = p * beta_m
  std::vector<Scalar> lp_norms;   // D_{m+1} = (1 + sum w u^{p_m})^{1/(p (beta_m - 1))}
  std::vector<Scalar> lp_means;   // (sum w u^{p_m} / sum w)^{1/p_m}
  Scalar sup_norm{};
  int depth_used{};
  bool bounded{};
};

namespace detail {

template <class Scalar>
Scalar logsumexp(const std::vector<Scalar>& v) {
  Scalar m = -std::numeric_limits<Scalar>::infinity();
  for (Scalar x : v) m = std::max(m, x);
  if (!(m > -std::numeric_limits<Scalar>::infinity())) return m;
  Scalar s = 0;
  for (Scalar x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace detail

// Bootstrap ladder of weighted L^p norms: beta_1 = p/2 and
// beta_{m+1} = 1 + (p/2)(beta_m - 1), so the exponent p_m = p beta_m grows
// geometrically. All power sums are accumulated in the log domain so exponents
// of order 10^3 stay finite. The capped lp_norms sequence staying bounded is
// the boundedness certificate; lp_means converge to the nodal max.
template <class Scalar>
MoserLadder<Scalar> moser_ladder(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
                                 const DomainGrid<Scalar>& grid, int depth = 10) {
  if (depth < 1) throw std::invalid_argument("moser_ladder: depth must be >= 1");
  if (u.size() != grid.N) throw std::invalid_argument("moser_ladder: field/grid size mismatch");

  const Scalar p = P.two_star;
  const Index n = u.size();
  std::vector<Scalar> logu(static_cast<std::size_t>(n)), logw(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    logu[static_cast<std::size_t>(i)] = std::log(std::abs(u[i]));
    logw[static_cast<std::size_t>(i)] = std::log(grid.quad_weights[i]);
  }
  const Scalar logW = detail::logsumexp(logw);

  MoserLadder<Scalar> L;
  L.sup_norm = u.cwiseAbs().maxCoeff();
  L.bounded = true;

  Scalar beta = p / 2;
  for (int m = 0; m < depth; ++m) {
    const Scalar pm = p * beta;
    std::vector<Scalar> terms(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
      terms[static_cast<std::size_t>(i)] =
          pm * logu[static_cast<std::size_t>(i)] + logw[static_cast<std::size_t>(i)];
    const Scalar logS = detail::logsumexp(terms);

    const Scalar log1pS =
        logS > Scalar(30) ? logS : std::log1p(std::exp(logS));
    const Scalar D = std::exp(log1pS / (p * (beta - 1)));
    const Scalar mean = std::exp((logS - logW) / pm);

    L.beta_seq.push_back(beta);
    L.exponents.push_back(pm);
    L.lp_norms.push_back(D);
    L.lp_means.push_back(mean);
    if (!std::isfinite(D)) {
      L.bounded = false;
      break;  // overflow despite log-domain evaluation: cut the ladder
    }
    beta = 1 + (p / 2) * (beta - 1);
  }
  L.depth_used = static_cast<int>(L.beta_seq.size());
  return L;
}

// Closed form of the beta recursion, for cross-checking the inductive ladder.
template <class Scalar>
Scalar beta_closed_form(Scalar p, int m) {
  const Scalar beta1 = p / 2;
  return 1 + std::pow(p / 2, Scalar(m - 1)) * (beta1 - 1);
}

}  // namespace fracnehari
