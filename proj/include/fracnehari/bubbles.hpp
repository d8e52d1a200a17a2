#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracnehari/energy.hpp"
#include "fracnehari/fibering.hpp"
#include "fracnehari/grid.hpp"
#include "fracnehari/problem.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

// Shape and placement of the extremal concentration family and its cutoff.
template <class Scalar>
struct BubbleParams {
  Scalar alpha = 1;    // amplitude of the base profile
  Scalar beta = 1;     // width of the base profile
  Scalar epsilon{};    // concentration scale
  Scalar delta{};      // cutoff: identity inside |x-center|<delta, zero beyond 2*delta
  Scalar center = 0;
};

namespace detail {

// Base profile (n = 1): utilde(x) = alpha (beta^2 + x^2)^{-(1-2s)/2}, whose
// critical-power integral collapses to alpha^p pi / beta because
// (1-2s)/2 * p = 1 exactly at n = 1. ubar = utilde / ||utilde||_p.
template <class Scalar>
Scalar ubar(Scalar x, Scalar s, Scalar alpha, Scalar beta) {
  const Scalar p = Scalar(2) / (Scalar(1) - 2 * s);
  const Scalar norm =
      std::pow(std::pow(alpha, p) * Scalar(M_PI) / beta, Scalar(1) / p);
  return alpha * std::pow(beta * beta + x * x, -(Scalar(1) - 2 * s) / 2) / norm;
}

// Quintic smoothstep cutoff: 1 inside radius delta, 0 beyond 2*delta, C^2 blend.
template <class Scalar>
Scalar cutoff(Scalar r, Scalar delta) {
  if (r <= delta) return Scalar(1);
  if (r >= 2 * delta) return Scalar(0);
  Scalar t = (r - delta) / delta;
  return Scalar(1) - t * t * t * (Scalar(10) + t * (Scalar(-15) + Scalar(6) * t));
}

}  // namespace detail

// Concentration family U_eps(x) = eps^{-(1-2s)/2} ustar(x/eps) with
// ustar(x) = ubar(x / S_d^{1/(2s)}); the discrete constant S_d enters the
// rescaling so that the critical integral of U_eps equals S_d^{1/(2s)}.
template <class Scalar>
Vec<Scalar> talenti_bubble(const DomainGrid<Scalar>& grid, const ProblemParams<Scalar>& P,
                           const BubbleParams<Scalar>& bp, Scalar S_d) {
  if (!(bp.epsilon > Scalar(0)))
    throw std::invalid_argument("talenti_bubble: need epsilon > 0");
  const Scalar stretch = bp.epsilon * std::pow(S_d, Scalar(1) / (2 * P.s));
  const Scalar amp = std::pow(bp.epsilon, -(Scalar(1) - 2 * P.s) / 2);
  Vec<Scalar> u(grid.N);
  for (Index i = 0; i < grid.N; ++i)
    u[i] = amp * detail::ubar((grid.nodes[i] - bp.center) / stretch, P.s,
                              bp.alpha, bp.beta);
  return u;
}

template <class Scalar>
Vec<Scalar> truncated_bubble(const DomainGrid<Scalar>& grid, const ProblemParams<Scalar>& P,
                             const BubbleParams<Scalar>& bp, Scalar S_d) {
  if (bp.center - 4 * bp.delta <= grid.x_lo || bp.center + 4 * bp.delta >= grid.x_hi)
    throw std::invalid_argument("truncated_bubble: 4*delta ball leaves the domain");
  Vec<Scalar> u = talenti_bubble(grid, P, bp, S_d);
  for (Index i = 0; i < grid.N; ++i)
    u[i] *= detail::cutoff(std::abs(grid.nodes[i] - bp.center), bp.delta);
  return u;
}

// One row per epsilon of the critical-level check
//   sup_{t >= 0} I(u_plus + t Phi_eps)  vs  I(u_plus) + (s/n) S_d^{n/(2s)}.
template <class Scalar>
struct GapRow {
  Scalar eps{};
  Scalar t_star{};
  Scalar sup_I{};
  Scalar gap{};  // I(u_plus) + threshold - sup_I
};

template <class Scalar>
struct GapReport {
  Scalar threshold{};  // (s/n) S_d^{n/(2s)}
  Scalar E_plus{};
  std::vector<GapRow<Scalar>> rows;
};

namespace detail {

// Maximize I along the ray u + t*phi: coarse scan over [0, T] (T grown from a
// norm-bound seed until the energy has clearly fallen off), golden-section
// refine, then Newton polish on the directional derivative.
template <class Scalar>
GapRow<Scalar> ray_sup(const Vec<Scalar>& u, const Vec<Scalar>& phi,
                       const ProblemParams<Scalar>& P, const StiffnessForm<Scalar>& K,
                       Scalar t_seed) {
  const Vec<Scalar>& w = K.grid.quad_weights;
  auto I = [&](Scalar t) { return energy<Scalar>(u + t * phi, P, K); };
  const Scalar E0 = energy(u, P, K);

  Scalar T = std::max(Scalar(1), t_seed);
  while (I(T) > E0 - std::max(Scalar(1), std::abs(E0))) {
    T *= Scalar(2);
    if (T > Scalar(1e12)) throw std::runtime_error("ray_sup: expansion failed");
  }

  const int scan = 256;
  Scalar best_t = 0, best_v = E0;
  for (int k = 1; k <= scan; ++k) {
    Scalar t = T * Scalar(k) / Scalar(scan);
    Scalar v = I(t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  Scalar lo = std::max(Scalar(0), best_t - T / scan);
  Scalar hi = std::min(T, best_t + T / scan);

  const Scalar gr = (std::sqrt(Scalar(5)) - 1) / 2;
  Scalar c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  Scalar fc = I(c), fd = I(d);
  while (hi - lo > Scalar(1e-10) * std::max(Scalar(1), hi)) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = I(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = I(d);
    }
  }
  Scalar t = Scalar(0.5) * (lo + hi);

  auto dI = [&](Scalar t_) {
    Vec<Scalar> psi = u + t_ * phi;
    Scalar v = phi.dot(K.entries * psi);
    v -= P.lambda * (w.array() * P.a.array() * psi.array().pow(-P.q) * phi.array()).sum();
    v -= (w.array() * psi.array().pow(P.two_star - 1) * phi.array()).sum();
    return v;
  };
  auto d2I = [&](Scalar t_) {
    Vec<Scalar> psi = u + t_ * phi;
    Scalar v = phi.dot(K.entries * phi);
    v += P.q * P.lambda *
         (w.array() * P.a.array() * psi.array().pow(-P.q - 1) * phi.array().square()).sum();
    v -= (P.two_star - 1) *
         (w.array() * psi.array().pow(P.two_star - 2) * phi.array().square()).sum();
    return v;
  };
  for (int it = 0; it < 30 && t > Scalar(0); ++it) {
    Scalar g = dI(t), h = d2I(t);
    if (h >= Scalar(0) || !std::isfinite(g)) break;  // polish only near the cap
    Scalar tn = t - g / h;
    if (!(tn > lo && tn < hi)) break;
    t = tn;
    if (std::abs(g) <= Scalar(1e-12) * std::max(Scalar(1), std::abs(t))) break;
  }

  GapRow<Scalar> row;
  row.t_star = t;
  row.sup_I = std::max(I(t), E0);  // sup over t >= 0 includes the t = 0 endpoint
  return row;
}

}  // namespace detail

template <class Scalar>
GapReport<Scalar> energy_gap_check(const Vec<Scalar>& u_plus, const ProblemParams<Scalar>& P,
                                   const StiffnessForm<Scalar>& K,
                                   const std::vector<Scalar>& eps_list,
                                   const BubbleParams<Scalar>& bp_base, Scalar S_d,
                                   Scalar C_crit) {
  const Scalar h = K.grid.h;
  GapReport<Scalar> rep;
  rep.threshold = P.s * std::pow(S_d, Scalar(1) / (2 * P.s));  // (s/n) S^{n/2s}, n = 1
  rep.E_plus = energy(u_plus, P, K);
  for (Scalar eps : eps_list) {
    if (eps < 4 * h)
      throw std::invalid_argument("energy_gap_check: epsilon below mesh resolution");
    BubbleParams<Scalar> bp = bp_base;
    bp.epsilon = eps;
    Vec<Scalar> phi = truncated_bubble(K.grid, P, bp, S_d);
    Scalar phi_norm = std::sqrt(norm_sq(phi, K));
    Scalar t_seed = nminus_norm_lower(P, C_crit) / phi_norm;
    GapRow<Scalar> row = detail::ray_sup(u_plus, phi, P, K, t_seed);
    row.eps = eps;
    row.gap = rep.E_plus + rep.threshold - row.sup_I;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace fracnehari
