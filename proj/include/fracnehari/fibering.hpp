#pragma once

#include <cmath>
#include <stdexcept>

#include "fracnehari/constants.hpp"
#include "fracnehari/energy.hpp"
#include "fracnehari/problem.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

enum class Branch { Nplus, Nminus };
enum class FiberClass { Nplus, Nminus, Nzero, offManifold };

// Scalar data of the ray through u: phi_u(t) = I(tu) is controlled entirely by
// (||u||^2, A(u), B(u)).
template <class Scalar>
struct FiberCoeffs {
  Scalar n2, A, B;
};

template <class Scalar>
struct FiberReport {
  Scalar norm_sq{}, A{}, B{};
  Scalar t_max{}, m_at_tmax{};
  int n_roots{};
  Scalar t1{}, t2{};  // valid per n_roots; degenerate case has t1 == t2
  FiberClass classification_at_1{FiberClass::offManifold};
};

template <class Scalar>
FiberCoeffs<Scalar> fiber_coeffs(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
                                 const StiffnessForm<Scalar>& K) {
  return {norm_sq(u, K), A(u, P, K.grid.quad_weights), B(u, P, K.grid.quad_weights)};
}

// phi_u(t) = t^2/2 ||u||^2 - lambda sum w a G_q(tu) - t^p/p B  (via energy);
// its first two t-derivatives in closed form.
template <class Scalar>
Scalar fiber_value(const Vec<Scalar>& u, Scalar t, const ProblemParams<Scalar>& P,
                   const StiffnessForm<Scalar>& K) {
  if (!(t > Scalar(0))) throw std::invalid_argument("fiber_value: need t > 0");
  return energy<Scalar>(t * u, P, K);
}

template <class Scalar>
Scalar fiber_d1_c(const FiberCoeffs<Scalar>& c, Scalar t, const ProblemParams<Scalar>& P) {
  return t * c.n2 - P.lambda * std::pow(t, -P.q) * c.A -
         std::pow(t, P.two_star - 1) * c.B;
}

template <class Scalar>
Scalar fiber_d2_c(const FiberCoeffs<Scalar>& c, Scalar t, const ProblemParams<Scalar>& P) {
  return c.n2 + P.q * P.lambda * std::pow(t, -P.q - 1) * c.A -
         (P.two_star - 1) * std::pow(t, P.two_star - 2) * c.B;
}

template <class Scalar>
Scalar fiber_d1(const Vec<Scalar>& u, Scalar t, const ProblemParams<Scalar>& P,
                const StiffnessForm<Scalar>& K) {
  if (!(t > Scalar(0))) throw std::invalid_argument("fiber_d1: need t > 0");
  return fiber_d1_c(fiber_coeffs(u, P, K), t, P);
}

template <class Scalar>
Scalar fiber_d2(const Vec<Scalar>& u, Scalar t, const ProblemParams<Scalar>& P,
                const StiffnessForm<Scalar>& K) {
  if (!(t > Scalar(0))) throw std::invalid_argument("fiber_d2: need t > 0");
  return fiber_d2_c(fiber_coeffs(u, P, K), t, P);
}

// m_u(t) = t^{1+q} ||u||^2 - t^{p-1+q} B; unimodal with an interior maximum at
// t_max = [(1+q)||u||^2 / ((p-1+q) B)]^{1/(p-2)}.
template <class Scalar>
Scalar m_u_c(const FiberCoeffs<Scalar>& c, Scalar t, const ProblemParams<Scalar>& P) {
  return std::pow(t, Scalar(1) + P.q) * c.n2 -
         std::pow(t, P.two_star - 1 + P.q) * c.B;
}

template <class Scalar>
Scalar m_u(const Vec<Scalar>& u, Scalar t, const ProblemParams<Scalar>& P,
           const StiffnessForm<Scalar>& K) {
  return m_u_c(fiber_coeffs(u, P, K), t, P);
}

template <class Scalar>
Scalar t_max_c(const FiberCoeffs<Scalar>& c, const ProblemParams<Scalar>& P) {
  if (!(c.B > Scalar(0))) throw std::invalid_argument("t_max: need B(u) > 0");
  return std::pow((Scalar(1) + P.q) * c.n2 / ((P.two_star - 1 + P.q) * c.B),
                  Scalar(1) / (P.two_star - 2));
}

template <class Scalar>
Scalar t_max(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
             const StiffnessForm<Scalar>& K) {
  return t_max_c(fiber_coeffs(u, P, K), P);
}

// Shared prefactor of the threshold formulas:
//   ((p-2)/(p-1+q)) ((1+q)/(p-1+q))^{(1+q)/(p-2)}.
template <class Scalar>
Scalar threshold_prefactor(Scalar q, Scalar p) {
  return (p - 2) / (p - 1 + q) *
         std::pow((1 + q) / (p - 1 + q), (1 + q) / (p - 2));
}

template <class Scalar>
Scalar m_at_tmax_c(const FiberCoeffs<Scalar>& c, const ProblemParams<Scalar>& P) {
  const Scalar p = P.two_star;
  return threshold_prefactor(P.q, p) *
         std::pow(c.n2, (p - 1 + P.q) / (p - 2)) /
         std::pow(c.B, (Scalar(1) + P.q) / (p - 2));
}

// Every ray has two fiber critical points below
//   lambda_* = prefactor * C_p^{-(1+q)/(p-2)} / (||a||_inf C_{1-q});
// q = 1 substitutes C_0 for C_{1-q} (same construction, measure constant).
template <class Scalar>
Scalar lambda_star(const ProblemParams<Scalar>& P, const EmbeddingConstants<Scalar>& consts) {
  const Scalar p = P.two_star;
  const Scalar C_crit = consts.c_alpha(p);
  const Scalar C_low =
      P.q < Scalar(1) ? consts.c_alpha(Scalar(1) - P.q) : consts.c_alpha(Scalar(0));
  return threshold_prefactor(P.q, p) *
         std::pow(C_crit, -(Scalar(1) + P.q) / (p - 2)) / (P.a_max() * C_low);
}

namespace detail {

// Solve m_u(t) = target on a monotone stretch of m_u: bisection to a narrow
// bracket, then safeguarded Newton to |m - target| <= 1e-12 max(1, target).
template <class Scalar>
Scalar solve_m_equals(const FiberCoeffs<Scalar>& c, const ProblemParams<Scalar>& P,
                      Scalar lo, Scalar hi, Scalar target) {
  const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), std::abs(target));
  auto f = [&](Scalar t) { return m_u_c(c, t, P) - target; };
  auto fp = [&](Scalar t) {
    return (Scalar(1) + P.q) * std::pow(t, P.q) * c.n2 -
           (P.two_star - 1 + P.q) * std::pow(t, P.two_star - 2 + P.q) * c.B;
  };

  Scalar flo = f(lo), fhi = f(hi);
  if (flo * fhi > Scalar(0))
    throw std::runtime_error("fiber_roots: bracket expansion failure");
  for (int it = 0; it < 80 && (hi - lo) > Scalar(1e-6) * hi; ++it) {
    Scalar mid = Scalar(0.5) * (lo + hi);
    Scalar fm = f(mid);
    if (flo * fm <= Scalar(0)) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  Scalar t = Scalar(0.5) * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    Scalar ft = f(t);
    if (std::abs(ft) <= tol) return t;
    Scalar d = fp(t);
    Scalar step = d != Scalar(0) ? ft / d : Scalar(0);
    Scalar tn = t - step;
    if (!(tn > lo) || !(tn < hi) || step == Scalar(0)) {
      // fall back to bisection inside the remaining bracket
      if (flo * ft <= Scalar(0)) {
        hi = t;
        fhi = ft;
      } else {
        lo = t;
        flo = ft;
      }
      tn = Scalar(0.5) * (lo + hi);
    }
    t = tn;
  }
  if (std::abs(f(t)) > tol) throw std::runtime_error("fiber_roots: root polish stalled");
  return t;
}

}  // namespace detail

// Root structure of phi_u' via the equivalence m_u(t) = lambda A(u):
// two roots strictly bracketing t_max when lambda A < m_u(t_max), one
// degenerate root at near-tangency, none beyond.
template <class Scalar>
FiberReport<Scalar> fiber_roots(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
                                const StiffnessForm<Scalar>& K) {
  FiberCoeffs<Scalar> c = fiber_coeffs(u, P, K);
  if (!(c.B > Scalar(0)))
    throw std::invalid_argument("fiber_roots: field must be nonzero");

  FiberReport<Scalar> rep;
  rep.norm_sq = c.n2;
  rep.A = c.A;
  rep.B = c.B;
  rep.t_max = t_max_c(c, P);
  rep.m_at_tmax = m_u_c(c, rep.t_max, P);

  const Scalar target = P.lambda * c.A;
  const Scalar band = Scalar(1e-10) * std::max(Scalar(1), std::abs(target));
  if (rep.m_at_tmax < target - band) {
    rep.n_roots = 0;
  } else if (rep.m_at_tmax <= target + band) {
    rep.n_roots = 1;
    rep.t1 = rep.t2 = rep.t_max;
  } else {
    rep.n_roots = 2;
    Scalar lo = rep.t_max;
    while (m_u_c(c, lo, P) > target) lo *= Scalar(0.5);
    rep.t1 = detail::solve_m_equals(c, P, lo, rep.t_max, target);
    Scalar hi = rep.t_max;
    while (m_u_c(c, hi, P) > target) hi *= Scalar(2);
    rep.t2 = detail::solve_m_equals(c, P, rep.t_max, hi, target);
  }

  Scalar d1 = fiber_d1_c(c, Scalar(1), P);
  if (std::abs(d1) > Scalar(1e-9)) {
    rep.classification_at_1 = FiberClass::offManifold;
  } else {
    Scalar d2 = fiber_d2_c(c, Scalar(1), P);
    if (d2 > Scalar(1e-8))
      rep.classification_at_1 = FiberClass::Nplus;
    else if (d2 < Scalar(-1e-8))
      rep.classification_at_1 = FiberClass::Nminus;
    else
      rep.classification_at_1 = FiberClass::Nzero;
  }
  return rep;
}

// Scale u onto the requested branch: t1 u (local fiber minimum, Nplus) or
// t2 u (local fiber maximum, Nminus).
template <class Scalar>
Vec<Scalar> nehari_project(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
                           const StiffnessForm<Scalar>& K, Branch branch) {
  FiberReport<Scalar> rep = fiber_roots(u, P, K);
  if (rep.n_roots < 2)
    throw std::runtime_error("nehari_project: ray has no two-root structure at this lambda");
  Scalar t = branch == Branch::Nplus ? rep.t1 : rep.t2;
  Vec<Scalar> v = t * u;
  FiberCoeffs<Scalar> cv = fiber_coeffs(v, P, K);
  if (std::abs(fiber_d1_c(cv, Scalar(1), P)) > Scalar(1e-9))
    throw std::runtime_error("nehari_project: projected field left the manifold tolerance");
  return v;
}

// The two on-manifold expressions for phi''(1) used by the norm-bound lemmas.
template <class Scalar>
Scalar phi2_via_A(const FiberCoeffs<Scalar>& c, const ProblemParams<Scalar>& P) {
  return (Scalar(2) - P.two_star) * c.n2 +
         P.lambda * (P.two_star - 1 + P.q) * c.A;
}

template <class Scalar>
Scalar phi2_via_B(const FiberCoeffs<Scalar>& c, const ProblemParams<Scalar>& P) {
  return (Scalar(1) + P.q) * c.n2 - (P.two_star - 1 + P.q) * c.B;
}

// Norm frame: upper bound on the Nplus branch, lower bound on Nminus.
template <class Scalar>
Scalar nplus_norm_upper(const ProblemParams<Scalar>& P, Scalar C_low) {
  return std::pow(P.lambda * (P.two_star - 1 + P.q) * C_low * P.a_max() /
                      (P.two_star - 2),
                  Scalar(1) / (Scalar(1) + P.q));
}

template <class Scalar>
Scalar nminus_norm_lower(const ProblemParams<Scalar>& P, Scalar C_crit) {
  return std::pow((Scalar(1) + P.q) / ((P.two_star - 1 + P.q) * C_crit),
                  Scalar(1) / (P.two_star - 2));
}

}  // namespace fracnehari
