#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fracnehari/problem.hpp"
#include "fracnehari/stiffness.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

// Primitive of the singular term: |x|^{1-q}/(1-q) for 0 < q < 1, ln|x| at q = 1.
// Total on the reals with extended range (-inf at x = 0 when q = 1).
template <class Scalar>
Scalar g_q(Scalar x, Scalar q) {
  if (q == Scalar(1)) return std::log(std::abs(x));
  return std::pow(std::abs(x), Scalar(1) - q) / (Scalar(1) - q);
}

template <class Scalar>
Scalar norm_sq(const Vec<Scalar>& u, const StiffnessForm<Scalar>& K) {
  return u.dot(K.entries * u);
}

// A(u) = sum w a |u|^{1-q}; B(u) = sum w |u|^{p} with p the critical exponent.
template <class Scalar>
Scalar A(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
         const Vec<Scalar>& quad_weights) {
  return (quad_weights.array() * P.a.array() *
          u.array().abs().pow(Scalar(1) - P.q))
      .sum();
}

template <class Scalar>
Scalar B(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
         const Vec<Scalar>& quad_weights) {
  return (quad_weights.array() * u.array().abs().pow(P.two_star)).sum();
}

// I(u) = 1/2 u'Ku - lambda sum w a G_q(u) - (1/p) sum w |u|^p.
// For q = 1 a zero node would send the value to +infinity; that is flagged as
// a domain error rather than silently produced.
template <class Scalar>
Scalar energy(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
              const StiffnessForm<Scalar>& K) {
  const Vec<Scalar>& w = K.grid.quad_weights;
  if (P.q == Scalar(1) && (u.array() == Scalar(0)).any())
    throw std::domain_error("energy: q = 1 requires nonvanishing nodal values");
  Scalar singular = 0;
  for (Index i = 0; i < u.size(); ++i)
    singular += w[i] * P.a[i] * g_q(u[i], P.q);
  return Scalar(0.5) * norm_sq(u, K) - P.lambda * singular -
         B(u, P, w) / P.two_star;
}

// Nodal Euler-Lagrange residual r = Ku - lambda w.a.u^{-q} - w.u^{p-1}.
template <class Scalar>
Vec<Scalar> weak_residual(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
                          const StiffnessForm<Scalar>& K) {
  if ((u.array() <= Scalar(0)).any())
    throw std::domain_error("weak_residual: field must be strictly positive");
  const Vec<Scalar>& w = K.grid.quad_weights;
  Vec<Scalar> r = K.entries * u;
  r.array() -= P.lambda * w.array() * P.a.array() * u.array().pow(-P.q);
  r.array() -= w.array() * u.array().pow(P.two_star - 1);
  return r;
}

// Gradient of the nodal energy sum, assembled term by term from the three
// pieces of I; used as an independent route against weak_residual.
template <class Scalar>
Vec<Scalar> energy_gradient(const Vec<Scalar>& u, const ProblemParams<Scalar>& P,
                            const StiffnessForm<Scalar>& K) {
  const Vec<Scalar>& w = K.grid.quad_weights;
  Vec<Scalar> grad(u.size());
  Vec<Scalar> Ku = Scalar(0.5) * (K.entries + K.entries.transpose()) * u;
  for (Index i = 0; i < u.size(); ++i) {
    Scalar d_singular = std::pow(u[i], -P.q);  // d g_q / du at u > 0, both branches
    Scalar d_critical = std::pow(u[i], P.two_star - 1);
    grad[i] = Ku[i] - P.lambda * w[i] * P.a[i] * d_singular - w[i] * d_critical;
  }
  return grad;
}

template <class Scalar>
Scalar residual_dual_norm(const Vec<Scalar>& r, const Eigen::LLT<Mat<Scalar>>& K_llt) {
  return std::sqrt(r.dot(K_llt.solve(r)));
}

// Coercivity frame on the Nehari set: I(u) >= c1 ||u||^2 - c2 ||u||^{e} with
// e = 1-q for q < 1 and e = 1 at q = 1 (log bounded by the linear function).
template <class Scalar>
struct CoercivityBound {
  Scalar c1, c2, exponent;
};

template <class Scalar>
CoercivityBound<Scalar> coercivity_bound(const ProblemParams<Scalar>& P,
                                         Scalar C_low) {
  CoercivityBound<Scalar> b;
  b.c1 = Scalar(0.5) - Scalar(1) / P.two_star;
  if (P.q < Scalar(1)) {
    b.c2 = P.lambda * (Scalar(1) / (Scalar(1) - P.q) - Scalar(1) / P.two_star) *
           P.a_max() * C_low;
    b.exponent = Scalar(1) - P.q;
  } else {
    b.c2 = P.lambda * P.a_max() * C_low;  // C_low = C_1 here
    b.exponent = Scalar(1);
  }
  return b;
}

}  // namespace fracnehari
