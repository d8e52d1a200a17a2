#pragma once

#include <stdexcept>

#include "fracnehari/types.hpp"

namespace fracnehari {

// Parameters of the singular-critical problem
//   (-Delta)^s u = lambda a(x) u^{-q} + u^{p-1},   p = 2n/(n-2s), n = 1.
template <class Scalar>
struct ProblemParams {
  Scalar s{};
  Scalar q{};
  Scalar lambda{};
  Vec<Scalar> a;    // nodal weight, a_i >= theta > 0
  Scalar theta{};
  int n = 1;
  Scalar two_star{};

  Scalar a_max() const { return a.maxCoeff(); }
};

template <class Scalar>
ProblemParams<Scalar> make_params(Scalar s, Scalar q, Scalar lambda, Vec<Scalar> a,
                                  Scalar theta) {
  if (!(s > Scalar(0) && s < Scalar(0.5)))
    throw std::invalid_argument("make_params: need 0 < s < 1/2");
  if (!(q > Scalar(0) && q <= Scalar(1)))
    throw std::invalid_argument("make_params: need 0 < q <= 1");
  if (!(lambda > Scalar(0))) throw std::invalid_argument("make_params: need lambda > 0");
  if (!(theta > Scalar(0))) throw std::invalid_argument("make_params: need theta > 0");
  if (a.size() == 0 || a.minCoeff() < theta)
    throw std::invalid_argument("make_params: weight must satisfy a >= theta");
  ProblemParams<Scalar> P;
  P.s = s;
  P.q = q;
  P.lambda = lambda;
  P.a = std::move(a);
  P.theta = theta;
  P.two_star = Scalar(2) / (Scalar(1) - 2 * s);  // 2n/(n-2s) at n=1
  if (!(P.two_star > Scalar(2)))
    throw std::invalid_argument("make_params: critical exponent must exceed 2");
  return P;
}

template <class Scalar>
ProblemParams<Scalar> make_params_const_weight(Scalar s, Scalar q, Scalar lambda,
                                               Index N, Scalar a_value = Scalar(1)) {
  return make_params(s, q, lambda, Vec<Scalar>::Constant(N, a_value), a_value);
}

}  // namespace fracnehari
