#pragma once

#include <cmath>

#include "fracnehari/problem.hpp"
#include "fracnehari/spectral.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

// Sub-solution barrier phi = eta * phi1 dominating both branch minimizers from
// below. When no eta on the geometric grid is admissible the solver falls back
// to a bare positivity floor; that mode is flagged, not fatal.
template <class Scalar>
struct BarrierConfig {
  Scalar eta{};
  Vec<Scalar> phi;
  bool admissible{};
};

template <class Scalar>
bool barrier_admissible(Scalar eta, const ProblemParams<Scalar>& P,
                        const EigenPair<Scalar>& eig) {
  const Scalar cap = P.lambda * P.q / (P.two_star - 1);
  for (Index i = 0; i < eig.phi1.size(); ++i) {
    Scalar phi = eta * eig.phi1[i];
    if (std::pow(phi, P.two_star - 1 + P.q) > cap * P.a[i]) return false;
    Scalar lhs = eig.lambda1 * phi;
    Scalar rhs = P.lambda * P.a[i] * std::pow(phi, -P.q) +
                 std::pow(phi, P.two_star - 1);
    if (lhs > rhs) return false;
  }
  return true;
}

template <class Scalar>
BarrierConfig<Scalar> barrier_height(const ProblemParams<Scalar>& P,
                                     const EigenPair<Scalar>& eig) {
  BarrierConfig<Scalar> cfg;
  for (int k = 0; k <= 60; ++k) {
    Scalar eta = std::pow(Scalar(0.5), Scalar(k));
    if (barrier_admissible(eta, P, eig)) {
      cfg.eta = eta;
      cfg.phi = eta * eig.phi1;
      cfg.admissible = true;
      return cfg;
    }
  }
  cfg.eta = Scalar(0);
  cfg.phi = Vec<Scalar>::Constant(eig.phi1.size(), Scalar(1e-12));
  cfg.admissible = false;
  return cfg;
}

}  // namespace fracnehari
