#pragma once

#include <stdexcept>

#include "fracnehari/stiffness.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

// Principal Dirichlet eigenpair of (K, M) with M the lumped quadrature form;
// phi1 is rescaled so its largest nodal value is 1.
template <class Scalar>
struct EigenPair {
  Scalar lambda1{};
  Vec<Scalar> phi1;
  Scalar residual{};  // ||K phi1 - lambda1 M phi1||_2
  int iterations{};
};

template <class Scalar>
EigenPair<Scalar> principal_eigenpair(const StiffnessForm<Scalar>& K,
                                      int max_iters = 500, Scalar tol = Scalar(1e-8)) {
  const Index N = K.entries.rows();
  const Vec<Scalar>& w = K.grid.quad_weights;

  Eigen::LLT<Mat<Scalar>> llt(K.entries);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("principal_eigenpair: stiffness form not positive definite");

  Vec<Scalar> x = Vec<Scalar>::Ones(N);
  x /= std::sqrt(x.dot(w.cwiseProduct(x)));

  Scalar lambda = 0;
  EigenPair<Scalar> out;
  for (int it = 1; it <= max_iters; ++it) {
    Vec<Scalar> y = llt.solve(w.cwiseProduct(x));
    y /= std::sqrt(y.dot(w.cwiseProduct(y)));
    Vec<Scalar> Ky = K.entries * y;
    lambda = y.dot(Ky);  // Rayleigh quotient; y is M-normalized
    Vec<Scalar> res = Ky - lambda * w.cwiseProduct(y);
    x = y;
    if (res.norm() <= tol * Ky.norm()) {
      out.iterations = it;
      break;
    }
    if (it == max_iters)
      throw std::runtime_error("principal_eigenpair: inverse iteration did not converge");
  }

  if (x.maxCoeff() < -x.minCoeff()) x = -x;  // fix sign before max-normalizing
  x /= x.maxCoeff();
  out.lambda1 = lambda;
  out.phi1 = x;
  out.residual = (K.entries * x - lambda * w.cwiseProduct(x)).norm();
  return out;
}

}  // namespace fracnehari
