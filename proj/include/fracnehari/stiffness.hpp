#pragma once

#include <cmath>
#include <stdexcept>

#include "fracnehari/grid.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

// Dense symmetric form K with u'Ku equal to the nonlocal Dirichlet energy
//   \int\int_{R^2 \ (CΩ x CΩ)} (u(x)-u(y))^2 / |x-y|^{1+2s} dx dy
// of the piecewise-linear interpolant of the nodal field, extended by zero
// outside Ω. The exterior interaction (x in Ω, y outside) is included.
template <class Scalar>
struct StiffnessForm {
  Scalar s{};
  DomainGrid<Scalar> grid;
  Mat<Scalar> entries;
};

namespace detail {

// The energy of a piecewise-linear field with kinks only at the uniform nodes
// reduces to a five-point stencil in the node distance d:
//   K_ij = C_s h^{1-2s} [ g(|d-2|) - 4 g(|d-1|) + 6 g(d) - 4 g(d+1) + g(d+2) ]
// with g(m) = m^{3-2s} and C_s = Gamma(1-2s) / (s Gamma(4-2s)).
// This is exact for the zero-extended interpolant on all of R (second
// distributional derivatives are point masses; pairing them against the
// kernel's second antiderivative gives the |.|^{3-2s} differences).
template <class Scalar>
Scalar kernel_constant(Scalar s) {
  return std::tgamma(Scalar(1) - 2 * s) / (s * std::tgamma(Scalar(4) - 2 * s));
}

template <class Scalar>
Scalar stencil_weight(Scalar s, Index d) {
  auto g = [p = Scalar(3) - 2 * s](Index m) {
    return std::pow(Scalar(m < 0 ? -m : m), p);
  };
  return g(d - 2) - 4 * g(d - 1) + 6 * g(d) - 4 * g(d + 1) + g(d + 2);
}

}  // namespace detail

template <class Scalar>
StiffnessForm<Scalar> assemble_stiffness(const DomainGrid<Scalar>& grid, Scalar s) {
  if (!(s > Scalar(0) && s < Scalar(0.5)))
    throw std::invalid_argument("assemble_stiffness: need 0 < s < 1/2");
  const Index N = grid.N;
  const Scalar scale =
      detail::kernel_constant(s) * std::pow(grid.h, Scalar(1) - 2 * s);

  Vec<Scalar> w(N);
  for (Index d = 0; d < N; ++d) w[d] = scale * detail::stencil_weight(s, d);

  StiffnessForm<Scalar> K;
  K.s = s;
  K.grid = grid;
  K.entries.resize(N, N);
  for (Index i = 0; i < N; ++i)
    for (Index j = 0; j < N; ++j) K.entries(i, j) = w[i >= j ? i - j : j - i];
  return K;
}

}  // namespace fracnehari
