#pragma once

#include <stdexcept>

#include "fracnehari/types.hpp"

namespace fracnehari {

// Uniform interior mesh of a 1-D interval with nodal (lumped) quadrature.
// Fields on this grid are implicitly extended by zero outside (x_lo, x_hi);
// the boundary points themselves carry no node.
template <class Scalar>
struct DomainGrid {
  Scalar x_lo{};
  Scalar x_hi{};
  Index N{};
  Scalar h{};
  Vec<Scalar> nodes;
  Vec<Scalar> quad_weights;

  Scalar measure() const { return x_hi - x_lo; }
};

template <class Scalar>
DomainGrid<Scalar> build_grid(Scalar x_lo, Scalar x_hi, Index N) {
  if (!(x_lo < x_hi)) throw std::invalid_argument("build_grid: degenerate interval");
  if (N < 3) throw std::invalid_argument("build_grid: need at least 3 interior nodes");
  DomainGrid<Scalar> g;
  g.x_lo = x_lo;
  g.x_hi = x_hi;
  g.N = N;
  g.h = (x_hi - x_lo) / Scalar(N + 1);
  g.nodes.resize(N);
  for (Index i = 0; i < N; ++i) g.nodes[i] = x_lo + Scalar(i + 1) * g.h;
  g.quad_weights = Vec<Scalar>::Constant(N, g.h);
  return g;
}

}  // namespace fracnehari
