#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fracnehari/barrier.hpp"
#include "fracnehari/energy.hpp"
#include "fracnehari/fibering.hpp"
#include "fracnehari/problem.hpp"
#include "fracnehari/spectral.hpp"
#include "fracnehari/types.hpp"

namespace fracnehari {

template <class Scalar>
struct DescentOptions {
  int max_iters = 5000;
  Scalar tol_dual = Scalar(1e-6);
  Scalar armijo_slope = Scalar(1e-4);
};

template <class Scalar>
struct BranchSolution {
  Vec<Scalar> u;
  Branch branch{};
  Scalar energy{};
  Scalar residual_dual{};
  FiberReport<Scalar> fiber;
  Scalar barrier_margin{};
  Scalar min_margin_iterates{};  // min over all accepted iterates
  int iterations{};
  bool converged{};
  bool barrier_floor_mode{};
  std::vector<Scalar> energy_history;
};

namespace detail {

// Projected-gradient descent along the chosen branch: gradient step, clip to
// the barrier, rescale back onto the manifold (t1 or t2 root), clip again.
// Steps are accepted only on sufficient energy decrease, so the energy history
// is monotone and every accepted iterate satisfies the barrier.
template <class Scalar>
BranchSolution<Scalar> nehari_descend(const ProblemParams<Scalar>& P,
                                      const StiffnessForm<Scalar>& K,
                                      const BarrierConfig<Scalar>& barrier,
                                      Vec<Scalar> u, Branch branch,
                                      const DescentOptions<Scalar>& opt) {
  const Vec<Scalar>& phi = barrier.phi;
  Eigen::LLT<Mat<Scalar>> llt(K.entries);

  auto project = [&](Vec<Scalar> v) -> Vec<Scalar> {
    v = v.cwiseMax(phi);
    FiberReport<Scalar> rep = fiber_roots(v, P, K);
    if (rep.n_roots < 2)
      throw std::runtime_error("branch descent: ray lost the two-root structure");
    v *= (branch == Branch::Nplus ? rep.t1 : rep.t2);
    return v.cwiseMax(phi);
  };

  u = project(u);
  Scalar E = energy(u, P, K);

  BranchSolution<Scalar> out;
  out.branch = branch;
  out.barrier_floor_mode = !barrier.admissible;
  out.energy_history.push_back(E);
  out.min_margin_iterates = (u - phi).minCoeff();

  Scalar tau = 1;
  Scalar dual = std::numeric_limits<Scalar>::infinity();
  int it = 0;
  bool conv = false;
  for (; it < opt.max_iters; ++it) {
    Vec<Scalar> r = weak_residual(u, P, K);
    dual = residual_dual_norm(r, llt);
    if (dual <= opt.tol_dual) {
      conv = true;
      break;
    }
    const Scalar rr = r.squaredNorm();
    bool accepted = false;
    for (int ls = 0; ls < 60 && !accepted; ++ls) {
      Vec<Scalar> v = project(u - tau * r);
      Scalar Ev = energy(v, P, K);
      if (Ev <= E - opt.armijo_slope * tau * rr) {
        u = std::move(v);
        E = Ev;
        accepted = true;
      } else {
        tau *= Scalar(0.5);
      }
    }
    if (!accepted) break;  // line search exhausted; keep best iterate so far
    out.energy_history.push_back(E);
    out.min_margin_iterates =
        std::min(out.min_margin_iterates, (u - phi).minCoeff());
    tau = std::min(tau * Scalar(1.5), Scalar(1e6));
  }

  // Tighten manifold membership for classification; keep the barrier intact.
  {
    FiberReport<Scalar> rep = fiber_roots(u, P, K);
    if (rep.n_roots == 2) {
      Vec<Scalar> v = (branch == Branch::Nplus ? rep.t1 : rep.t2) * u;
      v = v.cwiseMax(phi);
      FiberReport<Scalar> repv = fiber_roots(v, P, K);
      if (repv.classification_at_1 != FiberClass::offManifold) u = std::move(v);
    }
  }

  Vec<Scalar> r = weak_residual(u, P, K);
  out.u = u;
  out.energy = energy(u, P, K);
  out.residual_dual = residual_dual_norm(r, llt);
  out.fiber = fiber_roots(u, P, K);
  out.barrier_margin = (u - phi).minCoeff();
  out.min_margin_iterates = std::min(out.min_margin_iterates, out.barrier_margin);
  out.iterations = it;
  out.converged = conv || out.residual_dual <= opt.tol_dual;
  return out;
}

}  // namespace detail

// First branch minimizer: descend I over the t1 (local fiber minimum) branch
// starting from the principal eigenfield scaled onto it.
template <class Scalar>
BranchSolution<Scalar> minimize_Nplus(const ProblemParams<Scalar>& P,
                                      const StiffnessForm<Scalar>& K,
                                      const BarrierConfig<Scalar>& barrier,
                                      Vec<Scalar> init = {},
                                      const DescentOptions<Scalar>& opt = {}) {
  if (init.size() == 0) {
    if (!barrier.admissible)
      throw std::invalid_argument(
          "minimize_Nplus: floor mode requires an explicit initial field");
    init = barrier.phi / barrier.eta;  // recover phi1 (max-normalized)
  }
  return detail::nehari_descend(P, K, barrier, std::move(init), Branch::Nplus, opt);
}

// Construction data for the second-branch initializer: along psi(t) = u + t*phi,
//   sigma1(t) = ||psi||^2 - lambda A(psi) - B(psi)            (= phi_psi'(1))
//   sigma2(t) = ||psi||^2 + q lambda A(psi) - (p-1) B(psi)    (= phi_psi''(1))
// t0 is the last nonnegative point of sigma2 and t' the zero of sigma1 beyond
// it, which scales the ray into the t2 branch.
template <class Scalar>
struct NminusInit {
  Scalar t0{}, t_prime{};
  Scalar sigma1_at_tprime{}, sigma2_at_tprime{};
};

template <class Scalar>
NminusInit<Scalar> nminus_init_scale(const Vec<Scalar>& u_plus, const Vec<Scalar>& bubble,
                                     const ProblemParams<Scalar>& P,
                                     const StiffnessForm<Scalar>& K) {
  auto coeffs_at = [&](Scalar t) {
    Vec<Scalar> psi = u_plus + t * bubble;
    return fiber_coeffs(psi, P, K);
  };
  auto sigma1 = [&](Scalar t) {
    FiberCoeffs<Scalar> c = coeffs_at(t);
    return c.n2 - P.lambda * c.A - c.B;
  };
  auto sigma2 = [&](Scalar t) {
    FiberCoeffs<Scalar> c = coeffs_at(t);
    return c.n2 + P.q * P.lambda * c.A - (P.two_star - 1) * c.B;
  };

  if (!(sigma2(Scalar(0)) > Scalar(0)))
    throw std::runtime_error("nminus_init_scale: first branch is not interior (sigma2(0) <= 0)");

  Scalar T = 1;
  while (sigma2(T) >= Scalar(0) || sigma1(T) >= Scalar(0)) {
    T *= 2;
    if (T > Scalar(1e8))
      throw std::runtime_error("nminus_init_scale: sigma expansion failed");
  }

  // last sign change of sigma2 on [0, T]
  const int scan = 128;
  Scalar lo = 0, hi = T;
  for (int k = scan - 1; k >= 0; --k) {
    Scalar t = T * Scalar(k) / Scalar(scan);
    if (sigma2(t) >= Scalar(0)) {
      lo = t;
      hi = T * Scalar(k + 1) / Scalar(scan);
      break;
    }
  }
  for (int it = 0; it < 100; ++it) {
    Scalar mid = Scalar(0.5) * (lo + hi);
    (sigma2(mid) >= Scalar(0) ? lo : hi) = mid;
  }
  NminusInit<Scalar> out;
  out.t0 = Scalar(0.5) * (lo + hi);

  if (!(sigma1(out.t0) > Scalar(0)))
    throw std::runtime_error("nminus_init_scale: sigma1 not positive at t0 (lambda too large)");
  Scalar a = out.t0, b = T;
  for (int it = 0; it < 200 && (b - a) > Scalar(1e-15) * b; ++it) {
    Scalar mid = Scalar(0.5) * (a + b);
    (sigma1(mid) > Scalar(0) ? a : b) = mid;
  }
  out.t_prime = Scalar(0.5) * (a + b);
  out.sigma1_at_tprime = sigma1(out.t_prime);
  out.sigma2_at_tprime = sigma2(out.t_prime);
  return out;
}

// Second branch minimizer: start from the sigma-constructed point on the t2
// branch and descend there.
template <class Scalar>
BranchSolution<Scalar> minimize_Nminus(const ProblemParams<Scalar>& P,
                                       const StiffnessForm<Scalar>& K,
                                       const BarrierConfig<Scalar>& barrier,
                                       const BranchSolution<Scalar>& u_plus,
                                       const Vec<Scalar>& bubble,
                                       const DescentOptions<Scalar>& opt = {}) {
  NminusInit<Scalar> ini = nminus_init_scale(u_plus.u, bubble, P, K);
  Vec<Scalar> psi = u_plus.u + ini.t_prime * bubble;
  return detail::nehari_descend(P, K, barrier, std::move(psi), Branch::Nminus, opt);
}

// Smallest mu for which mu t^{-q} + t^{p-1} strictly dominates (lambda1+eps) t
// for all t > 0; equivalently mu must exceed the closed-form maximum of
// c t^{1+q} - t^{p-1+q}. Found by bisection on that predicate, then scaled by
// 1/theta so the returned value bounds lambda itself when the weight floor
// differs from 1.
template <class Scalar>
Scalar lambda_upper_bound(const ProblemParams<Scalar>& P, const EigenPair<Scalar>& eig) {
  const Scalar c = eig.lambda1 * (Scalar(1) + Scalar(1e-3));
  const Scalar p = P.two_star;
  auto inner_min_positive = [&](Scalar mu) {
    // min_t (mu t^{-q} + t^{p-1} - c t) > 0  <=>  mu > max_t (c t^{1+q} - t^{p-1+q})
    Scalar peak = threshold_prefactor(P.q, p) * std::pow(c, (p - 1 + P.q) / (p - 2));
    return mu > peak;
  };
  Scalar hi = 1;
  while (!inner_min_positive(hi)) {
    hi *= 2;
    if (hi > Scalar(1e12))
      throw std::runtime_error("lambda_upper_bound: bisection bracket failed");
  }
  Scalar lo = 0;
  for (int it = 0; it < 100; ++it) {
    Scalar mid = Scalar(0.5) * (lo + hi);
    (inner_min_positive(mid) ? hi : lo) = mid;
  }
  return hi / P.theta;
}

// Empirical edge of the solvable window: bisect on lambda, testing whether the
// first-branch descent completes with the two-root structure intact.
template <class Scalar>
Scalar lambda_failure_bisect(const ProblemParams<Scalar>& P0,
                             const StiffnessForm<Scalar>& K,
                             const EigenPair<Scalar>& eig, Scalar lo, Scalar hi,
                             int steps = 12, int probe_iters = 3000) {
  auto healthy = [&](Scalar lam) {
    ProblemParams<Scalar> P = P0;
    P.lambda = lam;
    try {
      BarrierConfig<Scalar> b = barrier_height(P, eig);
      DescentOptions<Scalar> opt;
      opt.max_iters = probe_iters;
      return minimize_Nplus(P, K, b, {}, opt).converged;
    } catch (const std::exception&) {
      return false;
    }
  };
  if (!healthy(lo)) return lo;
  if (healthy(hi)) return hi;
  for (int i = 0; i < steps; ++i) {
    Scalar mid = Scalar(0.5) * (lo + hi);
    (healthy(mid) ? lo : hi) = mid;
  }
  return hi;
}

// Continuity of the t2 rescaling under perturbations v + eps*w.
template <class Scalar>
struct TepsRow {
  Scalar eps{}, t_eps{}, deviation{};
};

template <class Scalar>
struct TepsReport {
  std::vector<TepsRow<Scalar>> rows;
  Scalar slope_C{};  // max deviation / eps over the rows
  bool truncated{};
};

template <class Scalar>
TepsReport<Scalar> t_epsilon_continuity(const BranchSolution<Scalar>& v,
                                        const Vec<Scalar>& w,
                                        const std::vector<Scalar>& eps_list,
                                        const ProblemParams<Scalar>& P,
                                        const StiffnessForm<Scalar>& K) {
  TepsReport<Scalar> rep;
  for (Scalar eps : eps_list) {
    TepsRow<Scalar> row;
    row.eps = eps;
    if (eps == Scalar(0)) {
      row.t_eps = 1;  // v is already on the branch
      row.deviation = 0;
    } else {
      FiberReport<Scalar> fr;
      try {
        fr = fiber_roots<Scalar>(v.u + eps * w, P, K);
      } catch (const std::exception&) {
        rep.truncated = true;
        break;
      }
      if (fr.n_roots < 2) {
        rep.truncated = true;
        break;
      }
      row.t_eps = fr.t2;
      row.deviation = std::abs(fr.t2 - Scalar(1));
    }
    rep.rows.push_back(row);
  }
  rep.slope_C = 0;
  for (const auto& r : rep.rows)
    if (r.eps > Scalar(0))
      rep.slope_C = std::max(rep.slope_C, r.deviation / r.eps);
  return rep;
}

}  // namespace fracnehari
