#pragma once

#include "invar/jets.hpp"
#include "invar/term.hpp"

#include <map>
#include <memory>

namespace invar {

// Metric jet around a point. Taylor data is exact; curvature, covariant
// derivatives and phi-derivatives are obtained by exact differentiation.
struct JetContext {
  int n = 0;
  const JetSpace* sp = nullptr;
  std::vector<TaylorScalar> g;                   // n*n row-major, symmetric
  std::map<int, std::vector<TaylorScalar>> phi;  // flavor -> scalar field

  struct Tensors;
  mutable std::shared_ptr<Tensors> cache;

  TaylorScalar& gij(int i, int j) { return g[i * n + j]; }
  const TaylorScalar& gij(int i, int j) const { return g[i * n + j]; }
};

// Random polynomial jet: g(0) positive definite near the identity, higher
// Taylor coefficients damped with order.
JetContext make_random_jet(int n, int degree, uint64_t seed, double amplitude = 0.25,
                           double phi_amplitude = 0.5);

// Space form g = (1 + (kappa/4)|x|^2)^{-2} delta; curvature at the origin is
// exactly kappa (g_il g_jk - g_ik g_jl) in the convention fixed here.
JetContext make_const_curvature_jet(int n, double kappa, int degree);

// g = e^{2u} delta with random polynomial u (Weyl tensor vanishes).
JetContext make_conformally_flat_jet(int n, int degree, uint64_t seed,
                                     double amplitude = 0.5);

JetContext make_flat_jet(int n, int degree);

// ghat = e^{2 eps phi_flavor} g; phi fields carry over.
JetContext conformal_rescale(const JetContext& ctx, double eps, int flavor = 0);

// g -> t2 * g (t2 = t^2 > 0), for weight checks.
JetContext scale_metric(const JetContext& ctx, double t2);

// Highest jet degree the expression demands (2 + curvature derivative order,
// phi order).
int required_degree(const LinearCombination& lc);

double eval(const Contraction& c, const JetContext& ctx);
double eval(const LinearCombination& lc, const JetContext& ctx);

// Largest single-term magnitude; the scale for zero verdicts.
double term_scale(const LinearCombination& lc, const JetContext& ctx);

struct ZeroVerdict {
  bool zero = true;
  int witness_trial = -1;
  double worst_ratio = 0.0;  // max |value| / scale over trials
};

ZeroVerdict check_zero(const LinearCombination& lc, int n, int trials, double tol,
                       uint64_t seed);

}  // namespace invar
