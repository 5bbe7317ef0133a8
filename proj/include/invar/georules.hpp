#pragma once

#include "invar/term.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace invar {

// Substitutes template `tmpl` for factor `f` of `term`. Template free labels
// 0..arity(f)-1 bind to the factor's slots; template-internal pairs and
// coefficients carry over.
LinearCombination substitute_factor(const Contraction& term, int f,
                                    const LinearCombination& tmpl);

// P_ab -> (Ric_ab - Scal g_ab / (2(n-1))) / (n-2), derivatives carried.
LinearCombination schouten_to_ricci(const LinearCombination& lc, int n);

struct DecompositionResult {
  LinearCombination lc;
  int skipped_derived = 0;  // derived Riemann factors left in place
};

// R_ijkl -> W_ijkl + P_jk g_il + P_il g_jk - P_jl g_ik - P_ik g_jl
// (underived factors only; derived ones are reported untouched).
DecompositionResult decompose_curvature(const LinearCombination& lc, int n);

// W_ijkl -> R + Ric*g terms + Scal*g*g terms (any derivative order).
LinearCombination decompose_weyl(const LinearCombination& lc, int n);

// Ric_ab -> (n-2) P_ab + P^c_c g_ab and Scal -> 2(n-1) P^c_c; inverse
// direction of schouten_to_ricci, used to land in pure W/P form.
LinearCombination ricci_to_schouten(const LinearCombination& lc, int n);

// Exact rewrite of one factor's derivative block into a new order.
// original = main + corrections (each correction carries two fewer
// derivatives).
struct ReorderResult {
  Contraction main;
  LinearCombination corrections;
};
ReorderResult reorder_derivatives(const Contraction& c, int factor,
                                  const std::vector<int>& perm);

// Normalizes every factor's derivative block to the partner-sorted order,
// emitting curvature corrections; terminates because each correction drops
// two derivative slots.
LinearCombination commute_derivatives(const LinearCombination& lc, int n);

// Rewrites every phi factor of order >= 3 into SymPhi plus curvature
// corrections; orders 1 and 2 are already symmetric and keep their kind.
LinearCombination symmetrize_phi(const LinearCombination& lc, int n);
bool is_symmetrized(const LinearCombination& lc);

// Exact conformal expansion of one factor under ghat = e^{2 phi} g:
// F[ghat] = e^{weight_prefactor * phi} * sum_d (degree-d part), each part an
// open template over the factor's slots (labels 0..arity-1).
struct ConformalExpansion {
  Factor factor;
  int weight_prefactor = 0;
  std::map<int, LinearCombination> by_degree;  // degree 0 = the factor itself
};
ConformalExpansion conformal_expand(const Factor& f, int n, int flavor,
                                    int max_degree = -1);

// Chern-Gauss-Bonnet integrand, normalized so that the integral over any
// closed M^n equals 2^n pi^{n/2} (n/2-1)! / (2 (n-1)!) * chi(M^n); the
// pointwise value on the unit round sphere is exactly 1.
LinearCombination pfaffian(int n);

struct PfaffianSplit {
  LinearCombination weyl_only;  // B = 0 classes
  LinearCombination bar;        // B >= 1 classes
};
PfaffianSplit pfaffian_split(int n);

// Evaluates lc on the space form with R_ijkl = kappa (g_il g_jk - g_ik g_jl)
// by exact substitution; derived curvature factors vanish there.
Rational constant_curvature_value(const LinearCombination& lc, int n,
                                  const Rational& kappa = 1);

// Rule-table entry: name plus the lc-level applier, used by the exactness
// and weight-preservation sweeps in the tests.
struct RewriteRule {
  std::string name;
  FactorKind matches;
  std::string direction;
  std::function<LinearCombination(const LinearCombination&, int)> apply;
};
const std::vector<RewriteRule>& rule_table();

}  // namespace invar
