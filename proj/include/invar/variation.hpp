#pragma once

#include "invar/georules.hpp"
#include "invar/term.hpp"

#include <map>
#include <set>

namespace invar {

// Degree-graded expansion of e^{-weight(t) phi} * t[e^{2 phi} g]: the
// conformal prefactors are pure homogeneity bookkeeping and cancel against
// the recorded weight. Exact polynomial in the phi jets.
std::map<int, LinearCombination> hat_expansion(const Contraction& t, int n, int flavor);

struct VariationResult {
  LinearCombination base;                    // the input P(g^n)
  std::map<int, LinearCombination> by_order;  // Z >= 1 -> I^Z
};

// I(phi) = e^{n phi} P(e^{2 phi} g) - P(g), exactly, collected by phi-degree.
// P must be homogeneous of weight -n. Zmax < 0 keeps every order.
VariationResult conformal_image(const LinearCombination& P, int n, int Zmax = -1);

// The symmetric multilinear form with polarize(I)(phi,..,phi) = I; flavors
// 1..Z mark the polarized copies.
LinearCombination polarize(const LinearCombination& I_Z, int n);

// Sets every phi flavor back to 0 (phi_1 = ... = phi_Z = phi).
LinearCombination diagonal(const LinearCombination& lc, int n);

// First conformal variation with the weight-compensating prefactor
// e^{lambda (n - 2k) phi'}: the derivative-free linear terms cancel and the
// result is the sum of degree-1 factor expansions. C must have weight
// -(n - 2k) for some integer k >= 0 and must not already use `flavor`.
LinearCombination image1(const Contraction& C, int n, int flavor);
LinearCombination image1(const LinearCombination& C, int n, int flavor);

// Factor-kind swaps P_ab <-> -nabla^2_ab phi (derivatives carried along).
LinearCombination substitute_hessian_to_schouten(const LinearCombination& lc, int n);
LinearCombination schouten_to_hessian(const LinearCombination& lc, int n);

// Deletes the order-1 phi factors of the given flavors; each must contract a
// derivative slot, which is deleted with it (weight rises by 2 per erasure).
Contraction erase_phi(const Contraction& c, const std::set<int>& flavors);

// Census filters of the symmetrized calculus.
LinearCombination filter_by_rearrangement(const LinearCombination& lc,
                                          const std::vector<int>& r);
LinearCombination filter_no_internal(const LinearCombination& lc, int L);

// Explicit truncation marker: everything of length > floor-1 dropped, the
// floor recorded rather than silently forgotten.
struct TruncatedCombination {
  LinearCombination lc;
  int length_floor = 0;  // dropped terms all have length >= length_floor
};
TruncatedCombination truncate_length(const LinearCombination& lc, int max_length);

}  // namespace invar
