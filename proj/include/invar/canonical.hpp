#pragma once

#include "invar/term.hpp"

#include <cstdint>
#include <vector>

namespace invar {

// Total-order key identifying a contraction modulo monoterm symmetries:
// slot relabeling, factor permutation, and intrinsic factor symmetries.
using CanonicalKey = std::vector<int32_t>;

struct CanonicalForm {
  CanonicalKey key;
  int sign = 1;        // sign of the minimizing symmetry element
  bool vanishes = false;  // minimal key reachable with both signs
  Contraction rep;     // canonical representative, coefficient folded
};

CanonicalForm canonical_form(const Contraction& c);

// Minimal representative with the sign folded into the coefficient.
// Self-annihilating terms come back with coefficient 0.
Contraction canonicalize(const Contraction& c);

// Eliminates explicit metric factors, resolves Kronecker traces (g^a_a = n),
// names definitional traces (internally contracted Riemann -> Ricci ->
// ScalarCurv, traced Weyl -> 0), canonicalizes and collects like terms.
// Term order of the result is the canonical-key order.
LinearCombination reduce(const LinearCombination& lc, int n);
LinearCombination reduce_term(const Contraction& c, int n);

// Dimension-free part of metric normalization: re-pairs through explicit
// Metric/InverseMetric links. Self-traces (worth n) are left for reduce.
Contraction eliminate_explicit_metrics(Contraction c);

// Slot surgery: new slot p of factor f takes the content of old slot
// sigma[p] (sigma permutes that factor's slots only).
Contraction permute_factor_slots(const Contraction& c, int f, const std::vector<int>& sigma);

bool is_reduced_zero(const LinearCombination& lc, int n);

// Multiterm identities (first Bianchi; second Bianchi for derived Riemann
// factors) realized as explicit relation generators over a profile universe.
struct RelationSpace {
  int n = 0;
  std::vector<LinearCombination> generators;
};

// All canonical complete contractions built from exactly this factor
// multiset (every perfect matching of the slots, reduced and deduplicated;
// vanishing patterns dropped). Entries whose reduction leaves the profile
// (traces renamed) are dropped unless keep_renamed is set.
std::vector<Contraction> enumerate_profile(const std::vector<Factor>& profile, int n,
                                           bool keep_renamed = false);

// Relation space covering every profile appearing in lc (closed under the
// trace renamings reduce performs). Memoized per (n, profile multiset).
RelationSpace relation_space_for(const LinearCombination& lc, int n);

bool is_zero_mod_relations(const LinearCombination& lc, const RelationSpace& rel, int n);

// Exact membership test with a numeric cross-check hook; `flagged_gap` marks
// a numeric zero the relation space cannot certify (reported, not passed).
struct ZeroCertificate {
  bool symbolic = false;
  bool numeric = false;
  bool flagged_gap = false;
};

}  // namespace invar
