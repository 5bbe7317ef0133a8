#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invar/canonical.hpp"
#include "invar/evaluate.hpp"
#include "invar/parser.hpp"
#include "invar/term.hpp"

#include <cmath>

using namespace invar;

namespace {

Contraction rr_full() {
  return from_labels(1, {riemann(), riemann()}, {{0, 1, 2, 3}, {0, 1, 2, 3}});
}

// Random complete contraction over a small factor pool, for property tests.
Contraction random_term(Rng& rng) {
  std::vector<Factor> pool;
  int picks = 2 + static_cast<int>(rng.next() % 2);
  for (int i = 0; i < picks; ++i) {
    switch (rng.next() % 5) {
      case 0: pool.push_back(riemann()); break;
      case 1: pool.push_back(schouten()); break;
      case 2: pool.push_back(ricci()); break;
      case 3: pool.push_back(phi(2)); break;
      case 4: pool.push_back(sym_phi(3)); break;
    }
  }
  int total = 0;
  for (auto& f : pool) total += f.arity();
  if (total % 2 != 0) pool.push_back(phi(total % 2 == 0 ? 2 : 1));
  // random perfect matching
  std::vector<SlotRef> slots;
  for (int f = 0; f < static_cast<int>(pool.size()); ++f) {
    for (int p = 0; p < pool[f].arity(); ++p) slots.push_back(slot(f, p));
  }
  Contraction c;
  c.coeff = 1;
  c.factors = pool;
  c.part.resize(pool.size());
  for (size_t f = 0; f < pool.size(); ++f) c.part[f].assign(pool[f].arity(), SlotRef{});
  while (!slots.empty()) {
    SlotRef a = slots.back();
    slots.pop_back();
    size_t j = rng.next() % slots.size();
    SlotRef b = slots[j];
    slots.erase(slots.begin() + j);
    c.part[a.f][a.p] = b;
    c.part[b.f][b.p] = a;
  }
  return c;
}

}  // namespace

TEST_CASE("antisymmetry flips the sign") {
  // R[j,i,k,l]*R[i,j,k,l] has the canonical form -1 * |R|^2
  Contraction swapped =
      from_labels(1, {riemann(), riemann()}, {{1, 0, 2, 3}, {0, 1, 2, 3}});
  Contraction c1 = canonicalize(swapped);
  Contraction c2 = canonicalize(rr_full());
  CHECK(canonical_form(c1).key == canonical_form(c2).key);
  CHECK(c1.coeff == -c2.coeff);
}

TEST_CASE("factor order does not matter") {
  Contraction a = from_labels(1, {schouten(), riemann()}, {{0, 1}, {0, 2, 1, 2}});
  Contraction b = from_labels(1, {riemann(), schouten()}, {{7, 3, 9, 3}, {7, 9}});
  CHECK(canonical_form(a).key == canonical_form(b).key);
}

TEST_CASE("SymPhi slot permutations collapse with positive sign") {
  Contraction a = from_labels(1, {sym_phi(3), phi(1), phi(1), phi(1)},
                              {{0, 1, 2}, {0}, {1}, {2}});
  Contraction b = from_labels(1, {sym_phi(3), phi(1), phi(1), phi(1)},
                              {{2, 0, 1}, {0}, {1}, {2}});
  auto fa = canonical_form(a);
  auto fb = canonical_form(b);
  CHECK(fa.key == fb.key);
  CHECK(fa.rep.coeff == fb.rep.coeff);
}

TEST_CASE("canonicalize is idempotent") {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    Contraction c = random_term(rng);
    Contraction once = canonicalize(c);
    Contraction twice = canonicalize(once);
    CHECK(canonical_form(once).key == canonical_form(twice).key);
    CHECK(once.coeff == twice.coeff);
  }
}

TEST_CASE("weight survives canonicalize and census survives relabeling") {
  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    Contraction c = random_term(rng);
    Contraction k = canonicalize(c);
    if (k.coeff == 0) continue;
    CHECK(weight(c) == weight(k));
    CHECK(census(c) == census(k));
  }
}

TEST_CASE("self-cancelling patterns vanish") {
  // antisymmetric slots closed on a symmetric factor: R contracted with P on
  // its antisymmetric pair
  Contraction c = from_labels(1, {riemann(), schouten(), schouten()},
                              {{0, 1, 2, 3}, {0, 1}, {2, 3}});
  // pairing (i,j) of R against symmetric P kills the term
  Contraction k = canonicalize(c);
  CHECK(k.coeff == 0);
}

TEST_CASE("reduce collects and cancels") {
  LinearCombination lc;
  lc.terms.push_back(rr_full());
  Contraction sw = from_labels(-1, {riemann(), riemann()}, {{0, 1, 2, 3}, {0, 1, 2, 3}});
  // same contraction listed with the factors in the other order
  std::swap(sw.factors[0], sw.factors[1]);
  lc.terms.push_back(sw);
  CHECK(reduce(lc, 4).terms.empty());
}

TEST_CASE("Kronecker trace resolves to the dimension") {
  LinearCombination lc = parse("g[a,a]*P[b,b]");
  LinearCombination red = reduce(lc, 4);
  REQUIRE(red.terms.size() == 1);
  CHECK(red.terms[0].coeff == 4);
  CHECK(red.terms[0].factors.size() == 1);
  CHECK(red.terms[0].factors[0].kind == FactorKind::Schouten);
}

TEST_CASE("internally contracted Riemann is renamed to Ricci, and Ricci to Scal") {
  // R[a,i,a,j] -> -Ric? sign per convention: pair (1,3) of R gives -Ric(2,4)
  LinearCombination lc = parse("R[a,i,a,j]*P[i,j]");
  LinearCombination red = reduce(lc, 4);
  REQUIRE(red.terms.size() == 1);
  CHECK(red.terms[0].factors.size() == 2);
  bool has_ric = false;
  for (auto& f : red.terms[0].factors) has_ric |= f.kind == FactorKind::Ricci;
  CHECK(has_ric);
  CHECK(red.terms[0].coeff == -1);

  // numeric agreement of the renaming
  LinearCombination diff = parse("R[a,i,a,j]*P[i,j] + Ric[i,j]*P[i,j]");
  auto verdict = check_zero(diff, 4, 5, 1e-9, 42);
  CHECK(verdict.zero);

  LinearCombination full = parse("Ric[a,a]");
  LinearCombination red2 = reduce(full, 4);
  REQUIRE(red2.terms.size() == 1);
  CHECK(red2.terms[0].factors[0].kind == FactorKind::ScalarCurv);
}

TEST_CASE("traced Weyl vanishes in reduce") {
  LinearCombination lc = parse("W[i,j,k,l]*P[i,k]*g[j,l]");
  CHECK(reduce(lc, 4).terms.empty());
}

TEST_CASE("reduce preserves the numeric value") {
  Rng rng(5150);
  int tested = 0;
  for (int i = 0; i < 40 && tested < 12; ++i) {
    Contraction c = random_term(rng);
    if (c.free_count() != 0) continue;
    LinearCombination lc = as_combination(c);
    LinearCombination red = reduce(lc, 4);
    JetContext ctx = make_random_jet(4, required_degree(lc) + 1, 900 + i);
    double a = eval(lc, ctx);
    double b = red.terms.empty() ? 0.0 : eval(red, ctx);
    double scale = std::max(1.0, std::fabs(a));
    CHECK(std::fabs(a - b) < 1e-10 * scale);
    ++tested;
  }
  CHECK(tested >= 8);
}

TEST_CASE("first Bianchi instance lies in the relation space") {
  // cyclic sum R[i,j,k,l] + R[i,k,l,j] + R[i,l,j,k], closed against a second
  // Riemann factor
  LinearCombination lc =
      parse("R[i,j,k,l]*R[i,j,k,l] + R[i,k,l,j]*R[i,j,k,l] + R[i,l,j,k]*R[i,j,k,l]");
  RelationSpace rel = relation_space_for(lc, 4);
  CHECK(is_zero_mod_relations(lc, rel, 4));
  auto verdict = check_zero(lc, 4, 5, 1e-8, 11);
  CHECK(verdict.zero);
}

TEST_CASE("a nonzero invariant is not in the relation space") {
  LinearCombination lc = as_combination(rr_full());
  RelationSpace rel = relation_space_for(lc, 4);
  CHECK_FALSE(is_zero_mod_relations(lc, rel, 4));
  auto verdict = check_zero(lc, 4, 3, 1e-8, 13);
  CHECK_FALSE(verdict.zero);
  CHECK(verdict.witness_trial >= 0);
}

TEST_CASE("the zero combination is in every relation space") {
  LinearCombination lc;
  RelationSpace rel = relation_space_for(lc, 4);
  CHECK(is_zero_mod_relations(lc, rel, 4));
}

TEST_CASE("relation-space soundness: symbolic zero implies numeric zero") {
  LinearCombination lc =
      parse("R[i,j,k,l]*R[i,j,k,l] - 2 * R[i,j,k,l]*R[i,k,j,l]");
  RelationSpace rel = relation_space_for(lc, 4);
  bool symbolic = is_zero_mod_relations(lc, rel, 4);
  auto verdict = check_zero(lc, 4, 20, 1e-8, 99);
  CHECK(symbolic == verdict.zero);
  CHECK(symbolic);  // |R|^2 = 2 R_ijkl R^ikjl via first Bianchi
}
