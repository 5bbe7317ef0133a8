#pragma once

#include "invar/rational.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace invar {

// Factor kinds of the contraction calculus. All tensors are stored with
// natural (lower) index slots except InverseMetric, whose two slots are upper.
enum class FactorKind : uint8_t {
  Riemann,
  Weyl,
  Schouten,
  Ricci,
  ScalarCurv,
  Phi,
  SymPhi,
  Metric,
  InverseMetric,
};

constexpr int kNumFactorKinds = 9;

int base_arity(FactorKind k);
bool is_phi_kind(FactorKind k);
bool is_metric_kind(FactorKind k);
bool is_curvature_kind(FactorKind k);
const char* kind_token(FactorKind k);

// One tensor occurrence. deriv_order is the m in nabla^m; for Phi/SymPhi it
// is the total derivative count nu (>= 1), and all slots are derivative
// slots. Slot order: derivative slots first, outermost first, then the base
// slots of the tensor.
struct Factor {
  FactorKind kind = FactorKind::Riemann;
  int deriv_order = 0;
  int flavor = 0;  // distinguishes phi flavors under polarization; 0 = plain

  int arity() const { return base_arity(kind) + deriv_order; }
  int deriv_slots() const { return is_phi_kind(kind) ? deriv_order : deriv_order; }
  bool is_base_slot(int pos) const {
    return !is_phi_kind(kind) && pos >= deriv_order;
  }
  auto operator<=>(const Factor&) const = default;
};

Factor riemann(int deriv = 0);
Factor weyl(int deriv = 0);
Factor schouten(int deriv = 0);
Factor ricci(int deriv = 0);
Factor scalar_curv(int deriv = 0);
Factor phi(int order, int flavor = 0);
Factor sym_phi(int order, int flavor = 0);
Factor metric();
Factor inverse_metric();

// Slot address. f == -1 marks a free slot; then p holds the free label.
struct SlotRef {
  int16_t f = -1;
  int16_t p = 0;

  bool is_free() const { return f < 0; }
  auto operator<=>(const SlotRef&) const = default;
};

inline SlotRef free_slot(int label) { return SlotRef{-1, static_cast<int16_t>(label)}; }
inline SlotRef slot(int f, int p) {
  return SlotRef{static_cast<int16_t>(f), static_cast<int16_t>(p)};
}

// A complete contraction (or an open template when free slots are present):
// a rational coefficient, a list of factors, and a perfect pairing of slots.
// part[f][p] is the partner of slot (f,p), or a free label.
struct Contraction {
  Rational coeff = 1;
  std::vector<Factor> factors;
  std::vector<std::vector<SlotRef>> part;

  int slot_count() const;
  int free_count() const;
  bool is_complete() const { return free_count() == 0; }
  SlotRef partner(SlotRef s) const { return part[s.f][s.p]; }
};

// Builds a contraction from per-factor integer index labels: a label used
// twice makes a contracted pair, a label used once a free slot (keeping its
// label). Mirrors the Einstein convention of the text grammar.
Contraction from_labels(Rational coeff, std::vector<Factor> factors,
                        const std::vector<std::vector<int>>& labels);

struct LinearCombination {
  std::vector<Contraction> terms;

  bool empty() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }
};

LinearCombination operator+(const LinearCombination& a, const LinearCombination& b);
LinearCombination operator-(const LinearCombination& a, const LinearCombination& b);
LinearCombination operator*(const Rational& c, const LinearCombination& lc);
LinearCombination as_combination(Contraction c);

// Weight: the exponent W in value(t^2 g) = t^W value(g). Computed from the
// per-factor scaling exponents and the implicit metrics demanded by the
// pairing (a lower-lower pair costs an inverse metric, an upper-upper pair a
// metric).
int weight(const Contraction& c);
int weight(const Factor& f);

// Counts per the (Z, X, C, Gamma, Delta) census plus derived statistics.
struct FactorCensus {
  int Z = 0;       // Riemann factors without internal contractions
  int X = 0;       // Ricci factors without internal contractions
  int C = 0;       // ScalarCurv factors
  int Gamma = 0;   // order-2 phi factors that are not Laplacians
  int Delta = 0;   // Laplacians: order-2 phi factors self-paired
  int length = 0;  // non-metric factors
  int n_gradphi = 0;
  int internal_contractions = 0;
  std::vector<int> phi_orders;  // non-increasing

  auto operator<=>(const FactorCensus&) const = default;
};

FactorCensus census(const Contraction& c);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> issues;
};

ValidationReport validate(const Contraction& c);
ValidationReport validate(const LinearCombination& lc);

}  // namespace invar
