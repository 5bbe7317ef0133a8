#include "invar/term.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace invar {

int base_arity(FactorKind k) {
  switch (k) {
    case FactorKind::Riemann:
    case FactorKind::Weyl:
      return 4;
    case FactorKind::Schouten:
    case FactorKind::Ricci:
    case FactorKind::Metric:
    case FactorKind::InverseMetric:
      return 2;
    case FactorKind::ScalarCurv:
    case FactorKind::Phi:
    case FactorKind::SymPhi:
      return 0;
  }
  return 0;
}

bool is_phi_kind(FactorKind k) {
  return k == FactorKind::Phi || k == FactorKind::SymPhi;
}

bool is_metric_kind(FactorKind k) {
  return k == FactorKind::Metric || k == FactorKind::InverseMetric;
}

bool is_curvature_kind(FactorKind k) {
  switch (k) {
    case FactorKind::Riemann:
    case FactorKind::Weyl:
    case FactorKind::Schouten:
    case FactorKind::Ricci:
    case FactorKind::ScalarCurv:
      return true;
    default:
      return false;
  }
}

const char* kind_token(FactorKind k) {
  switch (k) {
    case FactorKind::Riemann: return "R";
    case FactorKind::Weyl: return "W";
    case FactorKind::Schouten: return "P";
    case FactorKind::Ricci: return "Ric";
    case FactorKind::ScalarCurv: return "Scal";
    case FactorKind::Phi: return "phi";
    case FactorKind::SymPhi: return "Sphi";
    case FactorKind::Metric: return "g";
    case FactorKind::InverseMetric: return "gi";
  }
  return "?";
}

Factor riemann(int deriv) { return Factor{FactorKind::Riemann, deriv, 0}; }
Factor weyl(int deriv) { return Factor{FactorKind::Weyl, deriv, 0}; }
Factor schouten(int deriv) { return Factor{FactorKind::Schouten, deriv, 0}; }
Factor ricci(int deriv) { return Factor{FactorKind::Ricci, deriv, 0}; }
Factor scalar_curv(int deriv) { return Factor{FactorKind::ScalarCurv, deriv, 0}; }
Factor phi(int order, int flavor) { return Factor{FactorKind::Phi, order, flavor}; }
Factor sym_phi(int order, int flavor) { return Factor{FactorKind::SymPhi, order, flavor}; }
Factor metric() { return Factor{FactorKind::Metric, 0, 0}; }
Factor inverse_metric() { return Factor{FactorKind::InverseMetric, 0, 0}; }

int Contraction::slot_count() const {
  int total = 0;
  for (const auto& f : factors) total += f.arity();
  return total;
}

int Contraction::free_count() const {
  int total = 0;
  for (const auto& ps : part) {
    for (const auto& s : ps) {
      if (s.is_free()) ++total;
    }
  }
  return total;
}

Contraction from_labels(Rational coeff, std::vector<Factor> factors,
                        const std::vector<std::vector<int>>& labels) {
  Contraction c;
  c.coeff = std::move(coeff);
  c.factors = std::move(factors);
  c.part.resize(c.factors.size());
  std::map<int, SlotRef> first_seen;
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    c.part[f].assign(c.factors[f].arity(), SlotRef{});
  }
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    for (std::size_t p = 0; p < labels[f].size(); ++p) {
      int lab = labels[f][p];
      SlotRef here = slot(static_cast<int>(f), static_cast<int>(p));
      auto it = first_seen.find(lab);
      if (it == first_seen.end()) {
        first_seen.emplace(lab, here);
        c.part[f][p] = free_slot(lab);
      } else {
        SlotRef other = it->second;
        c.part[f][p] = other;
        c.part[other.f][other.p] = here;
        first_seen.erase(it);
      }
    }
  }
  return c;
}

LinearCombination operator+(const LinearCombination& a, const LinearCombination& b) {
  LinearCombination out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

LinearCombination operator-(const LinearCombination& a, const LinearCombination& b) {
  LinearCombination out = a;
  for (auto t : b.terms) {
    t.coeff = -t.coeff;
    out.terms.push_back(std::move(t));
  }
  return out;
}

LinearCombination operator*(const Rational& c, const LinearCombination& lc) {
  LinearCombination out = lc;
  for (auto& t : out.terms) t.coeff *= c;
  return out;
}

LinearCombination as_combination(Contraction c) {
  LinearCombination lc;
  lc.terms.push_back(std::move(c));
  return lc;
}

int weight(const Factor& f) {
  // Scaling exponent of the natural-variance components under g -> t^2 g.
  switch (f.kind) {
    case FactorKind::Riemann:
    case FactorKind::Weyl:
    case FactorKind::Metric:
      return 2;
    case FactorKind::Schouten:
    case FactorKind::Ricci:
    case FactorKind::Phi:
    case FactorKind::SymPhi:
      return 0;
    case FactorKind::ScalarCurv:
    case FactorKind::InverseMetric:
      return -2;
  }
  return 0;
}

namespace {
bool slot_is_upper(const Contraction& c, SlotRef s) {
  return c.factors[s.f].kind == FactorKind::InverseMetric;
}
}  // namespace

int weight(const Contraction& c) {
  int w = 0;
  for (const auto& f : c.factors) w += weight(f);
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    for (std::size_t p = 0; p < c.part[f].size(); ++p) {
      SlotRef here = slot(static_cast<int>(f), static_cast<int>(p));
      SlotRef other = c.part[f][p];
      if (other.is_free()) continue;
      // Count each pair once.
      if (other.f < here.f || (other.f == here.f && other.p < here.p)) continue;
      bool up_a = slot_is_upper(c, here);
      bool up_b = slot_is_upper(c, other);
      if (!up_a && !up_b) w -= 2;       // implicit inverse metric
      else if (up_a && up_b) w += 2;    // implicit metric
    }
  }
  return w;
}

namespace {
int internal_pairs_of_factor(const Contraction& c, int f) {
  int cnt = 0;
  for (std::size_t p = 0; p < c.part[f].size(); ++p) {
    SlotRef o = c.part[f][p];
    if (!o.is_free() && o.f == f && o.p > static_cast<int>(p)) ++cnt;
  }
  return cnt;
}
}  // namespace

FactorCensus census(const Contraction& c) {
  FactorCensus out;
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    const Factor& fac = c.factors[f];
    int internal = internal_pairs_of_factor(c, static_cast<int>(f));
    out.internal_contractions += internal;
    // named traces carry their defining internal contractions
    if (fac.kind == FactorKind::Ricci) out.internal_contractions += 1;
    if (fac.kind == FactorKind::ScalarCurv) out.internal_contractions += 2;
    if (!is_metric_kind(fac.kind)) ++out.length;
    switch (fac.kind) {
      case FactorKind::Riemann:
        if (internal == 0) ++out.Z;
        break;
      case FactorKind::Ricci:
        if (internal == 0) ++out.X;
        break;
      case FactorKind::ScalarCurv:
        ++out.C;
        break;
      case FactorKind::Phi:
      case FactorKind::SymPhi: {
        out.phi_orders.push_back(fac.deriv_order);
        if (fac.deriv_order == 1) ++out.n_gradphi;
        if (fac.deriv_order == 2) {
          if (internal == 1) ++out.Delta;
          else ++out.Gamma;
        }
        break;
      }
      default:
        break;
    }
  }
  std::sort(out.phi_orders.begin(), out.phi_orders.end(), std::greater<int>());
  return out;
}

namespace {
void add_issue(ValidationReport& r, std::string msg) {
  r.ok = false;
  r.issues.push_back(std::move(msg));
}

std::string slot_name(SlotRef s) {
  std::ostringstream os;
  os << "(" << s.f << "," << s.p << ")";
  return os.str();
}
}  // namespace

ValidationReport validate(const Contraction& c) {
  ValidationReport r;
  if (c.part.size() != c.factors.size()) {
    add_issue(r, "pairing table size does not match factor count");
    return r;
  }
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    const Factor& fac = c.factors[f];
    if (is_phi_kind(fac.kind) && fac.deriv_order < 1) {
      add_issue(r, std::string(kind_token(fac.kind)) + " factor " + std::to_string(f) +
                       " must carry at least one derivative slot");
    }
    if (is_metric_kind(fac.kind) && fac.deriv_order != 0) {
      add_issue(r, std::string(kind_token(fac.kind)) + " factor " + std::to_string(f) +
                       " cannot carry derivative slots");
    }
    if (fac.deriv_order < 0) {
      add_issue(r, "factor " + std::to_string(f) + " has negative derivative order");
    }
    if (c.part[f].size() != static_cast<std::size_t>(fac.arity())) {
      add_issue(r, std::string("arity error: factor ") + std::to_string(f) + " (" +
                       kind_token(fac.kind) + ") holds " + std::to_string(c.part[f].size()) +
                       " slots, expected " + std::to_string(fac.arity()));
    }
  }
  if (!r.ok) return r;
  // Matching consistency: partner links must be involutive and free labels unique.
  std::map<int, int> free_labels;
  for (std::size_t f = 0; f < c.factors.size(); ++f) {
    for (std::size_t p = 0; p < c.part[f].size(); ++p) {
      SlotRef here = slot(static_cast<int>(f), static_cast<int>(p));
      SlotRef o = c.part[f][p];
      if (o.is_free()) {
        if (++free_labels[o.p] > 1) {
          add_issue(r, "free label " + std::to_string(o.p) + " used more than once");
        }
        continue;
      }
      if (o.f >= static_cast<int>(c.factors.size()) ||
          o.p >= static_cast<int>(c.part[o.f].size())) {
        add_issue(r, "matching error: slot " + slot_name(here) + " points outside the term");
        continue;
      }
      if (o == here) {
        add_issue(r, "matching error: slot " + slot_name(here) + " paired with itself");
        continue;
      }
      if (c.part[o.f][o.p] != here) {
        add_issue(r, "matching error: slot " + slot_name(here) + " pairs " + slot_name(o) +
                         " but not conversely");
      }
    }
  }
  return r;
}

ValidationReport validate(const LinearCombination& lc) {
  ValidationReport r;
  bool have_w = false;
  int w0 = 0;
  for (std::size_t i = 0; i < lc.terms.size(); ++i) {
    ValidationReport tr = validate(lc.terms[i]);
    if (!tr.ok) {
      for (auto& m : tr.issues) add_issue(r, "term " + std::to_string(i) + ": " + m);
      continue;
    }
    int w = weight(lc.terms[i]);
    if (!have_w) {
      have_w = true;
      w0 = w;
    } else if (w != w0) {
      add_issue(r, "term " + std::to_string(i) + ": weight " + std::to_string(w) +
                       " differs from weight " + std::to_string(w0) + " of earlier terms");
    }
  }
  return r;
}

}  // namespace invar
