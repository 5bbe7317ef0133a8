#include "invar/variation.hpp"

#include "invar/canonical.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace invar {

namespace {

struct ExpKey {
  Factor f;
  int n;
  int flavor;
  bool operator<(const ExpKey& o) const {
    if (f != o.f) return f < o.f;
    if (n != o.n) return n < o.n;
    return flavor < o.flavor;
  }
};

std::map<ExpKey, ConformalExpansion> g_exp_cache;
std::mutex g_exp_mutex;

const ConformalExpansion& cached_expansion(const Factor& f, int n, int flavor) {
  std::lock_guard<std::mutex> lk(g_exp_mutex);
  ExpKey key{f, n, flavor};
  auto it = g_exp_cache.find(key);
  if (it == g_exp_cache.end()) {
    auto ex = conformal_expand(f, n, flavor);
    it = g_exp_cache.emplace(key, std::move(ex)).first;
  }
  return it->second;
}

int phi_factor_count(const Contraction& t, int flavor) {
  int z = 0;
  for (const auto& f : t.factors) {
    if (is_phi_kind(f.kind) && f.flavor == flavor) ++z;
  }
  return z;
}

}  // namespace

std::map<int, LinearCombination> hat_expansion(const Contraction& t, int n, int flavor) {
  for (const auto& f : t.factors) {
    if (is_phi_kind(f.kind) && f.flavor == flavor) {
      throw std::invalid_argument("hat_expansion: flavor collides with the input");
    }
  }
  // substitute factors from the last index down so earlier indices stay put
  std::vector<std::pair<int, Contraction>> work = {{0, t}};
  const int nf = static_cast<int>(t.factors.size());
  for (int f = nf - 1; f >= 0; --f) {
    const ConformalExpansion& ex = cached_expansion(t.factors[f], n, flavor);
    std::vector<std::pair<int, Contraction>> next;
    for (auto& [d, c] : work) {
      for (const auto& [dd, tmpl] : ex.by_degree) {
        LinearCombination sub = substitute_factor(c, f, tmpl);
        for (auto& s : sub.terms) next.emplace_back(d + dd, std::move(s));
      }
    }
    work = std::move(next);
  }
  std::map<int, LinearCombination> parts;
  for (auto& [d, c] : work) parts[d].terms.push_back(std::move(c));
  for (auto& [d, lc] : parts) lc = reduce(lc, n);
  for (auto it = parts.begin(); it != parts.end();) {
    if (it->second.terms.empty()) it = parts.erase(it);
    else ++it;
  }
  return parts;
}

VariationResult conformal_image(const LinearCombination& P, int n, int Zmax) {
  VariationResult out;
  out.base = P;
  for (const auto& t : P.terms) {
    if (weight(t) != -n) {
      throw std::invalid_argument("conformal_image: term weight differs from -n");
    }
    auto parts = hat_expansion(t, n, 0);
    for (auto& [d, lc] : parts) {
      if (d < 1) continue;
      if (Zmax >= 0 && d > Zmax) continue;
      for (auto& term : lc.terms) out.by_order[d].terms.push_back(std::move(term));
    }
  }
  for (auto& [d, lc] : out.by_order) lc = reduce(lc, n);
  for (auto it = out.by_order.begin(); it != out.by_order.end();) {
    if (it->second.terms.empty()) it = out.by_order.erase(it);
    else ++it;
  }
  return out;
}

LinearCombination polarize(const LinearCombination& I_Z, int n) {
  LinearCombination out;
  int Z = -1;
  for (const auto& t : I_Z.terms) {
    int z = phi_factor_count(t, 0);
    if (Z < 0) Z = z;
    if (z != Z) {
      throw std::invalid_argument("polarize: input is not phi-homogeneous");
    }
  }
  if (Z <= 0) return reduce(I_Z, n);
  Rational inv_fact = 1;
  for (int k = 2; k <= Z; ++k) inv_fact *= k;
  inv_fact = Rational(1) / inv_fact;
  for (const auto& t : I_Z.terms) {
    std::vector<int> positions;
    for (int f = 0; f < static_cast<int>(t.factors.size()); ++f) {
      if (is_phi_kind(t.factors[f].kind) && t.factors[f].flavor == 0) {
        positions.push_back(f);
      }
    }
    std::vector<int> flavors(Z);
    std::iota(flavors.begin(), flavors.end(), 1);
    do {
      Contraction u = t;
      for (int i = 0; i < Z; ++i) u.factors[positions[i]].flavor = flavors[i];
      u.coeff *= inv_fact;
      out.terms.push_back(std::move(u));
    } while (std::next_permutation(flavors.begin(), flavors.end()));
  }
  return reduce(out, n);
}

LinearCombination diagonal(const LinearCombination& lc, int n) {
  LinearCombination out = lc;
  for (auto& t : out.terms) {
    for (auto& f : t.factors) {
      if (is_phi_kind(f.kind)) f.flavor = 0;
    }
  }
  return reduce(out, n);
}

LinearCombination image1(const Contraction& C, int n, int flavor) {
  const int w = weight(C);
  if ((n + w) % 2 != 0 || (n + w) / 2 < 0) {
    throw std::invalid_argument("image1: weight is not of the form -(n-2k)");
  }
  LinearCombination acc;
  for (int f = 0; f < static_cast<int>(C.factors.size()); ++f) {
    const ConformalExpansion& ex = cached_expansion(C.factors[f], n, flavor);
    auto it = ex.by_degree.find(1);
    if (it == ex.by_degree.end()) continue;
    LinearCombination sub = substitute_factor(C, f, it->second);
    for (auto& t : sub.terms) acc.terms.push_back(std::move(t));
  }
  return reduce(acc, n);
}

LinearCombination image1(const LinearCombination& C, int n, int flavor) {
  LinearCombination acc;
  for (const auto& t : C.terms) {
    LinearCombination one = image1(t, n, flavor);
    for (auto& u : one.terms) acc.terms.push_back(std::move(u));
  }
  return reduce(acc, n);
}

LinearCombination substitute_hessian_to_schouten(const LinearCombination& lc, int n) {
  LinearCombination out;
  for (const auto& t : lc.terms) {
    Contraction u = t;
    for (auto& f : u.factors) {
      if (!is_phi_kind(f.kind)) continue;
      if (f.deriv_order != 2) {
        throw std::invalid_argument(
            "substitute_hessian_to_schouten: phi factor of order != 2");
      }
      f = schouten(0);
      u.coeff = -u.coeff;
    }
    out.terms.push_back(std::move(u));
  }
  return reduce(out, n);
}

LinearCombination schouten_to_hessian(const LinearCombination& lc, int n) {
  LinearCombination out;
  for (const auto& t : lc.terms) {
    Contraction u = t;
    for (auto& f : u.factors) {
      if (f.kind != FactorKind::Schouten) continue;
      f = phi(f.deriv_order + 2, 0);
      u.coeff = -u.coeff;
    }
    out.terms.push_back(std::move(u));
  }
  return reduce(out, n);
}

namespace {

Contraction remove_slot(const Contraction& c, int f, int p) {
  Contraction out = c;
  out.part[f].erase(out.part[f].begin() + p);
  out.factors[f].deriv_order -= 1;
  for (auto& ps : out.part) {
    for (auto& s : ps) {
      if (!s.is_free() && s.f == f && s.p > p) --s.p;
    }
  }
  return out;
}

void remove_factor_keep_links(Contraction& c, int f) {
  c.factors.erase(c.factors.begin() + f);
  c.part.erase(c.part.begin() + f);
  for (auto& ps : c.part) {
    for (auto& s : ps) {
      if (!s.is_free() && s.f > f) --s.f;
    }
  }
}

}  // namespace

Contraction erase_phi(const Contraction& c, const std::set<int>& flavors) {
  Contraction cur = c;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int f = 0; f < static_cast<int>(cur.factors.size()); ++f) {
      const Factor& fac = cur.factors[f];
      if (!is_phi_kind(fac.kind) || !flavors.count(fac.flavor)) continue;
      if (fac.deriv_order != 1) {
        throw std::invalid_argument("erase_phi: flavored phi factor is not order 1");
      }
      SlotRef o = cur.part[f][0];
      if (o.is_free() || o.f == f) {
        throw std::invalid_argument("erase_phi: gradient is not contracted");
      }
      if (o.p >= cur.factors[o.f].deriv_order || is_metric_kind(cur.factors[o.f].kind)) {
        throw std::invalid_argument("erase_phi: partner slot is not a derivative slot");
      }
      if (is_phi_kind(cur.factors[o.f].kind) && cur.factors[o.f].deriv_order == 1) {
        throw std::invalid_argument("erase_phi: erasure would empty the partner factor");
      }
      Contraction next = remove_slot(cur, o.f, o.p);
      remove_factor_keep_links(next, f);
      cur = std::move(next);
      changed = true;
      break;
    }
  }
  return cur;
}

LinearCombination filter_by_rearrangement(const LinearCombination& lc,
                                          const std::vector<int>& r) {
  if (!is_symmetrized(lc)) {
    throw std::invalid_argument("filter_by_rearrangement: input is not symmetrized");
  }
  std::vector<int> want = r;
  std::sort(want.begin(), want.end(), std::greater<int>());
  LinearCombination out;
  for (const auto& t : lc.terms) {
    if (census(t).phi_orders == want) out.terms.push_back(t);
  }
  return out;
}

LinearCombination filter_no_internal(const LinearCombination& lc, int L) {
  LinearCombination out;
  for (const auto& t : lc.terms) {
    FactorCensus cs = census(t);
    if (cs.length == L && cs.internal_contractions == 0) out.terms.push_back(t);
  }
  return out;
}

TruncatedCombination truncate_length(const LinearCombination& lc, int max_length) {
  TruncatedCombination out;
  out.length_floor = max_length + 1;
  for (const auto& t : lc.terms) {
    if (census(t).length <= max_length) out.lc.terms.push_back(t);
  }
  return out;
}

}  // namespace invar
