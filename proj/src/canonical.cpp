#include "invar/canonical.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

namespace invar {

namespace {

struct GroupElement {
  std::vector<int> perm;  // traversal index -> original slot position
  int sign = 1;
};

std::vector<GroupElement> symmetry_group(const Factor& f) {
  const int m = is_phi_kind(f.kind) ? 0 : f.deriv_order;
  const int arity = f.arity();
  std::vector<int> id(arity);
  std::iota(id.begin(), id.end(), 0);

  auto with_base_perm = [&](std::initializer_list<int> base, int sign) {
    GroupElement e{id, sign};
    int i = m;
    for (int b : base) e.perm[i++] = m + b;
    return e;
  };

  std::vector<GroupElement> out;
  switch (f.kind) {
    case FactorKind::Riemann:
    case FactorKind::Weyl:
      out.push_back(with_base_perm({0, 1, 2, 3}, +1));
      out.push_back(with_base_perm({1, 0, 2, 3}, -1));
      out.push_back(with_base_perm({0, 1, 3, 2}, -1));
      out.push_back(with_base_perm({1, 0, 3, 2}, +1));
      out.push_back(with_base_perm({2, 3, 0, 1}, +1));
      out.push_back(with_base_perm({3, 2, 0, 1}, -1));
      out.push_back(with_base_perm({2, 3, 1, 0}, -1));
      out.push_back(with_base_perm({3, 2, 1, 0}, +1));
      break;
    case FactorKind::Schouten:
    case FactorKind::Ricci:
    case FactorKind::Metric:
    case FactorKind::InverseMetric:
      out.push_back(with_base_perm({0, 1}, +1));
      out.push_back(with_base_perm({1, 0}, +1));
      break;
    case FactorKind::ScalarCurv:
    case FactorKind::Phi: {
      out.push_back(GroupElement{id, +1});
      int nd = f.deriv_order;
      if (nd >= 2) {
        // innermost two derivatives commute on a scalar target
        GroupElement e{id, +1};
        std::swap(e.perm[nd - 2], e.perm[nd - 1]);
        out.push_back(e);
      }
      break;
    }
    case FactorKind::SymPhi: {
      int nu = f.deriv_order;
      if (nu > 8) throw std::runtime_error("SymPhi order too large for canonicalization");
      std::vector<int> p(nu);
      std::iota(p.begin(), p.end(), 0);
      do {
        out.push_back(GroupElement{p, +1});
      } while (std::next_permutation(p.begin(), p.end()));
      break;
    }
  }
  return out;
}

constexpr int32_t kOpenCode = 1;
constexpr int32_t kFreeBase = 2000000;

struct CanonSearch {
  const Contraction* c = nullptr;
  int nf = 0;
  std::vector<int> group_of;                           // position -> group
  std::vector<std::vector<int>> groups;                // group -> factor ids
  std::vector<std::vector<GroupElement>> group_elems;  // per group
  std::vector<int> offsets;                            // position -> slot base

  std::vector<std::vector<int>> slot_global;  // (f,p) -> global idx, empty = unplaced
  std::vector<char> used;
  std::vector<int> chosen;
  std::vector<const GroupElement*> gsel;

  std::vector<int32_t> cur;
  std::vector<int32_t> best;
  bool have_best = false;
  long best_gen = 0;
  std::vector<int> best_chosen;
  std::vector<const GroupElement*> best_gsel;
  std::set<int> best_signs;

  void run(int pos, int cmp, int sign) {
    if (pos == nf) {
      if (!have_best || cmp < 0) {
        have_best = true;
        best = cur;
        best_chosen = chosen;
        best_gsel = gsel;
        best_signs.clear();
        best_signs.insert(sign);
        ++best_gen;
      } else if (cmp == 0) {
        best_signs.insert(sign);
      }
      return;
    }
    const int g = group_of[pos];
    const int base = offsets[pos];
    long my_gen = best_gen;
    int my_cmp = cmp;
    for (int f : groups[g]) {
      if (used[f]) continue;
      used[f] = 1;
      for (const auto& elem : group_elems[g]) {
        if (my_gen != best_gen) {
          // best was replaced by a descendant; our prefix equals its prefix
          my_cmp = 0;
          my_gen = best_gen;
        }
        const int arity = static_cast<int>(elem.perm.size());
        int local_cmp = my_cmp;
        bool pruned = false;
        const size_t mark = cur.size();
        for (int t = 0; t < arity; ++t) {
          const int orig_p = elem.perm[t];
          const SlotRef partner = c->part[f][orig_p];
          int32_t code;
          if (partner.is_free()) {
            code = kFreeBase + partner.p;
          } else if (partner.f == f) {
            int q = -1;
            for (int tt = 0; tt < arity; ++tt) {
              if (elem.perm[tt] == partner.p) {
                q = tt;
                break;
              }
            }
            code = (q < t) ? (3 + base + q) : kOpenCode;
          } else if (slot_global[partner.f].empty()) {
            code = kOpenCode;
          } else {
            code = 3 + slot_global[partner.f][partner.p];
          }
          cur.push_back(code);
          if (local_cmp == 0 && have_best) {
            const int32_t b = best[cur.size() - 1];
            if (code > b) {
              pruned = true;
              break;
            }
            if (code < b) local_cmp = -1;
          }
        }
        if (!pruned) {
          chosen[pos] = f;
          gsel[pos] = &elem;
          auto& sg = slot_global[f];
          sg.assign(arity, -1);
          for (int t = 0; t < arity; ++t) sg[elem.perm[t]] = base + t;
          run(pos + 1, local_cmp, sign * elem.sign);
          sg.clear();
        }
        cur.resize(mark);
      }
      used[f] = 0;
    }
  }
};

std::vector<int32_t> profile_prefix(const std::vector<Factor>& sorted_factors) {
  std::vector<int32_t> out;
  out.push_back(static_cast<int32_t>(sorted_factors.size()));
  for (const auto& f : sorted_factors) {
    out.push_back(static_cast<int32_t>(f.kind));
    out.push_back(f.deriv_order);
    out.push_back(f.flavor);
  }
  return out;
}

}  // namespace

CanonicalForm canonical_form(const Contraction& c) {
  CanonicalForm out;
  const int nf = static_cast<int>(c.factors.size());

  std::vector<int> idx(nf);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return c.factors[a] < c.factors[b]; });
  std::vector<Factor> sorted_factors;
  sorted_factors.reserve(nf);
  for (int f : idx) sorted_factors.push_back(c.factors[f]);

  if (nf == 0) {
    out.key = profile_prefix(sorted_factors);
    out.rep = c;
    return out;
  }

  CanonSearch s;
  s.c = &c;
  s.nf = nf;
  s.group_of.resize(nf);
  for (int q = 0; q < nf; ++q) {
    if (q > 0 && sorted_factors[q] == sorted_factors[q - 1]) {
      s.group_of[q] = s.group_of[q - 1];
    } else {
      s.group_of[q] = static_cast<int>(s.groups.size());
      s.groups.emplace_back();
      s.group_elems.push_back(symmetry_group(sorted_factors[q]));
    }
    s.groups[s.group_of[q]].push_back(idx[q]);
  }
  s.offsets.resize(nf);
  int off = 0;
  for (int q = 0; q < nf; ++q) {
    s.offsets[q] = off;
    off += sorted_factors[q].arity();
  }
  s.slot_global.assign(nf, {});
  s.used.assign(nf, 0);
  s.chosen.assign(nf, -1);
  s.gsel.assign(nf, nullptr);
  s.run(0, 0, 1);

  out.key = profile_prefix(sorted_factors);
  out.key.insert(out.key.end(), s.best.begin(), s.best.end());
  out.vanishes = s.best_signs.size() > 1;
  out.sign = *s.best_signs.begin();

  // Rebuild the representative from the winning arrangement.
  Contraction rep;
  rep.factors = sorted_factors;
  rep.part.resize(nf);
  for (int q = 0; q < nf; ++q) rep.part[q].assign(sorted_factors[q].arity(), SlotRef{});
  std::vector<std::vector<int>> glob(nf);  // original (f,p) -> global idx
  for (int q = 0; q < nf; ++q) {
    int f = s.best_chosen[q];
    const GroupElement* e = s.best_gsel[q];
    glob[f].assign(e->perm.size(), -1);
    for (size_t t = 0; t < e->perm.size(); ++t) {
      glob[f][e->perm[t]] = s.offsets[q] + static_cast<int>(t);
    }
  }
  auto global_to_new = [&](int gidx) {
    for (int q = nf - 1; q >= 0; --q) {
      if (gidx >= s.offsets[q]) return slot(q, gidx - s.offsets[q]);
    }
    return SlotRef{};
  };
  for (int q = 0; q < nf; ++q) {
    int f = s.best_chosen[q];
    for (size_t p = 0; p < c.part[f].size(); ++p) {
      SlotRef here_new = global_to_new(glob[f][p]);
      SlotRef o = c.part[f][p];
      rep.part[here_new.f][here_new.p] =
          o.is_free() ? o : global_to_new(glob[o.f][o.p]);
    }
  }
  rep.coeff = out.vanishes ? Rational(0) : Rational(out.sign) * c.coeff;
  out.rep = std::move(rep);
  return out;
}

Contraction canonicalize(const Contraction& c) {
  if (c.coeff == 0) return c;
  return canonical_form(c).rep;
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

namespace {

void remove_factor(Contraction& c, int f) {
  c.factors.erase(c.factors.begin() + f);
  c.part.erase(c.part.begin() + f);
  for (auto& ps : c.part) {
    for (auto& s : ps) {
      if (!s.is_free() && s.f > f) --s.f;
    }
  }
}

void link(Contraction& c, SlotRef a, SlotRef b) {
  if (!a.is_free()) c.part[a.f][a.p] = b;
  if (!b.is_free()) c.part[b.f][b.p] = a;
}

bool eliminate_one_metric(Contraction& c, int n) {
  for (int f = 0; f < static_cast<int>(c.factors.size()); ++f) {
    if (!is_metric_kind(c.factors[f].kind)) continue;
    SlotRef a = c.part[f][0];
    SlotRef b = c.part[f][1];
    if (a.is_free() && b.is_free()) continue;  // template output, keep
    if (!a.is_free() && a.f == f) {
      // self trace: g^a_a = n
      c.coeff *= n;
      remove_factor(c, f);
      return true;
    }
    remove_factor(c, f);
    if (!a.is_free() && a.f > f) --a.f;
    if (!b.is_free() && b.f > f) --b.f;
    link(c, a, b);
    // both ends free: the factor acted as a pure relabeling; tie labels
    if (a.is_free() && b.is_free()) {
      // cannot happen: caught by the double-free guard above
    }
    return true;
  }
  return false;
}

// Renames one definitional internal trace; 0 no change, 1 changed, -1 vanishes.
int name_one_trace(Contraction& c) {
  for (int f = 0; f < static_cast<int>(c.factors.size()); ++f) {
    const Factor fac = c.factors[f];
    if (fac.kind != FactorKind::Riemann && fac.kind != FactorKind::Weyl &&
        fac.kind != FactorKind::Ricci) {
      continue;
    }
    const int m = fac.deriv_order;
    const int nb = base_arity(fac.kind);
    int b1 = -1, b2 = -1;
    for (int p = m; p < m + nb && b1 < 0; ++p) {
      SlotRef o = c.part[f][p];
      if (!o.is_free() && o.f == f && o.p > p && o.p >= m) {
        b1 = p - m;
        b2 = o.p - m;
      }
    }
    if (b1 < 0) continue;
    if (fac.kind == FactorKind::Weyl) return -1;  // trace-free
    if (fac.kind == FactorKind::Ricci) {
      c.factors[f] = scalar_curv(m);
      c.part[f].resize(m);
      return 1;
    }
    // Riemann -> Ricci via Ric_{jk} = g^{il} R_{ijkl}
    int sign = 0, keep1 = -1, keep2 = -1;
    if ((b1 == 0 && b2 == 1) || (b1 == 2 && b2 == 3)) return -1;
    if (b1 == 0 && b2 == 3) { sign = +1; keep1 = 1; keep2 = 2; }
    if (b1 == 0 && b2 == 2) { sign = -1; keep1 = 1; keep2 = 3; }
    if (b1 == 1 && b2 == 2) { sign = +1; keep1 = 0; keep2 = 3; }
    if (b1 == 1 && b2 == 3) { sign = -1; keep1 = 0; keep2 = 2; }
    assert(sign != 0);
    std::vector<SlotRef> np(m + 2);
    for (int p = 0; p < m; ++p) np[p] = c.part[f][p];
    np[m] = c.part[f][m + keep1];
    np[m + 1] = c.part[f][m + keep2];
    std::map<int, int> old_to_new;
    for (int p = 0; p < m; ++p) old_to_new[p] = p;
    old_to_new[m + keep1] = m;
    old_to_new[m + keep2] = m + 1;
    c.factors[f] = ricci(m);
    c.coeff *= sign;
    c.part[f] = np;
    for (int p = 0; p < m + 2; ++p) {
      SlotRef o = c.part[f][p];
      if (o.is_free()) continue;
      if (o.f == f) {
        auto it = old_to_new.find(o.p);
        assert(it != old_to_new.end());
        c.part[f][p] = slot(f, it->second);
      } else {
        c.part[o.f][o.p] = slot(f, p);
      }
    }
    return 1;
  }
  return 0;
}

// Metric elimination + trace naming; false if the term vanishes structurally.
bool normalize_structural(Contraction& c, int n) {
  if (c.coeff == 0) return false;
  bool changed = true;
  while (changed) {
    changed = false;
    if (eliminate_one_metric(c, n)) {
      changed = true;
      continue;
    }
    int r = name_one_trace(c);
    if (r < 0) return false;
    if (r > 0) changed = true;
  }
  return true;
}

std::optional<std::pair<CanonicalKey, Contraction>> reduce_term_keyed(const Contraction& c0,
                                                                      int n) {
  Contraction c = c0;
  if (!normalize_structural(c, n)) return std::nullopt;
  CanonicalForm cf = canonical_form(c);
  if (cf.rep.coeff == 0) return std::nullopt;
  return std::make_pair(std::move(cf.key), std::move(cf.rep));
}

}  // namespace

Contraction eliminate_explicit_metrics(Contraction c) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int f = 0; f < static_cast<int>(c.factors.size()); ++f) {
      if (!is_metric_kind(c.factors[f].kind)) continue;
      SlotRef a = c.part[f][0];
      SlotRef b = c.part[f][1];
      if (a.is_free() && b.is_free()) continue;
      if (!a.is_free() && a.f == f) continue;  // needs the dimension
      remove_factor(c, f);
      if (!a.is_free() && a.f > f) --a.f;
      if (!b.is_free() && b.f > f) --b.f;
      link(c, a, b);
      changed = true;
      break;
    }
  }
  return c;
}

LinearCombination reduce_term(const Contraction& c0, int n) {
  LinearCombination out;
  auto r = reduce_term_keyed(c0, n);
  if (r) out.terms.push_back(std::move(r->second));
  return out;
}

LinearCombination reduce(const LinearCombination& lc, int n) {
  std::map<CanonicalKey, Contraction> acc;
  for (const auto& t : lc.terms) {
    auto r = reduce_term_keyed(t, n);
    if (!r) continue;
    auto it = acc.find(r->first);
    if (it == acc.end()) {
      acc.emplace(std::move(r->first), std::move(r->second));
    } else {
      it->second.coeff += r->second.coeff;
    }
  }
  LinearCombination out;
  for (auto& [k, t] : acc) {
    if (t.coeff != 0) out.terms.push_back(std::move(t));
  }
  return out;
}

bool is_reduced_zero(const LinearCombination& lc, int n) {
  return reduce(lc, n).terms.empty();
}

// ---------------------------------------------------------------------------
// Relation space
// ---------------------------------------------------------------------------

Contraction permute_factor_slots(const Contraction& c, int f, const std::vector<int>& sigma) {
  const int A = c.factors[f].arity();
  std::vector<int> inv(A);
  for (int p = 0; p < A; ++p) inv[sigma[p]] = p;
  Contraction out = c;
  const std::vector<SlotRef> oldp = c.part[f];
  for (int p = 0; p < A; ++p) {
    SlotRef tgt = oldp[sigma[p]];
    if (!tgt.is_free() && tgt.f == f) {
      out.part[f][p] = slot(f, inv[tgt.p]);
    } else {
      out.part[f][p] = tgt;
      if (!tgt.is_free()) out.part[tgt.f][tgt.p] = slot(f, p);
    }
  }
  return out;
}

namespace {

Contraction apply_slot_perm(const Contraction& c, int f, const std::vector<int>& sigma) {
  return permute_factor_slots(c, f, sigma);
}

std::vector<int> identity_perm(int a) {
  std::vector<int> p(a);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

std::vector<LinearCombination> bianchi_instances(const Contraction& c, int n) {
  std::vector<LinearCombination> out;
  for (int f = 0; f < static_cast<int>(c.factors.size()); ++f) {
    const Factor& fac = c.factors[f];
    if (fac.kind != FactorKind::Riemann && fac.kind != FactorKind::Weyl) continue;
    const int m = fac.deriv_order;
    const int A = fac.arity();
    for (int fixed = 0; fixed < 4; ++fixed) {
      std::array<int, 3> rest{};
      int r = 0;
      for (int b = 0; b < 4; ++b) {
        if (b != fixed) rest[r++] = m + b;
      }
      std::vector<int> cyc = identity_perm(A);
      cyc[rest[0]] = rest[1];
      cyc[rest[1]] = rest[2];
      cyc[rest[2]] = rest[0];
      Contraction c1 = apply_slot_perm(c, f, cyc);
      Contraction c2 = apply_slot_perm(c1, f, cyc);
      LinearCombination gen;
      gen.terms = {c, c1, c2};
      LinearCombination red = reduce(gen, n);
      if (!red.terms.empty()) out.push_back(std::move(red));
    }
    if (fac.kind == FactorKind::Riemann && m >= 1) {
      // second Bianchi on (innermost derivative, antisymmetric base pair)
      for (int which : {0, 2}) {
        std::array<int, 3> tri{m - 1, m + which, m + which + 1};
        std::vector<int> cyc = identity_perm(A);
        cyc[tri[0]] = tri[1];
        cyc[tri[1]] = tri[2];
        cyc[tri[2]] = tri[0];
        Contraction c1 = apply_slot_perm(c, f, cyc);
        Contraction c2 = apply_slot_perm(c1, f, cyc);
        LinearCombination gen;
        gen.terms = {c, c1, c2};
        LinearCombination red = reduce(gen, n);
        if (!red.terms.empty()) out.push_back(std::move(red));
      }
    }
  }
  return out;
}

std::vector<Factor> profile_of(const Contraction& c) {
  std::vector<Factor> p = c.factors;
  std::sort(p.begin(), p.end());
  return p;
}

struct ProfileKey {
  int n;
  std::vector<Factor> profile;
  bool operator<(const ProfileKey& o) const {
    if (n != o.n) return n < o.n;
    return profile < o.profile;
  }
};

std::map<ProfileKey, std::vector<Contraction>> g_universe_cache;
std::map<ProfileKey, std::vector<LinearCombination>> g_generator_cache;
std::mutex g_cache_mutex;

void enumerate_matchings(
    std::vector<SlotRef>& slots, std::vector<std::pair<SlotRef, SlotRef>>& cur,
    const std::function<void(const std::vector<std::pair<SlotRef, SlotRef>>&)>& emit) {
  if (slots.empty()) {
    emit(cur);
    return;
  }
  SlotRef first = slots.front();
  for (std::size_t j = 1; j < slots.size(); ++j) {
    std::vector<SlotRef> rest;
    rest.reserve(slots.size() - 2);
    for (std::size_t k = 1; k < slots.size(); ++k) {
      if (k != j) rest.push_back(slots[k]);
    }
    cur.emplace_back(first, slots[j]);
    enumerate_matchings(rest, cur, emit);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Contraction> enumerate_profile(const std::vector<Factor>& profile, int n,
                                           bool keep_renamed) {
  std::vector<Factor> sorted = profile;
  std::sort(sorted.begin(), sorted.end());
  if (!keep_renamed) {
    std::lock_guard<std::mutex> lk(g_cache_mutex);
    auto it = g_universe_cache.find(ProfileKey{n, sorted});
    if (it != g_universe_cache.end()) return it->second;
  }
  std::vector<SlotRef> slots;
  for (int f = 0; f < static_cast<int>(sorted.size()); ++f) {
    for (int p = 0; p < sorted[f].arity(); ++p) slots.push_back(slot(f, p));
  }
  std::vector<Contraction> out;
  if (slots.size() % 2 != 0) return out;
  std::map<CanonicalKey, Contraction> found;
  std::vector<std::pair<SlotRef, SlotRef>> cur;
  std::function<void(const std::vector<std::pair<SlotRef, SlotRef>>&)> emit =
      [&](const std::vector<std::pair<SlotRef, SlotRef>>& pairs) {
        Contraction c;
        c.coeff = 1;
        c.factors = sorted;
        c.part.resize(sorted.size());
        for (std::size_t f = 0; f < sorted.size(); ++f) {
          c.part[f].assign(sorted[f].arity(), SlotRef{});
        }
        for (auto& [a, b] : pairs) link(c, a, b);
        auto r = reduce_term_keyed(c, n);
        if (!r) return;
        if (!keep_renamed && profile_of(r->second) != sorted) return;
        Contraction unit = r->second;
        unit.coeff = 1;
        found.emplace(r->first, std::move(unit));
      };
  enumerate_matchings(slots, cur, emit);
  out.reserve(found.size());
  for (auto& [k, v] : found) out.push_back(v);
  if (!keep_renamed) {
    std::lock_guard<std::mutex> lk(g_cache_mutex);
    g_universe_cache.emplace(ProfileKey{n, sorted}, out);
  }
  return out;
}

RelationSpace relation_space_for(const LinearCombination& lc, int n) {
  RelationSpace rel;
  rel.n = n;
  std::set<std::vector<Factor>> todo;
  std::set<std::vector<Factor>> done;
  for (const auto& t : lc.terms) todo.insert(profile_of(t));
  while (!todo.empty()) {
    auto profile = *todo.begin();
    todo.erase(todo.begin());
    if (done.count(profile)) continue;
    done.insert(profile);
    std::vector<LinearCombination> gens;
    bool cached = false;
    {
      std::lock_guard<std::mutex> lk(g_cache_mutex);
      auto it = g_generator_cache.find(ProfileKey{n, profile});
      if (it != g_generator_cache.end()) {
        gens = it->second;
        cached = true;
      }
    }
    if (!cached) {
      std::vector<Contraction> universe = enumerate_profile(profile, n);
      for (const auto& u : universe) {
        auto instances = bianchi_instances(u, n);
        gens.insert(gens.end(), instances.begin(), instances.end());
      }
      std::lock_guard<std::mutex> lk(g_cache_mutex);
      g_generator_cache.emplace(ProfileKey{n, profile}, gens);
    }
    for (const auto& g : gens) {
      for (const auto& t : g.terms) {
        auto p = profile_of(t);
        if (!done.count(p)) todo.insert(p);
      }
      rel.generators.push_back(g);
    }
  }
  return rel;
}

bool is_zero_mod_relations(const LinearCombination& lc0, const RelationSpace& rel, int n) {
  LinearCombination lc = reduce(lc0, n);
  if (lc.terms.empty()) return true;
  std::map<CanonicalKey, int> col;
  auto col_of = [&](const Contraction& t) {
    Contraction unit = t;
    unit.coeff = 1;
    CanonicalKey k = canonical_form(unit).key;
    auto it = col.find(k);
    if (it != col.end()) return it->second;
    int id = static_cast<int>(col.size());
    col.emplace(std::move(k), id);
    return id;
  };
  auto to_vec = [&](const LinearCombination& v) {
    std::map<int, Rational> row;
    for (const auto& t : v.terms) row[col_of(t)] += t.coeff;
    return row;
  };
  std::map<int, std::map<int, Rational>> pivots;
  auto eliminate = [&](std::map<int, Rational>& row) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto it = row.begin(); it != row.end();) {
        if (it->second == 0) {
          it = row.erase(it);
          continue;
        }
        auto pv = pivots.find(it->first);
        if (pv == pivots.end()) {
          ++it;
          continue;
        }
        Rational factor = it->second;
        for (const auto& [c2, v2] : pv->second) row[c2] -= factor * v2;
        progress = true;
        break;
      }
    }
  };
  for (const auto& g : rel.generators) {
    std::map<int, Rational> row = to_vec(g);  // generators stored reduced
    eliminate(row);
    for (auto it = row.begin(); it != row.end();) {
      if (it->second == 0) it = row.erase(it);
      else ++it;
    }
    if (row.empty()) continue;
    Rational lead = row.begin()->second;
    int pc = row.begin()->first;
    for (auto& [c2, v2] : row) v2 /= lead;
    pivots.emplace(pc, std::move(row));
  }
  std::map<int, Rational> target = to_vec(lc);
  eliminate(target);
  for (auto& [c2, v2] : target) {
    if (v2 != 0) return false;
  }
  return true;
}

}  // namespace invar
