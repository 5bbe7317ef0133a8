#include "invar/georules.hpp"

#include "invar/canonical.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>
#include <stdexcept>

namespace invar {

namespace {

Contraction term_of(Rational coeff, std::vector<Factor> facs,
                    const std::vector<std::vector<int>>& labels) {
  return from_labels(std::move(coeff), std::move(facs), labels);
}

LinearCombination lc_of(std::vector<Contraction> terms) {
  LinearCombination lc;
  lc.terms = std::move(terms);
  return lc;
}

int find_factor(const Contraction& c, const std::function<bool(const Factor&)>& pred) {
  for (int f = 0; f < static_cast<int>(c.factors.size()); ++f) {
    if (pred(c.factors[f])) return f;
  }
  return -1;
}

// worklist rewrite: substitute every factor matching pred by its template
LinearCombination rewrite_all(const LinearCombination& lc,
                              const std::function<bool(const Factor&)>& pred,
                              const std::function<LinearCombination(const Factor&)>& tmpl,
                              int n) {
  std::vector<Contraction> todo = lc.terms;
  LinearCombination done;
  while (!todo.empty()) {
    Contraction t = std::move(todo.back());
    todo.pop_back();
    int f = find_factor(t, pred);
    if (f < 0) {
      done.terms.push_back(std::move(t));
      continue;
    }
    LinearCombination sub = substitute_factor(t, f, tmpl(t.factors[f]));
    for (auto& s : sub.terms) todo.push_back(std::move(s));
  }
  return reduce(done, n);
}

}  // namespace

LinearCombination substitute_factor(const Contraction& term, int fidx,
                                    const LinearCombination& tmpl) {
  const int A = term.factors[fidx].arity();
  const int nf_term = static_cast<int>(term.factors.size());
  LinearCombination out;
  for (const auto& tt : tmpl.terms) {
    if (tt.coeff == 0) continue;
    const int nf_tmpl = static_cast<int>(tt.factors.size());
    const int base_tmpl = nf_term - 1;
    Contraction nc;
    nc.coeff = term.coeff * tt.coeff;
    nc.factors.reserve(nf_term - 1 + nf_tmpl);
    for (int g = 0; g < nf_term; ++g) {
      if (g != fidx) nc.factors.push_back(term.factors[g]);
    }
    for (const auto& f : tt.factors) nc.factors.push_back(f);
    nc.part.resize(nc.factors.size());
    for (size_t g = 0; g < nc.factors.size(); ++g) {
      nc.part[g].assign(nc.factors[g].arity(), SlotRef{});
    }
    auto map_term = [&](int g) { return g < fidx ? g : g - 1; };

    // template slot bound to each label
    std::vector<SlotRef> label_slot(A, SlotRef{-2, 0});
    for (int tf = 0; tf < nf_tmpl; ++tf) {
      for (int tp = 0; tp < tt.factors[tf].arity(); ++tp) {
        SlotRef o = tt.part[tf][tp];
        if (o.is_free() && o.p < A) {
          assert(label_slot[o.p].f == -2 && "template label used twice");
          label_slot[o.p] = slot(base_tmpl + tf, tp);
        }
      }
    }
    for (int l = 0; l < A; ++l) {
      assert(label_slot[l].f != -2 && "template label missing");
    }

    for (int g = 0; g < nf_term; ++g) {
      if (g == fidx) continue;
      for (int p = 0; p < term.factors[g].arity(); ++p) {
        SlotRef o = term.part[g][p];
        if (o.is_free()) {
          nc.part[map_term(g)][p] = o;
        } else if (o.f != fidx) {
          nc.part[map_term(g)][p] = slot(map_term(o.f), o.p);
        }
      }
    }
    for (int tf = 0; tf < nf_tmpl; ++tf) {
      for (int tp = 0; tp < tt.factors[tf].arity(); ++tp) {
        SlotRef o = tt.part[tf][tp];
        if (o.is_free()) {
          if (o.p >= A) nc.part[base_tmpl + tf][tp] = o;
        } else {
          nc.part[base_tmpl + tf][tp] = slot(base_tmpl + o.f, o.p);
        }
      }
    }
    for (int l = 0; l < A; ++l) {
      SlotRef ts = label_slot[l];
      SlotRef b = term.part[fidx][l];
      if (b.is_free()) {
        nc.part[ts.f][ts.p] = b;
      } else if (b.f != fidx) {
        nc.part[ts.f][ts.p] = slot(map_term(b.f), b.p);
        nc.part[map_term(b.f)][b.p] = ts;
      } else if (b.p > l) {
        SlotRef ts2 = label_slot[b.p];
        nc.part[ts.f][ts.p] = ts2;
        nc.part[ts2.f][ts2.p] = ts;
      }
    }
    out.terms.push_back(std::move(nc));
  }
  return out;
}

LinearCombination schouten_to_ricci(const LinearCombination& lc, int n) {
  if (n <= 2) throw std::invalid_argument("schouten_to_ricci needs n >= 3");
  auto tmpl = [n](const Factor& f) {
    const int m = f.deriv_order;
    std::vector<int> dl(m);
    std::iota(dl.begin(), dl.end(), 0);
    auto with_base = [&](std::initializer_list<int> base) {
      std::vector<int> v = dl;
      for (int b : base) v.push_back(m + b);
      return v;
    };
    Rational c1{1, n - 2};
    Rational c2{-1, 2 * (n - 1) * (n - 2)};
    return lc_of({term_of(c1, {ricci(m)}, {with_base({0, 1})}),
                  term_of(c2, {scalar_curv(m), metric()},
                          {with_base({}), {m + 0, m + 1}})});
  };
  return rewrite_all(
      lc, [](const Factor& f) { return f.kind == FactorKind::Schouten; }, tmpl, n);
}

DecompositionResult decompose_curvature(const LinearCombination& lc, int n) {
  DecompositionResult out;
  for (const auto& t : lc.terms) {
    for (const auto& f : t.factors) {
      if (f.kind == FactorKind::Riemann && f.deriv_order > 0) ++out.skipped_derived;
    }
  }
  auto tmpl = [](const Factor&) {
    // R_ijkl = W_ijkl + P_jk g_il + P_il g_jk - P_jl g_ik - P_ik g_jl
    return lc_of({
        term_of(1, {weyl()}, {{0, 1, 2, 3}}),
        term_of(1, {schouten(), metric()}, {{1, 2}, {0, 3}}),
        term_of(1, {schouten(), metric()}, {{0, 3}, {1, 2}}),
        term_of(-1, {schouten(), metric()}, {{1, 3}, {0, 2}}),
        term_of(-1, {schouten(), metric()}, {{0, 2}, {1, 3}}),
    });
  };
  out.lc = rewrite_all(
      lc,
      [](const Factor& f) { return f.kind == FactorKind::Riemann && f.deriv_order == 0; },
      tmpl, n);
  return out;
}

LinearCombination decompose_weyl(const LinearCombination& lc, int n) {
  if (n <= 2) throw std::invalid_argument("decompose_weyl needs n >= 3");
  auto tmpl = [n](const Factor& f) {
    const int m = f.deriv_order;
    std::vector<int> dl(m);
    std::iota(dl.begin(), dl.end(), 0);
    auto with_base = [&](std::initializer_list<int> base) {
      std::vector<int> v = dl;
      for (int b : base) v.push_back(m + b);
      return v;
    };
    Rational cr{1, n - 2};
    Rational cs{1, (n - 1) * (n - 2)};
    return lc_of({
        term_of(1, {riemann(m)}, {with_base({0, 1, 2, 3})}),
        term_of(cr, {ricci(m), metric()}, {with_base({0, 2}), {m + 1, m + 3}}),
        term_of(cr, {ricci(m), metric()}, {with_base({1, 3}), {m + 0, m + 2}}),
        term_of(-cr, {ricci(m), metric()}, {with_base({0, 3}), {m + 1, m + 2}}),
        term_of(-cr, {ricci(m), metric()}, {with_base({1, 2}), {m + 0, m + 3}}),
        term_of(-cs, {scalar_curv(m), metric(), metric()},
                {with_base({}), {m + 0, m + 2}, {m + 1, m + 3}}),
        term_of(cs, {scalar_curv(m), metric(), metric()},
                {with_base({}), {m + 0, m + 3}, {m + 1, m + 2}}),
    });
  };
  return rewrite_all(
      lc, [](const Factor& f) { return f.kind == FactorKind::Weyl; }, tmpl, n);
}

// ---------------------------------------------------------------------------
// Derivative commutation
// ---------------------------------------------------------------------------

namespace {

struct SwapResult {
  Contraction main;
  LinearCombination corrections;  // original = main + corrections
};

// Swap the contents of derivative positions p and p+1 of factor f. The
// commutator emits -R_{a b c_s e} (inner)^{..e..} for every slot s of the
// inner tensor, with outer derivatives Leibniz-distributed onto the Riemann
// correction factor.
SwapResult swap_adjacent_derivs(const Contraction& c, int f, int p) {
  const Factor fac = c.factors[f];
  const int m = fac.deriv_order;
  const int total = fac.arity();
  assert(p + 1 < m);
  SwapResult out;
  std::vector<int> sigma(total);
  std::iota(sigma.begin(), sigma.end(), 0);
  std::swap(sigma[p], sigma[p + 1]);
  out.main = permute_factor_slots(c, f, sigma);

  const int nf = static_cast<int>(c.factors.size());
  for (int s = p + 2; s < total; ++s) {
    for (int mask = 0; mask < (1 << p); ++mask) {
      const int scount = std::popcount(static_cast<unsigned>(mask));
      Factor fprime = fac;
      fprime.deriv_order = m - 2 - scount;
      Factor rnew = riemann(scount);

      std::vector<Factor> nfacs = c.factors;
      nfacs[f] = fprime;
      nfacs.push_back(rnew);

      std::vector<SlotRef> relo(total);
      int r_s = 0, r_c = 0;
      for (int q = 0; q < p; ++q) {
        if (mask & (1 << q)) relo[q] = slot(nf, r_s++);
        else relo[q] = slot(f, r_c++);
      }
      relo[p] = slot(nf, scount + 0);
      relo[p + 1] = slot(nf, scount + 1);
      int fpos = r_c;
      int s_fpos = -1;
      for (int q = p + 2; q < total; ++q) {
        int dest = (q < m) ? fpos++ : fprime.deriv_order + (q - m);
        if (q == s) {
          s_fpos = dest;
          relo[q] = slot(nf, scount + 2);
        } else {
          relo[q] = slot(f, dest);
        }
      }
      assert(s_fpos >= 0);

      Contraction nc;
      nc.coeff = -c.coeff;
      nc.factors = std::move(nfacs);
      nc.part.resize(nc.factors.size());
      for (size_t g = 0; g < nc.factors.size(); ++g) {
        nc.part[g].assign(nc.factors[g].arity(), SlotRef{});
      }
      auto relocate = [&](SlotRef x) {
        if (x.is_free() || x.f != f) return x;
        return relo[x.p];
      };
      for (int g = 0; g < nf; ++g) {
        for (int q = 0; q < c.factors[g].arity(); ++q) {
          SlotRef here = (g == f) ? relo[q] : slot(g, q);
          nc.part[here.f][here.p] = relocate(c.part[g][q]);
        }
      }
      nc.part[f][s_fpos] = slot(nf, scount + 3);
      nc.part[nf][scount + 3] = slot(f, s_fpos);
      out.corrections.terms.push_back(std::move(nc));
    }
  }
  return out;
}

}  // namespace

ReorderResult reorder_derivatives(const Contraction& c, int factor,
                                  const std::vector<int>& perm) {
  const int m = c.factors[factor].deriv_order;
  assert(static_cast<int>(perm.size()) == m);
  ReorderResult out;
  out.main = c;
  std::vector<int> cur(m);
  std::iota(cur.begin(), cur.end(), 0);
  for (int target = 0; target < m; ++target) {
    int j = -1;
    for (int q = target; q < m; ++q) {
      if (cur[q] == perm[target]) {
        j = q;
        break;
      }
    }
    assert(j >= 0);
    for (int q = j; q > target; --q) {
      SwapResult sw = swap_adjacent_derivs(out.main, factor, q - 1);
      out.main = std::move(sw.main);
      for (auto& t : sw.corrections.terms) out.corrections.terms.push_back(std::move(t));
      std::swap(cur[q - 1], cur[q]);
    }
  }
  return out;
}

namespace {

std::array<int, 3> deriv_sort_key(const Contraction& c, int f, int q) {
  SlotRef o = c.part[f][q];
  if (o.is_free()) return {2, o.p, 0};
  if (o.f == f) return {1, o.p, 0};
  return {0, o.f, o.p};
}

}  // namespace

LinearCombination commute_derivatives(const LinearCombination& lc, int n) {
  // One sweep per term; corrections re-enter with two fewer derivatives, so
  // the worklist drains.
  std::vector<Contraction> todo = lc.terms;
  LinearCombination done;
  while (!todo.empty()) {
    Contraction t = std::move(todo.back());
    todo.pop_back();
    for (int f = 0; f < static_cast<int>(t.factors.size()); ++f) {
      const int m = t.factors[f].deriv_order;
      // SymPhi slots are symmetrized, not nested derivatives: nothing to do
      if (m < 2 || is_metric_kind(t.factors[f].kind) ||
          t.factors[f].kind == FactorKind::SymPhi) {
        continue;
      }
      std::vector<int> order(m);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return deriv_sort_key(t, f, a) < deriv_sort_key(t, f, b);
      });
      bool sorted = true;
      for (int q = 0; q < m; ++q) sorted &= order[q] == q;
      if (sorted) continue;
      ReorderResult rr = reorder_derivatives(t, f, order);
      t = std::move(rr.main);
      for (auto& corr : rr.corrections.terms) todo.push_back(std::move(corr));
    }
    done.terms.push_back(std::move(t));
  }
  return reduce(done, n);
}

bool is_symmetrized(const LinearCombination& lc) {
  for (const auto& t : lc.terms) {
    for (const auto& f : t.factors) {
      if (f.kind == FactorKind::Phi && f.deriv_order >= 3) return false;
    }
  }
  return true;
}

LinearCombination symmetrize_phi(const LinearCombination& lc, int n) {
  std::vector<Contraction> todo = lc.terms;
  LinearCombination done;
  while (!todo.empty()) {
    Contraction t = std::move(todo.back());
    todo.pop_back();
    int f = find_factor(t, [](const Factor& fa) {
      return fa.kind == FactorKind::Phi && fa.deriv_order >= 3;
    });
    if (f < 0) {
      done.terms.push_back(std::move(t));
      continue;
    }
    const int nu = t.factors[f].deriv_order;
    Contraction sym = t;
    sym.factors[f].kind = FactorKind::SymPhi;
    done.terms.push_back(std::move(sym));
    std::vector<int> perm(nu);
    std::iota(perm.begin(), perm.end(), 0);
    Rational inv_fact = 1;
    for (int k = 2; k <= nu; ++k) inv_fact *= k;
    inv_fact = Rational(1) / inv_fact;
    do {
      ReorderResult rr = reorder_derivatives(t, f, perm);
      for (auto& corr : rr.corrections.terms) {
        corr.coeff *= inv_fact;
        todo.push_back(std::move(corr));
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return reduce(done, n);
}

// ---------------------------------------------------------------------------
// Conformal expansion
// ---------------------------------------------------------------------------

namespace {

Contraction shift_free_labels(Contraction c, int delta) {
  for (auto& ps : c.part) {
    for (auto& s : ps) {
      if (s.is_free()) s.p = static_cast<int16_t>(s.p + delta);
    }
  }
  return c;
}

Contraction prepend_deriv_slot(const Contraction& c, int f, SlotRef content) {
  Contraction out = c;
  for (auto& ps : out.part) {
    for (auto& s : ps) {
      if (!s.is_free() && s.f == f) s.p = static_cast<int16_t>(s.p + 1);
    }
  }
  out.factors[f].deriv_order += 1;
  out.part[f].insert(out.part[f].begin(), content);
  if (!content.is_free()) out.part[content.f][content.p] = slot(f, 0);
  return out;
}

Contraction append_factor(const Contraction& c, Factor fac,
                          const std::vector<SlotRef>& contents) {
  Contraction out = c;
  const int nf = static_cast<int>(out.factors.size());
  out.factors.push_back(fac);
  out.part.emplace_back(fac.arity(), SlotRef{});
  for (int p = 0; p < fac.arity(); ++p) {
    SlotRef o = contents[p];
    out.part[nf][p] = o;
    if (!o.is_free()) out.part[o.f][o.p] = slot(nf, p);
  }
  return out;
}

int count_pairs(const Contraction& c) {
  int cnt = 0;
  for (size_t f = 0; f < c.factors.size(); ++f) {
    for (size_t p = 0; p < c.part[f].size(); ++p) {
      if (!c.part[f][p].is_free()) ++cnt;
    }
  }
  return cnt / 2;
}

// One covariant-derivative step under ghat = e^{2 phi} g. The new outermost
// slot is free label 0 (existing labels shift up). Leibniz terms keep the
// phi-degree; connection corrections raise it by one.
std::map<int, LinearCombination> hat_derivative_step(
    const std::map<int, LinearCombination>& parts, int w, int n, int flavor) {
  std::map<int, LinearCombination> out;
  const Factor dphi = phi(1, flavor);
  for (const auto& [d, lcpart] : parts) {
    for (const auto& t0 : lcpart.terms) {
      Contraction t = shift_free_labels(t0, 1);
      for (int f = 0; f < static_cast<int>(t.factors.size()); ++f) {
        if (is_metric_kind(t.factors[f].kind)) continue;
        out[d].terms.push_back(prepend_deriv_slot(t, f, free_slot(0)));
      }
      const int slots = t.slot_count();
      const int pairs = count_pairs(t);
      const int coeff = w - slots + 2 * pairs;
      if (coeff != 0) {
        Contraction extra = append_factor(t, dphi, {free_slot(0)});
        extra.coeff *= coeff;
        out[d + 1].terms.push_back(std::move(extra));
      }
      for (int f = 0; f < static_cast<int>(t.factors.size()); ++f) {
        if (t.factors[f].kind == FactorKind::InverseMetric) {
          throw std::logic_error("conformal templates must be inverse-metric free");
        }
        for (int s = 0; s < t.factors[f].arity(); ++s) {
          SlotRef old_partner = t.part[f][s];
          {
            // the slot's index moves onto a gradient factor
            Contraction u = t;
            u.coeff = -u.coeff;
            u = append_factor(u, dphi, {old_partner});
            u.part[f][s] = free_slot(0);
            out[d + 1].terms.push_back(std::move(u));
          }
          {
            // metric times phi-gradient contracted into the slot
            Contraction u = append_factor(t, metric(), {free_slot(0), old_partner});
            u = append_factor(u, dphi, {slot(f, s)});
            out[d + 1].terms.push_back(std::move(u));
          }
        }
      }
    }
  }
  for (auto& [d, lcpart] : out) lcpart = reduce(lcpart, n);
  return out;
}

std::map<int, LinearCombination> base_expansion(FactorKind kind, int n, int flavor,
                                                int* w_out) {
  const Factor p1 = phi(1, flavor);
  const Factor p2 = phi(2, flavor);
  std::map<int, LinearCombination> parts;
  int w = 0;
  switch (kind) {
    case FactorKind::Weyl:
      w = 2;
      parts[0] = lc_of({term_of(1, {weyl()}, {{0, 1, 2, 3}})});
      break;
    case FactorKind::Metric:
      w = 2;
      parts[0] = lc_of({term_of(1, {metric()}, {{0, 1}})});
      break;
    case FactorKind::Schouten:
      w = 0;
      parts[0] = lc_of({term_of(1, {schouten()}, {{0, 1}})});
      parts[1] = lc_of({term_of(-1, {p2}, {{0, 1}})});
      parts[2] = lc_of({
          term_of(1, {p1, p1}, {{0}, {1}}),
          term_of(Rational(-1, 2), {p1, p1, metric()}, {{100}, {100}, {0, 1}}),
      });
      break;
    case FactorKind::Riemann:
      w = 2;
      parts[0] = lc_of({term_of(1, {riemann()}, {{0, 1, 2, 3}})});
      parts[1] = lc_of({
          term_of(-1, {p2, metric()}, {{1, 2}, {0, 3}}),
          term_of(-1, {p2, metric()}, {{0, 3}, {1, 2}}),
          term_of(1, {p2, metric()}, {{1, 3}, {0, 2}}),
          term_of(1, {p2, metric()}, {{0, 2}, {1, 3}}),
      });
      parts[2] = lc_of({
          term_of(1, {p1, p1, metric()}, {{1}, {2}, {0, 3}}),
          term_of(1, {p1, p1, metric()}, {{0}, {3}, {1, 2}}),
          term_of(-1, {p1, p1, metric()}, {{1}, {3}, {0, 2}}),
          term_of(-1, {p1, p1, metric()}, {{0}, {2}, {1, 3}}),
          term_of(-1, {p1, p1, metric(), metric()}, {{100}, {100}, {0, 3}, {1, 2}}),
          term_of(1, {p1, p1, metric(), metric()}, {{100}, {100}, {0, 2}, {1, 3}}),
      });
      break;
    case FactorKind::Ricci:
      w = 0;
      parts[0] = lc_of({term_of(1, {ricci()}, {{0, 1}})});
      parts[1] = lc_of({
          term_of(-(n - 2), {p2}, {{0, 1}}),
          term_of(-1, {p2, metric()}, {{100, 100}, {0, 1}}),
      });
      parts[2] = lc_of({
          term_of(n - 2, {p1, p1}, {{0}, {1}}),
          term_of(-(n - 2), {p1, p1, metric()}, {{100}, {100}, {0, 1}}),
      });
      break;
    case FactorKind::ScalarCurv:
      w = -2;
      parts[0] = lc_of({term_of(1, {scalar_curv()}, {{}})});
      parts[1] = lc_of({term_of(-2 * (n - 1), {p2}, {{100, 100}})});
      parts[2] = lc_of({term_of(-(n - 1) * (n - 2), {p1, p1}, {{100}, {100}})});
      break;
    default:
      throw std::invalid_argument("conformal_expand: unsupported factor kind");
  }
  *w_out = w;
  return parts;
}

}  // namespace

ConformalExpansion conformal_expand(const Factor& f, int n, int flavor, int max_degree) {
  ConformalExpansion out;
  out.factor = f;
  if (f.kind == FactorKind::InverseMetric) {
    throw std::invalid_argument("conformal_expand: unsupported factor kind");
  }
  if ((f.kind == FactorKind::Schouten || f.kind == FactorKind::Ricci ||
       f.kind == FactorKind::Weyl) &&
      n <= 2) {
    throw std::invalid_argument("conformal_expand needs n >= 3 for this kind");
  }
  std::map<int, LinearCombination> parts;
  int w = 0;
  int steps = f.deriv_order;
  if (is_phi_kind(f.kind)) {
    // nabla phi is connection-free; higher orders come from derivative steps
    parts[0] = lc_of({term_of(1, {phi(1, f.flavor)}, {{0}})});
    steps = f.deriv_order - 1;
  } else {
    parts = base_expansion(f.kind, n, flavor, &w);
  }
  for (int s = 0; s < steps; ++s) {
    parts = hat_derivative_step(parts, w, n, flavor);
  }
  if (f.kind == FactorKind::SymPhi) {
    const int nu = f.deriv_order;
    std::map<int, LinearCombination> sym;
    std::vector<int> perm(nu);
    std::iota(perm.begin(), perm.end(), 0);
    Rational inv_fact = 1;
    for (int k = 2; k <= nu; ++k) inv_fact *= k;
    inv_fact = Rational(1) / inv_fact;
    do {
      for (const auto& [d, lcpart] : parts) {
        for (const auto& t : lcpart.terms) {
          Contraction u = t;
          for (auto& ps : u.part) {
            for (auto& s2 : ps) {
              if (s2.is_free() && s2.p < nu) s2.p = static_cast<int16_t>(perm[s2.p]);
            }
          }
          u.coeff *= inv_fact;
          sym[d].terms.push_back(std::move(u));
        }
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (auto& [d, lcpart] : sym) lcpart = reduce(lcpart, n);
    parts = std::move(sym);
  }
  if (max_degree >= 0) {
    for (auto it = parts.begin(); it != parts.end();) {
      if (it->first > max_degree) it = parts.erase(it);
      else ++it;
    }
  }
  for (auto it = parts.begin(); it != parts.end();) {
    if (it->second.terms.empty() && it->first != 0) it = parts.erase(it);
    else ++it;
  }
  out.weight_prefactor = w;
  out.by_degree = std::move(parts);
  return out;
}

// ---------------------------------------------------------------------------
// Pfaffian
// ---------------------------------------------------------------------------

namespace {

int permutation_sign(const std::vector<int>& p) {
  int inv = 0;
  for (size_t i = 0; i < p.size(); ++i) {
    for (size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] > p[j]) ++inv;
    }
  }
  return inv % 2 == 0 ? 1 : -1;
}

}  // namespace

Rational constant_curvature_value(const LinearCombination& lc, int n,
                                  const Rational& kappa) {
  std::vector<Contraction> todo = lc.terms;
  LinearCombination done;
  while (!todo.empty()) {
    Contraction t = std::move(todo.back());
    todo.pop_back();
    bool drop = false;
    for (const auto& f : t.factors) {
      if (is_phi_kind(f.kind)) {
        throw std::invalid_argument("constant_curvature_value: phi factors unsupported");
      }
      if (is_curvature_kind(f.kind) && f.deriv_order > 0) drop = true;  // parallel curvature
    }
    if (drop) continue;
    int f = find_factor(t, [](const Factor& fa) { return is_curvature_kind(fa.kind); });
    if (f < 0) {
      done.terms.push_back(std::move(t));
      continue;
    }
    LinearCombination tmpl;
    switch (t.factors[f].kind) {
      case FactorKind::Riemann:
        tmpl = lc_of({term_of(kappa, {metric(), metric()}, {{0, 3}, {1, 2}}),
                      term_of(-kappa, {metric(), metric()}, {{0, 2}, {1, 3}})});
        break;
      case FactorKind::Weyl:
        tmpl = LinearCombination{};  // space forms are conformally flat
        break;
      case FactorKind::Ricci:
        tmpl = lc_of({term_of(kappa * (n - 1), {metric()}, {{0, 1}})});
        break;
      case FactorKind::ScalarCurv:
        tmpl = lc_of({term_of(kappa * n * (n - 1), {}, {})});
        break;
      case FactorKind::Schouten:
        tmpl = lc_of({term_of(kappa / 2, {metric()}, {{0, 1}})});
        break;
      default:
        break;
    }
    LinearCombination sub = substitute_factor(t, f, tmpl);
    for (auto& s : sub.terms) todo.push_back(std::move(s));
  }
  LinearCombination red = reduce(done, n);
  if (red.terms.empty()) return 0;
  if (red.terms.size() != 1 || !red.terms[0].factors.empty()) {
    throw std::logic_error("constant curvature substitution left open structure");
  }
  return red.terms[0].coeff;
}

LinearCombination pfaffian(int n) {
  if (n % 2 != 0 || n < 2) {
    throw std::invalid_argument("pfaffian requires even n >= 2");
  }
  if (n > 8) throw std::invalid_argument("pfaffian: n too large for the expansion");
  const int half = n / 2;
  std::vector<Factor> facs(half, riemann());
  std::vector<int> sigma(n);
  std::iota(sigma.begin(), sigma.end(), 0);
  LinearCombination delta_expr;
  do {
    // x_i at label i pairs y_{sigma(i)}: label(y_j) = sigma^{-1}(j)
    std::vector<int> inv(n);
    for (int j = 0; j < n; ++j) inv[sigma[j]] = j;
    std::vector<std::vector<int>> labels(half);
    for (int t = 0; t < half; ++t) {
      labels[t] = {2 * t, 2 * t + 1, inv[2 * t], inv[2 * t + 1]};
    }
    delta_expr.terms.push_back(term_of(permutation_sign(sigma), facs, labels));
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  LinearCombination red = reduce(delta_expr, n);
  Rational sphere = constant_curvature_value(red, n, 1);
  if (sphere == 0) throw std::logic_error("pfaffian normalization failed");
  return reduce(Rational(1) / sphere * red, n);
}

LinearCombination ricci_to_schouten(const LinearCombination& lc, int n) {
  if (n <= 2) throw std::invalid_argument("ricci_to_schouten needs n >= 3");
  auto tmpl = [n](const Factor& f) {
    const int m = f.deriv_order;
    std::vector<int> dl(m);
    std::iota(dl.begin(), dl.end(), 0);
    auto with_base = [&](std::initializer_list<int> base) {
      std::vector<int> v = dl;
      for (int b : base) v.push_back(m + b);
      return v;
    };
    if (f.kind == FactorKind::Ricci) {
      // Ric_ab = (n-2) P_ab + P^c_c g_ab
      return lc_of({term_of(n - 2, {schouten(m)}, {with_base({0, 1})}),
                    term_of(1, {schouten(m), metric()},
                            {with_base({100, 100}), {m + 0, m + 1}})});
    }
    // Scal = 2(n-1) P^c_c
    return lc_of({term_of(2 * (n - 1), {schouten(m)}, {with_base({100, 100})})});
  };
  return rewrite_all(
      lc,
      [](const Factor& f) {
        return f.kind == FactorKind::Ricci || f.kind == FactorKind::ScalarCurv;
      },
      tmpl, n);
}

PfaffianSplit pfaffian_split(int n) {
  PfaffianSplit out;
  LinearCombination wp =
      ricci_to_schouten(decompose_curvature(pfaffian(n), n).lc, n);
  for (const auto& t : wp.terms) {
    int b = 0;
    for (const auto& f : t.factors) {
      if (f.kind == FactorKind::Schouten) ++b;
    }
    if (b >= 1) out.bar.terms.push_back(t);
    else out.weyl_only.terms.push_back(t);
  }
  return out;
}

const std::vector<RewriteRule>& rule_table() {
  static const std::vector<RewriteRule> rules = {
      {"schouten_to_ricci", FactorKind::Schouten, "expand",
       [](const LinearCombination& lc, int n) { return schouten_to_ricci(lc, n); }},
      {"decompose_curvature", FactorKind::Riemann, "expand",
       [](const LinearCombination& lc, int n) { return decompose_curvature(lc, n).lc; }},
      {"decompose_weyl", FactorKind::Weyl, "expand",
       [](const LinearCombination& lc, int n) { return decompose_weyl(lc, n); }},
      {"commute_derivatives", FactorKind::Phi, "normalize",
       [](const LinearCombination& lc, int n) { return commute_derivatives(lc, n); }},
      {"symmetrize_phi", FactorKind::Phi, "normalize",
       [](const LinearCombination& lc, int n) { return symmetrize_phi(lc, n); }},
  };
  return rules;
}

}  // namespace invar
