#include "invar/evaluate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace invar {

namespace {

struct TTensor {
  int n = 0;
  int rank = 0;
  std::vector<TaylorScalar> v;

  TTensor() = default;
  TTensor(int n_, int rank_, const JetSpace* sp) : n(n_), rank(rank_) {
    size_t sz = 1;
    for (int r = 0; r < rank; ++r) sz *= n;
    v.assign(sz, TaylorScalar(sp));
  }
  size_t flat(const int* idx) const {
    size_t s = 0;
    for (int r = 0; r < rank; ++r) s = s * n + idx[r];
    return s;
  }
  TaylorScalar& at(const int* idx) { return v[flat(idx)]; }
  const TaylorScalar& at(const int* idx) const { return v[flat(idx)]; }
};

struct VTensor {
  int n = 0;
  int rank = 0;
  std::vector<double> v;
};

VTensor values_of(const TTensor& t) {
  VTensor out;
  out.n = t.n;
  out.rank = t.rank;
  out.v.resize(t.v.size());
  for (size_t i = 0; i < t.v.size(); ++i) out.v[i] = t.v[i].value();
  return out;
}

}  // namespace

struct JetContext::Tensors {
  std::vector<TaylorScalar> ginv;   // n*n
  std::vector<TaylorScalar> gamma;  // [k][i][j] -> k*n*n + i*n + j
  bool geometry_ready = false;
  std::map<std::tuple<int, int, int>, TTensor> taylor;
  std::map<std::tuple<int, int, int>, VTensor> value;
  std::vector<double> ginv_val, g_val;
};

namespace {

void ensure_geometry(const JetContext& ctx) {
  if (!ctx.cache) ctx.cache = std::make_shared<JetContext::Tensors>();
  auto& T = *ctx.cache;
  if (T.geometry_ready) return;
  const int n = ctx.n;
  const JetSpace* sp = ctx.sp;
  // inverse metric by Neumann series around the constant part
  std::vector<double> g0(n * n), g0inv(n * n);
  for (int i = 0; i < n * n; ++i) g0[i] = ctx.g[i].value();
  // gauss-jordan on the constant matrix
  {
    std::vector<double> a = g0, inv(n * n, 0.0);
    for (int i = 0; i < n; ++i) inv[i * n + i] = 1.0;
    for (int col = 0; col < n; ++col) {
      int piv = col;
      for (int r = col + 1; r < n; ++r) {
        if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
      }
      if (std::fabs(a[piv * n + col]) < 1e-12) {
        throw std::runtime_error("metric not invertible at the base point");
      }
      if (piv != col) {
        for (int c = 0; c < n; ++c) {
          std::swap(a[piv * n + c], a[col * n + c]);
          std::swap(inv[piv * n + c], inv[col * n + c]);
        }
      }
      double d = a[col * n + col];
      for (int c = 0; c < n; ++c) {
        a[col * n + c] /= d;
        inv[col * n + c] /= d;
      }
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        double f = a[r * n + col];
        if (f == 0.0) continue;
        for (int c = 0; c < n; ++c) {
          a[r * n + c] -= f * a[col * n + c];
          inv[r * n + c] -= f * inv[col * n + c];
        }
      }
    }
    g0inv = inv;
  }
  // H = g - g0 (zero constant part); ginv = sum_k (-g0inv H)^k g0inv
  std::vector<TaylorScalar> H(n * n, TaylorScalar(sp));
  for (int i = 0; i < n * n; ++i) {
    H[i] = ctx.g[i];
    H[i].coef(0) -= g0[i];
  }
  std::vector<TaylorScalar> acc(n * n, TaylorScalar(sp));  // current term, starts g0inv
  std::vector<TaylorScalar> ginv(n * n, TaylorScalar(sp));
  for (int i = 0; i < n * n; ++i) {
    acc[i] = TaylorScalar::constant(sp, g0inv[i]);
    ginv[i] = acc[i];
  }
  for (int k = 1; k <= sp->degree; ++k) {
    // acc <- (-g0inv H) acc
    std::vector<TaylorScalar> tmp(n * n, TaylorScalar(sp));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        TaylorScalar s(sp);
        for (int e = 0; e < n; ++e) {
          // (g0inv H)_{ie} acc_{ej}
          TaylorScalar m(sp);
          for (int f = 0; f < n; ++f) {
            TaylorScalar t = H[f * n + e];
            t *= g0inv[i * n + f];
            m += t;
          }
          s += m * acc[e * n + j];
        }
        s *= -1.0;
        tmp[i * n + j] = s;
      }
    }
    acc = std::move(tmp);
    for (int i = 0; i < n * n; ++i) ginv[i] += acc[i];
  }
  T.ginv = std::move(ginv);
  // Christoffel symbols Gamma^k_{ij}
  T.gamma.assign(static_cast<size_t>(n) * n * n, TaylorScalar(sp));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        TaylorScalar s(sp);
        for (int l = 0; l < n; ++l) {
          TaylorScalar t = ctx.g[l * n + j].drv(i);
          t += ctx.g[l * n + i].drv(j);
          t -= ctx.g[i * n + j].drv(l);
          s += T.ginv[k * n + l] * t;
        }
        s *= 0.5;
        T.gamma[(k * n + i) * n + j] = s;
        T.gamma[(k * n + j) * n + i] = s;
      }
    }
  }
  T.g_val.resize(n * n);
  T.ginv_val.resize(n * n);
  for (int i = 0; i < n * n; ++i) {
    T.g_val[i] = ctx.g[i].value();
    T.ginv_val[i] = T.ginv[i].value();
  }
  T.geometry_ready = true;
}

TTensor covariant_derivative(const JetContext& ctx, const TTensor& t) {
  const auto& T = *ctx.cache;
  const int n = ctx.n;
  TTensor out(n, t.rank + 1, ctx.sp);
  std::vector<int> idx(t.rank + 1, 0);
  const size_t total = out.v.size();
  for (size_t flat = 0; flat < total; ++flat) {
    size_t rem = flat;
    for (int r = t.rank; r >= 0; --r) {
      idx[r] = static_cast<int>(rem % n);
      rem /= n;
    }
    const int a = idx[0];
    const int* rest = idx.data() + 1;
    TaylorScalar s = t.at(rest).drv(a);
    // minus Gamma^e_{a s_r} T_{... e ...}
    std::vector<int> tmp(rest, rest + t.rank);
    for (int r = 0; r < t.rank; ++r) {
      const int orig = tmp[r];
      for (int e = 0; e < n; ++e) {
        tmp[r] = e;
        TaylorScalar term = t.at(tmp.data());
        term = term * T.gamma[(e * n + a) * n + orig];
        s -= term;
      }
      tmp[r] = orig;
    }
    out.v[flat] = s;
  }
  return out;
}

const TTensor& taylor_tensor(const JetContext& ctx, FactorKind kind, int deriv, int flavor);

TTensor build_base(const JetContext& ctx, FactorKind kind, int flavor) {
  ensure_geometry(ctx);
  const auto& T = *ctx.cache;
  const int n = ctx.n;
  const JetSpace* sp = ctx.sp;
  switch (kind) {
    case FactorKind::Metric: {
      TTensor t(n, 2, sp);
      for (int i = 0; i < n * n; ++i) t.v[i] = ctx.g[i];
      return t;
    }
    case FactorKind::InverseMetric: {
      TTensor t(n, 2, sp);
      for (int i = 0; i < n * n; ++i) t.v[i] = T.ginv[i];
      return t;
    }
    case FactorKind::Riemann: {
      // K^f_{cab} = d_a Gamma^f_{bc} - d_b Gamma^f_{ac}
      //             + Gamma^f_{ae} Gamma^e_{bc} - Gamma^f_{be} Gamma^e_{ac};
      // R_{ijkl} = g_{lf} K^f_{kij}. Unit-sphere check fixes this sign:
      // Ric_{jk} = g^{il} R_{ijkl} is then positive on the round sphere.
      TTensor K(n, 4, sp);  // [f][c][a][b]
      auto G = [&](int k, int i, int j) -> const TaylorScalar& {
        return T.gamma[(k * n + i) * n + j];
      };
      for (int f = 0; f < n; ++f) {
        for (int c = 0; c < n; ++c) {
          for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
              TaylorScalar s = G(f, b, c).drv(a);
              s -= G(f, a, c).drv(b);
              for (int e = 0; e < n; ++e) {
                s += G(f, a, e) * G(e, b, c);
                s -= G(f, b, e) * G(e, a, c);
              }
              int idx[4] = {f, c, a, b};
              K.at(idx) = s;
            }
          }
        }
      }
      TTensor R(n, 4, sp);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              TaylorScalar s(sp);
              for (int f = 0; f < n; ++f) {
                int idx[4] = {f, k, i, j};
                s += ctx.g[l * n + f] * K.at(idx);
              }
              int idx[4] = {i, j, k, l};
              R.at(idx) = s;
            }
          }
        }
      }
      return R;
    }
    case FactorKind::Ricci: {
      const TTensor& R = taylor_tensor(ctx, FactorKind::Riemann, 0, 0);
      TTensor ric(n, 2, sp);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          TaylorScalar s(sp);
          for (int i = 0; i < n; ++i) {
            for (int l = 0; l < n; ++l) {
              int idx[4] = {i, j, k, l};
              s += T.ginv[i * n + l] * R.at(idx);
            }
          }
          int idx[2] = {j, k};
          ric.at(idx) = s;
        }
      }
      return ric;
    }
    case FactorKind::ScalarCurv: {
      const TTensor& ric = taylor_tensor(ctx, FactorKind::Ricci, 0, 0);
      TTensor s(n, 0, sp);
      TaylorScalar acc(sp);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          int idx[2] = {j, k};
          acc += T.ginv[j * n + k] * ric.at(idx);
        }
      }
      s.v[0] = acc;
      return s;
    }
    case FactorKind::Schouten: {
      const TTensor& ric = taylor_tensor(ctx, FactorKind::Ricci, 0, 0);
      const TTensor& sc = taylor_tensor(ctx, FactorKind::ScalarCurv, 0, 0);
      TTensor p(n, 2, sp);
      const double cn = 1.0 / (ctx.n - 2);
      const double cr = 1.0 / (2.0 * (ctx.n - 1));
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          int idx[2] = {a, b};
          TaylorScalar s = ric.at(idx);
          TaylorScalar t = sc.v[0] * ctx.g[a * n + b];
          t *= cr;
          s -= t;
          s *= cn;
          p.at(idx) = s;
        }
      }
      return p;
    }
    case FactorKind::Weyl: {
      const TTensor& R = taylor_tensor(ctx, FactorKind::Riemann, 0, 0);
      const TTensor& P = taylor_tensor(ctx, FactorKind::Schouten, 0, 0);
      TTensor w(n, 4, sp);
      auto Pg = [&](int a, int b, int c, int d) {
        int idx[2] = {a, b};
        return P.at(idx) * ctx.g[c * n + d];
      };
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              int idx[4] = {i, j, k, l};
              TaylorScalar s = R.at(idx);
              s -= Pg(j, k, i, l);
              s -= Pg(i, l, j, k);
              s += Pg(j, l, i, k);
              s += Pg(i, k, j, l);
              w.at(idx) = s;
            }
          }
        }
      }
      return w;
    }
    case FactorKind::Phi:
    case FactorKind::SymPhi: {
      auto it = ctx.phi.find(flavor);
      if (it == ctx.phi.end()) {
        throw std::runtime_error("jet carries no phi field for flavor " +
                                 std::to_string(flavor));
      }
      TTensor t(n, 0, sp);
      t.v[0] = it->second[0];
      return t;
    }
  }
  throw std::logic_error("unreachable factor kind");
}

const TTensor& taylor_tensor(const JetContext& ctx, FactorKind kind, int deriv, int flavor) {
  ensure_geometry(ctx);
  auto& T = *ctx.cache;
  auto key = std::make_tuple(static_cast<int>(kind), deriv, flavor);
  auto it = T.taylor.find(key);
  if (it != T.taylor.end()) return it->second;

  TTensor t;
  if (kind == FactorKind::SymPhi) {
    // symmetrization of nabla^nu phi over all slots
    const TTensor& u = taylor_tensor(ctx, FactorKind::Phi, deriv, flavor);
    t = TTensor(ctx.n, u.rank, ctx.sp);
    std::vector<int> perm(u.rank);
    std::iota(perm.begin(), perm.end(), 0);
    int count = 0;
    std::vector<int> idx(u.rank), src(u.rank);
    do {
      ++count;
      for (size_t flat = 0; flat < t.v.size(); ++flat) {
        size_t rem = flat;
        for (int r = u.rank - 1; r >= 0; --r) {
          idx[r] = static_cast<int>(rem % ctx.n);
          rem /= ctx.n;
        }
        for (int r = 0; r < u.rank; ++r) src[r] = idx[perm[r]];
        t.v[flat] += u.at(src.data());
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (auto& x : t.v) x *= 1.0 / count;
  } else if (deriv > 0) {
    const TTensor& lower = taylor_tensor(ctx, kind, deriv - 1, flavor);
    t = covariant_derivative(ctx, lower);
  } else {
    t = build_base(ctx, kind, flavor);
  }
  auto [it2, ok] = T.taylor.emplace(key, std::move(t));
  return it2->second;
}

const VTensor& value_tensor(const JetContext& ctx, FactorKind kind, int deriv, int flavor) {
  ensure_geometry(ctx);
  auto& T = *ctx.cache;
  auto key = std::make_tuple(static_cast<int>(kind), deriv, flavor);
  auto it = T.value.find(key);
  if (it != T.value.end()) return it->second;
  VTensor v = values_of(taylor_tensor(ctx, kind, deriv, flavor));
  auto [it2, ok] = T.value.emplace(key, std::move(v));
  return it2->second;
}

// contract one slot of an all-lower tensor with a matrix (ginv to raise,
// g to lower)
VTensor transform_slot(const VTensor& t, int slot, const std::vector<double>& M, int n) {
  VTensor out = t;
  std::vector<int> idx(t.rank, 0);
  for (size_t flat = 0; flat < t.v.size(); ++flat) {
    size_t rem = flat;
    for (int r = t.rank - 1; r >= 0; --r) {
      idx[r] = static_cast<int>(rem % n);
      rem /= n;
    }
    double s = 0.0;
    std::vector<int> src = idx;
    for (int e = 0; e < n; ++e) {
      src[slot] = e;
      size_t sf = 0;
      for (int r = 0; r < t.rank; ++r) sf = sf * n + src[r];
      s += M[idx[slot] * n + e] * t.v[sf];
    }
    out.v[flat] = s;
  }
  return out;
}

}  // namespace

int required_degree(const LinearCombination& lc) {
  int deg = 2;
  for (const auto& t : lc.terms) {
    for (const auto& f : t.factors) {
      if (is_phi_kind(f.kind)) {
        deg = std::max(deg, f.deriv_order + 1);
      } else if (is_curvature_kind(f.kind)) {
        deg = std::max(deg, 2 + f.deriv_order);
      }
    }
  }
  return deg;
}

double eval(const Contraction& c, const JetContext& ctx) {
  if (c.coeff == 0) return 0.0;
  if (c.free_count() != 0) {
    throw std::runtime_error("cannot evaluate an open template");
  }
  {
    LinearCombination one;
    one.terms.push_back(c);
    if (required_degree(one) > ctx.sp->degree) {
      throw std::runtime_error("insufficient jet order for this expression");
    }
  }
  ensure_geometry(ctx);
  const auto& T = *ctx.cache;
  const int n = ctx.n;
  const int nf = static_cast<int>(c.factors.size());

  // Enumerate pairs; assign pair ids to slots; decide raising.
  std::vector<std::vector<int>> pair_id(nf);
  for (int f = 0; f < nf; ++f) pair_id[f].assign(c.factors[f].arity(), -1);
  int npairs = 0;
  std::vector<VTensor> tensors(nf);
  for (int f = 0; f < nf; ++f) {
    const Factor& fac = c.factors[f];
    tensors[f] = value_tensor(ctx, fac.kind, fac.deriv_order, fac.flavor);
  }
  for (int f = 0; f < nf; ++f) {
    for (int p = 0; p < static_cast<int>(c.part[f].size()); ++p) {
      SlotRef o = c.part[f][p];
      if (pair_id[f][p] >= 0) continue;
      int id = npairs++;
      pair_id[f][p] = id;
      pair_id[o.f][o.p] = id;
      bool up_a = c.factors[f].kind == FactorKind::InverseMetric;
      bool up_b = c.factors[o.f].kind == FactorKind::InverseMetric;
      if (!up_a && !up_b) {
        tensors[o.f] = transform_slot(tensors[o.f], o.p, T.ginv_val, n);
      } else if (up_a && up_b) {
        tensors[o.f] = transform_slot(tensors[o.f], o.p, T.g_val, n);
      }
    }
  }
  // Odometer over one index per pair.
  std::vector<int> assign(npairs, 0);
  double total = 0.0;
  std::vector<std::vector<size_t>> stride(nf);
  while (true) {
    double prod = 1.0;
    for (int f = 0; f < nf && prod != 0.0; ++f) {
      size_t flat = 0;
      const auto& pid = pair_id[f];
      for (size_t p = 0; p < pid.size(); ++p) flat = flat * n + assign[pid[p]];
      prod *= tensors[f].v[flat];
    }
    total += prod;
    int d = npairs - 1;
    while (d >= 0) {
      if (++assign[d] < n) break;
      assign[d] = 0;
      --d;
    }
    if (d < 0) break;
    if (npairs == 0) break;
  }
  if (npairs == 0) {
    // no pairs: the loop above added the bare product once
  }
  return to_double(c.coeff) * total;
}

double eval(const LinearCombination& lc, const JetContext& ctx) {
  double s = 0.0;
  for (const auto& t : lc.terms) s += eval(t, ctx);
  return s;
}

double term_scale(const LinearCombination& lc, const JetContext& ctx) {
  double s = 0.0;
  for (const auto& t : lc.terms) s = std::max(s, std::fabs(eval(t, ctx)));
  return s;
}

JetContext make_flat_jet(int n, int degree) {
  JetContext ctx;
  ctx.n = n;
  ctx.sp = JetSpace::get(n, degree);
  ctx.g.assign(n * n, TaylorScalar(ctx.sp));
  for (int i = 0; i < n; ++i) ctx.gij(i, i) = TaylorScalar::constant(ctx.sp, 1.0);
  return ctx;
}

JetContext make_random_jet(int n, int degree, uint64_t seed, double amplitude,
                           double phi_amplitude) {
  JetContext ctx = make_flat_jet(n, degree);
  Rng rng(seed);
  const JetSpace* sp = ctx.sp;
  // symmetric constant perturbation, small enough to stay positive definite
  std::vector<double> c0(n * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = 0.15 * amplitude * rng.sym();
      c0[i * n + j] = v;
      c0[j * n + i] = v;
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      TaylorScalar comp = ctx.gij(i, j);
      comp.coef(0) += c0[i * n + j];
      for (int m = 1; m < sp->size(); ++m) {
        int order = 0;
        for (int v = 0; v < n; ++v) order += sp->expo[m][v];
        if (order < 1) continue;
        double damp = std::pow(0.35, order);
        comp.coef(m) = amplitude * damp * rng.sym();
      }
      ctx.gij(i, j) = comp;
      ctx.gij(j, i) = comp;
    }
  }
  // default conformal factor field (flavor 0) plus two spare flavors
  for (int flavor = 0; flavor <= 2; ++flavor) {
    TaylorScalar f(sp);
    for (int m = 0; m < sp->size(); ++m) {
      int order = 0;
      for (int v = 0; v < n; ++v) order += sp->expo[m][v];
      double damp = std::pow(0.5, order);
      f.coef(m) = phi_amplitude * damp * rng.sym();
    }
    ctx.phi[flavor] = {f};
  }
  return ctx;
}

JetContext make_const_curvature_jet(int n, double kappa, int degree) {
  JetContext ctx = make_flat_jet(n, degree);
  const JetSpace* sp = ctx.sp;
  // u = (kappa/4) |x|^2; f = (1+u)^{-2} = sum (k+1) (-u)^k
  TaylorScalar u(sp);
  for (int v = 0; v < n; ++v) {
    TaylorScalar xv = TaylorScalar::variable(sp, v);
    u += xv * xv;
  }
  u *= kappa / 4.0;
  TaylorScalar f = TaylorScalar::constant(sp, 1.0);
  TaylorScalar pw = TaylorScalar::constant(sp, 1.0);
  for (int k = 1; 2 * k <= degree; ++k) {
    pw = pw * u;
    TaylorScalar t = pw;
    t *= (k % 2 == 0 ? 1.0 : -1.0) * (k + 1);
    f += t;
  }
  for (int i = 0; i < n * n; ++i) ctx.g[i] = TaylorScalar(sp);
  for (int i = 0; i < n; ++i) ctx.gij(i, i) = f;
  return ctx;
}

JetContext make_conformally_flat_jet(int n, int degree, uint64_t seed, double amplitude) {
  JetContext ctx = make_flat_jet(n, degree);
  Rng rng(seed);
  const JetSpace* sp = ctx.sp;
  TaylorScalar u(sp);
  for (int m = 0; m < sp->size(); ++m) {
    int order = 0;
    for (int v = 0; v < n; ++v) order += sp->expo[m][v];
    double damp = std::pow(0.4, order);
    u.coef(m) = amplitude * damp * rng.sym();
  }
  u.coef(0) = 0.2 * amplitude * rng.sym();
  TaylorScalar e2u = u.exp2();
  for (int i = 0; i < n * n; ++i) ctx.g[i] = TaylorScalar(sp);
  for (int i = 0; i < n; ++i) ctx.gij(i, i) = e2u;
  // keep a phi field for conformal tests
  TaylorScalar f(sp);
  for (int m = 0; m < sp->size(); ++m) {
    int order = 0;
    for (int v = 0; v < n; ++v) order += sp->expo[m][v];
    f.coef(m) = 0.4 * std::pow(0.5, order) * rng.sym();
  }
  ctx.phi[0] = {f};
  return ctx;
}

JetContext conformal_rescale(const JetContext& ctx, double eps, int flavor) {
  auto it = ctx.phi.find(flavor);
  if (it == ctx.phi.end()) throw std::runtime_error("no phi field for requested flavor");
  JetContext out;
  out.n = ctx.n;
  out.sp = ctx.sp;
  TaylorScalar f = it->second[0];
  f *= eps;
  TaylorScalar e2f = f.exp2();
  out.g.resize(ctx.g.size());
  for (size_t i = 0; i < ctx.g.size(); ++i) out.g[i] = e2f * ctx.g[i];
  out.phi = ctx.phi;
  return out;
}

JetContext scale_metric(const JetContext& ctx, double t2) {
  JetContext out;
  out.n = ctx.n;
  out.sp = ctx.sp;
  out.g.resize(ctx.g.size());
  for (size_t i = 0; i < ctx.g.size(); ++i) {
    out.g[i] = ctx.g[i];
    out.g[i] *= t2;
  }
  out.phi = ctx.phi;
  return out;
}

ZeroVerdict check_zero(const LinearCombination& lc, int n, int trials, double tol,
                       uint64_t seed) {
  ZeroVerdict v;
  if (lc.terms.empty()) return v;
  int degree = required_degree(lc);
  for (int trial = 0; trial < trials; ++trial) {
    JetContext ctx = make_random_jet(n, degree, seed + 7919ULL * trial);
    double value = eval(lc, ctx);
    double scale = term_scale(lc, ctx);
    double ratio = scale > 0 ? std::fabs(value) / scale : std::fabs(value);
    v.worst_ratio = std::max(v.worst_ratio, ratio);
    if (ratio > tol) {
      v.zero = false;
      if (v.witness_trial < 0) v.witness_trial = trial;
    }
  }
  return v;
}

}  // namespace invar
