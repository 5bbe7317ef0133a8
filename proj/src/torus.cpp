#include "invar/torus.hpp"

#include "invar/jets.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace invar {

namespace {
constexpr int kMaxN = 6;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double TrigField::value(const double* x) const {
  double s = constant;
  for (const auto& m : modes) {
    double arg = 0.0;
    for (int v = 0; v < n; ++v) arg += m.k[v] * x[v];
    arg *= kTwoPi;
    s += m.c_cos * std::cos(arg) + m.c_sin * std::sin(arg);
  }
  return s;
}

double TrigField::d1(const double* x, int a) const {
  double s = 0.0;
  for (const auto& m : modes) {
    double arg = 0.0;
    for (int v = 0; v < n; ++v) arg += m.k[v] * x[v];
    arg *= kTwoPi;
    double w = kTwoPi * m.k[a];
    s += w * (-m.c_cos * std::sin(arg) + m.c_sin * std::cos(arg));
  }
  return s;
}

double TrigField::d2(const double* x, int a, int b) const {
  double s = 0.0;
  for (const auto& m : modes) {
    double arg = 0.0;
    for (int v = 0; v < n; ++v) arg += m.k[v] * x[v];
    arg *= kTwoPi;
    double w = kTwoPi * kTwoPi * m.k[a] * m.k[b];
    s += w * (-m.c_cos * std::cos(arg) - m.c_sin * std::sin(arg));
  }
  return s;
}

TrigMetric flat_torus_metric(int n) {
  TrigMetric g;
  g.n = n;
  g.comp.assign(n * n, TrigField{});
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g.comp[i * n + j].n = n;
      g.comp[i * n + j].constant = i == j ? 1.0 : 0.0;
    }
  }
  return g;
}

namespace {

TrigField random_field(int n, int degree, int nmodes, double amplitude, Rng& rng) {
  TrigField f;
  f.n = n;
  f.constant = 0.0;
  for (int m = 0; m < nmodes; ++m) {
    TrigField::Mode mode;
    bool nonzero = false;
    for (int v = 0; v < n; ++v) {
      int k = static_cast<int>(rng.next() % (2 * degree + 1)) - degree;
      mode.k[v] = static_cast<int8_t>(k);
      nonzero |= k != 0;
    }
    if (!nonzero) mode.k[static_cast<int>(rng.next() % n)] = 1;
    mode.c_cos = amplitude * rng.sym();
    mode.c_sin = amplitude * rng.sym();
    f.modes.push_back(mode);
  }
  return f;
}

bool positive_definite_on_coarse_grid(const TrigMetric& g, int grid) {
  const int n = g.n;
  std::vector<double> x(n, 0.0);
  std::vector<int> idx(n, 0);
  double a[kMaxN][kMaxN];
  while (true) {
    for (int v = 0; v < n; ++v) x[v] = static_cast<double>(idx[v]) / grid;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a[i][j] = g.at(i, j).value(x.data());
    }
    // Cholesky
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = a[i][j];
        for (int k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
        if (i == j) {
          if (s < 1e-6) return false;
          a[i][i] = std::sqrt(s);
        } else {
          a[i][j] = s / a[j][j];
        }
      }
    }
    int d = n - 1;
    while (d >= 0 && ++idx[d] == grid) idx[d--] = 0;
    if (d < 0) break;
  }
  return true;
}

}  // namespace

TrigMetric make_trig_metric(int n, int degree, int modes_per_component,
                            double amplitude, uint64_t seed) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    Rng rng(seed + 0x51ed2701ULL * attempt);
    TrigMetric g;
    g.n = n;
    g.degree = degree;
    g.seed = seed;
    g.comp.assign(n * n, TrigField{});
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        TrigField f = random_field(n, degree, modes_per_component, amplitude, rng);
        if (i == j) f.constant = 1.0;
        g.comp[i * n + j] = f;
        g.comp[j * n + i] = f;
      }
    }
    if (positive_definite_on_coarse_grid(g, 7)) return g;
  }
  throw MetricNotPositive("could not generate a positive definite trig metric");
}

TrigField make_trig_phi(int n, int degree, int modes, double amplitude, uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return random_field(n, degree, modes, amplitude, rng);
}

// ---------------------------------------------------------------------------
// Point assembly and contraction evaluation
// ---------------------------------------------------------------------------

namespace {

struct PointTensors {
  int n = 0;
  double sqrt_det = 0.0;
  std::vector<double> G, Gi;        // n^2
  std::vector<double> R, W;         // n^4
  std::vector<double> Ric, P, Hess; // n^2
  std::vector<double> Grad;         // n
  double Scal = 0.0;
  double phi_val = 0.0;
  bool has_phi = false;

  void resize(int n_) {
    n = n_;
    G.assign(n * n, 0.0);
    Gi.assign(n * n, 0.0);
    R.assign(n * n * n * n, 0.0);
    W.assign(n * n * n * n, 0.0);
    Ric.assign(n * n, 0.0);
    P.assign(n * n, 0.0);
    Hess.assign(n * n, 0.0);
    Grad.assign(n, 0.0);
  }
};

struct MetricDerivs {
  int n = 0;
  std::vector<double> G;    // n^2
  std::vector<double> dG;   // [a][i][j] n^3
  std::vector<double> d2G;  // [a][b][i][j] n^4
  double phi = 0.0;
  std::vector<double> dphi;   // n
  std::vector<double> d2phi;  // n^2
  bool has_phi = false;

  void resize(int n_) {
    n = n_;
    G.assign(n * n, 0.0);
    dG.assign(n * n * n, 0.0);
    d2G.assign(n * n * n * n, 0.0);
    dphi.assign(n, 0.0);
    d2phi.assign(n * n, 0.0);
  }
};

void sample_metric(const TrigMetric& g, const TrigField* phi, const double* x,
                   MetricDerivs& out) {
  const int n = g.n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double v = g.at(i, j).value(x);
      out.G[i * n + j] = v;
      out.G[j * n + i] = v;
      for (int a = 0; a < n; ++a) {
        double dv = g.at(i, j).d1(x, a);
        out.dG[(a * n + i) * n + j] = dv;
        out.dG[(a * n + j) * n + i] = dv;
        for (int b = a; b < n; ++b) {
          double d2v = g.at(i, j).d2(x, a, b);
          out.d2G[((a * n + b) * n + i) * n + j] = d2v;
          out.d2G[((a * n + b) * n + j) * n + i] = d2v;
          out.d2G[((b * n + a) * n + i) * n + j] = d2v;
          out.d2G[((b * n + a) * n + j) * n + i] = d2v;
        }
      }
    }
  }
  out.has_phi = phi != nullptr;
  if (phi) {
    out.phi = phi->value(x);
    for (int a = 0; a < n; ++a) {
      out.dphi[a] = phi->d1(x, a);
      for (int b = a; b < n; ++b) {
        double v = phi->d2(x, a, b);
        out.d2phi[a * n + b] = v;
        out.d2phi[b * n + a] = v;
      }
    }
  }
}

// ghat = e^{2 phi} g with exact chain rule; phi data stays available for
// phi-factor evaluation under the rescaled metric.
void conformal_substitute(MetricDerivs& m) {
  const int n = m.n;
  const double e2 = std::exp(2.0 * m.phi);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double gij = m.G[i * n + j];
          double dga = m.dG[(a * n + i) * n + j];
          double dgb = m.dG[(b * n + i) * n + j];
          double d2g = m.d2G[((a * n + b) * n + i) * n + j];
          m.d2G[((a * n + b) * n + i) * n + j] =
              e2 * ((4.0 * m.dphi[a] * m.dphi[b] + 2.0 * m.d2phi[a * n + b]) * gij +
                    2.0 * m.dphi[a] * dgb + 2.0 * m.dphi[b] * dga + d2g);
        }
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        m.dG[(a * n + i) * n + j] =
            e2 * (2.0 * m.dphi[a] * m.G[i * n + j] + m.dG[(a * n + i) * n + j]);
      }
    }
  }
  for (int i = 0; i < n * n; ++i) m.G[i] *= e2;
}

void assemble(const MetricDerivs& md, PointTensors& t) {
  const int n = md.n;
  t.n = n;
  t.G = md.G;
  // inverse and sqrt(det) via Cholesky
  {
    double a[kMaxN][kMaxN];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a[i][j] = md.G[i * n + j];
    }
    double det = 1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = a[i][j];
        for (int k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
        if (i == j) {
          if (s <= 0.0) throw MetricNotPositive("metric lost positivity on the grid");
          a[i][i] = std::sqrt(s);
          det *= s;
        } else {
          a[i][j] = s / a[j][j];
        }
      }
    }
    t.sqrt_det = std::sqrt(det);
    // invert via L
    double inv[kMaxN][kMaxN] = {};
    for (int c = 0; c < n; ++c) {
      double y[kMaxN] = {};
      y[c] = 1.0;
      for (int i = 0; i < n; ++i) {
        double s = y[i];
        for (int k = 0; k < i; ++k) s -= a[i][k] * y[k];
        y[i] = s / a[i][i];
      }
      for (int i = n - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n; ++k) s -= a[k][i] * inv[k][c];
        inv[i][c] = s / a[i][i];
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) t.Gi[i * n + j] = inv[i][j];
    }
  }
  // Christoffels and their derivatives
  static thread_local std::vector<double> Gam, dGam, dGi;
  Gam.assign(n * n * n, 0.0);   // [k][i][j]
  dGam.assign(n * n * n * n, 0.0);  // [a][k][i][j]
  dGi.assign(n * n * n, 0.0);   // [a][k][l]
  auto dG = [&](int a, int i, int j) { return md.dG[(a * n + i) * n + j]; };
  auto d2G = [&](int a, int b, int i, int j) {
    return md.d2G[((a * n + b) * n + i) * n + j];
  };
  for (int a = 0; a < n; ++a) {
    for (int k = 0; k < n; ++k) {
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int p = 0; p < n; ++p) {
          for (int q = 0; q < n; ++q) {
            s -= t.Gi[k * n + p] * dG(a, p, q) * t.Gi[q * n + l];
          }
        }
        dGi[(a * n + k) * n + l] = s;
      }
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += t.Gi[k * n + l] * (dG(i, l, j) + dG(j, l, i) - dG(l, i, j));
        }
        s *= 0.5;
        Gam[(k * n + i) * n + j] = s;
        Gam[(k * n + j) * n + i] = s;
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            s += dGi[(a * n + k) * n + l] * (dG(i, l, j) + dG(j, l, i) - dG(l, i, j));
            s += t.Gi[k * n + l] * (d2G(a, i, l, j) + d2G(a, j, l, i) - d2G(a, l, i, j));
          }
          s *= 0.5;
          dGam[((a * n + k) * n + i) * n + j] = s;
          dGam[((a * n + k) * n + j) * n + i] = s;
        }
      }
    }
  }
  auto G3 = [&](int k, int i, int j) { return Gam[(k * n + i) * n + j]; };
  auto dG3 = [&](int a, int k, int i, int j) { return dGam[((a * n + k) * n + i) * n + j]; };
  // K^f_{cab} = d_a Gam^f_{bc} - d_b Gam^f_{ac} + Gam Gam terms;
  // R_{ijkl} = G_{lf} K^f_{kij}
  static thread_local std::vector<double> K;
  K.assign(n * n * n * n, 0.0);
  for (int f = 0; f < n; ++f) {
    for (int c = 0; c < n; ++c) {
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          double s = dG3(a, f, b, c) - dG3(b, f, a, c);
          for (int e = 0; e < n; ++e) {
            s += G3(f, a, e) * G3(e, b, c) - G3(f, b, e) * G3(e, a, c);
          }
          K[((f * n + c) * n + a) * n + b] = s;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int f = 0; f < n; ++f) {
            s += md.G[l * n + f] * K[((f * n + k) * n + i) * n + j];
          }
          t.R[((i * n + j) * n + k) * n + l] = s;
        }
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) {
          s += t.Gi[i * n + l] * t.R[((i * n + j) * n + k) * n + l];
        }
      }
      t.Ric[j * n + k] = s;
    }
  }
  t.Scal = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) t.Scal += t.Gi[j * n + k] * t.Ric[j * n + k];
  }
  const double cP = 1.0 / (n - 2);
  const double cS = 1.0 / (2.0 * (n - 1));
  for (int i = 0; i < n * n; ++i) t.P[i] = cP * (t.Ric[i] - cS * t.Scal * md.G[i]);
  auto Pg = [&](int a, int b, int c, int d) {
    return t.P[a * n + b] * md.G[c * n + d];
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          t.W[((i * n + j) * n + k) * n + l] =
              t.R[((i * n + j) * n + k) * n + l] - Pg(j, k, i, l) - Pg(i, l, j, k) +
              Pg(j, l, i, k) + Pg(i, k, j, l);
        }
      }
    }
  }
  t.has_phi = md.has_phi;
  if (md.has_phi) {
    t.phi_val = md.phi;
    for (int a = 0; a < n; ++a) t.Grad[a] = md.dphi[a];
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double s = md.d2phi[a * n + b];
        for (int e = 0; e < n; ++e) s -= G3(e, a, b) * md.dphi[e];
        t.Hess[a * n + b] = s;
      }
    }
  }
}

const std::vector<double>* tensor_for(const PointTensors& t, const Factor& f,
                                      double* scalar_out) {
  if (is_phi_kind(f.kind)) {
    if (!t.has_phi) throw std::runtime_error("grid evaluator: no phi field supplied");
    switch (f.deriv_order) {
      case 1: return &t.Grad;
      case 2: return &t.Hess;
      default:
        throw std::runtime_error("grid evaluator supports phi orders <= 2");
    }
  }
  if (f.deriv_order != 0) {
    throw std::runtime_error("grid evaluator supports underived curvature factors only");
  }
  switch (f.kind) {
    case FactorKind::Riemann: return &t.R;
    case FactorKind::Weyl: return &t.W;
    case FactorKind::Ricci: return &t.Ric;
    case FactorKind::Schouten: return &t.P;
    case FactorKind::ScalarCurv:
      *scalar_out = t.Scal;
      return nullptr;
    case FactorKind::Metric: return &t.G;
    case FactorKind::InverseMetric: return &t.Gi;
    default:
      throw std::runtime_error("grid evaluator: unsupported factor kind");
  }
}

// Evaluation plan for one term, reused across grid points.
struct TermPlan {
  double coeff = 0.0;
  struct FactorPlan {
    Factor fac;
    int rank = 0;
    std::vector<int> pair_of_slot;  // pair index per slot
    std::vector<char> raise_slot;   // contract with Gi (or G for upper pairs)
    std::vector<char> lower_slot;
  };
  std::vector<FactorPlan> factors;
  int npairs = 0;
  double scalar_product = 1.0;  // filled per point for rank-0 factors
};

TermPlan plan_term(const Contraction& c) {
  TermPlan plan;
  plan.coeff = to_double(c.coeff);
  const int nf = static_cast<int>(c.factors.size());
  plan.factors.resize(nf);
  std::vector<std::vector<int>> pair_id(nf);
  for (int f = 0; f < nf; ++f) {
    pair_id[f].assign(c.factors[f].arity(), -1);
    plan.factors[f].fac = c.factors[f];
    plan.factors[f].rank = c.factors[f].arity();
    plan.factors[f].raise_slot.assign(c.factors[f].arity(), 0);
    plan.factors[f].lower_slot.assign(c.factors[f].arity(), 0);
  }
  int np = 0;
  for (int f = 0; f < nf; ++f) {
    for (int p = 0; p < static_cast<int>(c.part[f].size()); ++p) {
      if (pair_id[f][p] >= 0) continue;
      SlotRef o = c.part[f][p];
      if (o.is_free()) throw std::runtime_error("grid evaluator needs complete contractions");
      pair_id[f][p] = np;
      pair_id[o.f][o.p] = np;
      bool up_a = c.factors[f].kind == FactorKind::InverseMetric;
      bool up_b = c.factors[o.f].kind == FactorKind::InverseMetric;
      if (!up_a && !up_b) plan.factors[o.f].raise_slot[o.p] = 1;
      else if (up_a && up_b) plan.factors[o.f].lower_slot[o.p] = 1;
      ++np;
    }
  }
  plan.npairs = np;
  for (int f = 0; f < nf; ++f) plan.factors[f].pair_of_slot = pair_id[f];
  return plan;
}

// per-point cache of slot-transformed tensors, keyed by (kind, deriv,
// flavor, raise/lower masks); entries recur across terms of a batch
using RaisedCache = std::map<uint64_t, std::vector<double>>;

double eval_term_at(const TermPlan& plan, const PointTensors& t, RaisedCache& cache) {
  const int n = t.n;
  double scalars = 1.0;
  std::vector<const std::vector<double>*> tensors(plan.factors.size(), nullptr);
  for (size_t f = 0; f < plan.factors.size(); ++f) {
    const auto& fp = plan.factors[f];
    double sc = 1.0;
    const std::vector<double>* src = tensor_for(t, fp.fac, &sc);
    if (!src) {
      scalars *= sc;
      continue;
    }
    uint64_t mask = 0;
    for (size_t s = 0; s < fp.raise_slot.size(); ++s) {
      if (fp.raise_slot[s]) mask |= 1ULL << (2 * s);
      if (fp.lower_slot[s]) mask |= 1ULL << (2 * s + 1);
    }
    if (mask == 0) {
      tensors[f] = src;
      continue;
    }
    uint64_t key = mask | (static_cast<uint64_t>(fp.fac.kind) << 40) |
                   (static_cast<uint64_t>(fp.fac.deriv_order) << 48) |
                   (static_cast<uint64_t>(fp.fac.flavor & 0xff) << 56);
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::vector<double> buf = *src;
      std::vector<double> tmp(buf.size());
      const int rank = fp.rank;
      for (int s = 0; s < rank; ++s) {
        const double* M = nullptr;
        if (fp.raise_slot[s]) M = t.Gi.data();
        else if (fp.lower_slot[s]) M = t.G.data();
        else continue;
        size_t stride = 1;
        for (int r = rank - 1; r > s; --r) stride *= n;
        size_t outer = buf.size() / (stride * n);
        for (size_t o = 0; o < outer; ++o) {
          for (size_t in = 0; in < stride; ++in) {
            size_t base = o * stride * n + in;
            for (int e = 0; e < n; ++e) {
              double s2 = 0.0;
              for (int e2 = 0; e2 < n; ++e2) {
                s2 += M[e * n + e2] * buf[base + e2 * stride];
              }
              tmp[base + e * stride] = s2;
            }
          }
        }
        buf.swap(tmp);
      }
      it = cache.emplace(key, std::move(buf)).first;
    }
    tensors[f] = &it->second;
  }
  // odometer over pair indices
  std::array<int, 16> assign{};
  const int np = plan.npairs;
  if (np > 16) throw std::runtime_error("too many contraction pairs for the grid path");
  double total = 0.0;
  while (true) {
    double prod = scalars;
    for (size_t f = 0; f < plan.factors.size() && prod != 0.0; ++f) {
      if (!tensors[f]) continue;
      const auto& pid = plan.factors[f].pair_of_slot;
      size_t flat = 0;
      for (size_t p = 0; p < pid.size(); ++p) flat = flat * n + assign[pid[p]];
      prod *= (*tensors[f])[flat];
    }
    total += prod;
    int d = np - 1;
    while (d >= 0) {
      if (++assign[d] < n) break;
      assign[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return plan.coeff * total;
}

}  // namespace

std::vector<double> torus_integral_batch(const std::vector<LinearCombination>& lcs,
                                         const TrigMetric& g, const TrigField* phi,
                                         int grid) {
  const int n = g.n;
  if (n > kMaxN) throw std::runtime_error("torus dimension too large");
  std::vector<std::vector<TermPlan>> plans(lcs.size());
  for (size_t i = 0; i < lcs.size(); ++i) {
    for (const auto& t : lcs[i].terms) plans[i].push_back(plan_term(t));
  }
  std::vector<double> sums(lcs.size(), 0.0);
  std::vector<double> comp(lcs.size(), 0.0);  // Kahan compensation
  MetricDerivs md;
  md.resize(n);
  PointTensors pt;
  pt.resize(n);
  RaisedCache workspace;
  std::vector<int> idx(n, 0);
  std::vector<double> x(n, 0.0);
  while (true) {
    for (int v = 0; v < n; ++v) x[v] = static_cast<double>(idx[v]) / grid;
    sample_metric(g, phi, x.data(), md);
    if (phi) conformal_substitute(md);
    assemble(md, pt);
    workspace.clear();
    for (size_t i = 0; i < lcs.size(); ++i) {
      double val = 0.0;
      for (const auto& plan : plans[i]) val += eval_term_at(plan, pt, workspace);
      val *= pt.sqrt_det;
      double y = val - comp[i];
      double t2 = sums[i] + y;
      comp[i] = (t2 - sums[i]) - y;
      sums[i] = t2;
    }
    int d = n - 1;
    while (d >= 0) {
      if (++idx[d] < grid) break;
      idx[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
  double cell = std::pow(1.0 / grid, n);
  for (auto& s : sums) s *= cell;
  return sums;
}

double torus_integral(const LinearCombination& lc, const TrigMetric& g, int grid) {
  return torus_integral_batch({lc}, g, nullptr, grid)[0];
}

ConvergenceCheck torus_integral_checked(const LinearCombination& lc, const TrigMetric& g,
                                        int grid, double tol) {
  ConvergenceCheck out;
  out.value = torus_integral(lc, g, grid);
  out.coarse_value = torus_integral(lc, g, std::max(2, grid / 2));
  out.converged = std::fabs(out.value - out.coarse_value) <=
                  tol * std::max(1.0, std::fabs(out.value));
  return out;
}

double conformal_invariance_residual(const LinearCombination& P, const TrigMetric& g,
                                     const TrigField& phi, int grid) {
  double base = torus_integral_batch({P}, g, nullptr, grid)[0];
  double hat = torus_integral_batch({P}, g, &phi, grid)[0];
  return std::fabs(hat - base) / std::max(1.0, std::fabs(base));
}

double torus_integral_scale(const LinearCombination& P, const TrigMetric& g, int grid) {
  // integral of |pointwise value|: reuse the batch machinery termwise
  const int n = g.n;
  std::vector<TermPlan> plans;
  for (const auto& t : P.terms) plans.push_back(plan_term(t));
  double sum = 0.0;
  MetricDerivs md;
  md.resize(n);
  PointTensors pt;
  pt.resize(n);
  RaisedCache workspace;
  std::vector<int> idx(n, 0);
  std::vector<double> x(n, 0.0);
  while (true) {
    for (int v = 0; v < n; ++v) x[v] = static_cast<double>(idx[v]) / grid;
    sample_metric(g, nullptr, x.data(), md);
    assemble(md, pt);
    workspace.clear();
    double val = 0.0;
    for (const auto& plan : plans) val += eval_term_at(plan, pt, workspace);
    sum += std::fabs(val) * pt.sqrt_det;
    int d = n - 1;
    while (d >= 0) {
      if (++idx[d] < grid) break;
      idx[d] = 0;
      --d;
    }
    if (d < 0) break;
  }
  return sum * std::pow(1.0 / grid, n);
}

}  // namespace invar
