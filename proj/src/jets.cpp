#include "invar/jets.hpp"

#include <cassert>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>

namespace invar {

namespace {

void gen_monomials(int nvars, int degree, std::vector<std::array<uint8_t, 6>>& out) {
  // graded order, lex within a grade
  std::array<uint8_t, 6> cur{};
  for (int total = 0; total <= degree; ++total) {
    // enumerate compositions of `total` into nvars parts, lex descending first var
    std::function<void(int, int)> rec = [&](int var, int left) {
      if (var == nvars - 1) {
        cur[var] = static_cast<uint8_t>(left);
        out.push_back(cur);
        return;
      }
      for (int e = left; e >= 0; --e) {
        cur[var] = static_cast<uint8_t>(e);
        rec(var + 1, left - e);
      }
    };
    if (nvars == 0) break;
    rec(0, total);
  }
}

std::map<std::pair<int, int>, JetSpace> g_spaces;
std::mutex g_spaces_mutex;

}  // namespace

int JetSpace::index_of(const std::array<uint8_t, 6>& e) const {
  int key = 0;
  for (int v = 0; v < nvars; ++v) key = key * (degree + 1) + e[v];
  int idx = lookup[key];
  return idx;
}

const JetSpace* JetSpace::get(int nvars, int degree) {
  assert(nvars >= 1 && nvars <= 6);
  std::lock_guard<std::mutex> lk(g_spaces_mutex);
  auto it = g_spaces.find({nvars, degree});
  if (it != g_spaces.end()) return &it->second;
  JetSpace sp;
  sp.nvars = nvars;
  sp.degree = degree;
  gen_monomials(nvars, degree, sp.expo);
  int radix = 1;
  for (int v = 0; v < nvars; ++v) radix *= (degree + 1);
  sp.lookup.assign(radix, -1);
  for (int i = 0; i < sp.size(); ++i) {
    int key = 0;
    for (int v = 0; v < nvars; ++v) key = key * (degree + 1) + sp.expo[i][v];
    sp.lookup[key] = i;
  }
  const int sz = sp.size();
  sp.prod.assign(static_cast<size_t>(sz) * sz, -1);
  for (int i = 0; i < sz; ++i) {
    for (int j = 0; j < sz; ++j) {
      std::array<uint8_t, 6> e{};
      int total = 0;
      for (int v = 0; v < nvars; ++v) {
        e[v] = static_cast<uint8_t>(sp.expo[i][v] + sp.expo[j][v]);
        total += e[v];
      }
      if (total <= degree) sp.prod[static_cast<size_t>(i) * sz + j] = sp.index_of(e);
    }
  }
  sp.deriv.assign(sz, {});
  for (int i = 0; i < sz; ++i) {
    for (int v = 0; v < nvars; ++v) {
      if (sp.expo[i][v] == 0) {
        sp.deriv[i][v] = -1;
      } else {
        std::array<uint8_t, 6> e = sp.expo[i];
        --e[v];
        sp.deriv[i][v] = sp.index_of(e);
      }
    }
  }
  auto [it2, ok] = g_spaces.emplace(std::make_pair(nvars, degree), std::move(sp));
  return &it2->second;
}

TaylorScalar TaylorScalar::variable(const JetSpace* sp, int var, double center) {
  TaylorScalar t(sp);
  t.c_[0] = center;
  std::array<uint8_t, 6> e{};
  e[var] = 1;
  t.c_[sp->index_of(e)] = 1.0;
  return t;
}

TaylorScalar& TaylorScalar::operator+=(const TaylorScalar& o) {
  if (!sp_) {
    *this = o;
    return *this;
  }
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

TaylorScalar& TaylorScalar::operator-=(const TaylorScalar& o) {
  if (!sp_) {
    *this = -o;
    return *this;
  }
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

TaylorScalar& TaylorScalar::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

TaylorScalar TaylorScalar::operator-() const {
  TaylorScalar t = *this;
  for (double& x : t.c_) x = -x;
  return t;
}

TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b) {
  const JetSpace* sp = a.sp_ ? a.sp_ : b.sp_;
  TaylorScalar out(sp);
  if (!a.sp_ || !b.sp_) return out;
  const int sz = sp->size();
  for (int i = 0; i < sz; ++i) {
    double ai = a.c_[i];
    if (ai == 0.0) continue;
    const int32_t* row = &sp->prod[static_cast<size_t>(i) * sz];
    for (int j = 0; j < sz; ++j) {
      double bj = b.c_[j];
      if (bj == 0.0) continue;
      int32_t k = row[j];
      if (k >= 0) out.c_[k] += ai * bj;
    }
  }
  return out;
}

TaylorScalar TaylorScalar::drv(int var) const {
  TaylorScalar out(sp_);
  const int sz = sp_->size();
  for (int i = 0; i < sz; ++i) {
    double ci = c_[i];
    if (ci == 0.0) continue;
    int tgt = sp_->deriv[i][var];
    if (tgt >= 0) out.c_[tgt] += ci * sp_->expo[i][var];
  }
  return out;
}

TaylorScalar TaylorScalar::expx() const {
  double c0 = value();
  TaylorScalar u = *this;
  u.c_[0] = 0.0;
  TaylorScalar acc = TaylorScalar::constant(sp_, 1.0);
  TaylorScalar pow = TaylorScalar::constant(sp_, 1.0);
  double fact = 1.0;
  for (int k = 1; k <= sp_->degree; ++k) {
    pow = pow * u;
    fact *= k;
    TaylorScalar t = pow;
    t *= 1.0 / fact;
    acc += t;
  }
  acc *= std::exp(c0);
  return acc;
}

TaylorScalar TaylorScalar::exp2() const {
  TaylorScalar t = *this;
  t *= 2.0;
  return t.expx();
}

TaylorScalar TaylorScalar::reciprocal() const {
  double c0 = value();
  if (c0 == 0.0) throw std::runtime_error("reciprocal of a jet with zero constant term");
  TaylorScalar u = *this;
  u *= 1.0 / c0;
  u.c_[0] = 0.0;
  // 1/(1+u) = sum (-u)^k
  TaylorScalar acc = TaylorScalar::constant(sp_, 1.0);
  TaylorScalar pow = TaylorScalar::constant(sp_, 1.0);
  for (int k = 1; k <= sp_->degree; ++k) {
    pow = pow * u;
    TaylorScalar t = pow;
    t *= (k % 2 == 0) ? 1.0 : -1.0;
    acc += t;
  }
  acc *= 1.0 / c0;
  return acc;
}

}  // namespace invar
