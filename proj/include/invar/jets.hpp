#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace invar {

// Truncated multivariate Taylor arithmetic around a point. Partial
// derivatives of jet data are exact; truncation only limits the order that
// can be extracted, never its accuracy.
struct JetSpace {
  int nvars = 0;
  int degree = 0;
  std::vector<std::array<uint8_t, 6>> expo;  // graded-lex monomial exponents
  std::vector<int32_t> lookup;               // mixed-radix exponent -> index
  std::vector<int32_t> prod;                 // [i * size + j] -> index or -1
  std::vector<std::array<int32_t, 6>> deriv; // [i][var] -> index of expo - e_var

  int size() const { return static_cast<int>(expo.size()); }
  int index_of(const std::array<uint8_t, 6>& e) const;

  static const JetSpace* get(int nvars, int degree);
};

class TaylorScalar {
 public:
  TaylorScalar() = default;
  explicit TaylorScalar(const JetSpace* sp) : sp_(sp), c_(sp->size(), 0.0) {}
  static TaylorScalar constant(const JetSpace* sp, double v) {
    TaylorScalar t(sp);
    t.c_[0] = v;
    return t;
  }
  static TaylorScalar variable(const JetSpace* sp, int var, double center = 0.0);

  const JetSpace* space() const { return sp_; }
  double value() const { return c_.empty() ? 0.0 : c_[0]; }
  double& coef(int i) { return c_[i]; }
  double coef(int i) const { return c_[i]; }

  TaylorScalar& operator+=(const TaylorScalar& o);
  TaylorScalar& operator-=(const TaylorScalar& o);
  TaylorScalar& operator*=(double s);
  friend TaylorScalar operator+(TaylorScalar a, const TaylorScalar& b) { return a += b; }
  friend TaylorScalar operator-(TaylorScalar a, const TaylorScalar& b) { return a -= b; }
  friend TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b);
  friend TaylorScalar operator*(double s, TaylorScalar a) { return a *= s; }
  TaylorScalar operator-() const;

  TaylorScalar drv(int var) const;  // exact partial derivative (one order lost)
  TaylorScalar exp2() const;        // e^{2 * this}
  TaylorScalar expx() const;        // e^{this}
  TaylorScalar reciprocal() const;  // needs nonzero constant term

 private:
  const JetSpace* sp_ = nullptr;
  std::vector<double> c_;
};

// Deterministic splitmix64 stream; identical seeds give bit-identical data.
struct Rng {
  uint64_t state;
  explicit Rng(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double sym() { return 2.0 * uniform() - 1.0; }
};

}  // namespace invar
