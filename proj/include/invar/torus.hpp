#pragma once

#include "invar/term.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace invar {

// Trigonometric polynomial scalar field on the unit torus [0,1)^n; partial
// derivatives are exact.
struct TrigField {
  int n = 0;
  double constant = 0.0;
  struct Mode {
    std::array<int8_t, 6> k{};
    double c_cos = 0.0;
    double c_sin = 0.0;
  };
  std::vector<Mode> modes;

  double value(const double* x) const;
  double d1(const double* x, int a) const;
  double d2(const double* x, int a, int b) const;
};

struct TrigMetric {
  int n = 0;
  int degree = 0;
  uint64_t seed = 0;
  std::vector<TrigField> comp;  // row-major n*n, symmetric

  const TrigField& at(int i, int j) const { return comp[i * n + j]; }
};

struct MetricNotPositive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Random periodic metric g = delta + perturbation with |k|_inf <= degree.
// Positive definiteness is verified on a coarse grid; generation retries
// with derived seeds until it holds.
TrigMetric make_trig_metric(int n, int degree, int modes_per_component,
                            double amplitude, uint64_t seed);
TrigMetric flat_torus_metric(int n);
TrigField make_trig_phi(int n, int degree, int modes, double amplitude, uint64_t seed);

// Uniform-grid quadrature of eval(lc) dV over the torus; spectrally accurate
// for trigonometric data. The grid evaluator supports underived curvature
// factors and phi factors of order <= 2.
double torus_integral(const LinearCombination& lc, const TrigMetric& g, int grid);

// Batched variant: tensors are assembled once per grid point. When phi is
// non-null the metric used is ghat = e^{2 phi} g (direct substitution) and
// the volume element is dV_ghat.
std::vector<double> torus_integral_batch(const std::vector<LinearCombination>& lcs,
                                         const TrigMetric& g, const TrigField* phi,
                                         int grid);

struct ConvergenceCheck {
  double value = 0.0;
  double coarse_value = 0.0;  // at grid/2
  bool converged = false;
};
ConvergenceCheck torus_integral_checked(const LinearCombination& lc, const TrigMetric& g,
                                        int grid, double tol);

// |int P(ghat) dV_ghat - int P(g) dV_g| / max(1, |int P(g) dV_g|), computed
// by direct metric substitution -- the oracle independent of the variation
// engine.
double conformal_invariance_residual(const LinearCombination& P, const TrigMetric& g,
                                     const TrigField& phi, int grid);

// Scale of the integrand: int |eval(P)| dV, for relative zero tests.
double torus_integral_scale(const LinearCombination& P, const TrigMetric& g, int grid);

}  // namespace invar
