#pragma once

#include "invar/term.hpp"
#include "invar/torus.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace invar {

struct BudgetError : std::runtime_error {
  unsigned long long estimated_patterns;
  BudgetError(const std::string& msg, unsigned long long est)
      : std::runtime_error(msg), estimated_patterns(est) {}
};

struct BasisEntry {
  Contraction c;  // canonical, coefficient 1
  int A = 0;      // Weyl factors
  int B = 0;      // Schouten factors
};

struct InvariantBasis {
  int n = 0;
  int B_min = 0;
  std::vector<BasisEntry> entries;
  std::vector<std::string> notes;  // dropped patterns, flagged gaps
};

// All W^A (x) P^B canonical contractions with A + B = n/2 and B >= B_min:
// exhaustively generated, canonicalized, pruned of zeros and of entries
// dependent modulo the Bianchi relation space. n in {4, 6}; anything larger
// is refused with a pattern-count estimate.
InvariantBasis enumerate_basis(int n, int B_min);

struct SolverConfig {
  uint64_t seed = 1;
  int grid = 24;
  int trig_degree = 2;
  int modes_per_component = 3;
  double metric_amplitude = 0.06;
  double phi_amplitude = 0.12;
  int samples = 0;  // 0: max(3 * basis size, 8)
  double svd_rel_tol = 1e-4;
  double verify_tol = 1e-6;
  long long max_denominator = 10000;
  int verify_samples = 10;
};

SolverConfig default_config_for(int n);

struct KernelReport {
  InvariantBasis basis;
  SolverConfig config;
  std::vector<uint64_t> sample_seeds;
  std::vector<std::vector<double>> rows;  // samples x entries
  std::vector<double> base_integrals;     // |int entry(g)| scale per entry (first sample)
  std::vector<double> singular_values;
  int kernel_dim = 0;
  std::vector<std::vector<Rational>> kernel;  // rationalized generators
  bool rationalization_ok = true;
  std::vector<double> verify_residuals;  // fresh-sample residuals per kernel vector
  std::vector<double> discrimination;    // per entry: max relative residual observed
  std::vector<std::string> notes;
};

KernelReport invariance_kernel(const InvariantBasis& basis, const SolverConfig& cfg);

struct Reconstruction {
  bool ok = false;
  LinearCombination lc;  // equals bar-Pfaffian when ok
  Rational C = 0;        // scale from the unit-normalized kernel generator
  KernelReport report;
  std::string message;
};

Reconstruction reconstruct(int n, const SolverConfig& cfg);

}  // namespace invar
