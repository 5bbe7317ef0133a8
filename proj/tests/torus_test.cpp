#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "invar/georules.hpp"
#include "invar/parser.hpp"
#include "invar/torus.hpp"

#include <chrono>
#include <cmath>

using namespace invar;

TEST_CASE("flat torus: curvature integrals vanish identically") {
  TrigMetric flat = flat_torus_metric(4);
  CHECK(torus_integral(pfaffian(4), flat, 6) == 0.0);
  CHECK(torus_integral(parse("R[i,j,k,l]*R[i,j,k,l]"), flat, 6) == 0.0);
  // volume normalization: integral of the metric trace g^a_a = n
  CHECK(std::fabs(torus_integral(parse("g[a,b]*gi[a,b]"), flat, 6) - 4.0) < 1e-14);
}

TEST_CASE("perturbed torus: |R|^2 integral is strictly positive") {
  TrigMetric g = make_trig_metric(4, 2, 3, 0.05, 31);
  double v = torus_integral(parse("R[i,j,k,l]*R[i,j,k,l]"), g, 12);
  CHECK(v > 1e-6);
}

TEST_CASE("quadrature converges spectrally") {
  TrigMetric g = make_trig_metric(4, 2, 3, 0.05, 32);
  LinearCombination rr = parse("R[i,j,k,l]*R[i,j,k,l]");
  double a = torus_integral(rr, g, 12);
  double b = torus_integral(rr, g, 16);
  double c = torus_integral(rr, g, 20);
  CHECK(std::fabs(b - c) < 1e-7 * std::max(1.0, std::fabs(c)));
  CHECK(std::fabs(a - c) < 1e-4 * std::max(1.0, std::fabs(c)));
  // the monitor passes a fine grid and flags a coarse one
  ConvergenceCheck fine = torus_integral_checked(rr, g, 20, 1e-3);
  CHECK(fine.converged);
  ConvergenceCheck coarse = torus_integral_checked(rr, g, 6, 1e-10);
  CHECK_FALSE(coarse.converged);
}

TEST_CASE("Gauss-Bonnet on T^4: Pfaffian integrates to zero") {
  TrigMetric g = make_trig_metric(4, 2, 3, 0.05, 33);
  LinearCombination p4 = pfaffian(4);
  double integral = torus_integral(p4, g, 16);
  double scale = torus_integral_scale(p4, g, 16);
  CHECK(scale > 1e-9);
  CHECK(std::fabs(integral) < 1e-6 * std::max(scale, 1e-12));
}

TEST_CASE("conformal invariance residuals discriminate") {
  TrigMetric g = make_trig_metric(4, 2, 3, 0.05, 34);
  TrigField phi = make_trig_phi(4, 2, 3, 0.05, 35);
  // Pfaffian: integral is topological
  double r1 = conformal_invariance_residual(pfaffian(4), g, phi, 16);
  CHECK(r1 < 1e-6);
  // |W|^2 in n=4: pointwise covariant of weight -4, also invariant
  double r2 = conformal_invariance_residual(parse("W[i,j,k,l]*W[i,j,k,l]"), g, phi, 16);
  CHECK(r2 < 1e-6);
  // |R|^2: not conformally invariant
  double r3 =
      conformal_invariance_residual(parse("R[i,j,k,l]*R[i,j,k,l]"), g, phi, 16);
  CHECK(r3 > 1e-3);
}

TEST_CASE("grid evaluator refuses unsupported factors") {
  TrigMetric g = make_trig_metric(4, 1, 2, 0.05, 36);
  CHECK_THROWS(torus_integral(parse("D[a,a](Scal)"), g, 6));
}

TEST_CASE("grid timing stays within the acceptance budget") {
  TrigMetric g = make_trig_metric(4, 2, 3, 0.05, 37);
  LinearCombination p4 = pfaffian(4);
  auto t0 = std::chrono::steady_clock::now();
  torus_integral(p4, g, 16);
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("grid-16 pfaffian integral took ", dt, " s");
  CHECK(dt < 60.0);
}
