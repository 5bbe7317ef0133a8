#include "invar/solver.hpp"

#include "invar/canonical.hpp"
#include "invar/evaluate.hpp"
#include "invar/georules.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace invar {

namespace {

unsigned long long double_factorial(int k) {
  unsigned long long r = 1;
  for (int v = k; v > 1; v -= 2) r *= v;
  return r;
}

// exact row space over canonical keys, for quotienting by relations
struct RationalRowSpace {
  std::map<CanonicalKey, int> col;
  std::map<int, std::map<int, Rational>> pivots;

  int col_of(const Contraction& t) {
    Contraction unit = t;
    unit.coeff = 1;
    CanonicalKey k = canonical_form(unit).key;
    auto it = col.find(k);
    if (it != col.end()) return it->second;
    int id = static_cast<int>(col.size());
    col.emplace(std::move(k), id);
    return id;
  }

  std::map<int, Rational> to_vec(const LinearCombination& lc) {
    std::map<int, Rational> row;
    for (const auto& t : lc.terms) row[col_of(t)] += t.coeff;
    return row;
  }

  void eliminate(std::map<int, Rational>& row) const {
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
  }

  // eliminates, then stores the remainder as a new pivot row; returns false
  // if the row was dependent
  bool insert(std::map<int, Rational> row) {
    eliminate(row);
    for (auto it = row.begin(); it != row.end();) {
      if (it->second == 0) it = row.erase(it);
      else ++it;
    }
    if (row.empty()) return false;
    Rational lead = row.begin()->second;
    int pc = row.begin()->first;
    for (auto& [c2, v2] : row) v2 /= lead;
    pivots.emplace(pc, std::move(row));
    return true;
  }
};

}  // namespace

InvariantBasis enumerate_basis(int n, int B_min) {
  if (n % 2 != 0 || n < 4) throw BudgetError("enumerate_basis requires even n >= 4", 0);
  if (n > 6) {
    // (#slots - 1)!! matchings per class, summed over classes
    unsigned long long est = 0;
    for (int B = std::max(B_min, 0); B <= n / 2; ++B) {
      int A = n / 2 - B;
      est += double_factorial(4 * A + 2 * B - 1);
    }
    throw BudgetError("enumerate_basis: n = " + std::to_string(n) +
                          " exceeds the enumeration budget (about " +
                          std::to_string(est) + " pairing patterns)",
                      est);
  }
  InvariantBasis out;
  out.n = n;
  out.B_min = B_min;

  // Relation space over the W^A P^B profiles involved (first Bianchi on the
  // Weyl factors; no derived factors appear here).
  RationalRowSpace rows;
  std::vector<std::pair<Contraction, std::pair<int, int>>> raw;
  for (int B = std::max(B_min, 0); B <= n / 2; ++B) {
    int A = n / 2 - B;
    std::vector<Factor> profile;
    for (int i = 0; i < A; ++i) profile.push_back(weyl());
    for (int i = 0; i < B; ++i) profile.push_back(schouten());
    std::vector<Contraction> universe = enumerate_profile(profile, n);
    LinearCombination probe;
    for (const auto& u : universe) probe.terms.push_back(u);
    if (!universe.empty()) {
      RelationSpace rel = relation_space_for(probe, n);
      for (const auto& g : rel.generators) rows.insert(rows.to_vec(g));
    }
    for (const auto& u : universe) raw.emplace_back(u, std::make_pair(A, B));
  }
  for (auto& [c, ab] : raw) {
    // numeric zero pruning (flags gaps the relation space cannot certify)
    LinearCombination one = as_combination(c);
    auto verdict = check_zero(one, n, 4, 1e-7, 0xbead5eed + out.entries.size());
    std::map<int, Rational> vec = rows.to_vec(one);
    bool independent_probe = true;
    {
      auto copy = vec;
      rows.eliminate(copy);
      bool zero = true;
      for (auto& [cc, vv] : copy) zero &= vv == 0;
      independent_probe = !zero;
    }
    if (verdict.zero) {
      std::ostringstream os;
      os << "dropped numerically-zero pattern " << "(A=" << ab.first << ",B=" << ab.second
         << ")";
      if (independent_probe) {
        os << " [gap: not certified by the relation space]";
      }
      out.notes.push_back(os.str());
      continue;
    }
    if (!rows.insert(vec)) {
      out.notes.push_back("dropped Bianchi-dependent pattern (A=" +
                          std::to_string(ab.first) + ",B=" + std::to_string(ab.second) +
                          ")");
      continue;
    }
    BasisEntry e;
    e.c = c;
    e.A = ab.first;
    e.B = ab.second;
    out.entries.push_back(std::move(e));
  }
  return out;
}

SolverConfig default_config_for(int n) {
  SolverConfig cfg;
  if (n >= 6) {
    // six-dimensional grids are expensive; coarser quadrature, looser
    // verification threshold (reported as measured)
    cfg.grid = 9;
    cfg.trig_degree = 1;
    cfg.modes_per_component = 2;
    cfg.metric_amplitude = 0.08;
    cfg.phi_amplitude = 0.15;
    cfg.verify_tol = 1e-4;
    cfg.verify_samples = 4;
  }
  return cfg;
}

KernelReport invariance_kernel(const InvariantBasis& basis, const SolverConfig& cfg0) {
  if (basis.entries.empty()) {
    throw std::invalid_argument("invariance_kernel: empty basis");
  }
  KernelReport rep;
  rep.basis = basis;
  SolverConfig cfg = cfg0;
  const int E = static_cast<int>(basis.entries.size());
  if (cfg.samples <= 0) cfg.samples = std::max(3 * E, 8);
  rep.config = cfg;
  const int n = basis.n;

  std::vector<LinearCombination> lcs;
  for (const auto& e : basis.entries) lcs.push_back(as_combination(e.c));

  rep.rows.assign(cfg.samples, std::vector<double>(E, 0.0));
  rep.discrimination.assign(E, 0.0);
  rep.base_integrals.assign(E, 0.0);
  for (int s = 0; s < cfg.samples; ++s) {
    uint64_t seed = cfg.seed * 1000003ULL + 17ULL * s;
    rep.sample_seeds.push_back(seed);
    TrigMetric g = make_trig_metric(n, cfg.trig_degree, cfg.modes_per_component,
                                    cfg.metric_amplitude, seed);
    TrigField phi = make_trig_phi(n, cfg.trig_degree, cfg.modes_per_component,
                                  cfg.phi_amplitude, seed ^ 0xf00dULL);
    std::vector<double> base = torus_integral_batch(lcs, g, nullptr, cfg.grid);
    std::vector<double> hat = torus_integral_batch(lcs, g, &phi, cfg.grid);
    for (int i = 0; i < E; ++i) {
      rep.rows[s][i] = hat[i] - base[i];
      if (s == 0) rep.base_integrals[i] = base[i];
      double rel = std::fabs(rep.rows[s][i]) / std::max(1.0, std::fabs(base[i]));
      rep.discrimination[i] = std::max(rep.discrimination[i], rel);
    }
  }

  Eigen::MatrixXd M(cfg.samples, E);
  for (int s = 0; s < cfg.samples; ++s) {
    for (int i = 0; i < E; ++i) M(s, i) = rep.rows[s][i];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  Eigen::VectorXd sv = svd.singularValues();
  for (int i = 0; i < sv.size(); ++i) rep.singular_values.push_back(sv(i));
  double smax = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cfg.svd_rel_tol * std::max(smax, 1e-30)) ++rank;
  }
  rep.kernel_dim = E - rank;
  {
    std::ostringstream os;
    os << "singular values:";
    for (int i = 0; i < sv.size(); ++i) os << " " << sv(i);
    if (rank > 0 && rank < sv.size()) {
      os << "; spectral gap " << sv(rank - 1) / std::max(sv(rank), 1e-300);
    }
    rep.notes.push_back(os.str());
  }

  // rationalize the kernel generators (columns rank..E-1 of V); the snap
  // tolerance tracks the measured noise floor, exact verification follows
  double noise_rel = 0.0;
  if (rank < static_cast<int>(sv.size()) && smax > 0) {
    noise_rel = sv(rank) / smax;
  }
  const double snap_tol = std::max(1e-6, 200.0 * noise_rel);
  Eigen::MatrixXd V = svd.matrixV();
  for (int kv = rank; kv < E; ++kv) {
    Eigen::VectorXd v = V.col(kv);
    int imax = 0;
    for (int i = 0; i < E; ++i) {
      if (std::fabs(v(i)) > std::fabs(v(imax))) imax = i;
    }
    if (v(imax) != 0) v /= v(imax);
    std::vector<Rational> rv(E, 0);
    bool ok = true;
    for (int i = 0; i < E; ++i) {
      auto r = rationalize(v(i), cfg.max_denominator, snap_tol);
      if (!r) {
        ok = false;
        break;
      }
      rv[i] = *r;
    }
    if (!ok) {
      rep.rationalization_ok = false;
      rep.notes.push_back("kernel vector resisted rationalization");
      continue;
    }
    // deterministic normalization: first nonzero entry becomes 1
    for (int i = 0; i < E; ++i) {
      if (rv[i] != 0) {
        Rational lead = rv[i];
        for (auto& x : rv) x /= lead;
        break;
      }
    }
    rep.kernel.push_back(std::move(rv));
  }

  // out-of-sample verification of each rationalized kernel vector
  for (const auto& kvec : rep.kernel) {
    LinearCombination combo;
    for (int i = 0; i < E; ++i) {
      if (kvec[i] == 0) continue;
      Contraction t = basis.entries[i].c;
      t.coeff = kvec[i];
      combo.terms.push_back(std::move(t));
    }
    double worst = 0.0;
    for (int s = 0; s < cfg.verify_samples; ++s) {
      uint64_t seed = cfg.seed * 7777777ULL + 131ULL * s + 5;
      TrigMetric g = make_trig_metric(n, cfg.trig_degree, cfg.modes_per_component,
                                      cfg.metric_amplitude, seed);
      TrigField phi = make_trig_phi(n, cfg.trig_degree, cfg.modes_per_component,
                                    cfg.phi_amplitude, seed ^ 0xabcdULL);
      worst = std::max(worst, conformal_invariance_residual(combo, g, phi, cfg.grid));
    }
    rep.verify_residuals.push_back(worst);
    if (worst > cfg.verify_tol) {
      rep.notes.push_back("kernel vector failed fresh-sample verification");
    }
  }
  return rep;
}

namespace {

CanonicalKey paa_power_key(int n) {
  std::vector<Factor> facs(n / 2, schouten());
  std::vector<std::vector<int>> labels;
  for (int i = 0; i < n / 2; ++i) labels.push_back({i, i});
  Contraction c = from_labels(1, facs, labels);
  return canonical_form(c).key;
}

}  // namespace

Reconstruction reconstruct(int n, const SolverConfig& cfg) {
  Reconstruction out;
  InvariantBasis basis = enumerate_basis(n, 1);
  out.report = invariance_kernel(basis, cfg);
  if (out.report.kernel_dim != 1 || out.report.kernel.size() != 1) {
    out.message = "kernel dimension is " + std::to_string(out.report.kernel_dim) +
                  ", expected 1; no reconstruction";
    return out;
  }
  const auto& kvec = out.report.kernel[0];
  const int E = static_cast<int>(basis.entries.size());

  LinearCombination gen;
  for (int i = 0; i < E; ++i) {
    if (kvec[i] == 0) continue;
    Contraction t = basis.entries[i].c;
    t.coeff = kvec[i];
    gen.terms.push_back(std::move(t));
  }
  gen = reduce(gen, n);

  LinearCombination bar = reduce(pfaffian_split(n).bar, n);
  CanonicalKey pin = paa_power_key(n);
  Rational gen_pin = 0, bar_pin = 0;
  for (const auto& t : gen.terms) {
    Contraction unit = t;
    unit.coeff = 1;
    if (canonical_form(unit).key == pin) gen_pin = t.coeff;
  }
  for (const auto& t : bar.terms) {
    Contraction unit = t;
    unit.coeff = 1;
    if (canonical_form(unit).key == pin) bar_pin = t.coeff;
  }
  if (gen_pin == 0 || bar_pin == 0) {
    out.message = "(P^a_a)^{n/2} coefficient missing from kernel or bar part";
    return out;
  }
  Rational scale = bar_pin / gen_pin;
  out.lc = reduce(scale * gen, n);
  out.C = scale;
  LinearCombination diff = reduce(out.lc - bar, n);
  if (!diff.terms.empty()) {
    out.message = "kernel generator does not match the bar-Pfaffian exactly";
    return out;
  }
  out.ok = true;
  out.message = "reconstruction equals the bar-Pfaffian part";
  return out;
}

}  // namespace invar
