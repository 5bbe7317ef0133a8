#include "invar/canonical.hpp"
#include "invar/evaluate.hpp"
#include "invar/georules.hpp"
#include "invar/parser.hpp"
#include "invar/serialize.hpp"
#include "invar/solver.hpp"
#include "invar/torus.hpp"
#include "invar/variation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

using namespace invar;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitVerification = 4;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string out_directory(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("INVAR_OUT_DIR")) return env;
  return ".";
}

// One report document per run, named by the content hash of its config.
std::string write_report(const std::string& dir, const std::string& command,
                         const json& config, const json& results) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["type"] = "run_report";
  doc["command"] = command;
  doc["config"] = config;
  doc["results"] = results;
  std::string body = doc.dump(2);
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(command + config.dump())));
  std::filesystem::create_directories(dir);
  std::string path = dir + "/" + command + "-" + hash + ".json";
  std::ofstream out(path);
  out << body << "\n";
  return path;
}

double sphere_volume(int n) {
  // Vol(S^n) = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
  return 2.0 * std::pow(std::numbers::pi, (n + 1) / 2.0) / std::tgamma((n + 1) / 2.0);
}

double gauss_bonnet_constant(int n, int chi) {
  // 2^n pi^{n/2} (n/2 - 1)! / (2 (n-1)!) * chi
  double num = std::pow(2.0, n) * std::pow(std::numbers::pi, n / 2.0) *
               std::tgamma(n / 2.0);
  double den = 2.0 * std::tgamma(static_cast<double>(n));
  return num / den * chi;
}

json kernel_report_json(const KernelReport& rep) {
  json j;
  j["n"] = rep.basis.n;
  j["b_min"] = rep.basis.B_min;
  json basis = json::array();
  for (const auto& e : rep.basis.entries) {
    json je;
    je["A"] = e.A;
    je["B"] = e.B;
    je["term"] = print(e.c);
    basis.push_back(je);
  }
  j["basis"] = basis;
  j["basis_notes"] = rep.basis.notes;
  j["sample_seeds"] = rep.sample_seeds;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json row = json::array();
    for (double v : r) row.push_back(fmt_double(v));
    rows.push_back(row);
  }
  j["rows"] = rows;
  json sv = json::array();
  for (double v : rep.singular_values) sv.push_back(fmt_double(v));
  j["singular_values"] = sv;
  j["kernel_dim"] = rep.kernel_dim;
  json kernel = json::array();
  for (const auto& kv : rep.kernel) {
    json vec = json::array();
    for (const auto& r : kv) vec.push_back(rational_to_string(r));
    kernel.push_back(vec);
  }
  j["kernel"] = kernel;
  j["rationalization_ok"] = rep.rationalization_ok;
  json res = json::array();
  for (double v : rep.verify_residuals) res.push_back(fmt_double(v));
  j["verify_residuals"] = res;
  json disc = json::array();
  for (double v : rep.discrimination) disc.push_back(fmt_double(v));
  j["discrimination"] = disc;
  j["notes"] = rep.notes;
  return j;
}

json solver_config_json(const SolverConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["grid"] = cfg.grid;
  j["trig_degree"] = cfg.trig_degree;
  j["modes_per_component"] = cfg.modes_per_component;
  j["metric_amplitude"] = fmt_double(cfg.metric_amplitude);
  j["phi_amplitude"] = fmt_double(cfg.phi_amplitude);
  j["samples"] = cfg.samples;
  j["svd_rel_tol"] = fmt_double(cfg.svd_rel_tol);
  j["verify_tol"] = fmt_double(cfg.verify_tol);
  j["max_denominator"] = cfg.max_denominator;
  j["verify_samples"] = cfg.verify_samples;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invar: a workbench for local Riemannian invariants and their "
               "conformal variation"};
  app.require_subcommand(1);

  int n = 4;
  uint64_t seed = 1;
  double tol = 1e-6;
  int grid = 0;
  int trials = 0;
  int b_min = 1;
  std::string out_dir_flag;
  app.add_option("--n", n, "dimension (even)")->capture_default_str();
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--tol", tol, "tolerance")->capture_default_str();
  app.add_option("--grid", grid, "grid points per axis (0: default)");
  app.add_option("--trials", trials, "sample count (0: default)");
  app.add_option("--b-min", b_min, "minimum Schouten factor count")
      ->capture_default_str();
  app.add_option("--out", out_dir_flag, "report directory (default $INVAR_OUT_DIR or .)");

  std::string expr;
  int order = 1;
  std::string topology = "torus";

  CLI::App* canon = app.add_subcommand("canon", "canonicalize an expression");
  canon->add_option("expr", expr, "contraction expression")->required();

  CLI::App* vary = app.add_subcommand("vary", "conformal variation I^Z");
  vary->add_option("expr", expr, "contraction expression")->required();
  vary->add_option("--order", order, "phi-degree Z")->required();

  CLI::App* kernel = app.add_subcommand("kernel", "conformal-invariance kernel");
  CLI::App* rec = app.add_subcommand("reconstruct", "reconstruct the bar-Pfaffian");
  CLI::App* gb = app.add_subcommand("check-gb", "Gauss-Bonnet verification");
  gb->add_option("--topology", topology, "torus or sphere")->capture_default_str();

  for (CLI::App* sub : {canon, vary, kernel, rec, gb}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string dir = out_directory(out_dir_flag);

  try {
    if (canon->parsed()) {
      LinearCombination lc;
      try {
        lc = parse(expr);
      } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
      }
      auto rep = validate(lc);
      if (!rep.ok) {
        std::cerr << "validation error: " << rep.issues.front() << "\n";
        return kExitValidation;
      }
      LinearCombination red = reduce(lc, n);
      std::string text = print(red);
      json cfg{{"n", n}, {"expr", expr}};
      json results{{"canonical", text}};
      write_report(dir, "canon", cfg, results);
      std::cout << text << "\n";
      return kExitOk;
    }

    if (vary->parsed()) {
      LinearCombination lc;
      try {
        lc = parse(expr);
      } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
      }
      LinearCombination red = reduce(lc, n);
      for (const auto& t : red.terms) {
        if (weight(t) != -n) {
          std::cerr << "validation error: term of weight " << weight(t)
                    << ", expected -" << n << "\n";
          return kExitValidation;
        }
      }
      VariationResult vr = conformal_image(red, n, order);
      LinearCombination iz;
      if (vr.by_order.count(order)) iz = vr.by_order.at(order);
      std::string text = print(iz);
      json cfg{{"n", n}, {"expr", expr}, {"order", order}};
      json results{{"image", text}};
      write_report(dir, "vary", cfg, results);
      std::cout << text << "\n";
      return kExitOk;
    }

    if (kernel->parsed() || rec->parsed()) {
      SolverConfig cfg = default_config_for(n);
      cfg.seed = seed;
      if (grid > 0) cfg.grid = grid;
      if (trials > 0) cfg.samples = trials;
      cfg.verify_tol = tol;
      json jcfg = solver_config_json(cfg);
      jcfg["n"] = n;
      jcfg["b_min"] = b_min;
      if (kernel->parsed()) {
        InvariantBasis basis = enumerate_basis(n, b_min);
        KernelReport krep = invariance_kernel(basis, cfg);
        json results = kernel_report_json(krep);
        std::string path = write_report(dir, "kernel", jcfg, results);
        std::cout << "basis size " << basis.entries.size() << ", kernel dimension "
                  << krep.kernel_dim << "\n";
        for (const auto& kv : krep.kernel) {
          std::cout << "kernel vector:";
          for (const auto& r : kv) std::cout << " " << rational_to_string(r);
          std::cout << "\n";
        }
        std::cout << "report: " << path << "\n";
        bool verified = krep.rationalization_ok;
        for (double r : krep.verify_residuals) verified &= r < cfg.verify_tol;
        return verified ? kExitOk : kExitVerification;
      }
      Reconstruction r = reconstruct(n, cfg);
      json results = kernel_report_json(r.report);
      results["ok"] = r.ok;
      results["message"] = r.message;
      if (r.ok) {
        results["constant_C"] = rational_to_string(r.C);
        results["reconstruction"] = print(r.lc);
        json coeffs = json::array();
        for (const auto& t : r.lc.terms) {
          Contraction unit = t;
          unit.coeff = 1;
          coeffs.push_back(json{{"coeff", rational_to_string(t.coeff)},
                                {"term", print(unit)}});
        }
        results["coefficients"] = coeffs;
      }
      std::string path = write_report(dir, "reconstruct", jcfg, results);
      std::cout << r.message << "\n";
      if (r.ok) {
        std::cout << "C = " << rational_to_string(r.C) << "\n" << print(r.lc) << "\n";
      }
      std::cout << "report: " << path << "\n";
      return r.ok ? kExitOk : kExitVerification;
    }

    if (gb->parsed()) {
      json cfg{{"n", n}, {"seed", seed}, {"topology", topology}, {"tol", fmt_double(tol)}};
      if (topology == "sphere") {
        LinearCombination pf = pfaffian(n);
        Rational pointwise = constant_curvature_value(pf, n, 1);
        double lhs = to_double(pointwise) * sphere_volume(n);
        double rhs = gauss_bonnet_constant(n, 2);
        double rel = std::fabs(lhs - rhs) / std::fabs(rhs);
        json results{{"pointwise", rational_to_string(pointwise)},
                     {"volume", fmt_double(sphere_volume(n))},
                     {"integral", fmt_double(lhs)},
                     {"formula_constant", fmt_double(rhs)},
                     {"relative_error", fmt_double(rel)}};
        std::string path = write_report(dir, "check-gb", cfg, results);
        std::cout << "pointwise Pfaffian " << rational_to_string(pointwise)
                  << ", integral " << fmt_double(lhs) << ", constant " << fmt_double(rhs)
                  << ", relative error " << fmt_double(rel) << "\n"
                  << "report: " << path << "\n";
        return rel < 1e-10 ? kExitOk : kExitVerification;
      }
      int g = grid > 0 ? grid : (n >= 6 ? 9 : 24);
      cfg["grid"] = g;
      TrigMetric metric = make_trig_metric(n, n >= 6 ? 1 : 2, 3, 0.05, seed);
      LinearCombination pf = pfaffian(n);
      double integral = torus_integral(pf, metric, g);
      double scale = torus_integral_scale(pf, metric, g);
      double rel = std::fabs(integral) / std::max(scale, 1e-300);
      json results{{"integral", fmt_double(integral)},
                   {"integrand_scale", fmt_double(scale)},
                   {"relative", fmt_double(rel)}};
      std::string path = write_report(dir, "check-gb", cfg, results);
      std::cout << "Pfaffian integral " << fmt_double(integral) << " against scale "
                << fmt_double(scale) << " (relative " << fmt_double(rel) << ")\n"
                << "report: " << path << "\n";
      return rel < tol ? kExitOk : kExitVerification;
    }
  } catch (const BudgetError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitOk;
}
