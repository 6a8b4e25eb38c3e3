#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypersde/expr.hpp"
#include "hypersde/solvers.hpp"

namespace hypersde {

enum class Verdict { reducible, not_reducible, undecided };
std::string to_string(Verdict v);

struct ConditionResult {
  std::string name;
  double max_residual = 0.0;
  std::vector<double> witness;
  bool pass = true;
};

struct ReducibilityReport {
  Verdict verdict = Verdict::undecided;
  double tolerance = 0.0;
  // Quadratic-variation factor used in N.
  double sigma = 1.0;
  std::size_t evaluated = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  std::vector<ConditionResult> conditions;

  // C_p systems only.
  std::optional<double> p;
  bool hypercomplexifiable = true;
  std::string branch;
  bool drift_state_dependent = false;
  // Largest |derived - printed| over the samples for the literal split of N
  // into N1, N2; diagnostic only.
  double printed_split_discrepancy = 0.0;
  std::vector<std::string> notes;
};

/// N = g { g_t / g^2 - d/dZ (f/g) + sigma/2 g_ZZ } for dZ = f dt + g dW with
/// dW dW = sigma dt. Expressions use t and x1 (= Z). Throws DomainError where
/// g vanishes.
double gard_N(const expr::Expr& f, const expr::Expr& g, double t, double Z, double sigma = 1.0);
/// dN/dZ at (t, Z).
double gard_dN_dZ(const expr::Expr& f, const expr::Expr& g, double t, double Z, double sigma = 1.0);

/// Reducible iff max |dN/dZ| <= tol over the (t, Z) samples. Points that fail
/// to evaluate are counted; more than 20% failures gives `undecided`.
ReducibilityReport check_reducible_scalar(const expr::Expr& f, const expr::Expr& g,
                                          const std::vector<std::pair<double, double>>& samples, double tol = 1e-7,
                                          double sigma = 1.0);

/// Y = h(t, Z) turns the equation into dY = drift(t) dt + diffusion(t) dW with
/// diffusion = exp(int_0^t N ds), dh/dZ = diffusion/g and
/// drift = h_t + f h_Z + sigma/2 g^2 h_ZZ.
struct ReductionResult {
  expr::Expr f, g;
  double sigma = 1.0;
  double anchor = 0.0;
  std::vector<double> times;
  std::vector<double> states;
  std::vector<double> diffusion;
  std::vector<double> drift;
  // h[it * states.size() + iz]
  std::vector<double> h;
};

/// Throws ConsistencyError if N or the drift varies in Z beyond tol.
ReductionResult construct_reduction(const expr::Expr& f, const expr::Expr& g, const std::vector<double>& times,
                                    const std::vector<double>& states, double anchor, double tol = 1e-7,
                                    double sigma = 1.0);

/// exp(int_0^t N(s, anchor) ds).
double reduction_diffusion(const ReductionResult& r, double t);
/// h(t, Z) = int_anchor^Z diffusion(t) / g(t, z) dz.
double reduction_map(const ReductionResult& r, double t, double Z);

/// The two components of N for Z = X + iY in C_p, computed in C_p arithmetic
/// on Taylor jets with d/dZ realised as d/dX. Expressions use t, x1 (= X) and
/// x2 (= Y). sigma is the real factor of dW dW = sigma eps dt.
std::pair<double, double> compute_N1N2_cp(double p, const expr::Expr& f1, const expr::Expr& f2, const expr::Expr& g1,
                                          const expr::Expr& g2, double t, double X, double Y, double sigma = 1.0);

/// The N1, N2 split exactly as printed, kept for comparison.
std::pair<double, double> printed_N1N2_cp(double p, const expr::Expr& f1, const expr::Expr& f2, const expr::Expr& g1,
                                          const expr::Expr& g2, double t, double X, double Y);

struct CpCheckOptions {
  double tol = 1e-7;
  // Points with |g1^2 - p g2^2| below this are skipped.
  double zero_divisor_gap = 1e-8;
  ItoCorrection correction = ItoCorrection::quadratic_variation;
};

/// Scheffers conditions on f and g, then dN1/dX = dN2/dX = 0, plus dN1/dY = 0
/// when p = 0. Samples are (t, X, Y).
ReducibilityReport check_cp_system(double p, const expr::Expr& f1, const expr::Expr& f2, const expr::Expr& g1,
                                   const expr::Expr& g2, const std::vector<std::array<double, 3>>& samples,
                                   const CpCheckOptions& opts = {});

/// n points per axis, inclusive of both ends.
std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<std::pair<double, double>> grid2(const std::vector<double>& ts, const std::vector<double>& zs);
std::vector<std::array<double, 3>> grid3(const std::vector<double>& ts, const std::vector<double>& xs,
                                         const std::vector<double>& ys);

nlohmann::json to_json(const ReducibilityReport& r);
nlohmann::json to_json(const ReductionResult& r);

}  // namespace hypersde
