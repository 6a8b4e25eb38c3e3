#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "hypersde/algebra.hpp"
#include "hypersde/expr.hpp"

namespace hypersde {

/// cos_p(y) = sum_{k>=0} p^k y^(2k)/(2k)!, sin_p(y) = sum_{k>=0} p^k y^(2k+1)/(2k+1)!.
/// Closed forms: circular for p < 0, affine for p = 0, hyperbolic for p > 0.
std::pair<double, double> cosp_sinp(double p, double y);
/// The same pair summed term by term.
std::pair<double, double> cosp_sinp_series(double p, double y, std::size_t max_terms = 400);

struct SeriesOptions {
  double tol = 1e-17;
  std::size_t max_terms = 400;
};

/// Closed forms on R, C_p and A3_4; the series otherwise.
HValue hc_exp(const Algebra& alg, const HValue& z, const SeriesOptions& opts = {});
/// sum z^k/k! with scaling and squaring for norm(z) > 1. Stops once ten
/// consecutive terms fall below tol*(1 + norm(partial sum)); throws
/// NoConvergence after max_terms.
HValue hc_exp_series(const Algebra& alg, const HValue& z, const SeriesOptions& opts = {});

/// Principal logarithm. C_p domains: p < 0 any nonzero z; p = 0 needs x1 > 0;
/// p > 0 needs x1 > sqrt(p)|x2|. A3_4 needs t > 0. Other algebras use Newton
/// iteration w <- w + z exp(-w) - eps seeded with ln(c) eps, c being the
/// eps-component of z.
HValue hc_ln(const Algebra& alg, const HValue& z);
HValue hc_ln_newton(const Algebra& alg, const HValue& z, std::size_t max_iter = 100);

/// exp(m ln z).
HValue hc_pow(const Algebra& alg, const HValue& z, double m);

/// (cos z, sin z) on A3_4 from the explicit component formulas.
std::pair<HValue, HValue> hc_cos_sin_a34(const Algebra& alg, const HValue& z);
/// (cos z, sin z) by their power series in any algebra.
std::pair<HValue, HValue> hc_cos_sin_series(const Algebra& alg, const HValue& z, const SeriesOptions& opts = {});

struct ScheffersReport {
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::vector<double> worst_point;
  // 1-based (i, k) of the worst residual df_i/dx_k - sum eps_l gamma_jki df_j/dx_l.
  std::pair<std::size_t, std::size_t> worst_indices{0, 0};
  std::size_t samples = 0;
  bool pass = true;
};

/// Checks the generalised Cauchy-Riemann system on sample points (each of
/// length dim, holding x_1..x_n). `t` is bound to `time`. Throws
/// EvaluationError naming the sample on failure to evaluate.
ScheffersReport scheffers_check(const Algebra& alg, std::span<const expr::Expr> components,
                                std::span<const std::vector<double>> samples, double tol = 1e-10,
                                double time = 0.0);

/// Maximum residual of the same system given the n x n Jacobian J[i][k] =
/// df_i/dx_k (row-major). Returns (residual, i, k) with 0-based indices.
struct ScheffersResidual {
  double value;
  std::size_t i;
  std::size_t k;
};
ScheffersResidual scheffers_residual(const Algebra& alg, std::span<const double> jacobian);

}  // namespace hypersde
