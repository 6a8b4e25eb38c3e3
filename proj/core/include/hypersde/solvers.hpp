#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypersde/algebra.hpp"
#include "hypersde/expr.hpp"
#include "hypersde/paths.hpp"

namespace hypersde {

using ScalarFn = std::function<double(double t, std::span<const double> x)>;

/// dX_i = drift_i(t, X) dt + sum_k diffusion_ik(t, X) dW_k, i < n, k < m.
struct SdeSystemSpec {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<ScalarFn> drift;
  // Row-major n x m.
  std::vector<ScalarFn> diffusion;
  // Symbolic forms when the system was generated from expressions; empty
  // otherwise.
  std::vector<expr::Expr> drift_expr;
  std::vector<expr::Expr> diffusion_expr;
  std::string provenance;

  const ScalarFn& b(std::size_t i, std::size_t k) const { return diffusion[i * m + k]; }
};

/// Builds the callables from expressions (variables t, x1..xn).
SdeSystemSpec system_from_exprs(std::size_t n, std::size_t m, std::vector<expr::Expr> drift,
                                std::vector<expr::Expr> diffusion, std::string provenance = {});

/// Hypercomplex state sequence Z(t_k) on a grid.
struct HPath {
  std::string algebra;
  std::vector<double> times;
  std::vector<HValue> states;

  RealPath to_real() const;
};

void write_hpath_csv(std::ostream& os, const HPath& path);

/// dZ = (f1 + f2 Z) dt + (g1 + g2 Z) dW with coefficient components given as
/// expressions in t; each vector has dim entries.
struct LinearBaseCoeffs {
  std::vector<expr::Expr> f1, f2, g1, g2;
};

/// dZ = (b Z - a Z^2) dt + G Z dW with constant a, b, G.
struct LvCoeffs {
  HValue a, b, G;
  HValue Z0;
};

/// Components of the C_p linear system; f_k = f_k1 + f_k2 i, g likewise.
struct CpLinearCoeffs {
  expr::Expr f11, f12, f21, f22, g11, g12, g21, g22;
};

struct CpLvCoeffs {
  double a1 = 0, a2 = 0, b1 = 0, b2 = 0, G1 = 0, G2 = 0;
};

/// How the Ito correction in the exponent is formed. With W = sum W_k e_k the
/// quadratic variation is dW dW = sigma dt, sigma = sum_k e_k e_k, which gives
/// -1/2 g2^2 sigma and -g1 g2 sigma. `unit` uses sigma = eps instead, which is
/// only exact for algebras where sum_k e_k e_k happens to equal eps.
enum class ItoCorrection { quadratic_variation, unit };

struct SolverOptions {
  ItoCorrection correction = ItoCorrection::quadratic_variation;
  // Rule for the ds integrals; stochastic integrals are always left-point.
  Quadrature quadrature = Quadrature::trapezoid;
  // Zero-divisor threshold; negative selects default_singular_tolerance.
  double singular_tol = -1.0;
};

LinearBaseCoeffs to_base(const CpLinearCoeffs& c);
LvCoeffs to_base(const Algebra& cp, const CpLvCoeffs& c, std::pair<double, double> x0);

/// Z(t) = E(t){Z0 + int E^-1 (f1 - g1 g2 sigma) ds + int E^-1 g1 dW},
/// E(t) = exp{int (f2 - 1/2 g2^2 sigma) ds + int g2 dW}. Needs grid.m == dim.
HPath solve_linear_base(const Algebra& alg, const LinearBaseCoeffs& coeffs, const HValue& Z0,
                        const WienerGrid& grid, const SolverOptions& opts = {});

/// Real-arithmetic projection of the same solution on C_p. With
/// A(t) = int (f21 - s/2 (g21^2 + p g22^2)) ds + int g21 dW1 + p int g22 dW2,
/// B(t) = int (f22 - s g21 g22) ds + int g22 dW1 + int g21 dW2 and s = 1 + p
/// (s = 1 for ItoCorrection::unit), the two-time kernels a(t,s) = A(t) - A(s)
/// are split through the cos_p/sin_p addition formulas so that every integral
/// is a single cumulative sum.
RealPath solve_linear_cp(double p, const CpLinearCoeffs& coeffs, std::pair<double, double> x0,
                         const WienerGrid& grid, const SolverOptions& opts = {});

/// Z(t) = exp(L(t)) [1/Z0 + a int exp(L(s)) ds]^-1, L = (b - 1/2 G^2 sigma) t + G W.
/// Throws SingularElement at the first t_k where the bracket is a zero divisor.
HPath solve_lv_base(const Algebra& alg, const LvCoeffs& coeffs, const WienerGrid& grid,
                    const SolverOptions& opts = {});

/// X1 = e^alpha (gamma cos_p beta - p delta sin_p beta) / (gamma^2 - p delta^2),
/// X2 = e^alpha (gamma sin_p beta - delta cos_p beta) / (gamma^2 - p delta^2).
RealPath solve_lv_cp(double p, const CpLvCoeffs& coeffs, std::pair<double, double> x0, const WienerGrid& grid,
                     const SolverOptions& opts = {});

/// Phi(t) = e^{int f21} [[cos_p F, p sin_p F], [sin_p F, cos_p F]], F = int f22,
/// integrals by adaptive Gauss-Kronrod. Row-major.
std::array<double, 4> fundamental_matrix_cp(double p, const expr::Expr& f21, const expr::Expr& f22, double t);

/// Adaptive Gauss-Kronrod integral of f over [a, b]; relative tolerance 1e-14
/// with an absolute floor of 1e-15 |b - a|.
double integrate(const std::function<double(double)>& f, double a, double b);

/// drift_i = f1_i + sum_kl gamma_kli f2_k X_l;
/// diffusion_il = sum_k gamma_kli g1_k + sum_kp (sum_m gamma_kpm gamma_mli) g2_k X_p.
SdeSystemSpec expand_linear_system(const Algebra& alg, const LinearBaseCoeffs& coeffs);

/// dZ = a dt + b dW with W = sum_{k<m} W_k e_k: drift_i = a_i,
/// diffusion_ik = sum_j gamma_jki b_j. `a` and `b` carry dim components.
SdeSystemSpec expand_general_system(const Algebra& alg, const std::vector<expr::Expr>& a,
                                    const std::vector<expr::Expr>& b, std::size_t m);

/// drift_i = sum_jk gamma_kji b_k X_j - sum_rj (sum_ks gamma_rjk gamma_ski a_s) X_r X_j;
/// diffusion_ir = sum_j (sum_sk gamma_sjk gamma_kri G_s) X_j.
SdeSystemSpec expand_lv_system(const Algebra& alg, const LvCoeffs& coeffs);

}  // namespace hypersde
