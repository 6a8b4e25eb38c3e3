#include "hypersde/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hypersde/csv.hpp"
#include "hypersde/errors.hpp"

namespace hypersde {

namespace {

void require_dim(const Algebra& alg, const HValue& z) {
  if (z.algebra() != alg.label()) throw AlgebraMismatch(alg.label(), z.algebra());
  if (z.size() != alg.dim()) throw LengthMismatch("algebra element", alg.dim(), z.size());
}

HValue eps_multiple(const Algebra& alg, double c) { return scale(one(alg), c); }

// Sums terms t_0 = eps, t_k = step(t_{k-1}, k).
template <class Step>
HValue power_series(const Algebra& alg, const SeriesOptions& opts, Step step) {
  HValue sum = one(alg);
  HValue term = one(alg);
  std::size_t small = 0;
  for (std::size_t k = 1; k < opts.max_terms; ++k) {
    term = step(term, k);
    sum = add(sum, term);
    if (norm(term) <= opts.tol * (1.0 + norm(sum))) {
      if (++small >= 10) return sum;
    } else {
      small = 0;
    }
  }
  throw NoConvergence("power series in " + alg.label() + " did not converge within " +
                      std::to_string(opts.max_terms) + " terms");
}

}  // namespace

std::pair<double, double> cosp_sinp(double p, double y) {
  if (p < 0.0) {
    const double w = std::sqrt(-p);
    return {std::cos(w * y), std::sin(w * y) / w};
  }
  if (p == 0.0) return {1.0, y};
  const double w = std::sqrt(p);
  return {std::cosh(w * y), std::sinh(w * y) / w};
}

std::pair<double, double> cosp_sinp_series(double p, double y, std::size_t max_terms) {
  double c = 0.0;
  double s = 0.0;
  double ct = 1.0;  // p^k y^(2k) / (2k)!
  double st = y;    // p^k y^(2k+1) / (2k+1)!
  for (std::size_t k = 0; k < max_terms; ++k) {
    c += ct;
    s += st;
    if (std::abs(ct) + std::abs(st) <= 1e-18 * (std::abs(c) + std::abs(s)) || (ct == 0.0 && st == 0.0)) break;
    const double a = static_cast<double>(2 * k + 1);
    const double b = static_cast<double>(2 * k + 2);
    const double c3 = static_cast<double>(2 * k + 3);
    ct *= p * y * y / (a * b);
    st *= p * y * y / (b * c3);
  }
  return {c, s};
}

HValue hc_exp_series(const Algebra& alg, const HValue& z, const SeriesOptions& opts) {
  require_dim(alg, z);
  const double nz = norm(z);
  if (!std::isfinite(nz)) throw NoConvergence("exp of a non-finite element");
  int squarings = 0;
  HValue w = z;
  if (nz > 1.0) {
    squarings = static_cast<int>(std::ceil(std::log2(nz)));
    w = scale(z, std::ldexp(1.0, -squarings));
  }
  HValue r = power_series(alg, opts, [&](const HValue& prev, std::size_t k) {
    return scale(multiply(alg, prev, w), 1.0 / static_cast<double>(k));
  });
  for (int i = 0; i < squarings; ++i) r = multiply(alg, r, r);
  return r;
}

HValue hc_exp(const Algebra& alg, const HValue& z, const SeriesOptions& opts) {
  require_dim(alg, z);
  switch (alg.kind()) {
    case AlgebraKind::real:
      return HValue(alg.label(), {std::exp(z[0])});
    case AlgebraKind::generalized_complex: {
      const double e = std::exp(z[0]);
      const auto [c, s] = cosp_sinp(alg.parameter(), z[1]);
      return HValue(alg.label(), {e * c, e * s});
    }
    case AlgebraKind::a34: {
      const double e = std::exp(z[0]);
      return HValue(alg.label(), {e, e * z[1], e * (0.5 * z[1] * z[1] + z[2])});
    }
    default:
      return hc_exp_series(alg, z, opts);
  }
}

HValue hc_ln_newton(const Algebra& alg, const HValue& z, std::size_t max_iter) {
  require_dim(alg, z);
  const auto eps = alg.identity();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < alg.dim(); ++i) {
    num += z[i] * eps[i];
    den += eps[i] * eps[i];
  }
  const double c = num / den;
  if (!(c > 0.0)) throw DomainError("ln needs a positive identity component, got " + format_double(c));
  HValue w = eps_multiple(alg, std::log(c));
  const HValue e = one(alg);
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < max_iter; ++it) {
    const HValue corr = subtract(multiply(alg, z, hc_exp(alg, scale(w, -1.0))), e);
    const double nc = norm(corr);
    if (!std::isfinite(nc)) break;
    // Once the step stalls at rounding level, further updates only add noise.
    if (nc >= prev && nc <= 1e-9 * (1.0 + norm(w))) return w;
    w = add(w, corr);
    if (nc <= 1e-15 * (1.0 + norm(w))) return w;
    prev = nc;
  }
  throw NewtonDivergence("Newton iteration for ln did not converge in " + alg.label());
}

HValue hc_ln(const Algebra& alg, const HValue& z) {
  require_dim(alg, z);
  switch (alg.kind()) {
    case AlgebraKind::real:
      if (!(z[0] > 0.0)) throw DomainError("ln of a non-positive real");
      return HValue(alg.label(), {std::log(z[0])});
    case AlgebraKind::generalized_complex: {
      const double p = alg.parameter();
      const double x = z[0];
      const double y = z[1];
      if (p < 0.0) {
        const double q = std::sqrt(-p);
        const double r2 = x * x - p * y * y;
        if (!(r2 > 0.0)) throw DomainError("ln of zero in " + alg.label());
        return HValue(alg.label(), {0.5 * std::log(r2), std::atan2(q * y, x) / q});
      }
      if (p == 0.0) {
        if (!(x > 0.0)) throw DomainError("ln in " + alg.label() + " needs x1 > 0");
        return HValue(alg.label(), {std::log(x), y / x});
      }
      const double q = std::sqrt(p);
      if (!(x > q * std::abs(y))) throw DomainError("ln in " + alg.label() + " needs x1 > sqrt(p)|x2|");
      return HValue(alg.label(), {0.5 * std::log(x * x - p * y * y), std::atanh(q * y / x) / q});
    }
    case AlgebraKind::a34: {
      const double t = z[0];
      if (!(t > 0.0)) throw DomainError("ln in A3_4 needs t > 0");
      return HValue(alg.label(), {std::log(t), z[1] / t, z[2] / t - z[1] * z[1] / (2.0 * t * t)});
    }
    default:
      return hc_ln_newton(alg, z);
  }
}

HValue hc_pow(const Algebra& alg, const HValue& z, double m) {
  if (m == 0.0) {
    require_dim(alg, z);
    return one(alg);
  }
  return hc_exp(alg, scale(hc_ln(alg, z), m));
}

std::pair<HValue, HValue> hc_cos_sin_a34(const Algebra& alg, const HValue& z) {
  require_dim(alg, z);
  if (alg.kind() != AlgebraKind::a34) throw AlgebraMismatch("A3_4", alg.label());
  const double t = z[0];
  const double x = z[1];
  const double y = z[2];
  const double c = std::cos(t);
  const double s = std::sin(t);
  HValue cz(alg.label(), {c, -x * s, -(y * s + 0.5 * x * x * c)});
  HValue sz(alg.label(), {s, x * c, y * c - 0.5 * x * x * s});
  return {std::move(cz), std::move(sz)};
}

std::pair<HValue, HValue> hc_cos_sin_series(const Algebra& alg, const HValue& z, const SeriesOptions& opts) {
  require_dim(alg, z);
  const HValue z2 = multiply(alg, z, z);
  const HValue c = power_series(alg, opts, [&](const HValue& prev, std::size_t k) {
    const double a = static_cast<double>(2 * k - 1);
    const double b = static_cast<double>(2 * k);
    return scale(multiply(alg, prev, z2), -1.0 / (a * b));
  });
  // sin z = z * sum (-1)^k z^(2k)/(2k+1)!
  const HValue core = power_series(alg, opts, [&](const HValue& prev, std::size_t k) {
    const double a = static_cast<double>(2 * k);
    const double b = static_cast<double>(2 * k + 1);
    return scale(multiply(alg, prev, z2), -1.0 / (a * b));
  });
  return {c, multiply(alg, core, z)};
}

ScheffersResidual scheffers_residual(const Algebra& alg, std::span<const double> jac) {
  const std::size_t n = alg.dim();
  const auto eps = alg.identity();
  // f'_j = sum_l eps_l df_j/dx_l
  std::vector<double> fprime(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) fprime[j] += eps[l] * jac[j * n + l];
  ScheffersResidual worst{0.0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double r = jac[i * n + k];
      for (std::size_t j = 0; j < n; ++j) r -= alg.gamma(j, k, i) * fprime[j];
      if (std::abs(r) > worst.value || std::isnan(r)) worst = {std::abs(r), i, k};
    }
  }
  return worst;
}

ScheffersReport scheffers_check(const Algebra& alg, std::span<const expr::Expr> components,
                                std::span<const std::vector<double>> samples, double tol, double time) {
  const std::size_t n = alg.dim();
  if (components.size() != n) throw LengthMismatch("Scheffers components", n, components.size());
  ScheffersReport rep;
  rep.tolerance = tol;
  std::vector<std::size_t> vars(n);
  for (std::size_t k = 0; k < n; ++k) vars[k] = k + 1;
  std::vector<double> env(n + 1);
  std::vector<double> jac(n * n);
  for (const auto& pt : samples) {
    if (pt.size() != n) throw LengthMismatch("Scheffers sample", n, pt.size());
    env[0] = time;
    std::copy(pt.begin(), pt.end(), env.begin() + 1);
    try {
      for (std::size_t i = 0; i < n; ++i) {
        const Jet j = expr::eval_jet(components[i], env, vars, 1);
        for (std::size_t k = 0; k < n; ++k) jac[i * n + k] = j.d(k);
      }
    } catch (const Error& e) {
      std::ostringstream os;
      os << "evaluation failed at (";
      for (std::size_t k = 0; k < n; ++k) os << (k ? ", " : "") << format_double(pt[k]);
      os << "): " << e.what();
      throw EvaluationError(os.str());
    }
    const auto r = scheffers_residual(alg, jac);
    ++rep.samples;
    if (rep.worst_point.empty() || r.value > rep.max_residual || std::isnan(r.value)) {
      rep.max_residual = r.value;
      rep.worst_point = pt;
      rep.worst_indices = {r.i + 1, r.k + 1};
    }
  }
  rep.pass = rep.max_residual <= tol;
  return rep;
}

}  // namespace hypersde
