#include "hypersde/solvers.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <ostream>

#include "hypersde/analytic.hpp"
#include "hypersde/csv.hpp"
#include "hypersde/errors.hpp"

namespace hypersde {

namespace {

std::vector<double> sample(const expr::Expr& e, const std::vector<double>& times) {
  std::vector<double> out(times.size());
  double env[1];
  for (std::size_t k = 0; k < times.size(); ++k) {
    env[0] = times[k];
    out[k] = expr::eval(e, env);
  }
  return out;
}

std::vector<HValue> sample(const Algebra& alg, const std::vector<expr::Expr>& comps, const std::vector<double>& times,
                           const char* what) {
  if (comps.size() != alg.dim()) throw LengthMismatch(what, alg.dim(), comps.size());
  std::vector<std::vector<double>> cols;
  cols.reserve(comps.size());
  for (const auto& c : comps) cols.push_back(sample(c, times));
  std::vector<HValue> out;
  out.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> v(alg.dim());
    for (std::size_t i = 0; i < alg.dim(); ++i) v[i] = cols[i][k];
    out.emplace_back(alg.label(), std::move(v));
  }
  return out;
}

HValue increment(const Algebra& alg, const WienerGrid& grid, std::size_t k) {
  HValue d = zero(alg);
  for (std::size_t j = 0; j < grid.m; ++j) d[j] = grid.dW(k, j);
  return d;
}

HValue wiener_value(const Algebra& alg, const WienerGrid& grid, std::size_t k) {
  HValue w = zero(alg);
  for (std::size_t j = 0; j < grid.m; ++j) w[j] = grid.W(k, j);
  return w;
}

std::vector<HValue> cumulative(const Algebra& alg, const std::vector<HValue>& f, double dt, Quadrature rule) {
  std::vector<HValue> out(f.size(), zero(alg));
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    const HValue step = rule == Quadrature::left_point ? scale(f[k], dt) : scale(add(f[k], f[k + 1]), 0.5 * dt);
    out[k + 1] = add(out[k], step);
  }
  return out;
}

std::vector<double> cumulative(const std::vector<double>& f, double dt, Quadrature rule) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t k = 0; k + 1 < f.size(); ++k)
    out[k + 1] = out[k] + (rule == Quadrature::left_point ? f[k] : 0.5 * (f[k] + f[k + 1])) * dt;
  return out;
}

HValue sigma_of(const Algebra& alg, std::size_t m, ItoCorrection c) {
  return c == ItoCorrection::quadratic_variation ? noise_square(alg, m) : one(alg);
}

HValue invert_at(const Algebra& alg, const HValue& u, double tol, double t) {
  try {
    return invert(alg, u, tol);
  } catch (const SingularElement& e) {
    throw SingularElement(std::string(e.what()) + " at t = " + format_double(t), e.determinant(), t);
  }
}

void require_grid(const Algebra& alg, const WienerGrid& grid) {
  if (grid.m == 0 || grid.m > alg.dim()) throw LengthMismatch("Wiener components", alg.dim(), grid.m);
}

// Signed linear combination sum c_r * e_r; a null expression stands for 1.
struct Term {
  double c;
  expr::Expr e;
};

expr::Expr combine(const std::vector<Term>& terms) {
  expr::Expr acc;
  for (const auto& [c, e] : terms) {
    if (c == 0.0 || (e && expr::is_zero_literal(e))) continue;
    const double mag = std::abs(c);
    expr::Expr body;
    if (!e) {
      body = expr::literal(mag);
    } else if (mag == 1.0) {
      body = e;
    } else {
      body = expr::mul(expr::literal(mag), e);
    }
    if (!acc) {
      acc = c < 0 ? expr::neg(body) : body;
    } else {
      acc = c < 0 ? expr::sub(acc, body) : expr::add(acc, body);
    }
  }
  return acc ? acc : expr::literal(0.0);
}

expr::Expr times_x(const expr::Expr& coeff, std::size_t var) {
  if (coeff->kind == expr::NodeKind::literal && coeff->value == 1.0) return expr::x(var);
  return expr::mul(coeff, expr::x(var));
}

}  // namespace

SdeSystemSpec system_from_exprs(std::size_t n, std::size_t m, std::vector<expr::Expr> drift,
                                std::vector<expr::Expr> diffusion, std::string provenance) {
  if (drift.size() != n) throw LengthMismatch("drift components", n, drift.size());
  if (diffusion.size() != n * m) throw LengthMismatch("diffusion entries", n * m, diffusion.size());
  SdeSystemSpec s;
  s.n = n;
  s.m = m;
  for (const auto& e : drift) s.drift.push_back(expr::to_function(e));
  for (const auto& e : diffusion) s.diffusion.push_back(expr::to_function(e));
  s.drift_expr = std::move(drift);
  s.diffusion_expr = std::move(diffusion);
  s.provenance = std::move(provenance);
  return s;
}

RealPath HPath::to_real() const {
  RealPath p;
  p.times = times;
  p.dim = states.empty() ? 0 : states.front().size();
  p.values.reserve(times.size() * p.dim);
  for (const auto& z : states) p.values.insert(p.values.end(), z.coeffs().begin(), z.coeffs().end());
  return p;
}

void write_hpath_csv(std::ostream& os, const HPath& path) { write_path_csv(os, path.to_real()); }

LinearBaseCoeffs to_base(const CpLinearCoeffs& c) {
  return LinearBaseCoeffs{{c.f11, c.f12}, {c.f21, c.f22}, {c.g11, c.g12}, {c.g21, c.g22}};
}

LvCoeffs to_base(const Algebra& cp, const CpLvCoeffs& c, std::pair<double, double> x0) {
  return LvCoeffs{element(cp, {c.a1, c.a2}), element(cp, {c.b1, c.b2}), element(cp, {c.G1, c.G2}),
                  element(cp, {x0.first, x0.second})};
}

HPath solve_linear_base(const Algebra& alg, const LinearBaseCoeffs& coeffs, const HValue& Z0, const WienerGrid& grid,
                        const SolverOptions& opts) {
  require_grid(alg, grid);
  const auto times = grid.times();
  const auto f1 = sample(alg, coeffs.f1, times, "f1 components");
  const auto f2 = sample(alg, coeffs.f2, times, "f2 components");
  const auto g1 = sample(alg, coeffs.g1, times, "g1 components");
  const auto g2 = sample(alg, coeffs.g2, times, "g2 components");
  const HValue sigma = sigma_of(alg, grid.m, opts.correction);
  const std::size_t N = grid.steps;
  const double dt = grid.dt();

  std::vector<HValue> exponent_drift;
  exponent_drift.reserve(N + 1);
  for (std::size_t k = 0; k <= N; ++k)
    exponent_drift.push_back(subtract(f2[k], scale(multiply(alg, multiply(alg, g2[k], g2[k]), sigma), 0.5)));
  const auto L = cumulative(alg, exponent_drift, dt, opts.quadrature);

  std::vector<HValue> E(N + 1), Einv(N + 1);
  HValue ito = zero(alg);
  for (std::size_t k = 0; k <= N; ++k) {
    E[k] = hc_exp(alg, add(L[k], ito));
    Einv[k] = invert_at(alg, E[k], opts.singular_tol, times[k]);
    if (k < N) ito = add(ito, multiply(alg, g2[k], increment(alg, grid, k)));
  }

  std::vector<HValue> q;
  q.reserve(N + 1);
  for (std::size_t k = 0; k <= N; ++k)
    q.push_back(multiply(alg, Einv[k], subtract(f1[k], multiply(alg, multiply(alg, g1[k], g2[k]), sigma))));
  const auto P = cumulative(alg, q, dt, opts.quadrature);

  HPath out;
  out.algebra = alg.label();
  out.times = times;
  out.states.reserve(N + 1);
  HValue stoch = zero(alg);
  for (std::size_t k = 0; k <= N; ++k) {
    out.states.push_back(multiply(alg, E[k], add(add(Z0, P[k]), stoch)));
    if (k < N) stoch = add(stoch, multiply(alg, multiply(alg, Einv[k], g1[k]), increment(alg, grid, k)));
  }
  return out;
}

RealPath solve_linear_cp(double p, const CpLinearCoeffs& c, std::pair<double, double> x0, const WienerGrid& grid,
                         const SolverOptions& opts) {
  if (grid.m != 2) throw LengthMismatch("Wiener components", 2, grid.m);
  const auto times = grid.times();
  const std::size_t N = grid.steps;
  const double dt = grid.dt();
  const double s = opts.correction == ItoCorrection::quadratic_variation ? 1.0 + p : 1.0;
  const auto f11 = sample(c.f11, times), f12 = sample(c.f12, times), f21 = sample(c.f21, times),
             f22 = sample(c.f22, times), g11 = sample(c.g11, times), g12 = sample(c.g12, times),
             g21 = sample(c.g21, times), g22 = sample(c.g22, times);

  std::vector<double> a_drift(N + 1), b_drift(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    a_drift[k] = f21[k] - 0.5 * s * (g21[k] * g21[k] + p * g22[k] * g22[k]);
    b_drift[k] = f22[k] - s * g21[k] * g22[k];
  }
  auto A = cumulative(a_drift, dt, opts.quadrature);
  auto B = cumulative(b_drift, dt, opts.quadrature);
  double ia = 0.0, ib = 0.0;
  for (std::size_t k = 0; k <= N; ++k) {
    A[k] += ia;
    B[k] += ib;
    if (k < N) {
      const double d1 = grid.dW(k, 0), d2 = grid.dW(k, 1);
      ia += g21[k] * d1 + p * g22[k] * d2;
      ib += g22[k] * d1 + g21[k] * d2;
    }
  }

  // E^-1(s) = e^{-A} (cos_p B, -sin_p B) = (U, -V).
  std::vector<double> U(N + 1), V(N + 1), h1(N + 1), h2(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    const auto [cb, sb] = cosp_sinp(p, B[k]);
    const double e = std::exp(-A[k]);
    U[k] = e * cb;
    V[k] = e * sb;
    const double q1 = f11[k] - s * (g11[k] * g21[k] + p * g12[k] * g22[k]);
    const double q2 = f12[k] - s * (g12[k] * g21[k] + g11[k] * g22[k]);
    h1[k] = U[k] * q1 - p * V[k] * q2;
    h2[k] = U[k] * q2 - V[k] * q1;
  }
  const auto P1 = cumulative(h1, dt, opts.quadrature);
  const auto P2 = cumulative(h2, dt, opts.quadrature);

  RealPath out;
  out.times = times;
  out.dim = 2;
  out.values.resize(2 * (N + 1));
  double w1 = 0.0, w2 = 0.0;
  for (std::size_t k = 0; k <= N; ++k) {
    const double y1 = x0.first + P1[k] + w1;
    const double y2 = x0.second + P2[k] + w2;
    const auto [cb, sb] = cosp_sinp(p, B[k]);
    const double e = std::exp(A[k]);
    out.values[2 * k] = e * (cb * y1 + p * sb * y2);
    out.values[2 * k + 1] = e * (sb * y1 + cb * y2);
    if (k < N) {
      const double d1 = grid.dW(k, 0), d2 = grid.dW(k, 1);
      const double alpha = g11[k] * d1 + p * g12[k] * d2;
      const double gamma = g12[k] * d1 + g11[k] * d2;
      w1 += U[k] * alpha - p * V[k] * gamma;
      w2 += U[k] * gamma - V[k] * alpha;
    }
  }
  return out;
}

HPath solve_lv_base(const Algebra& alg, const LvCoeffs& c, const WienerGrid& grid, const SolverOptions& opts) {
  require_grid(alg, grid);
  const auto times = grid.times();
  const std::size_t N = grid.steps;
  const HValue sigma = sigma_of(alg, grid.m, opts.correction);
  const HValue drift = subtract(c.b, scale(multiply(alg, multiply(alg, c.G, c.G), sigma), 0.5));

  std::vector<HValue> growth;
  growth.reserve(N + 1);
  for (std::size_t k = 0; k <= N; ++k)
    growth.push_back(hc_exp(alg, add(scale(drift, times[k]), multiply(alg, c.G, wiener_value(alg, grid, k)))));
  const auto J = cumulative(alg, growth, grid.dt(), opts.quadrature);
  const HValue z0inv = invert_at(alg, c.Z0, opts.singular_tol, 0.0);

  HPath out;
  out.algebra = alg.label();
  out.times = times;
  out.states.reserve(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    const HValue bracket = add(z0inv, multiply(alg, c.a, J[k]));
    out.states.push_back(multiply(alg, growth[k], invert_at(alg, bracket, opts.singular_tol, times[k])));
  }
  return out;
}

RealPath solve_lv_cp(double p, const CpLvCoeffs& c, std::pair<double, double> x0, const WienerGrid& grid,
                     const SolverOptions& opts) {
  if (grid.m != 2) throw LengthMismatch("Wiener components", 2, grid.m);
  const auto times = grid.times();
  const std::size_t N = grid.steps;
  const double s = opts.correction == ItoCorrection::quadratic_variation ? 1.0 + p : 1.0;
  const auto tol_for = [&](double u, double v) {
    return opts.singular_tol < 0.0 ? 1e-10 * std::hypot(u, v) : opts.singular_tol;
  };

  const double d0 = x0.first * x0.first - p * x0.second * x0.second;
  if (!(std::abs(d0) > tol_for(x0.first, x0.second)))
    throw SingularElement("initial value is a zero divisor", d0, 0.0);

  const double ra = c.b1 - 0.5 * s * (c.G1 * c.G1 + p * c.G2 * c.G2);
  const double rb = c.b2 - s * c.G1 * c.G2;
  std::vector<double> alpha(N + 1), beta(N + 1), ec(N + 1), es(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    const double w1 = grid.W(k, 0), w2 = grid.W(k, 1);
    alpha[k] = ra * times[k] + c.G1 * w1 + p * c.G2 * w2;
    beta[k] = rb * times[k] + c.G2 * w1 + c.G1 * w2;
    const auto [cb, sb] = cosp_sinp(p, beta[k]);
    const double e = std::exp(alpha[k]);
    ec[k] = e * cb;
    es[k] = e * sb;
  }
  const auto Ic = cumulative(ec, grid.dt(), opts.quadrature);
  const auto Is = cumulative(es, grid.dt(), opts.quadrature);

  RealPath out;
  out.times = times;
  out.dim = 2;
  out.values.resize(2 * (N + 1));
  for (std::size_t k = 0; k <= N; ++k) {
    const double gam = x0.first / d0 + c.a1 * Ic[k] + p * c.a2 * Is[k];
    const double del = -x0.second / d0 + c.a1 * Is[k] + c.a2 * Ic[k];
    const double den = gam * gam - p * del * del;
    if (!(std::abs(den) > tol_for(gam, del)) || !std::isfinite(den))
      throw SingularElement("gamma^2 - p delta^2 vanishes at t = " + format_double(times[k]), den, times[k]);
    out.values[2 * k] = (gam * ec[k] - p * del * es[k]) / den;
    out.values[2 * k + 1] = (gam * es[k] - del * ec[k]) / den;
  }
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (a == b) return 0.0;
  // Integrands that cancel to rounding noise never meet a relative tolerance,
  // so a single-panel estimate is accepted under an absolute floor first.
  double err = 0.0;
  const double coarse = GK::integrate(f, a, b, 0, 0.0, &err);
  if (err <= 1e-15 * std::abs(b - a)) return coarse;
  return GK::integrate(f, a, b, 15, 1e-14);
}

std::array<double, 4> fundamental_matrix_cp(double p, const expr::Expr& f21, const expr::Expr& f22, double t) {
  auto fn = [](const expr::Expr& e) {
    return [&e](double s) {
      const double env[1] = {s};
      return expr::eval(e, env);
    };
  };
  const double I21 = integrate(fn(f21), 0.0, t);
  const double I22 = integrate(fn(f22), 0.0, t);
  const auto [cb, sb] = cosp_sinp(p, I22);
  const double e = std::exp(I21);
  return {e * cb, e * p * sb, e * sb, e * cb};
}

SdeSystemSpec expand_linear_system(const Algebra& alg, const LinearBaseCoeffs& co) {
  const std::size_t n = alg.dim();
  for (const auto* v : {&co.f1, &co.f2, &co.g1, &co.g2})
    if (v->size() != n) throw LengthMismatch("linear coefficient components", n, v->size());
  std::vector<expr::Expr> drift(n), diffusion(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Term> terms{{1.0, co.f1[i]}};
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l)
        if (alg.gamma(k, l, i) != 0.0) terms.push_back({alg.gamma(k, l, i), times_x(co.f2[k], l + 1)});
    drift[i] = combine(terms);
    for (std::size_t l = 0; l < n; ++l) {
      std::vector<Term> dt;
      for (std::size_t k = 0; k < n; ++k)
        if (alg.gamma(k, l, i) != 0.0) dt.push_back({alg.gamma(k, l, i), co.g1[k]});
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t q = 0; q < n; ++q) {
          double c = 0.0;
          for (std::size_t m = 0; m < n; ++m) c += alg.gamma(k, q, m) * alg.gamma(m, l, i);
          if (c != 0.0) dt.push_back({c, times_x(co.g2[k], q + 1)});
        }
      }
      diffusion[i * n + l] = combine(dt);
    }
  }
  return system_from_exprs(n, n, std::move(drift), std::move(diffusion), "linear base equation over " + alg.label());
}

SdeSystemSpec expand_general_system(const Algebra& alg, const std::vector<expr::Expr>& a,
                                    const std::vector<expr::Expr>& b, std::size_t m) {
  const std::size_t n = alg.dim();
  if (a.size() != n) throw LengthMismatch("drift components", n, a.size());
  if (b.size() != n) throw LengthMismatch("diffusion components", n, b.size());
  if (m == 0 || m > n) throw LengthMismatch("Wiener components", n, m);
  std::vector<expr::Expr> diffusion(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<Term> terms;
      for (std::size_t j = 0; j < n; ++j)
        if (alg.gamma(j, k, i) != 0.0) terms.push_back({alg.gamma(j, k, i), b[j]});
      diffusion[i * m + k] = combine(terms);
    }
  }
  return system_from_exprs(n, m, a, std::move(diffusion), "general base equation over " + alg.label());
}

SdeSystemSpec expand_lv_system(const Algebra& alg, const LvCoeffs& c) {
  const std::size_t n = alg.dim();
  std::vector<expr::Expr> drift(n), diffusion(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < n; ++j) {
      double lin = 0.0;
      for (std::size_t k = 0; k < n; ++k) lin += alg.gamma(k, j, i) * c.b[k];
      terms.push_back({lin, expr::x(j + 1)});
    }
    // Quadratic part, symmetric pairs merged.
    std::vector<double> quad(n * n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t s = 0; s < n; ++s) quad[r * n + j] += alg.gamma(r, j, k) * alg.gamma(s, k, i) * c.a[s];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t j = r; j < n; ++j) {
        const double q = r == j ? quad[r * n + j] : quad[r * n + j] + quad[j * n + r];
        terms.push_back({-q, expr::mul(expr::x(r + 1), expr::x(j + 1))});
      }
    drift[i] = combine(terms);
    for (std::size_t r = 0; r < n; ++r) {
      std::vector<Term> dt;
      for (std::size_t j = 0; j < n; ++j) {
        double coef = 0.0;
        for (std::size_t s = 0; s < n; ++s)
          for (std::size_t k = 0; k < n; ++k) coef += alg.gamma(s, j, k) * alg.gamma(k, r, i) * c.G[s];
        dt.push_back({coef, expr::x(j + 1)});
      }
      diffusion[i * n + r] = combine(dt);
    }
  }
  return system_from_exprs(n, n, std::move(drift), std::move(diffusion),
                           "Lotka-Volterra base equation over " + alg.label());
}

}  // namespace hypersde
