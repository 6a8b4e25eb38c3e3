#include "hypersde/reducibility.hpp"

#include <algorithm>
#include <cmath>

#include "hypersde/analytic.hpp"
#include "hypersde/errors.hpp"

namespace hypersde {

namespace {

constexpr std::size_t kT = 0;
constexpr std::size_t kZ = 1;
constexpr std::size_t kX = 1;
constexpr std::size_t kY = 2;

// N as a jet in (t, Z); valid through first order.
Jet scalar_N(const expr::Expr& f, const expr::Expr& g, double t, double Z, double sigma) {
  const double env[2] = {t, Z};
  const std::size_t vars[2] = {0, 1};
  const Jet F = expr::eval_jet(f, env, vars, 3);
  const Jet G = expr::eval_jet(g, env, vars, 3);
  if (G.value() == 0.0) throw DomainError("diffusion coefficient vanishes");
  const Jet Gt = G.derivative(kT);
  const Jet Gzz = G.derivative(kZ).derivative(kZ);
  const Jet ratio_z = (F / G).derivative(kZ);
  return G * (Gt / (G * G) - ratio_z + 0.5 * sigma * Gzz);
}

// Element of C_p with jet components.
struct CpJet {
  Jet re, im;
};

CpJet operator+(const CpJet& a, const CpJet& b) { return {a.re + b.re, a.im + b.im}; }
CpJet operator-(const CpJet& a, const CpJet& b) { return {a.re - b.re, a.im - b.im}; }
CpJet scale(const CpJet& a, double c) { return {a.re * c, a.im * c}; }
CpJet mul(double p, const CpJet& a, const CpJet& b) {
  return {a.re * b.re + p * (a.im * b.im), a.re * b.im + a.im * b.re};
}
CpJet inv(double p, const CpJet& a) {
  const Jet den = a.re * a.re - p * (a.im * a.im);
  if (den.value() == 0.0) throw SingularElement("diffusion coefficient is a zero divisor", 0.0);
  const Jet r = reciprocal(den);
  return {a.re * r, -(a.im * r)};
}
CpJet deriv(const CpJet& a, std::size_t v) { return {a.re.derivative(v), a.im.derivative(v)}; }

struct CpJets {
  Jet f1, f2, g1, g2;
};

CpJets cp_jets(const expr::Expr& f1, const expr::Expr& f2, const expr::Expr& g1, const expr::Expr& g2, double t,
               double X, double Y, std::size_t order) {
  const double env[3] = {t, X, Y};
  const std::size_t vars[3] = {0, 1, 2};
  return {expr::eval_jet(f1, env, vars, order), expr::eval_jet(f2, env, vars, order),
          expr::eval_jet(g1, env, vars, order), expr::eval_jet(g2, env, vars, order)};
}

CpJet cp_N(double p, const CpJets& j, double sigma) {
  const CpJet f{j.f1, j.f2};
  const CpJet g{j.g1, j.g2};
  const CpJet gt = deriv(g, kT);
  const CpJet gzz = deriv(deriv(g, kX), kX);
  const CpJet ginv = inv(p, g);
  const CpJet ratio_z = deriv(mul(p, f, ginv), kX);
  const CpJet inner = mul(p, gt, mul(p, ginv, ginv)) - ratio_z + scale(gzz, 0.5 * sigma);
  return mul(p, g, inner);
}

void track(ConditionResult& c, double value, std::vector<double> where, double tol) {
  const double a = std::abs(value);
  if (c.witness.empty() || a > c.max_residual || std::isnan(a)) {
    c.max_residual = a;
    c.witness = std::move(where);
  }
  c.pass = c.max_residual <= tol;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::reducible: return "reducible";
    case Verdict::not_reducible: return "not_reducible";
    case Verdict::undecided: return "undecided";
  }
  return "undecided";
}

double gard_N(const expr::Expr& f, const expr::Expr& g, double t, double Z, double sigma) {
  return scalar_N(f, g, t, Z, sigma).value();
}

double gard_dN_dZ(const expr::Expr& f, const expr::Expr& g, double t, double Z, double sigma) {
  return scalar_N(f, g, t, Z, sigma).d(kZ);
}

ReducibilityReport check_reducible_scalar(const expr::Expr& f, const expr::Expr& g,
                                          const std::vector<std::pair<double, double>>& samples, double tol,
                                          double sigma) {
  ReducibilityReport rep;
  rep.tolerance = tol;
  rep.sigma = sigma;
  ConditionResult cond{"dN/dZ", 0.0, {}, true};
  for (const auto& [t, z] : samples) {
    try {
      const double d = gard_dN_dZ(f, g, t, z, sigma);
      ++rep.evaluated;
      track(cond, d, {t, z}, tol);
    } catch (const Error&) {
      ++rep.failed;
    }
  }
  rep.conditions.push_back(cond);
  const std::size_t total = rep.evaluated + rep.failed;
  if (rep.evaluated == 0 || 5 * rep.failed > total) {
    rep.verdict = Verdict::undecided;
  } else {
    rep.verdict = cond.pass ? Verdict::reducible : Verdict::not_reducible;
  }
  return rep;
}

double reduction_diffusion(const ReductionResult& r, double t) {
  const double integral = integrate([&](double s) { return gard_N(r.f, r.g, s, r.anchor, r.sigma); }, 0.0, t);
  return std::exp(integral);
}

namespace {

double eval_tz(const expr::Expr& e, double t, double z) {
  const double env[2] = {t, z};
  return expr::eval(e, env);
}

}  // namespace

double reduction_map(const ReductionResult& r, double t, double Z) {
  const double a = reduction_diffusion(r, t);
  return a * integrate([&](double z) { return 1.0 / eval_tz(r.g, t, z); }, r.anchor, Z);
}

ReductionResult construct_reduction(const expr::Expr& f, const expr::Expr& g, const std::vector<double>& times,
                                    const std::vector<double>& states, double anchor, double tol, double sigma) {
  ReductionResult r;
  r.f = f;
  r.g = g;
  r.sigma = sigma;
  r.anchor = anchor;
  r.times = times;
  r.states = states;
  const std::size_t nz = states.size();
  r.h.resize(times.size() * nz);
  for (std::size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    const double n0 = gard_N(f, g, t, anchor, sigma);
    for (double z : states) {
      const double n = gard_N(f, g, t, z, sigma);
      if (std::abs(n - n0) > tol * (1.0 + std::abs(n0)))
        throw ConsistencyError("N depends on Z at t = " + std::to_string(t) + ": equation is not reducible");
    }
    const double a = reduction_diffusion(r, t);
    r.diffusion.push_back(a);

    auto drift_at = [&](double z) {
      const double env[2] = {t, z};
      const std::size_t vars[2] = {0, 1};
      const Jet G = expr::eval_jet(g, env, vars, 1);
      const double fz = expr::eval(f, env);
      const double gz = G.value();
      const double h_t = integrate(
          [&](double zeta) {
            const double e2[2] = {t, zeta};
            const Jet Gz = expr::eval_jet(g, e2, vars, 1);
            return a * (n0 / Gz.value() - Gz.d(kT) / (Gz.value() * Gz.value()));
          },
          anchor, z);
      const double h_z = a / gz;
      const double h_zz = -a * G.d(kZ) / (gz * gz);
      return h_t + fz * h_z + 0.5 * sigma * gz * gz * h_zz;
    };

    const double b0 = drift_at(anchor);
    for (std::size_t iz = 0; iz < nz; ++iz) {
      const double b = drift_at(states[iz]);
      if (std::abs(b - b0) > tol * (1.0 + std::abs(b0)))
        throw ConsistencyError("drift of the reduced equation depends on Z at t = " + std::to_string(t));
      r.h[it * nz + iz] = a * integrate([&](double z) { return 1.0 / eval_tz(g, t, z); }, anchor, states[iz]);
    }
    r.drift.push_back(b0);
  }
  return r;
}

std::pair<double, double> compute_N1N2_cp(double p, const expr::Expr& f1, const expr::Expr& f2, const expr::Expr& g1,
                                          const expr::Expr& g2, double t, double X, double Y, double sigma) {
  const CpJet n = cp_N(p, cp_jets(f1, f2, g1, g2, t, X, Y, 3), sigma);
  return {n.re.value(), n.im.value()};
}

std::pair<double, double> printed_N1N2_cp(double p, const expr::Expr& f1, const expr::Expr& f2, const expr::Expr& g1,
                                          const expr::Expr& g2, double t, double X, double Y) {
  const auto j = cp_jets(f1, f2, g1, g2, t, X, Y, 2);
  const double F1 = j.f1.value(), F2 = j.f2.value(), G1 = j.g1.value(), G2 = j.g2.value();
  const double f1x = j.f1.d(kX), f2x = j.f2.d(kX);
  const double g1x = j.g1.d(kX), g2x = j.g2.d(kX), g1t = j.g1.d(kT), g2t = j.g2.d(kT);
  const double g1xx = j.g1.d2(kX, kX), g2xx = j.g2.d2(kX, kX);
  const double den = G1 * G1 - p * G2 * G2;
  const double n1 = -f1x + 0.5 * G1 * g1xx + 0.5 * p * G2 * g2xx +
                    (F1 * g1x - p * G2 * g1x + p * F2 * g2x - p * F1 * G2 * g2x + G1 * g1t - p * G2 * g2x) / den;
  const double n2 = -f2x + 0.5 * G2 * g1xx + 0.5 * G1 * g2xx +
                    (F2 * G1 * g1x - F1 * G2 * g1x + F2 * G2 * g2x + F1 * G1 * g2x - G2 * g1x + G1 * g2t) / den;
  return {n1, n2};
}

ReducibilityReport check_cp_system(double p, const expr::Expr& f1, const expr::Expr& f2, const expr::Expr& g1,
                                   const expr::Expr& g2, const std::vector<std::array<double, 3>>& samples,
                                   const CpCheckOptions& opts) {
  ReducibilityReport rep;
  rep.tolerance = opts.tol;
  rep.p = p;
  rep.sigma = opts.correction == ItoCorrection::quadratic_variation ? 1.0 + p : 1.0;
  const Algebra alg = make_cp(p);
  ConditionResult sf{"scheffers(f)", 0.0, {}, true};
  ConditionResult sg{"scheffers(g)", 0.0, {}, true};
  ConditionResult n1x{"dN1/dX", 0.0, {}, true};
  ConditionResult n2x{"dN2/dX", 0.0, {}, true};
  ConditionResult n1y{"dN1/dY", 0.0, {}, true};
  double drift_slope = 0.0;

  for (const auto& pt : samples) {
    const std::vector<double> where(pt.begin(), pt.end());
    try {
      const auto j = cp_jets(f1, f2, g1, g2, pt[0], pt[1], pt[2], 3);
      const double den = j.g1.value() * j.g1.value() - p * j.g2.value() * j.g2.value();
      if (std::abs(den) < opts.zero_divisor_gap) {
        ++rep.skipped;
        continue;
      }
      const double jf[4] = {j.f1.d(kX), j.f1.d(kY), j.f2.d(kX), j.f2.d(kY)};
      const double jg[4] = {j.g1.d(kX), j.g1.d(kY), j.g2.d(kX), j.g2.d(kY)};
      for (double v : jf) drift_slope = std::max(drift_slope, std::abs(v));
      track(sf, scheffers_residual(alg, jf).value, where, opts.tol);
      track(sg, scheffers_residual(alg, jg).value, where, opts.tol);

      const CpJet n = cp_N(p, j, rep.sigma);
      track(n1x, n.re.d(kX), where, opts.tol);
      track(n2x, n.im.d(kX), where, opts.tol);
      if (p == 0.0) track(n1y, n.re.d(kY), where, opts.tol);

      if (opts.correction == ItoCorrection::unit) {
        const auto printed = printed_N1N2_cp(p, f1, f2, g1, g2, pt[0], pt[1], pt[2]);
        const double diff = std::max(std::abs(printed.first - n.re.value()), std::abs(printed.second - n.im.value()));
        if (std::isfinite(diff)) rep.printed_split_discrepancy = std::max(rep.printed_split_discrepancy, diff);
      }
      ++rep.evaluated;
    } catch (const Error&) {
      ++rep.failed;
    }
  }

  rep.conditions = {sf, sg, n1x, n2x};
  if (p == 0.0) rep.conditions.push_back(n1y);
  rep.drift_state_dependent = drift_slope > opts.tol;
  if (rep.drift_state_dependent)
    rep.notes.push_back("drift depends on the state; the hypercomplexifiable form expects f1, f2 of t alone");
  if (opts.correction == ItoCorrection::quadratic_variation)
    rep.notes.push_back("N uses dW dW = (1 + p) dt");

  const std::size_t total = rep.evaluated + rep.failed;
  rep.hypercomplexifiable = sf.pass && sg.pass;
  rep.branch = p != 0.0 ? "p != 0: dN1/dX = dN2/dX = 0" : "p = 0: dN1/dX = dN2/dX = dN1/dY = 0";
  if (rep.evaluated == 0 || 5 * rep.failed > total) {
    rep.verdict = Verdict::undecided;
  } else if (!rep.hypercomplexifiable) {
    rep.verdict = Verdict::not_reducible;
    rep.branch = "not hypercomplexifiable";
  } else {
    const bool ok = n1x.pass && n2x.pass && (p != 0.0 || n1y.pass);
    rep.verdict = ok ? Verdict::reducible : Verdict::not_reducible;
  }
  return rep;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<std::pair<double, double>> grid2(const std::vector<double>& ts, const std::vector<double>& zs) {
  std::vector<std::pair<double, double>> out;
  for (double t : ts)
    for (double z : zs) out.emplace_back(t, z);
  return out;
}

std::vector<std::array<double, 3>> grid3(const std::vector<double>& ts, const std::vector<double>& xs,
                                         const std::vector<double>& ys) {
  std::vector<std::array<double, 3>> out;
  for (double t : ts)
    for (double x : xs)
      for (double y : ys) out.push_back({t, x, y});
  return out;
}

nlohmann::json to_json(const ReducibilityReport& r) {
  nlohmann::json j;
  j["verdict"] = to_string(r.verdict);
  j["tolerance"] = r.tolerance;
  j["sigma"] = r.sigma;
  j["evaluated"] = r.evaluated;
  j["failed"] = r.failed;
  j["skipped"] = r.skipped;
  auto& conds = j["conditions"] = nlohmann::json::array();
  for (const auto& c : r.conditions)
    conds.push_back({{"name", c.name}, {"max_residual", c.max_residual}, {"witness", c.witness}, {"pass", c.pass}});
  if (r.p) {
    j["p"] = *r.p;
    j["hypercomplexifiable"] = r.hypercomplexifiable;
    j["branch"] = r.branch;
    j["drift_state_dependent"] = r.drift_state_dependent;
    j["printed_split_discrepancy"] = r.printed_split_discrepancy;
  }
  j["notes"] = r.notes;
  return j;
}

nlohmann::json to_json(const ReductionResult& r) {
  nlohmann::json j;
  j["anchor"] = r.anchor;
  j["sigma"] = r.sigma;
  j["times"] = r.times;
  j["states"] = r.states;
  j["diffusion"] = r.diffusion;
  j["drift"] = r.drift;
  j["h"] = r.h;
  return j;
}

}  // namespace hypersde
