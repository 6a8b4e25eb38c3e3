#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "hypersde/algebra.hpp"
#include "hypersde/analytic.hpp"
#include "hypersde/errors.hpp"
#include "hypersde/sim.hpp"
#include "hypersde/solvers.hpp"
#include "oracles.hpp"

using namespace hypersde;

namespace {

std::vector<expr::Expr> consts(std::vector<double> v) {
  std::vector<expr::Expr> out;
  for (double c : v) out.push_back(expr::literal(c));
  return out;
}

std::vector<expr::Expr> exprs(std::vector<std::string> v) {
  expr::ParseOptions o;
  o.dim = 0;
  std::vector<expr::Expr> out;
  for (const auto& s : v) out.push_back(expr::parse(s, o));
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

expr::Expr tfn(const std::string& s) {
  expr::ParseOptions o;
  o.dim = 0;
  return expr::parse(s, o);
}

CpLinearCoeffs random_cp_coeffs(gen::Rng& r, bool time_dependent) {
  auto c = [&] {
    const double a = r.uniform(-0.5, 0.5);
    if (!time_dependent) return expr::literal(a);
    return tfn(std::to_string(a) + " + " + std::to_string(r.uniform(-0.3, 0.3)) + "*sin(" +
               std::to_string(r.uniform(0.5, 3)) + "*t)");
  };
  return {c(), c(), c(), c(), c(), c(), c(), c()};
}

}  // namespace

TEST(LinearBase, RealGbmMatchesExactSolution) {
  const Algebra R = make_real();
  const double mu = 0.3, s = 0.7, x0 = 1.4;
  LinearBaseCoeffs c{consts({0}), consts({mu}), consts({0}), consts({s})};
  for (std::uint64_t id = 0; id < 5; ++id) {
    const auto g = sample_wiener(1, 1.0, 256, 3, id);
    const auto path = solve_linear_base(R, c, element(R, {x0}), g);
    ASSERT_EQ(path.states.size(), 257u);
    for (std::size_t k = 0; k <= g.steps; ++k) {
      const double exact = x0 * std::exp((mu - s * s / 2) * g.time(k) + s * g.W(k, 0));
      EXPECT_NEAR(path.states[k][0], exact, 1e-12 * exact);
    }
  }
}

TEST(LinearBase, EllipticGbmMatchesComplexExponential) {
  // With W = W1 + i W2 on C_{-1}, dW dW = 0 and Z = Z0 exp(f2 t + g2 W).
  const Algebra C = make_cp(-1);
  const std::complex<double> f2(0.2, -0.4), g2(0.5, 0.3), z0(1.0, -0.5);
  LinearBaseCoeffs c{consts({0, 0}), consts({f2.real(), f2.imag()}), consts({0, 0}), consts({g2.real(), g2.imag()})};
  const auto g = sample_wiener(2, 1.0, 200, 8, 1);
  const auto path = solve_linear_base(C, c, element(C, {z0.real(), z0.imag()}), g);
  for (std::size_t k = 0; k <= g.steps; ++k) {
    const std::complex<double> W(g.W(k, 0), g.W(k, 1));
    const auto exact = z0 * std::exp(f2 * g.time(k) + g2 * W);
    EXPECT_NEAR(path.states[k][0], exact.real(), 1e-12 * (1 + std::abs(exact)));
    EXPECT_NEAR(path.states[k][1], exact.imag(), 1e-12 * (1 + std::abs(exact)));
  }
}

TEST(LinearBase, SplitGbmMatchesIdempotentComponents) {
  // On C_1, x + y j splits into u = x + y and v = x - y, each a scalar GBM
  // driven by W1 +- W2 with quadratic variation 2t.
  const Algebra S = make_cp(1);
  const double f2x = 0.1, f2y = 0.25, g2x = 0.4, g2y = -0.2, x0 = 2.0, y0 = 0.5;
  LinearBaseCoeffs c{consts({0, 0}), consts({f2x, f2y}), consts({0, 0}), consts({g2x, g2y})};
  const auto g = sample_wiener(2, 1.0, 128, 2, 9);
  const auto path = solve_linear_base(S, c, element(S, {x0, y0}), g);
  for (std::size_t k = 0; k <= g.steps; ++k) {
    const double t = g.time(k);
    const double Bu = g.W(k, 0) + g.W(k, 1), Bv = g.W(k, 0) - g.W(k, 1);
    const double fu = f2x + f2y, fv = f2x - f2y, gu = g2x + g2y, gv = g2x - g2y;
    const double u = (x0 + y0) * std::exp((fu - gu * gu) * t + gu * Bu);
    const double v = (x0 - y0) * std::exp((fv - gv * gv) * t + gv * Bv);
    EXPECT_NEAR(path.states[k][0], (u + v) / 2, 1e-12 * (1 + std::abs(u) + std::abs(v)));
    EXPECT_NEAR(path.states[k][1], (u - v) / 2, 1e-12 * (1 + std::abs(u) + std::abs(v)));
  }
}

TEST(LinearBase, A34GbmMatchesNilpotentExponential) {
  // exp(x0 + x1 i + x2 j) = e^x0 (1 + x1 i + (x2 + x1^2/2) j); sigma = (1, 0, 1).
  const Algebra A = make_a34();
  const std::array<double, 3> f2{0.1, -0.2, 0.3}, g2{0.4, 0.2, -0.1}, z0{1.0, 0.5, -0.25};
  LinearBaseCoeffs c{consts({0, 0, 0}), consts({f2[0], f2[1], f2[2]}), consts({0, 0, 0}),
                     consts({g2[0], g2[1], g2[2]})};
  const auto g = sample_wiener(3, 1.0, 100, 4, 2);
  const auto path = solve_linear_base(A, c, element(A, {z0[0], z0[1], z0[2]}), g);
  const auto g2sq = oracle::a34_mul(g2, g2);
  const auto sigma_g2sq = oracle::a34_mul(g2sq, {1, 0, 1});
  for (std::size_t k = 0; k <= g.steps; ++k) {
    const double t = g.time(k);
    std::array<double, 3> L{};
    for (int i = 0; i < 3; ++i) L[i] = (f2[i] - sigma_g2sq[i] / 2) * t;
    const auto gW = oracle::a34_mul(g2, {g.W(k, 0), g.W(k, 1), g.W(k, 2)});
    for (int i = 0; i < 3; ++i) L[i] += gW[i];
    const double e = std::exp(L[0]);
    const auto exact = oracle::a34_mul(z0, {e, e * L[1], e * (L[2] + L[1] * L[1] / 2)});
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(path.states[k][i], exact[i], 1e-12);
  }
}

TEST(LinearBase, DeterministicVariationOfConstants) {
  // g = 0, f1 = cos t, f2 = -1: X' = cos t - X.
  const Algebra R = make_real();
  LinearBaseCoeffs c{exprs({"cos(t)"}), consts({-1}), consts({0}), consts({0})};
  const auto g = sample_wiener(1, 2.0, 2000, 0, 0);
  const auto path = solve_linear_base(R, c, element(R, {1.0}), g);
  const double T = 2.0;
  const double exact = 0.5 * (std::cos(T) + std::sin(T)) + 0.5 * std::exp(-T);
  EXPECT_NEAR(path.states.back()[0], exact, 1e-6);
}

TEST(LinearCp, AgreesWithBaseRoute) {
  gen::Rng r(71);
  for (double p : {-1.0, 0.0, 1.0, -2.5, 0.7}) {
    const Algebra A = make_cp(p);
    for (int n = 0; n < 6; ++n) {
      const auto c = random_cp_coeffs(r, n % 2 == 1);
      const std::pair<double, double> x0{r.uniform(-1, 1), r.uniform(-1, 1)};
      const auto g = sample_wiener(2, 1.0, 256, 13, static_cast<std::uint64_t>(n));
      for (auto corr : {ItoCorrection::quadratic_variation, ItoCorrection::unit})
        for (auto quad : {Quadrature::trapezoid, Quadrature::left_point}) {
          SolverOptions o;
          o.correction = corr;
          o.quadrature = quad;
          const auto cp = solve_linear_cp(p, c, x0, g, o);
          const auto base = solve_linear_base(A, to_base(c), element(A, {x0.first, x0.second}), g, o).to_real();
          ASSERT_EQ(cp.size(), base.size());
          double worst = 0;
          for (std::size_t k = 0; k < cp.size(); ++k)
            for (std::size_t i = 0; i < 2; ++i)
              worst = std::max(worst, std::abs(cp.at(k, i) - base.at(k, i)) / (1 + std::abs(base.at(k, i))));
          EXPECT_LE(worst, 1e-9) << "p=" << p << " n=" << n;
        }
    }
  }
}

TEST(LinearCp, ToBaseMapping) {
  gen::Rng r(3);
  const auto c = random_cp_coeffs(r, false);
  const auto b = to_base(c);
  ASSERT_EQ(b.f1.size(), 2u);
  const std::vector<double> env{0.0};
  EXPECT_EQ(expr::eval(b.f1[0], env), expr::eval(c.f11, env));
  EXPECT_EQ(expr::eval(b.f1[1], env), expr::eval(c.f12, env));
  EXPECT_EQ(expr::eval(b.f2[0], env), expr::eval(c.f21, env));
  EXPECT_EQ(expr::eval(b.f2[1], env), expr::eval(c.f22, env));
  EXPECT_EQ(expr::eval(b.g1[1], env), expr::eval(c.g12, env));
  EXPECT_EQ(expr::eval(b.g2[0], env), expr::eval(c.g21, env));
}

TEST(Correction, UnitMatchesQuadraticVariationOnlyWhereSigmaIsEpsilon) {
  const Algebra R = make_real();
  LinearBaseCoeffs rc{consts({0.1}), consts({0.2}), consts({0.3}), consts({0.5})};
  const auto g1 = sample_wiener(1, 1.0, 64, 1, 0);
  SolverOptions unit;
  unit.correction = ItoCorrection::unit;
  const auto a = solve_linear_base(R, rc, element(R, {1.0}), g1);
  const auto b = solve_linear_base(R, rc, element(R, {1.0}), g1, unit);
  EXPECT_NEAR(a.states.back()[0], b.states.back()[0], 1e-14);

  // On C_{-1} sigma = 0 and the unit correction leaves a bias that EM does not share.
  const Algebra C = make_cp(-1);
  LinearBaseCoeffs cc{consts({0, 0}), consts({0.1, 0.0}), consts({0, 0}), consts({0.8, 0.3})};
  const auto g2 = sample_wiener(2, 1.0, 4096, 5, 0);
  const auto qv = solve_linear_base(C, cc, element(C, {1.0, 0.0}), g2).to_real();
  const auto un = solve_linear_base(C, cc, element(C, {1.0, 0.0}), g2, unit).to_real();
  const std::vector<double> x0{1.0, 0.0};
  const auto em = euler_maruyama(expand_linear_system(C, cc), x0, g2);
  const double scale = std::hypot(qv.at(g2.steps, 0), qv.at(g2.steps, 1));
  EXPECT_LT(pathwise_error(qv, em), 0.05 * scale);
  EXPECT_GT(pathwise_error(un, em), 0.2 * scale);
}

TEST(Expansion, LinearMatchesAlgebraProducts) {
  // drift = f1 + f2 X and column l of the diffusion is (g1 + g2 X) e_l.
  gen::Rng r(73);
  for (const Algebra& A : {make_cp(-1), make_cp(0.5), make_a34(), direct_sum(make_cp(1), make_real())}) {
    const std::size_t n = A.dim();
    auto rv = [&] { return r.vec(n, -1, 1); };
    const auto f1 = rv(), f2 = rv(), g1 = rv(), g2 = rv();
    const auto sys = expand_linear_system(A, {consts(f1), consts(f2), consts(g1), consts(g2)});
    ASSERT_EQ(sys.n, n);
    ASSERT_EQ(sys.m, n);
    for (int trial = 0; trial < 5; ++trial) {
      const auto x = rv();
      const HValue X = element(A, x);
      const HValue drift = add(element(A, f1), multiply(A, element(A, f2), X));
      const HValue diff = add(element(A, g1), multiply(A, element(A, g2), X));
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sys.drift[i](0.3, x), drift[i], 1e-14);
      for (std::size_t l = 0; l < n; ++l) {
        const HValue col = multiply(A, diff, unit(A, l));
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sys.b(i, l)(0.3, x), col[i], 1e-14);
      }
    }
  }
}

TEST(Expansion, LvMatchesAlgebraProducts) {
  gen::Rng r(74);
  for (const Algebra& A : {make_cp(-1), make_a34(), make_cp(2)}) {
    const std::size_t n = A.dim();
    LvCoeffs c{element(A, r.vec(n, -1, 1)), element(A, r.vec(n, -1, 1)), element(A, r.vec(n, -1, 1)),
               element(A, r.vec(n, -1, 1))};
    const auto sys = expand_lv_system(A, c);
    for (int trial = 0; trial < 5; ++trial) {
      const auto x = r.vec(n, -2, 2);
      const HValue X = element(A, x);
      const HValue drift = subtract(multiply(A, c.b, X), multiply(A, c.a, multiply(A, X, X)));
      const HValue gx = multiply(A, c.G, X);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sys.drift[i](0, x), drift[i], 1e-13);
      for (std::size_t l = 0; l < n; ++l) {
        const HValue col = multiply(A, gx, unit(A, l));
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sys.b(i, l)(0, x), col[i], 1e-13);
      }
    }
  }
}

TEST(Expansion, GeneralSystemColumns) {
  const Algebra A = make_a34();
  expr::ParseOptions o;
  o.dim = 3;
  const std::vector<expr::Expr> a{expr::parse("x1*x2", o), expr::parse("sin(t)", o), expr::parse("x3", o)};
  const std::vector<expr::Expr> b{expr::parse("1", o), expr::parse("x1", o), expr::parse("t*x2", o)};
  for (std::size_t m : {1u, 2u, 3u}) {
    const auto sys = expand_general_system(A, a, b, m);
    ASSERT_EQ(sys.m, m);
    const std::vector<double> x{0.5, -1.5, 2.0};
    const double t = 0.7;
    EXPECT_NEAR(sys.drift[0](t, x), -0.75, 1e-15);
    EXPECT_NEAR(sys.drift[1](t, x), std::sin(t), 1e-15);
    const HValue bv = element(A, {1.0, 0.5, t * -1.5});
    for (std::size_t k = 0; k < m; ++k) {
      const HValue col = multiply(A, bv, unit(A, k));
      for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(sys.b(i, k)(t, x), col[i], 1e-15);
    }
  }
}

TEST(Lv, LogisticWithoutNoise) {
  // X' = bX - aX^2 has X = b X0 e^{bt} / (b + a X0 (e^{bt} - 1)).
  const Algebra R = make_real();
  const double a = 0.8, b = 1.3, x0 = 0.2;
  LvCoeffs c{element(R, {a}), element(R, {b}), element(R, {0.0}), element(R, {x0})};
  const auto g = sample_wiener(1, 2.0, 1000, 0, 0);
  const auto path = solve_lv_base(R, c, g);
  for (std::size_t k = 0; k <= g.steps; k += 100) {
    const double e = std::exp(b * g.time(k));
    EXPECT_NEAR(path.states[k][0], b * x0 * e / (b + a * x0 * (e - 1)), 1e-6);
  }
}

TEST(Lv, ComplexLogisticAgainstRk4) {
  const double p = -1;
  const CpLvCoeffs c{0.5, 0.1, 1.0, 0.2, 0.0, 0.0};
  const std::complex<double> a(c.a1, c.a2), b(c.b1, c.b2), z0(1.0, 0.5);
  const auto g = sample_wiener(2, 1.0, 4096, 0, 0);
  const auto path = solve_lv_cp(p, c, {z0.real(), z0.imag()}, g);
  const auto ref = oracle::rk4([&](double, std::complex<double> z) { return b * z - a * z * z; }, z0, 1.0, 4000);
  EXPECT_NEAR(path.at(g.steps, 0), ref.real(), 1e-6);
  EXPECT_NEAR(path.at(g.steps, 1), ref.imag(), 1e-6);
}

TEST(Lv, CpRouteAgreesWithBaseRoute) {
  gen::Rng r(75);
  for (double p : {-1.0, 0.0, 1.0, -0.3}) {
    const Algebra A = make_cp(p);
    for (int n = 0; n < 5; ++n) {
      const CpLvCoeffs c{r.uniform(0, 0.6), r.uniform(-0.2, 0.2), r.uniform(0.5, 1.5),
                         r.uniform(-0.3, 0.3), r.uniform(-0.4, 0.4), r.uniform(-0.2, 0.2)};
      const std::pair<double, double> x0{r.uniform(0.5, 1.5), r.uniform(-0.3, 0.3)};
      const auto g = sample_wiener(2, 1.0, 512, 17, static_cast<std::uint64_t>(n));
      RealPath cp, base;
      try {
        cp = solve_lv_cp(p, c, x0, g);
        base = solve_lv_base(A, to_base(A, c, x0), g).to_real();
      } catch (const SingularElement&) {
        continue;
      }
      for (std::size_t k = 0; k < cp.size(); ++k)
        for (std::size_t i = 0; i < 2; ++i)
          EXPECT_NEAR(cp.at(k, i), base.at(k, i), 1e-9 * (1 + std::abs(base.at(k, i))));
    }
  }
}

TEST(Lv, SingularBracketReportsTime) {
  // b = G = 0, a = -2, X0 = 1: the bracket 1 - 2t vanishes at t = 1/2.
  const Algebra R = make_real();
  LvCoeffs c{element(R, {-2.0}), element(R, {0.0}), element(R, {0.0}), element(R, {1.0})};
  const auto g = sample_wiener(1, 1.0, 8, 0, 0);
  try {
    solve_lv_base(R, c, g);
    FAIL();
  } catch (const SingularElement& e) {
    EXPECT_DOUBLE_EQ(e.time(), 0.5);
  }
}

TEST(FundamentalMatrix, DeterminantAndOde) {
  gen::Rng r(76);
  for (double p : {-1.0, 0.0, 1.0}) {
    for (int n = 0; n < 5; ++n) {
      const double a = r.uniform(-0.5, 0.5), bb = r.uniform(-0.5, 0.5), w = r.uniform(0.5, 3);
      const auto f21 = tfn(num(a) + " + " + num(bb) + "*sin(" + num(w) + "*t)");
      const auto f22 = tfn(num(r.uniform(-1, 1)) + "*cos(t)");
      const double t = r.uniform(0.1, 2);
      const auto phi = fundamental_matrix_cp(p, f21, f22, t);
      const double intf = a * t + bb * (1 - std::cos(w * t)) / w;
      EXPECT_NEAR(phi[0] * phi[3] - phi[1] * phi[2], std::exp(2 * intf), 1e-10 * std::exp(2 * intf));
      // Phi' = [[f21, p f22], [f22, f21]] Phi.
      const std::vector<double> env{t};
      const double A0 = expr::eval(f21, env), A1 = expr::eval(f22, env);
      for (int e = 0; e < 4; ++e) {
        const double dphi = oracle::d1([&](double s) { return fundamental_matrix_cp(p, f21, f22, s)[e]; }, t);
        const int row = e / 2, col = e % 2;
        const double rhs = row == 0 ? A0 * phi[col] + p * A1 * phi[2 + col] : A1 * phi[col] + A0 * phi[2 + col];
        EXPECT_NEAR(dphi, rhs, 1e-6);
      }
    }
    const auto id = fundamental_matrix_cp(p, tfn("1"), tfn("2"), 0.0);
    EXPECT_EQ(id[0], 1.0);
    EXPECT_EQ(id[1], 0.0);
    EXPECT_EQ(id[2], 0.0);
    EXPECT_EQ(id[3], 1.0);
  }
}

TEST(Integrate, AgainstClosedFormsAndSimpson) {
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi), 2.0, 1e-14);
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x); }, -5, 5), std::sqrt(std::numbers::pi) * std::erf(5.0), 1e-14);
  auto f = [](double x) { return std::cos(3 * x) * std::exp(x / 2) + x * x; };
  EXPECT_NEAR(integrate(f, -1, 2), oracle::simpson(f, -1, 2, 20000), 1e-11);
  EXPECT_EQ(integrate(f, 1, 1), 0.0);
  EXPECT_NEAR(integrate(f, 2, -1), -integrate(f, -1, 2), 1e-15);
}

TEST(HPathIo, RealProjectionAndCsv) {
  const Algebra C = make_cp(-1);
  HPath h;
  h.algebra = C.label();
  h.times = {0.0, 1.0};
  h.states = {element(C, {1.0, 2.0}), element(C, {3.0, -4.0})};
  const auto rp = h.to_real();
  EXPECT_EQ(rp.dim, 2u);
  EXPECT_EQ(rp.values, (std::vector<double>{1, 2, 3, -4}));
  std::ostringstream os;
  write_hpath_csv(os, h);
  EXPECT_EQ(os.str(), "t,X1,X2\n0,1,2\n1,3,-4\n");
}
