#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "generators.hpp"
#include "hypersde/errors.hpp"
#include "hypersde/sim.hpp"
#include "hypersde/solvers.hpp"

using namespace hypersde;

namespace {

ScalarFn constant(double c) {
  return [c](double, std::span<const double>) { return c; };
}

ScalarFn linear(std::size_t i, double c) {
  return [i, c](double, std::span<const double> x) { return c * x[i]; };
}

SdeSystemSpec gbm(double mu, double s) {
  SdeSystemSpec sys;
  sys.n = 1;
  sys.m = 1;
  sys.drift = {linear(0, mu)};
  sys.diffusion = {linear(0, s)};
  return sys;
}

ClosedForm gbm_exact(double mu, double s, double x0) {
  return [=](const WienerGrid& g) {
    RealPath p;
    p.dim = 1;
    p.times = g.times();
    for (std::size_t k = 0; k <= g.steps; ++k) p.values.push_back(x0 * std::exp((mu - s * s / 2) * g.time(k) + s * g.W(k, 0)));
    return p;
  };
}

RealPath constant_path(std::vector<double> times, std::vector<double> state) {
  RealPath p;
  p.dim = state.size();
  p.times = times;
  for (std::size_t k = 0; k < times.size(); ++k) p.values.insert(p.values.end(), state.begin(), state.end());
  return p;
}

}  // namespace

TEST(EulerMaruyama, ZeroCoefficientsKeepState) {
  SdeSystemSpec sys;
  sys.n = 2;
  sys.m = 3;
  sys.drift = {constant(0), constant(0)};
  sys.diffusion.assign(6, constant(0));
  const std::vector<double> x0{1.5, -2};
  const auto path = euler_maruyama(sys, x0, sample_wiener(3, 1.0, 32, 1, 0));
  ASSERT_EQ(path.size(), 33u);
  for (std::size_t k = 0; k < path.size(); ++k) {
    EXPECT_EQ(path.at(k, 0), 1.5);
    EXPECT_EQ(path.at(k, 1), -2.0);
  }
}

TEST(EulerMaruyama, IdentityDiffusionReproducesWiener) {
  SdeSystemSpec sys;
  sys.n = 2;
  sys.m = 2;
  sys.drift = {constant(0), constant(0)};
  sys.diffusion = {constant(1), constant(0), constant(0), constant(1)};
  const auto g = sample_wiener(2, 2.0, 100, 4, 7);
  const std::vector<double> x0{0.25, -1};
  const auto path = euler_maruyama(sys, x0, g);
  for (std::size_t k = 0; k <= g.steps; ++k) {
    EXPECT_NEAR(path.at(k, 0), 0.25 + g.W(k, 0), 1e-13);
    EXPECT_NEAR(path.at(k, 1), -1 + g.W(k, 1), 1e-13);
  }
}

TEST(EulerMaruyama, MatchesHandWrittenRecursion) {
  const double mu = 0.4, s = 0.9;
  const auto g = sample_wiener(1, 1.0, 50, 2, 3);
  const std::vector<double> x0{1.2};
  const auto path = euler_maruyama(gbm(mu, s), x0, g);
  double x = 1.2;
  for (std::size_t k = 0; k < g.steps; ++k) {
    x = x + mu * x * g.dt() + s * x * g.dW(k, 0);
    EXPECT_EQ(path.at(k + 1, 0), x);
  }
  EXPECT_EQ(path.times, g.times());
}

TEST(EulerMaruyama, BlowUpAndShapeErrors) {
  SdeSystemSpec sys;
  sys.n = 1;
  sys.m = 1;
  sys.drift = {[](double, std::span<const double> x) { return x[0] * x[0]; }};
  sys.diffusion = {constant(0)};
  const std::vector<double> x0{10};
  EXPECT_THROW(euler_maruyama(sys, x0, sample_wiener(1, 1.0, 100, 0, 0)), NonFinite);
  const std::vector<double> bad{1, 2};
  EXPECT_THROW(euler_maruyama(sys, bad, sample_wiener(1, 1.0, 10, 0, 0)), LengthMismatch);
  EXPECT_THROW(euler_maruyama(sys, x0, sample_wiener(2, 1.0, 10, 0, 0)), LengthMismatch);
}

TEST(PathwiseError, Properties) {
  gen::Rng r(91);
  const std::vector<double> times{0, 0.5, 1};
  for (int n = 1; n <= 4; ++n) {
    const double c = r.uniform(0.1, 2);
    const auto a = constant_path(times, std::vector<double>(n, 1.0));
    const auto b = constant_path(times, std::vector<double>(n, 1.0 + c));
    EXPECT_NEAR(pathwise_error(a, b, ErrorMode::sup), c * std::sqrt(n), 1e-14);
    EXPECT_NEAR(pathwise_error(a, b), c * std::sqrt(n), 1e-14);
    EXPECT_EQ(pathwise_error(a, b), pathwise_error(b, a));
    EXPECT_EQ(pathwise_error(a, a, ErrorMode::sup), 0.0);
  }
  // The sup picks the worst node per component before the norm is taken.
  RealPath x, y;
  x.dim = y.dim = 2;
  x.times = y.times = times;
  x.values = {0, 0, 0, 0, 0, 0};
  y.values = {0, 0, 3, 0, 0, 4};
  EXPECT_EQ(pathwise_error(x, y), 4.0);
  EXPECT_EQ(pathwise_error(x, y, ErrorMode::sup), 5.0);
}

TEST(FitLine, ExactOnCollinearPoints) {
  const std::vector<double> x{-3, -2, -1, 0};
  const std::vector<double> y{-0.5, 0, 0.5, 1};
  const auto [slope, icpt] = fit_line(x, y);
  EXPECT_NEAR(slope, 0.5, 1e-15);
  EXPECT_NEAR(icpt, 1.0, 1e-15);
}

TEST(RunParallel, VisitsEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(1000);
  run_parallel(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(run_parallel(100, 3,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Convergence, GbmStrongOrderNearOneHalf) {
  ConvergenceOptions o;
  o.n_paths = 200;
  o.seed = 5;
  const std::vector<double> x0{1.0};
  const auto s = convergence_study(gbm(0.5, 0.8), gbm_exact(0.5, 0.8, 1.0), x0, o);
  ASSERT_EQ(s.steps, (std::vector<std::size_t>{64, 128, 256, 512, 1024}));
  EXPECT_TRUE(s.valid);
  EXPECT_EQ(s.excluded, 0u);
  EXPECT_GE(s.slope, 0.25);
  EXPECT_LE(s.slope, 0.75);
  for (std::size_t l = 1; l < s.rms_error.size(); ++l) EXPECT_LT(s.rms_error[l], s.rms_error[l - 1]);
}

TEST(Convergence, DeterministicEquationGivesOrderOne) {
  SdeSystemSpec sys = gbm(-1.0, 0.0);
  ClosedForm exact = gbm_exact(-1.0, 0.0, 1.0);
  ConvergenceOptions o;
  o.n_paths = 4;
  o.levels = 4;
  o.mode = ErrorMode::sup;
  const std::vector<double> x0{1.0};
  const auto s = convergence_study(sys, exact, x0, o);
  EXPECT_NEAR(s.slope, 1.0, 0.2);
}

TEST(Convergence, WorkerCountDoesNotChangeResult) {
  ConvergenceOptions o;
  o.n_paths = 40;
  o.levels = 3;
  o.seed = 11;
  o.reference_refinement = 2;
  const std::vector<double> x0{0.7};
  o.workers = 1;
  const auto a = convergence_study(gbm(0.3, 0.6), gbm_exact(0.3, 0.6, 0.7), x0, o);
  o.workers = 5;
  const auto b = convergence_study(gbm(0.3, 0.6), gbm_exact(0.3, 0.6, 0.7), x0, o);
  EXPECT_EQ(a.rms_error, b.rms_error);
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Convergence, ExclusionsAndValidity) {
  const std::vector<double> x0{1.0};
  auto flaky = [](std::uint64_t every) -> ClosedForm {
    return [every](const WienerGrid& g) {
      if (g.path_id % every == 0) throw SingularElement("test", 0.0, 0.5);
      return gbm_exact(0.2, 0.3, 1.0)(g);
    };
  };
  ConvergenceOptions o;
  o.n_paths = 100;
  o.levels = 3;
  const auto few = convergence_study(gbm(0.2, 0.3), flaky(50), x0, o);
  EXPECT_EQ(few.excluded, 2u);
  EXPECT_TRUE(few.valid);
  const auto many = convergence_study(gbm(0.2, 0.3), flaky(10), x0, o);
  EXPECT_EQ(many.excluded, 10u);
  EXPECT_FALSE(many.valid);
}

TEST(Convergence, RejectsDegenerateOptions) {
  const std::vector<double> x0{1.0};
  ConvergenceOptions o;
  o.levels = 2;
  EXPECT_THROW(convergence_study(gbm(0, 1), gbm_exact(0, 1, 1), x0, o), Error);
  o.levels = 3;
  o.n_paths = 0;
  EXPECT_THROW(convergence_study(gbm(0, 1), gbm_exact(0, 1, 1), x0, o), Error);
}

TEST(Convergence, CsvAndJson) {
  ConvergenceStudy s;
  s.steps = {4, 8};
  s.dt = {0.25, 0.125};
  s.rms_error = {0.5, 0.25};
  s.slope = 1;
  s.n_paths = 3;
  std::ostringstream os;
  write_study_csv(os, s);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "level,dt,rms_error");
  const auto j = to_json(s);
  for (const char* k : {"steps", "dt", "rms_error", "slope", "intercept", "n_paths", "excluded", "seed", "valid"})
    EXPECT_TRUE(j.contains(k)) << k;
}
