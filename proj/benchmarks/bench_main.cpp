#include <benchmark/benchmark.h>

#include <vector>

#include "hypersde/algebra.hpp"
#include "hypersde/analytic.hpp"
#include "hypersde/paths.hpp"
#include "hypersde/sim.hpp"
#include "hypersde/solvers.hpp"

using namespace hypersde;

namespace {

Algebra pick(int which) {
  switch (which) {
    case 0: return make_cp(-1);
    case 1: return make_a34();
    default: return direct_product(make_cp(-1), make_a34());
  }
}

std::vector<double> ramp(std::size_t n, double lo) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + 0.1 * static_cast<double>(i);
  return v;
}

}  // namespace

static void BM_Multiply(benchmark::State& state) {
  const Algebra a = pick(static_cast<int>(state.range(0)));
  const HValue u = element(a, ramp(a.dim(), 0.3)), v = element(a, ramp(a.dim(), -0.2));
  for (auto _ : state) benchmark::DoNotOptimize(multiply(a, u, v));
  state.SetLabel(a.label());
}
BENCHMARK(BM_Multiply)->Arg(0)->Arg(1)->Arg(2);

static void BM_Exp(benchmark::State& state) {
  const Algebra a = pick(static_cast<int>(state.range(0)));
  const HValue u = element(a, ramp(a.dim(), 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(hc_exp(a, u));
  state.SetLabel(a.label());
}
BENCHMARK(BM_Exp)->Arg(0)->Arg(1)->Arg(2);

static void BM_ExpSeries(benchmark::State& state) {
  const Algebra a = pick(static_cast<int>(state.range(0)));
  const HValue u = element(a, ramp(a.dim(), 0.3));
  for (auto _ : state) benchmark::DoNotOptimize(hc_exp_series(a, u));
  state.SetLabel(a.label());
}
BENCHMARK(BM_ExpSeries)->Arg(0)->Arg(1)->Arg(2);

static void BM_Invert(benchmark::State& state) {
  const Algebra a = pick(static_cast<int>(state.range(0)));
  const HValue u = element(a, ramp(a.dim(), 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(invert(a, u));
  state.SetLabel(a.label());
}
BENCHMARK(BM_Invert)->Arg(0)->Arg(1)->Arg(2);

static void BM_SampleWiener(benchmark::State& state) {
  const auto steps = static_cast<std::size_t>(state.range(0));
  std::uint64_t id = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_wiener(2, 1.0, steps, 1, id++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * steps));
}
BENCHMARK(BM_SampleWiener)->Arg(1024)->Arg(16384);

static void BM_SolveLinearBase(benchmark::State& state) {
  const Algebra a = make_a34();
  LinearBaseCoeffs c;
  for (double v : {0.1, 0.0, 0.2}) c.f1.push_back(expr::literal(v));
  for (double v : {0.2, 0.1, 0.0}) c.f2.push_back(expr::literal(v));
  for (double v : {0.1, 0.0, 0.1}) c.g1.push_back(expr::literal(v));
  for (double v : {0.3, 0.1, 0.2}) c.g2.push_back(expr::literal(v));
  const auto g = sample_wiener(3, 1.0, static_cast<std::size_t>(state.range(0)), 1, 0);
  const HValue z0 = element(a, {1.0, 0.5, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(solve_linear_base(a, c, z0, g));
}
BENCHMARK(BM_SolveLinearBase)->Arg(1024);

static void BM_SolveLvRoutes(benchmark::State& state) {
  const CpLvCoeffs c{0.5, 0.1, 1.0, 0.2, 0.3, 0.1};
  const Algebra cp = make_cp(-1);
  const LvCoeffs base = to_base(cp, c, {1.0, 0.5});
  const auto g = sample_wiener(2, 1.0, 1024, 1, 0);
  const bool real_route = state.range(0) == 1;
  for (auto _ : state) {
    if (real_route) benchmark::DoNotOptimize(solve_lv_cp(-1, c, {1.0, 0.5}, g));
    else benchmark::DoNotOptimize(solve_lv_base(cp, base, g));
  }
  state.SetLabel(real_route ? "cp" : "base");
}
BENCHMARK(BM_SolveLvRoutes)->Arg(0)->Arg(1);

static void BM_EulerMaruyamaLv(benchmark::State& state) {
  const Algebra cp = make_cp(-1);
  const LvCoeffs base = to_base(cp, {0.5, 0.1, 1.0, 0.2, 0.3, 0.1}, {1.0, 0.5});
  const auto sys = expand_lv_system(cp, base);
  const auto g = sample_wiener(2, 1.0, static_cast<std::size_t>(state.range(0)), 1, 0);
  const std::vector<double> x0{1.0, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(euler_maruyama(sys, x0, g));
}
BENCHMARK(BM_EulerMaruyamaLv)->Arg(1024);

BENCHMARK_MAIN();
