#include "hypersde/sim.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <ostream>
#include <thread>

#include "hypersde/csv.hpp"
#include "hypersde/errors.hpp"

namespace hypersde {

RealPath euler_maruyama(const SdeSystemSpec& sys, std::span<const double> x0, const WienerGrid& grid) {
  if (x0.size() != sys.n) throw LengthMismatch("initial state", sys.n, x0.size());
  if (grid.m != sys.m) throw LengthMismatch("Wiener components", sys.m, grid.m);
  const std::size_t n = sys.n;
  const std::size_t m = sys.m;
  const double dt = grid.dt();
  RealPath out;
  out.times = grid.times();
  out.dim = n;
  out.values.resize((grid.steps + 1) * n);
  std::copy(x0.begin(), x0.end(), out.values.begin());
  std::vector<double> next(n);
  for (std::size_t k = 0; k < grid.steps; ++k) {
    const double t = out.times[k];
    const std::span<const double> x(out.values.data() + k * n, n);
    for (std::size_t i = 0; i < n; ++i) {
      double v = x[i] + sys.drift[i](t, x) * dt;
      for (std::size_t j = 0; j < m; ++j) v += sys.diffusion[i * m + j](t, x) * grid.dW(k, j);
      if (!std::isfinite(v)) throw NonFinite(k + 1, out.times[k + 1]);
      next[i] = v;
    }
    std::copy(next.begin(), next.end(), out.values.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  }
  return out;
}

double pathwise_error(const RealPath& exact, const RealPath& approx, ErrorMode mode) {
  if (exact.dim != approx.dim) throw LengthMismatch("path dimension", exact.dim, approx.dim);
  if (exact.size() != approx.size()) throw LengthMismatch("path length", exact.size(), approx.size());
  if (exact.size() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < exact.dim; ++i) {
    double e = 0.0;
    if (mode == ErrorMode::endpoint) {
      const std::size_t k = exact.size() - 1;
      e = std::abs(exact.at(k, i) - approx.at(k, i));
    } else {
      for (std::size_t k = 0; k < exact.size(); ++k) e = std::max(e, std::abs(exact.at(k, i) - approx.at(k, i)));
    }
    total += e * e;
  }
  return std::sqrt(total);
}

std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

void run_parallel(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

namespace {

RealPath restrict_to(const RealPath& fine, std::size_t factor) {
  RealPath c;
  c.dim = fine.dim;
  for (std::size_t k = 0; k < fine.size(); k += factor) {
    c.times.push_back(fine.times[k]);
    const auto s = fine.state(k);
    c.values.insert(c.values.end(), s.begin(), s.end());
  }
  return c;
}

}  // namespace

ConvergenceStudy convergence_study(const SdeSystemSpec& sys, const ClosedForm& exact, std::span<const double> x0,
                                   const ConvergenceOptions& opts) {
  if (opts.levels < 3) throw Error("convergence study needs at least 3 levels");
  if (opts.base_steps == 0 || opts.n_paths == 0 || opts.reference_refinement == 0)
    throw Error("convergence study needs positive base_steps, n_paths and reference_refinement");
  const std::size_t L = opts.levels;
  std::vector<std::size_t> steps(L);
  for (std::size_t l = 0; l < L; ++l) steps[l] = opts.base_steps << l;
  const std::size_t fine = steps.back() * opts.reference_refinement;
  const std::vector<double> x0v(x0.begin(), x0.end());

  // Squared errors per path and level; empty when the path is excluded.
  std::vector<std::optional<std::vector<double>>> per_path(opts.n_paths);
  auto run_path = [&](std::size_t path) {
    try {
      const WienerGrid g = sample_wiener(sys.m, opts.horizon, fine, opts.seed, path);
      const RealPath ref = exact(g);
      std::vector<double> sq(L);
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t factor = fine / steps[l];
        const RealPath em = euler_maruyama(sys, x0v, coarsen(g, factor));
        const double e = pathwise_error(restrict_to(ref, factor), em, opts.mode);
        if (!std::isfinite(e)) return;
        sq[l] = e * e;
      }
      per_path[path] = std::move(sq);
    } catch (const MathDomainError&) {
    }
  };

  run_parallel(opts.n_paths, opts.workers, run_path);

  ConvergenceStudy s;
  s.steps = steps;
  s.n_paths = opts.n_paths;
  s.seed = opts.seed;
  std::vector<double> sum(L, 0.0);
  std::size_t used = 0;
  for (const auto& r : per_path) {
    if (!r) {
      ++s.excluded;
      continue;
    }
    ++used;
    for (std::size_t l = 0; l < L; ++l) sum[l] += (*r)[l];
  }
  std::vector<double> lx, ly;
  for (std::size_t l = 0; l < L; ++l) {
    const double dt = opts.horizon / static_cast<double>(steps[l]);
    s.dt.push_back(dt);
    s.rms_error.push_back(used ? std::sqrt(sum[l] / static_cast<double>(used)) : std::nan(""));
    lx.push_back(std::log2(dt));
    ly.push_back(std::log2(s.rms_error.back()));
  }
  std::tie(s.slope, s.intercept) = fit_line(lx, ly);
  s.valid = used > 0 && static_cast<double>(s.excluded) <= opts.max_exclusion_fraction * static_cast<double>(s.n_paths);
  return s;
}

void write_study_csv(std::ostream& os, const ConvergenceStudy& s) {
  const std::string header[] = {"level", "dt", "rms_error"};
  write_csv_row(os, header);
  for (std::size_t l = 0; l < s.steps.size(); ++l) {
    const std::string row[] = {std::to_string(l), format_double(s.dt[l]), format_double(s.rms_error[l])};
    write_csv_row(os, row);
  }
}

nlohmann::json to_json(const ConvergenceStudy& s) {
  return {{"steps", s.steps},       {"dt", s.dt},         {"rms_error", s.rms_error}, {"slope", s.slope},
          {"intercept", s.intercept}, {"n_paths", s.n_paths}, {"excluded", s.excluded}, {"seed", s.seed},
          {"valid", s.valid}};
}

}  // namespace hypersde
