#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypersde/paths.hpp"
#include "hypersde/solvers.hpp"

namespace hypersde {

/// X_{k+1} = X_k + a(t_k, X_k) dt + b(t_k, X_k) dW_k. Throws NonFinite.
RealPath euler_maruyama(const SdeSystemSpec& system, std::span<const double> x0, const WienerGrid& grid);

enum class ErrorMode { endpoint, sup };

/// Per component |difference| at the endpoint or its sup over the grid, then
/// the Euclidean norm across components.
double pathwise_error(const RealPath& exact, const RealPath& approx, ErrorMode mode = ErrorMode::endpoint);

/// Closed-form solution evaluated on a grid.
using ClosedForm = std::function<RealPath(const WienerGrid&)>;

struct ConvergenceOptions {
  double horizon = 1.0;
  std::size_t base_steps = 64;
  std::size_t levels = 5;
  std::size_t n_paths = 200;
  std::uint64_t seed = 0;
  // 0 picks std::thread::hardware_concurrency().
  std::size_t workers = 0;
  // The closed form is evaluated on a grid this many times finer than the
  // finest EM level.
  std::size_t reference_refinement = 1;
  ErrorMode mode = ErrorMode::endpoint;
  double max_exclusion_fraction = 0.05;
};

struct ConvergenceStudy {
  std::vector<std::size_t> steps;
  std::vector<double> dt;
  std::vector<double> rms_error;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n_paths = 0;
  std::size_t excluded = 0;
  std::uint64_t seed = 0;
  // False when more than max_exclusion_fraction of the paths were excluded.
  bool valid = true;
};

/// Needs levels >= 3. Samples the reference grid once per path, coarsens it to steps
/// base_steps * 2^L for L < levels, runs EM on each level and compares with
/// the closed form restricted to the level nodes. Paths whose EM or closed
/// form raises a MathDomainError or yields a non-finite error are excluded.
/// Work is spread over threads and reduced in path order, so the result does
/// not depend on the worker count.
ConvergenceStudy convergence_study(const SdeSystemSpec& system, const ClosedForm& exact, std::span<const double> x0,
                                   const ConvergenceOptions& opts);

/// Calls fn(i) for i < count on up to `workers` threads (0 = hardware
/// concurrency). The first exception stops the pool and is rethrown.
void run_parallel(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Least-squares line y = slope x + intercept.
std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y);

/// Columns level, dt, rms_error.
void write_study_csv(std::ostream& os, const ConvergenceStudy& study);
nlohmann::json to_json(const ConvergenceStudy& study);

}  // namespace hypersde
