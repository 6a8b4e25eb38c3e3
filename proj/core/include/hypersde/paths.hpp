#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hypersde {

/// m independent standard Wiener paths on t_k = k T / steps, k = 0..steps.
struct WienerGrid {
  std::size_t m = 0;
  double horizon = 0.0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t path_id = 0;
  // Ratio of this grid's step to the sampled grid's step.
  std::size_t coarsening = 1;
  // increments[k * m + j] = W_j(t_{k+1}) - W_j(t_k)
  std::vector<double> increments;
  // values[k * m + j] = W_j(t_k)
  std::vector<double> values;

  double dt() const noexcept { return horizon / static_cast<double>(steps); }
  double time(std::size_t k) const noexcept {
    return horizon * static_cast<double>(k) / static_cast<double>(steps);
  }
  double dW(std::size_t k, std::size_t j) const noexcept { return increments[k * m + j]; }
  double W(std::size_t k, std::size_t j) const noexcept { return values[k * m + j]; }
  std::span<const double> W(std::size_t k) const noexcept { return {values.data() + k * m, m}; }
  std::vector<double> times() const;
};

/// The increment of component j over step k is a Box-Muller normal from one
/// Philox4x32-10 block with counter {step, component, path_id lo, path_id hi}
/// and key {seed lo, seed hi}, scaled by sqrt(dt).
WienerGrid sample_wiener(std::size_t m, double horizon, std::size_t steps, std::uint64_t seed,
                         std::uint64_t path_id);
double wiener_increment(std::size_t step, std::size_t component, double dt, std::uint64_t seed,
                        std::uint64_t path_id);

/// Restriction to every factor-th node. Increments are differences of the
/// restricted values, so coarsening composes exactly. Throws IndivisibleFactor.
WienerGrid coarsen(const WienerGrid& grid, std::size_t factor);

enum class Quadrature { left_point, trapezoid };

/// Cumulative left-point sums of samples[k] * dW_j(t_k); length steps + 1.
/// `samples` holds steps or steps + 1 entries.
std::vector<double> ito_integral(std::span<const double> samples, const WienerGrid& grid, std::size_t j);
/// Cumulative ds-integral on the grid; trapezoid needs steps + 1 samples.
std::vector<double> lebesgue_integral(std::span<const double> samples, const WienerGrid& grid,
                                      Quadrature rule = Quadrature::left_point);

/// States X(t_k) of an n-dimensional real path.
struct RealPath {
  std::vector<double> times;
  std::size_t dim = 0;
  // values[k * dim + i] = X_i(t_k)
  std::vector<double> values;

  std::size_t size() const noexcept { return times.size(); }
  double at(std::size_t k, std::size_t i) const noexcept { return values[k * dim + i]; }
  std::span<const double> state(std::size_t k) const noexcept { return {values.data() + k * dim, dim}; }
  std::vector<double> component(std::size_t i) const;
};

/// Columns t, <prefix>1..<prefix>n.
void write_path_csv(std::ostream& os, const RealPath& path, const std::string& prefix = "X");
void write_grid_csv(std::ostream& os, const WienerGrid& grid);

}  // namespace hypersde
