#include "hypersde/paths.hpp"

#include <cmath>
#include <ostream>

#include "hypersde/csv.hpp"
#include "hypersde/errors.hpp"
#include "hypersde/philox.hpp"

namespace hypersde {

std::vector<double> WienerGrid::times() const {
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = time(k);
  return t;
}

double wiener_increment(std::size_t step, std::size_t component, double dt, std::uint64_t seed,
                        std::uint64_t path_id) {
  return std::sqrt(dt) * philox_normal(seed, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(component),
                                       static_cast<std::uint32_t>(path_id), static_cast<std::uint32_t>(path_id >> 32));
}

WienerGrid sample_wiener(std::size_t m, double horizon, std::size_t steps, std::uint64_t seed,
                         std::uint64_t path_id) {
  if (steps == 0) throw LengthMismatch("Wiener grid steps", 1, 0);
  WienerGrid g;
  g.m = m;
  g.horizon = horizon;
  g.steps = steps;
  g.seed = seed;
  g.path_id = path_id;
  g.increments.resize(steps * m);
  g.values.assign((steps + 1) * m, 0.0);
  const double dt = g.dt();
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      const double dw = wiener_increment(k, j, dt, seed, path_id);
      g.increments[k * m + j] = dw;
      g.values[(k + 1) * m + j] = g.values[k * m + j] + dw;
    }
  }
  return g;
}

WienerGrid coarsen(const WienerGrid& grid, std::size_t factor) {
  if (factor == 0 || grid.steps % factor != 0) throw IndivisibleFactor(grid.steps, factor);
  if (factor == 1) return grid;
  WienerGrid c;
  c.m = grid.m;
  c.horizon = grid.horizon;
  c.steps = grid.steps / factor;
  c.seed = grid.seed;
  c.path_id = grid.path_id;
  c.coarsening = grid.coarsening * factor;
  const std::size_t m = grid.m;
  c.values.resize((c.steps + 1) * m);
  c.increments.resize(c.steps * m);
  for (std::size_t k = 0; k <= c.steps; ++k)
    for (std::size_t j = 0; j < m; ++j) c.values[k * m + j] = grid.values[k * factor * m + j];
  for (std::size_t k = 0; k < c.steps; ++k)
    for (std::size_t j = 0; j < m; ++j) c.increments[k * m + j] = c.values[(k + 1) * m + j] - c.values[k * m + j];
  return c;
}

namespace {

void check_samples(std::span<const double> samples, const WienerGrid& grid, const char* what) {
  if (samples.size() != grid.steps && samples.size() != grid.steps + 1)
    throw LengthMismatch(what, grid.steps + 1, samples.size());
}

}  // namespace

std::vector<double> ito_integral(std::span<const double> samples, const WienerGrid& grid, std::size_t j) {
  check_samples(samples, grid, "Ito integrand samples");
  if (j >= grid.m) throw LengthMismatch("Wiener component", grid.m, j + 1);
  std::vector<double> out(grid.steps + 1, 0.0);
  for (std::size_t k = 0; k < grid.steps; ++k) out[k + 1] = out[k] + samples[k] * grid.dW(k, j);
  return out;
}

std::vector<double> lebesgue_integral(std::span<const double> samples, const WienerGrid& grid, Quadrature rule) {
  check_samples(samples, grid, "Lebesgue integrand samples");
  if (rule == Quadrature::trapezoid && samples.size() != grid.steps + 1)
    throw LengthMismatch("trapezoid integrand samples", grid.steps + 1, samples.size());
  const double dt = grid.dt();
  std::vector<double> out(grid.steps + 1, 0.0);
  for (std::size_t k = 0; k < grid.steps; ++k) {
    const double f = rule == Quadrature::left_point ? samples[k] : 0.5 * (samples[k] + samples[k + 1]);
    out[k + 1] = out[k] + f * dt;
  }
  return out;
}

std::vector<double> RealPath::component(std::size_t i) const {
  std::vector<double> c(size());
  for (std::size_t k = 0; k < size(); ++k) c[k] = at(k, i);
  return c;
}

void write_path_csv(std::ostream& os, const RealPath& path, const std::string& prefix) {
  std::vector<std::string> header{"t"};
  for (std::size_t i = 0; i < path.dim; ++i) header.push_back(prefix + std::to_string(i + 1));
  write_csv_row(os, header);
  std::vector<double> row(path.dim + 1);
  for (std::size_t k = 0; k < path.size(); ++k) {
    row[0] = path.times[k];
    for (std::size_t i = 0; i < path.dim; ++i) row[i + 1] = path.at(k, i);
    write_csv_row(os, row);
  }
}

void write_grid_csv(std::ostream& os, const WienerGrid& grid) {
  RealPath p;
  p.times = grid.times();
  p.dim = grid.m;
  p.values = grid.values;
  write_path_csv(os, p, "W");
}

}  // namespace hypersde
