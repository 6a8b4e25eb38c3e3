#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hypersde_cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Closed-form solutions of SDE systems by hypercomplexification, checked against Euler-Maruyama"};
  std::string task, config, out;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  app.add_option("task", task, "Task to run")->required()->check(CLI::IsMember(hypersde::cli::task_names()));
  app.add_option("--config", config, "JSON run configuration")->required();
  auto* out_opt = app.add_option("--out", out, "Output directory (overrides config 'out')");
  auto* seed_opt = app.add_option("--seed", seed, "Seed (overrides config 'seed')");
  auto* workers_opt = app.add_option("--workers", workers, "Worker threads, 0 for all cores");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hypersde::cli::config_error;
  }

  const auto result = hypersde::cli::run_file(
      task, config, *out_opt ? std::optional<std::filesystem::path>(out) : std::nullopt,
      *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt,
      *workers_opt ? std::optional<std::size_t>(workers) : std::nullopt);
  std::cout << result.summary.dump() << '\n';
  if (!result.message.empty()) std::cerr << "hypersde: " << result.message << '\n';
  return result.exit_code;
}
