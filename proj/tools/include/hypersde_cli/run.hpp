#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace hypersde::cli {

enum ExitCode : int { ok = 0, config_error = 1, math_error = 2, validation_failure = 3 };

const std::vector<std::string>& task_names();

struct RunRequest {
  std::string task;
  nlohmann::json config;
  // Relative paths inside the config resolve against this directory.
  std::filesystem::path base_dir;
  // Command-line overrides.
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

struct RunResult {
  int exit_code = ok;
  // One-line summary printed on stdout.
  nlohmann::json summary;
  // Error text for stderr, empty on success.
  std::string message;
};

/// Dispatches to the task, writes artifacts under the output directory and
/// never throws.
RunResult run(const RunRequest& request);

/// Reads the config file and runs it.
RunResult run_file(const std::string& task, const std::filesystem::path& config_path,
                   std::optional<std::filesystem::path> out = {}, std::optional<std::uint64_t> seed = {},
                   std::optional<std::size_t> workers = {});

}  // namespace hypersde::cli
