#pragma once

// Command-line entry points. Exit codes: 0 success, 1 I/O failure,
// 2 config validation failure, 3 runtime failure.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rlmpc::cli {

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out;  // empty: <output root>/rlmpc-out
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;  // section.key=value
};

struct ValidateOptions {
  std::filesystem::path config;
};

struct ReportOptions {
  std::filesystem::path dir;
};

/// Output root used when --out is not given: $RLMPC_OUT_ROOT or ".".
std::filesystem::path default_output_root();

/// Runs the configured benchmark and writes episode CSVs, plot data files,
/// report.json, effective_config.json and manifest.json into the output
/// directory. Outputs other than the manifest timestamp are deterministic.
int cmd_run(const RunOptions& opts);

/// Parses and validates only; prints the resolved effective configuration.
int cmd_validate(const ValidateOptions& opts);

/// Regenerates report.json and the plot files from persisted episode logs,
/// without re-simulation.
int cmd_report(const ReportOptions& opts);

int run_main(int argc, const char* const* argv);

}  // namespace rlmpc::cli
