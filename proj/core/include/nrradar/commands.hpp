#pragma once

// The run / roc / summarize commands, independent of argument parsing.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace nrradar {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2, kExitIo = 3 };

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  int threads = 0;
};

struct RocOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir;
  double eta_min_db = 0.0;
  double eta_max_db = 10.0;
  int eta_steps = 41;
  std::optional<std::uint64_t> seed;
  std::optional<int> drops;
  int threads = 0;
};

struct SummarizeOptions {
  std::vector<std::filesystem::path> files;
  std::optional<std::filesystem::path> out;
};

/// Writes config.resolved.json, records.csv and summary.json.
int command_run(const RunOptions& opts, std::ostream& log, std::ostream& err);

/// Paired target-present / target-absent campaigns; writes roc.csv plus the run files.
int command_roc(const RocOptions& opts, std::ostream& log, std::ostream& err);

/// Merges record files and prints the summary JSON (optionally also to a file).
int command_summarize(const SummarizeOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace nrradar
