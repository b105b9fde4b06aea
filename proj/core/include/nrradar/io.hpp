#pragma once

// Run configuration (JSON), drop records (CSV), summaries and ROC tables.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nrradar/montecarlo.hpp"

namespace nrradar {

/// Malformed, unknown or invalid configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failures and unreadable record files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved configuration as indented JSON with every default spelled out.
std::string serialize_config(const RunConfig& config);

/// FNV-1a 64 of the compact resolved JSON, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

const std::vector<std::string>& records_csv_columns();
std::string records_csv_header();
void write_records_csv(std::ostream& out, const std::vector<DropRecord>& records);
/// Throws IoError on a header that differs from records_csv_columns() or a malformed row.
std::vector<DropRecord> read_records_csv(std::istream& in, const std::string& source_name);

void write_roc_csv(std::ostream& out, const std::vector<RocRow>& rows);

struct SummaryMetadata {
  std::string tool_version;
  std::optional<std::uint64_t> master_seed;
  std::string timestamp_utc;
  double wall_clock_s = 0.0;
  std::vector<std::string> config_hashes;
  std::optional<LinkBudget> link;
  std::optional<LinkConfig> link_config;
  std::vector<std::string> sources;
};

std::string summary_json(const MetricsSummary& summary, const SummaryMetadata& meta,
                         const std::vector<RocRow>* roc = nullptr);

std::string utc_timestamp();

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace nrradar
