#pragma once

// Campaign driver: target drops, link budget, parallel per-drop processing,
// ROC sweeps and metric aggregation.

#include <optional>
#include <string>
#include <vector>

#include "nrradar/array.hpp"
#include "nrradar/channel.hpp"
#include "nrradar/prs.hpp"
#include "nrradar/radar.hpp"

namespace nrradar {

enum class DropRegion { Sector, Disc, Hexagon };
std::string_view to_string(DropRegion r);
DropRegion drop_region_from_string(std::string_view name);

struct CodebookConfig {
  int n_az = 61;
  int n_el = 45;
  double az_min_deg = -60.0;
  double az_max_deg = 60.0;
  double el_min_deg = 0.0;
  double el_max_deg = 88.0;

  AngleSpan az_span() const { return {deg_to_rad(az_min_deg), deg_to_rad(az_max_deg)}; }
  AngleSpan el_span() const { return {deg_to_rad(el_min_deg), deg_to_rad(el_max_deg)}; }
};

struct ArrayConfig {
  int n_rows = 32;
  int n_cols = 32;
  double spacing_wavelengths = 0.5;
  double tilt_deg = 45.0;  // panel uptilt; zero points boresight at the horizon

  ArrayGeometry geometry() const { return {n_rows, n_cols, spacing_wavelengths, deg_to_rad(tilt_deg)}; }
};

struct TargetConfig {
  double rcs_dbsm = -12.81;
  double radial_velocity_mps = 5.0;
  DropRegion region = DropRegion::Sector;
  double min_distance_m = 10.0;
};

struct LinkConfig {
  double eirp_dbm = 75.0;
  double noise_figure_db = 10.0;
};

struct DetectionSettings {
  double eta_db = 3.4;
  DetectionStatistic statistic = DetectionStatistic::Averaged;
  int range_oversampling = 1;
  bool clutter_suppression = true;
};

struct RunConfig {
  Scenario scenario = Scenario::defaults(ScenarioKind::UMiAV);
  std::vector<double> uav_heights_m{25.0, 50.0, 100.0, 200.0};
  int drops_per_config = 4000;
  bool with_target = true;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 selects the hardware concurrency; not part of the resolved config
  PrsConfig prs;
  ArrayConfig array;
  CodebookConfig codebook;
  TargetConfig target;
  ClutterParams clutter;
  SweepSettings sweep;
  DetectionSettings detection;
  LinkConfig link;

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
};

struct LinkBudget {
  double tx_power_dbm = 0.0;            // EIRP minus array gain
  double subcarrier_power_dbm = 0.0;    // tx power spread over all 12 n_rb subcarriers
  double thermal_floor_dbm = 0.0;       // -174 + 10 log10(K df N_active), before NF
  double noise_power_per_tone_dbm = 0.0;
  double noise_std = 0.0;               // sqrt(mW) per active tone
  double signal_scale = 0.0;            // sqrt(mW) * N, applied to channel gains
};

LinkBudget link_budget(const RunConfig& config);

TargetState drop_target(const Scenario& scenario, const TargetConfig& target, const CodebookConfig& codebook,
                        double h_uav_m, Rng& rng);

/// Independent stream per drop, keyed by (master_seed, drop_id).
Rng drop_rng(std::uint64_t master_seed, std::uint64_t drop_id);

struct DropRecord {
  std::uint64_t drop_id = 0;
  ScenarioKind scenario = ScenarioKind::UMiAV;
  double h_uav_m = 0.0;
  std::optional<Vec3> true_position_m;
  bool los = false;
  bool target_present = false;
  bool detected = false;
  double par_db = 0.0;
  std::optional<Vec3> estimated_position_m;
  std::optional<double> position_error_m;
  std::optional<std::size_t> beam_index;
  std::optional<PathLossBranch> pl_branch;
  std::string status = "ok";
  std::string config_hash;

  friend bool operator==(const DropRecord&, const DropRecord&) = default;
};

/// Shared, immutable per-campaign state.
struct CampaignContext {
  explicit CampaignContext(const RunConfig& config);

  RunConfig config;
  PrsBank bank;
  Codebook codebook;
  LinkBudget budget;
};

DropRecord run_drop(const CampaignContext& ctx, std::size_t height_index, std::size_t drop_index);

std::vector<DropRecord> run_campaign(const RunConfig& config, const std::string& config_hash = {});

struct RocRow {
  double eta_db;
  double p_fa;
  double p_d;
};

std::vector<RocRow> roc_sweep(const std::vector<DropRecord>& with_target, const std::vector<DropRecord>& without_target,
                              const std::vector<double>& eta_grid);

std::vector<double> linear_eta_grid(double eta_min, double eta_max, int steps);

/// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

struct GroupMetrics {
  ScenarioKind scenario = ScenarioKind::UMiAV;
  double h_uav_m = 0.0;
  std::size_t n_target = 0;
  std::size_t n_detected = 0;
  std::size_t n_absent = 0;
  std::size_t n_false_alarm = 0;
  std::size_t n_failed = 0;
  std::optional<double> p_md;
  std::optional<double> p_fa;
  std::vector<double> errors_m;  // sorted, detected target-present drops only
  std::optional<double> error_mean_m;
  std::optional<double> error_p50_m;
  std::optional<double> error_p90_m;
  std::optional<double> error_p99_m;

  /// Empirical CDF evaluated at x.
  double error_cdf(double x) const;
};

struct MetricsSummary {
  std::vector<GroupMetrics> groups;  // ordered by (scenario, height)

  const GroupMetrics* find(ScenarioKind kind, double h_uav_m) const;
};

MetricsSummary aggregate(const std::vector<DropRecord>& records);

}  // namespace nrradar
