#pragma once

// Monostatic sensing channel: aerial path loss, LoS probability, shadow
// fading, the target echo and the static background clutter.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nrradar/array.hpp"
#include "nrradar/common.hpp"
#include "nrradar/prs.hpp"

namespace nrradar {

enum class ScenarioKind { UMiAV, UMaAV };

std::string_view to_string(ScenarioKind kind);
/// Accepts "UMi-AV" / "UMa-AV"; throws std::invalid_argument otherwise.
ScenarioKind scenario_kind_from_string(std::string_view name);

struct Scenario {
  ScenarioKind kind = ScenarioKind::UMiAV;
  double bs_height_m = 10.0;
  double isd_m = 200.0;
  double carrier_hz = 30e9;

  static Scenario defaults(ScenarioKind kind, double carrier_hz = 30e9);
  Vec3 bs_position() const { return {0.0, 0.0, bs_height_m}; }
  double cell_radius_m() const { return isd_m / 2.0; }
  void validate() const;
};

/// Which model family produced a path-loss value.
enum class PathLossBranch { Aerial, Ground };
std::string_view to_string(PathLossBranch branch);

/// Heights at or below this use the terrestrial model family.
inline constexpr double kAerialMinHeightM = 22.5;

struct TargetState {
  Vec3 position_m;
  double radial_velocity_mps = 5.0;  // positive when receding
  double rcs_dbsm = -12.81;
};

struct PathComponent {
  double delay_s = 0.0;
  Direction direction;
  Complex gain;  // complex amplitude at t = 0
  double doppler_hz = 0.0;
  bool is_clutter = true;
};

struct ChannelRealization {
  std::vector<PathComponent> paths;
  bool target_present = false;
  bool los_flag = false;
  double one_way_pl_db = 0.0;     // without shadow fading
  double shadow_fading_db = 0.0;
  PathLossBranch pl_branch = PathLossBranch::Aerial;

  const PathComponent* target() const;
  /// Copy with every path gain multiplied by `factor`.
  ChannelRealization scaled(double factor) const;
};

struct ClutterParams {
  int n_rp = 3;
  int n_subpaths = 8;
  double min_distance_m = 10.0;
  std::optional<double> median_delay_spread_s;  // scenario default when unset
  double lg_delay_spread_std = 0.3;
  double angle_spread_deg = 10.0;

  double median_delay_spread_for(ScenarioKind kind) const;
  void validate() const;
};

struct LosBreakpoints {
  double d1_m;
  double p1_m;
};

/// Aerial LoS breakpoint parameters d1(h), p1(h).
LosBreakpoints aerial_los_breakpoints(ScenarioKind kind, double h_ut_m);

double los_probability(const Scenario& scenario, double h_ut_m, double d2d_m);

struct PathLoss {
  double db;
  PathLossBranch branch;
};

/// One-way path loss. `d2d_m` only matters for the terrestrial branch; pass a
/// negative value to derive it from d3d and the height difference.
PathLoss path_loss(const Scenario& scenario, bool los, double d3d_m, double h_ut_m, double d2d_m = -1.0);
double path_loss_db(const Scenario& scenario, bool los, double d3d_m, double h_ut_m);

double shadow_fading_std_db(const Scenario& scenario, bool los, double h_uav_m);

double target_amplitude(double round_trip_pl_db, double rcs_dbsm, double wavelength_m);

Complex st_slow_time_gain(double a_q, double doppler_hz, double slow_time_index, double slow_time_step_s);

/// Monostatic Doppler 2 v / lambda.
double doppler_shift_hz(double radial_velocity_mps, double wavelength_m);

std::vector<PathComponent> generate_clutter(const Scenario& scenario, const ClutterParams& params, Rng& rng);

/// Target echo plus clutter. Draw order: LoS, shadow fading, clutter.
ChannelRealization build_channel(const Scenario& scenario, const TargetState& target, Vec3 bs_position,
                                 const ClutterParams& clutter, Rng& rng);

/// Clutter-only realization used for target-absent trials.
ChannelRealization build_clutter_channel(const Scenario& scenario, const ClutterParams& clutter, Rng& rng);

/// Received sample on subcarrier k of PRS symbol l at absolute time t_s:
/// sum_p gain_p(t) (w^H a_p)(a_p^H f) exp(-j 2 pi m K df tau_p) s_{k,l} + n,
/// where m is the active-tone index of k.
Complex evaluate_observation(const ChannelRealization& realization, const PrsConfig& prs, const ResourceGrid& grid,
                             const ArrayGeometry& geometry, std::span<const Complex> w, std::span<const Complex> f,
                             int k, int l, double t_s, double noise_std, Rng& rng);

}  // namespace nrradar
