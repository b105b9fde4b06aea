#include "nrradar/channel.hpp"

#include <algorithm>

namespace nrradar {

std::string_view to_string(ScenarioKind kind) { return kind == ScenarioKind::UMiAV ? "UMi-AV" : "UMa-AV"; }

ScenarioKind scenario_kind_from_string(std::string_view name) {
  if (name == "UMi-AV") return ScenarioKind::UMiAV;
  if (name == "UMa-AV") return ScenarioKind::UMaAV;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (expected UMi-AV or UMa-AV)");
}

std::string_view to_string(PathLossBranch branch) { return branch == PathLossBranch::Aerial ? "aerial" : "ground"; }

Scenario Scenario::defaults(ScenarioKind kind, double carrier_hz) {
  if (kind == ScenarioKind::UMiAV) return {kind, 10.0, 200.0, carrier_hz};
  return {kind, 25.0, 500.0, carrier_hz};
}

void Scenario::validate() const {
  if (!(bs_height_m > 0.0)) throw std::invalid_argument("scenario.bs_height_m: must be positive");
  if (!(isd_m > 0.0)) throw std::invalid_argument("scenario.isd_m: must be positive");
  if (!(carrier_hz > 0.0)) throw std::invalid_argument("scenario.carrier_hz: must be positive");
}

const PathComponent* ChannelRealization::target() const {
  for (const auto& p : paths)
    if (!p.is_clutter) return &p;
  return nullptr;
}

ChannelRealization ChannelRealization::scaled(double factor) const {
  ChannelRealization out = *this;
  for (auto& p : out.paths) p.gain *= factor;
  return out;
}

double ClutterParams::median_delay_spread_for(ScenarioKind kind) const {
  if (median_delay_spread_s) return *median_delay_spread_s;
  return kind == ScenarioKind::UMiAV ? 100e-9 : 300e-9;
}

void ClutterParams::validate() const {
  if (n_rp < 0) throw std::invalid_argument("clutter.n_rp: must be >= 0");
  if (n_subpaths < 1) throw std::invalid_argument("clutter.n_subpaths: must be >= 1");
  if (!(min_distance_m > 0.0)) throw std::invalid_argument("clutter.min_distance_m: must be positive");
  if (median_delay_spread_s && !(*median_delay_spread_s > 0.0))
    throw std::invalid_argument("clutter.median_delay_spread_s: must be positive");
  if (lg_delay_spread_std < 0.0) throw std::invalid_argument("clutter.lg_delay_spread_std: must be >= 0");
  if (angle_spread_deg < 0.0) throw std::invalid_argument("clutter.angle_spread_deg: must be >= 0");
}

LosBreakpoints aerial_los_breakpoints(ScenarioKind kind, double h_ut_m) {
  const double lh = std::log10(h_ut_m);
  if (kind == ScenarioKind::UMaAV) return {std::max(460.0 * lh - 700.0, 18.0), 4300.0 * lh - 3800.0};
  return {std::max(294.05 * lh - 432.94, 18.0), 233.98 * lh - 0.95};
}

namespace {

double blend(double d1, double p1, double d2d) {
  if (d2d <= d1) return 1.0;
  return d1 / d2d + std::exp(-d2d / p1) * (1.0 - d1 / d2d);
}

double ground_los_probability(ScenarioKind kind, double h_ut, double d2d) {
  if (kind == ScenarioKind::UMiAV) return blend(18.0, 36.0, d2d);
  if (d2d <= 18.0) return 1.0;
  const double c = h_ut <= 13.0 ? 0.0 : std::pow((h_ut - 13.0) / 10.0, 1.5);
  return blend(18.0, 63.0, d2d) * (1.0 + c * 1.25 * std::pow(d2d / 100.0, 3.0) * std::exp(-d2d / 150.0));
}

double ground_path_loss(ScenarioKind kind, bool los, double d3d, double d2d, double h_bs, double h_ut, double fc_hz) {
  const double fc = fc_hz / 1e9;
  const double h = std::clamp(h_ut, 1.5, kAerialMinHeightM);
  // Effective environment height of 1 m.
  const double d_bp = 4.0 * (h_bs - 1.0) * (h - 1.0) * fc_hz / kSpeedOfLight;
  const double lf = 20.0 * std::log10(fc);
  const double ld = std::log10(d3d);
  double pl_los = 0.0;
  if (kind == ScenarioKind::UMiAV) {
    pl_los = d2d <= d_bp ? 32.4 + 21.0 * ld + lf
                         : 32.4 + 40.0 * ld + lf - 9.5 * std::log10(d_bp * d_bp + (h_bs - h) * (h_bs - h));
  } else {
    pl_los = d2d <= d_bp ? 28.0 + 22.0 * ld + lf
                         : 28.0 + 40.0 * ld + lf - 9.0 * std::log10(d_bp * d_bp + (h_bs - h) * (h_bs - h));
  }
  if (los) return pl_los;
  const double pl_nlos = kind == ScenarioKind::UMiAV
                             ? 35.3 * ld + 22.4 + 21.3 * std::log10(fc) - 0.3 * (h - 1.5)
                             : 13.54 + 39.08 * ld + lf - 0.6 * (h - 1.5);
  return std::max(pl_los, pl_nlos);
}

double aerial_path_loss(ScenarioKind kind, bool los, double d3d, double h_ut, double fc_hz) {
  const double fc = fc_hz / 1e9;
  const double lf = 20.0 * std::log10(fc);
  const double ld = std::log10(d3d);
  const double lh = std::log10(h_ut);
  if (kind == ScenarioKind::UMaAV) {
    if (los) return 28.0 + 22.0 * ld + lf;
    return -17.5 + (46.0 - 7.0 * lh) * ld + 20.0 * std::log10(40.0 * kPi * fc / 3.0);
  }
  const double pl_los = 30.9 + (22.25 - 0.5 * lh) * ld + lf;
  if (los) return pl_los;
  return std::max(pl_los, 32.4 + (43.2 - 7.6 * lh) * ld + lf);
}

double laplacian(Rng& rng, double std_dev) {
  if (std_dev <= 0.0) return 0.0;
  std::exponential_distribution<double> mag(std::sqrt(2.0) / std_dev);
  std::bernoulli_distribution sign(0.5);
  const double v = mag(rng);
  return sign(rng) ? v : -v;
}

double wrap_azimuth(double az) {
  az = std::fmod(az + kPi, 2.0 * kPi);
  if (az < 0.0) az += 2.0 * kPi;
  return az - kPi;
}

}  // namespace

double los_probability(const Scenario& scenario, double h_ut_m, double d2d_m) {
  if (h_ut_m < 0.0 || d2d_m < 0.0) throw std::invalid_argument("los_probability: negative height or distance");
  double p = 0.0;
  if (h_ut_m <= kAerialMinHeightM) {
    p = ground_los_probability(scenario.kind, h_ut_m, d2d_m);
  } else if (scenario.kind == ScenarioKind::UMaAV && h_ut_m > 100.0) {
    p = 1.0;
  } else {
    const auto bp = aerial_los_breakpoints(scenario.kind, h_ut_m);
    p = blend(bp.d1_m, bp.p1_m, d2d_m);
  }
  return std::clamp(p, 0.0, 1.0);
}

PathLoss path_loss(const Scenario& scenario, bool los, double d3d_m, double h_ut_m, double d2d_m) {
  if (!(d3d_m > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
  if (h_ut_m > kAerialMinHeightM)
    return {aerial_path_loss(scenario.kind, los, d3d_m, h_ut_m, scenario.carrier_hz), PathLossBranch::Aerial};
  if (d2d_m < 0.0) {
    const double dh = scenario.bs_height_m - h_ut_m;
    d2d_m = std::sqrt(std::max(d3d_m * d3d_m - dh * dh, 0.0));
  }
  return {ground_path_loss(scenario.kind, los, d3d_m, d2d_m, scenario.bs_height_m, h_ut_m, scenario.carrier_hz),
          PathLossBranch::Ground};
}

double path_loss_db(const Scenario& scenario, bool los, double d3d_m, double h_ut_m) {
  return path_loss(scenario, los, d3d_m, h_ut_m).db;
}

double shadow_fading_std_db(const Scenario& scenario, bool los, double h_uav_m) {
  if (scenario.kind == ScenarioKind::UMiAV) return los ? std::max(5.0 * std::exp(-0.01 * h_uav_m), 2.0) : 8.0;
  return los ? 4.64 * std::exp(-0.0066 * h_uav_m) : 6.0;
}

double target_amplitude(double round_trip_pl_db, double rcs_dbsm, double wavelength_m) {
  if (!(wavelength_m > 0.0)) throw std::invalid_argument("target_amplitude: wavelength must be positive");
  const double sigma = std::pow(10.0, rcs_dbsm / 10.0);
  return std::pow(10.0, -round_trip_pl_db / 20.0) * std::sqrt(4.0 * kPi * sigma / (wavelength_m * wavelength_m));
}

Complex st_slow_time_gain(double a_q, double doppler_hz, double slow_time_index, double slow_time_step_s) {
  return std::polar(a_q, 2.0 * kPi * doppler_hz * slow_time_index * slow_time_step_s);
}

double doppler_shift_hz(double radial_velocity_mps, double wavelength_m) {
  return 2.0 * radial_velocity_mps / wavelength_m;
}

std::vector<PathComponent> generate_clutter(const Scenario& scenario, const ClutterParams& params, Rng& rng) {
  params.validate();
  std::vector<PathComponent> out;
  if (params.n_rp == 0) return out;

  const double r_max = scenario.cell_radius_m();
  if (r_max < params.min_distance_m) throw std::invalid_argument("clutter: cell radius below minimum RP distance");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> dist(params.min_distance_m, r_max);
  std::uniform_real_distribution<double> height(0.0, scenario.bs_height_m);
  std::uniform_real_distribution<double> azimuth(-kPi, kPi);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::normal_distribution<double> normal(0.0, 1.0);

  const double spread = deg_to_rad(params.angle_spread_deg);
  const double rp_scale = 1.0 / std::sqrt(static_cast<double>(params.n_rp));
  const double lg_median = std::log10(params.median_delay_spread_for(scenario.kind));
  const std::size_t n_sub = static_cast<std::size_t>(params.n_subpaths);
  std::vector<double> excess(n_sub);

  out.reserve(static_cast<std::size_t>(params.n_rp) * n_sub);
  for (int rp = 0; rp < params.n_rp; ++rp) {
    const double d2d = dist(rng);
    const double h = height(rng);
    const double az = azimuth(rng);
    const Vec3 rel{d2d * std::cos(az), d2d * std::sin(az), h - scenario.bs_height_m};
    const double d3d = rel.norm();
    const Direction dir = direction_of(rel);

    const PathLoss pl = path_loss(scenario, false, d3d, h, d2d);
    const double sf = shadow_fading_std_db(scenario, false, h) * normal(rng);
    const double rp_power = std::pow(10.0, -2.0 * (pl.db + sf) / 10.0);
    const double ds = std::pow(10.0, lg_median + params.lg_delay_spread_std * normal(rng));

    for (auto& e : excess) e = -ds * std::log(1.0 - u01(rng));
    std::sort(excess.begin(), excess.end());
    const double first = excess.front();
    double total = 0.0;
    for (auto& e : excess) {
      e -= first;
      total += std::exp(-e / ds);
    }

    for (std::size_t n = 0; n < n_sub; ++n) {
      PathComponent p;
      p.delay_s = 2.0 * d3d / kSpeedOfLight + excess[n];
      p.direction.azimuth_rad = wrap_azimuth(dir.azimuth_rad + laplacian(rng, spread));
      p.direction.elevation_rad = std::clamp(dir.elevation_rad + laplacian(rng, spread), -kPi / 2, kPi / 2);
      const double amp = std::sqrt(rp_power * std::exp(-excess[n] / ds) / total) * rp_scale;
      p.gain = std::polar(amp, phase(rng));
      p.doppler_hz = 0.0;
      p.is_clutter = true;
      out.push_back(p);
    }
  }
  return out;
}

ChannelRealization build_channel(const Scenario& scenario, const TargetState& target, Vec3 bs_position,
                                 const ClutterParams& clutter, Rng& rng) {
  const Vec3 rel = target.position_m - bs_position;
  const double d3d = rel.norm();
  if (!(d3d > 0.0)) throw std::invalid_argument("build_channel: target coincides with the BS");
  const double h = target.position_m.z;
  if (h < 0.0) throw std::invalid_argument("build_channel: target height must be >= 0");

  ChannelRealization out;
  out.target_present = true;
  const double d2d = rel.horizontal_norm();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  out.los_flag = u01(rng) < los_probability(scenario, h, d2d);
  const PathLoss pl = path_loss(scenario, out.los_flag, d3d, h, d2d);
  out.one_way_pl_db = pl.db;
  out.pl_branch = pl.branch;
  std::normal_distribution<double> normal(0.0, 1.0);
  out.shadow_fading_db = shadow_fading_std_db(scenario, out.los_flag, h) * normal(rng);

  const double wavelength = kSpeedOfLight / scenario.carrier_hz;
  PathComponent echo;
  echo.delay_s = 2.0 * d3d / kSpeedOfLight;
  echo.direction = direction_of(rel);
  echo.gain = target_amplitude(2.0 * (out.one_way_pl_db + out.shadow_fading_db), target.rcs_dbsm, wavelength);
  echo.doppler_hz = doppler_shift_hz(target.radial_velocity_mps, wavelength);
  echo.is_clutter = false;
  out.paths.push_back(echo);

  auto bg = generate_clutter(scenario, clutter, rng);
  out.paths.insert(out.paths.end(), bg.begin(), bg.end());
  return out;
}

ChannelRealization build_clutter_channel(const Scenario& scenario, const ClutterParams& clutter, Rng& rng) {
  ChannelRealization out;
  out.paths = generate_clutter(scenario, clutter, rng);
  return out;
}

Complex evaluate_observation(const ChannelRealization& realization, const PrsConfig& prs, const ResourceGrid& grid,
                             const ArrayGeometry& geometry, std::span<const Complex> w, std::span<const Complex> f,
                             int k, int l, double t_s, double noise_std, Rng& rng) {
  if (k < 0 || k >= grid.n_subcarriers() || l < 0 || l >= grid.n_symbols() || !grid.active(k, l))
    throw std::invalid_argument("evaluate_observation: (k, l) is not an active resource element");
  const double m = static_cast<double>(k / prs.comb_k);
  const double tone_spacing = prs.tone_spacing_hz();
  Complex acc{};
  for (const auto& p : realization.paths) {
    const CVector a = steering_vector(geometry, p.direction);
    const Complex g = p.gain * std::polar(1.0, 2.0 * kPi * p.doppler_hz * t_s);
    acc += g * beamformed_gain(w, a, a, f) * std::polar(1.0, -2.0 * kPi * m * tone_spacing * p.delay_s);
  }
  Complex y = acc * grid.value(k, l);
  if (noise_std > 0.0) y += complex_gaussian(rng, noise_std);
  return y;
}

}  // namespace nrradar
