#include "nrradar/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <thread>

namespace nrradar {

std::string_view to_string(DropRegion r) {
  switch (r) {
    case DropRegion::Sector: return "sector";
    case DropRegion::Disc: return "disc";
    case DropRegion::Hexagon: return "hexagon";
  }
  return "sector";
}

DropRegion drop_region_from_string(std::string_view name) {
  if (name == "sector") return DropRegion::Sector;
  if (name == "disc") return DropRegion::Disc;
  if (name == "hexagon") return DropRegion::Hexagon;
  throw std::invalid_argument("target.region: expected sector, disc or hexagon");
}

void RunConfig::validate() const {
  scenario.validate();
  prs.validate();
  if (scenario.carrier_hz != prs.carrier_hz)
    throw std::invalid_argument("scenario.carrier_hz: must match prs.carrier_hz");
  if (uav_heights_m.empty()) throw std::invalid_argument("uav_heights_m: needs at least one height");
  for (double h : uav_heights_m)
    if (!(h > 0.0)) throw std::invalid_argument("uav_heights_m: heights must be positive");
  if (drops_per_config < 1) throw std::invalid_argument("drops_per_config: must be >= 1");
  if (threads < 0) throw std::invalid_argument("threads: must be >= 0");
  array.geometry().validate();
  if (codebook.n_az < 1) throw std::invalid_argument("codebook.n_az: must be >= 1");
  if (codebook.n_el < 1) throw std::invalid_argument("codebook.n_el: must be >= 1");
  if (codebook.n_az > 1 && !(codebook.az_max_deg > codebook.az_min_deg))
    throw std::invalid_argument("codebook.az_max_deg: span must be non-empty");
  if (codebook.n_el > 1 && !(codebook.el_max_deg > codebook.el_min_deg))
    throw std::invalid_argument("codebook.el_max_deg: span must be non-empty");
  if (codebook.el_min_deg < -90.0 || codebook.el_max_deg > 90.0)
    throw std::invalid_argument("codebook.el_min_deg: elevation span must lie in [-90, 90]");
  if (!(target.min_distance_m >= 0.0) || target.min_distance_m >= scenario.cell_radius_m())
    throw std::invalid_argument("target.min_distance_m: must be in [0, ISD/2)");
  if (target.region == DropRegion::Sector && !(codebook.az_max_deg >= codebook.az_min_deg))
    throw std::invalid_argument("codebook.az_min_deg: sector drops need an ordered azimuth span");
  clutter.validate();
  if (sweep.occasions_per_beam < 1) throw std::invalid_argument("sweep.occasions_per_beam: must be >= 1");
  if (detection.range_oversampling < 1) throw std::invalid_argument("detection.range_oversampling: must be >= 1");
  const double bandwidth_hz = prs.n_subcarriers() * prs.scs_hz();
  const double cap = 75.0 + std::max(0.0, 10.0 * std::log10(bandwidth_hz / 100e6));
  if (link.eirp_dbm > cap + 1e-9) throw std::invalid_argument("link.eirp_dbm: exceeds 75 dBm per 100 MHz");
}

LinkBudget link_budget(const RunConfig& config) {
  const PrsConfig& prs = config.prs;
  const double n = static_cast<double>(config.array.geometry().size());
  LinkBudget out;
  out.tx_power_dbm = config.link.eirp_dbm - 10.0 * std::log10(n);
  out.subcarrier_power_dbm = out.tx_power_dbm - 10.0 * std::log10(static_cast<double>(prs.n_subcarriers()));
  out.thermal_floor_dbm = kThermalNoiseDbmPerHz + 10.0 * std::log10(prs.tone_spacing_hz() * prs.n_active());
  // The total over K df N_active spread over the 12 n_rb subcarrier grid is df per observation.
  out.noise_power_per_tone_dbm = kThermalNoiseDbmPerHz + 10.0 * std::log10(prs.scs_hz()) + config.link.noise_figure_db;
  out.noise_std = std::sqrt(db_to_linear(out.noise_power_per_tone_dbm));
  out.signal_scale = std::sqrt(db_to_linear(out.subcarrier_power_dbm)) * n;
  return out;
}

TargetState drop_target(const Scenario& scenario, const TargetConfig& target, const CodebookConfig& codebook,
                        double h_uav_m, Rng& rng) {
  if (!(h_uav_m > 0.0)) throw std::invalid_argument("drop_target: height must be positive");
  const double r_max = scenario.cell_radius_m();
  const double r_min = target.min_distance_m;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double x = 0.0;
  double y = 0.0;
  if (target.region == DropRegion::Hexagon) {
    // Flat-sided hexagon with inradius ISD/2, by rejection from its bounding box.
    const double a = r_max;
    const double half_width = 2.0 * a / std::sqrt(3.0);
    std::uniform_real_distribution<double> ux(-half_width, half_width);
    std::uniform_real_distribution<double> uy(-a, a);
    for (;;) {
      x = ux(rng);
      y = uy(rng);
      if (std::sqrt(3.0) * std::abs(x) + std::abs(y) <= 2.0 * a && std::hypot(x, y) >= r_min) break;
    }
  } else {
    const double az_lo = target.region == DropRegion::Sector ? deg_to_rad(codebook.az_min_deg) : -kPi;
    const double az_hi = target.region == DropRegion::Sector ? deg_to_rad(codebook.az_max_deg) : kPi;
    const double r = std::sqrt(r_min * r_min + (r_max * r_max - r_min * r_min) * u01(rng));
    const double az = az_lo + (az_hi - az_lo) * u01(rng);
    x = r * std::cos(az);
    y = r * std::sin(az);
  }
  TargetState out;
  out.position_m = {x, y, h_uav_m};
  out.radial_velocity_mps = target.radial_velocity_mps;
  out.rcs_dbsm = target.rcs_dbsm;
  return out;
}

Rng drop_rng(std::uint64_t master_seed, std::uint64_t drop_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(drop_id), static_cast<std::uint32_t>(drop_id >> 32)};
  return Rng(seq);
}

CampaignContext::CampaignContext(const RunConfig& cfg)
    : config((cfg.validate(), cfg)),
      bank(cfg.prs),
      codebook(dft_codebook(cfg.array.geometry(), cfg.codebook.n_az, cfg.codebook.n_el, cfg.codebook.az_span(),
                            cfg.codebook.el_span())),
      budget(link_budget(cfg)) {}

DropRecord run_drop(const CampaignContext& ctx, std::size_t height_index, std::size_t drop_index) {
  const RunConfig& cfg = ctx.config;
  DropRecord rec;
  rec.drop_id = height_index * static_cast<std::size_t>(cfg.drops_per_config) + drop_index;
  rec.scenario = cfg.scenario.kind;
  rec.h_uav_m = cfg.uav_heights_m.at(height_index);
  rec.target_present = cfg.with_target;

  try {
    Rng rng = drop_rng(cfg.master_seed, rec.drop_id);
    const Vec3 bs = cfg.scenario.bs_position();
    ChannelRealization channel;
    if (cfg.with_target) {
      const TargetState target = drop_target(cfg.scenario, cfg.target, cfg.codebook, rec.h_uav_m, rng);
      rec.true_position_m = target.position_m;
      channel = build_channel(cfg.scenario, target, bs, cfg.clutter, rng);
      rec.los = channel.los_flag;
      rec.pl_branch = channel.pl_branch;
    } else {
      channel = build_clutter_channel(cfg.scenario, cfg.clutter, rng);
    }
    channel = channel.scaled(ctx.budget.signal_scale);

    ChainConfig chain;
    chain.eta_db = cfg.detection.eta_db;
    chain.noise_std = ctx.budget.noise_std;
    chain.sweep = cfg.sweep;
    chain.range_oversampling = cfg.detection.range_oversampling;
    chain.statistic = cfg.detection.statistic;
    chain.clutter_suppression = cfg.detection.clutter_suppression;
    const DetectionResult det = process_drop(channel, ctx.bank, ctx.codebook, chain, bs, rng);

    rec.detected = det.detected;
    rec.par_db = det.par_db;
    rec.beam_index = det.beam_index;
    if (det.detected) {
      rec.estimated_position_m = det.position_m;
      if (rec.true_position_m) rec.position_error_m = (*det.position_m - *rec.true_position_m).norm();
    }
  } catch (const std::exception& e) {
    DropRecord failed;
    failed.drop_id = rec.drop_id;
    failed.scenario = rec.scenario;
    failed.h_uav_m = rec.h_uav_m;
    failed.target_present = cfg.with_target;
    rec = std::move(failed);
    rec.status = std::string("failed: ") + e.what();
  }
  return rec;
}

std::vector<DropRecord> run_campaign(const RunConfig& config, const std::string& config_hash) {
  const CampaignContext ctx(config);
  const std::size_t per_height = static_cast<std::size_t>(config.drops_per_config);
  const std::size_t total = per_height * config.uav_heights_m.size();
  std::vector<DropRecord> out(total);

  std::size_t n_threads = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                             : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      out[i] = run_drop(ctx, i / per_height, i % per_height);
      out[i].config_hash = config_hash;
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  return out;
}

std::vector<RocRow> roc_sweep(const std::vector<DropRecord>& with_target, const std::vector<DropRecord>& without_target,
                              const std::vector<double>& eta_grid) {
  auto pars = [](const std::vector<DropRecord>& recs) {
    std::vector<double> out;
    for (const auto& r : recs)
      if (r.status == "ok") out.push_back(r.par_db);
    return out;
  };
  const auto present = pars(with_target);
  const auto absent = pars(without_target);
  if (present.empty() || absent.empty()) throw std::invalid_argument("roc_sweep: both record sets must be non-empty");

  auto exceed = [](const std::vector<double>& v, double eta) {
    const auto n = std::count_if(v.begin(), v.end(), [eta](double p) { return p > eta; });
    return static_cast<double>(n) / static_cast<double>(v.size());
  };
  std::vector<RocRow> rows;
  rows.reserve(eta_grid.size());
  for (double eta : eta_grid) rows.push_back({eta, exceed(absent, eta), exceed(present, eta)});
  return rows;
}

std::vector<double> linear_eta_grid(double eta_min, double eta_max, int steps) {
  if (steps < 1) throw std::invalid_argument("eta grid: steps must be >= 1");
  if (steps > 1 && !(eta_max >= eta_min)) throw std::invalid_argument("eta grid: eta_max must be >= eta_min");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    out[static_cast<std::size_t>(i)] = steps == 1 ? eta_min : eta_min + (eta_max - eta_min) * i / (steps - 1);
  return out;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile_sorted: empty input");
  if (q <= 0.0) return sorted.front();
  if (q >= 1.0) return sorted.back();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double GroupMetrics::error_cdf(double x) const {
  if (errors_m.empty()) return 0.0;
  const auto n = std::upper_bound(errors_m.begin(), errors_m.end(), x) - errors_m.begin();
  return static_cast<double>(n) / static_cast<double>(errors_m.size());
}

const GroupMetrics* MetricsSummary::find(ScenarioKind kind, double h_uav_m) const {
  for (const auto& g : groups)
    if (g.scenario == kind && g.h_uav_m == h_uav_m) return &g;
  return nullptr;
}

MetricsSummary aggregate(const std::vector<DropRecord>& records) {
  std::map<std::pair<int, double>, GroupMetrics> groups;
  for (const auto& r : records) {
    auto [it, inserted] = groups.try_emplace({static_cast<int>(r.scenario), r.h_uav_m});
    GroupMetrics& g = it->second;
    if (inserted) {
      g.scenario = r.scenario;
      g.h_uav_m = r.h_uav_m;
    }
    if (r.status != "ok") {
      ++g.n_failed;
      continue;
    }
    if (r.target_present) {
      ++g.n_target;
      if (r.detected) {
        ++g.n_detected;
        if (r.position_error_m) g.errors_m.push_back(*r.position_error_m);
      }
    } else {
      ++g.n_absent;
      if (r.detected) ++g.n_false_alarm;
    }
  }

  MetricsSummary out;
  for (auto& [key, g] : groups) {
    if (g.n_target > 0) g.p_md = 1.0 - static_cast<double>(g.n_detected) / static_cast<double>(g.n_target);
    if (g.n_absent > 0) g.p_fa = static_cast<double>(g.n_false_alarm) / static_cast<double>(g.n_absent);
    std::sort(g.errors_m.begin(), g.errors_m.end());
    if (!g.errors_m.empty()) {
      double sum = 0.0;
      for (double e : g.errors_m) sum += e;
      g.error_mean_m = sum / static_cast<double>(g.errors_m.size());
      g.error_p50_m = quantile_sorted(g.errors_m, 0.50);
      g.error_p90_m = quantile_sorted(g.errors_m, 0.90);
      g.error_p99_m = quantile_sorted(g.errors_m, 0.99);
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

}  // namespace nrradar
