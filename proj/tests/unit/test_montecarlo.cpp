#include <gtest/gtest.h>

#include <algorithm>

#include "nrradar/montecarlo.hpp"
#include "test_support.hpp"

using namespace nrradar;
using nrradar::testing::small_run_config;

TEST(LinkBudget, DefaultConfiguration) {
  const RunConfig c;
  const LinkBudget b = link_budget(c);
  EXPECT_NEAR(b.tx_power_dbm, 44.897000433602, 1e-9);
  EXPECT_NEAR(b.subcarrier_power_dbm, 44.897000433602 - 10.0 * std::log10(792.0), 1e-9);
  EXPECT_NEAR(b.thermal_floor_dbm, -94.220935723629, 1e-9);
  EXPECT_NEAR(b.noise_power_per_tone_dbm, -174.0 + 10.0 * std::log10(120e3) + 10.0, 1e-9);
  EXPECT_NEAR(b.noise_std * b.noise_std, db_to_linear(b.noise_power_per_tone_dbm), 1e-30);
  EXPECT_NEAR(b.signal_scale, std::sqrt(db_to_linear(b.subcarrier_power_dbm)) * 1024.0, 1e-9);
}

TEST(RunConfig, Validation) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.link.eirp_dbm = 76.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.uav_heights_m.clear();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.drops_per_config = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.target.min_distance_m = 100.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.prs.carrier_hz = 28e9;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RunConfig{};
  c.codebook.el_max_deg = 95.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(DropTarget, SectorAnnulusMoments) {
  const Scenario s = Scenario::defaults(ScenarioKind::UMiAV);
  const TargetConfig t;
  const CodebookConfig cb;
  Rng rng(10);
  const int n = 20000;
  double sum_r = 0.0;
  for (int i = 0; i < n; ++i) {
    const TargetState ts = drop_target(s, t, cb, 50.0, rng);
    const double r = ts.position_m.horizontal_norm();
    const double az = std::atan2(ts.position_m.y, ts.position_m.x);
    EXPECT_GE(r, 10.0 - 1e-9);
    EXPECT_LE(r, 100.0 + 1e-9);
    EXPECT_GE(az, deg_to_rad(-60.0) - 1e-12);
    EXPECT_LE(az, deg_to_rad(60.0) + 1e-12);
    EXPECT_EQ(ts.position_m.z, 50.0);
    sum_r += r;
  }
  const double R = 100.0, r0 = 10.0;
  const double mean_ref = 2.0 / 3.0 * (R * R * R - r0 * r0 * r0) / (R * R - r0 * r0);
  const double sd = std::sqrt((R * R + r0 * r0) / 2.0 - mean_ref * mean_ref);
  EXPECT_NEAR(sum_r / n, mean_ref, 4.0 * sd / std::sqrt(n));
}

TEST(DropTarget, DiscAndHexagonBounds) {
  const Scenario s = Scenario::defaults(ScenarioKind::UMaAV);
  TargetConfig t;
  const CodebookConfig cb;
  Rng rng(11);
  t.region = DropRegion::Disc;
  double sum_x = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const Vec3 p = drop_target(s, t, cb, 100.0, rng).position_m;
    EXPECT_LE(p.horizontal_norm(), 250.0 + 1e-9);
    sum_x += p.x;
  }
  EXPECT_NEAR(sum_x / 5000, 0.0, 8.0);
  t.region = DropRegion::Hexagon;
  bool beyond_inradius = false;
  for (int i = 0; i < 5000; ++i) {
    const Vec3 p = drop_target(s, t, cb, 100.0, rng).position_m;
    EXPECT_LE(std::abs(p.y), 250.0 + 1e-9);
    EXPECT_LE(std::sqrt(3.0) * std::abs(p.x) + std::abs(p.y), 500.0 + 1e-9);
    EXPECT_GE(p.horizontal_norm(), 10.0);
    beyond_inradius = beyond_inradius || p.horizontal_norm() > 250.0;
  }
  EXPECT_TRUE(beyond_inradius);
  EXPECT_EQ(drop_region_from_string("hexagon"), DropRegion::Hexagon);
  EXPECT_THROW(drop_region_from_string("square"), std::invalid_argument);
  EXPECT_THROW(drop_target(s, t, cb, 0.0, rng), std::invalid_argument);
}

TEST(DropRng, IndependentStreams) {
  Rng a = drop_rng(1, 0), b = drop_rng(1, 0), c = drop_rng(1, 1), d = drop_rng(2, 0);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
}

TEST(Campaign, RecordLayoutAndDeterminism) {
  RunConfig c = small_run_config();
  const auto r1 = run_campaign(c, "abc");
  ASSERT_EQ(r1.size(), 12u);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].drop_id, i);
    EXPECT_EQ(r1[i].h_uav_m, i < 6 ? 25.0 : 100.0);
    EXPECT_EQ(r1[i].status, "ok");
    EXPECT_EQ(r1[i].config_hash, "abc");
    EXPECT_TRUE(r1[i].target_present);
    ASSERT_TRUE(r1[i].true_position_m.has_value());
    ASSERT_TRUE(r1[i].pl_branch.has_value());
    EXPECT_EQ(*r1[i].pl_branch, PathLossBranch::Aerial);
    EXPECT_EQ(r1[i].estimated_position_m.has_value(), r1[i].detected);
    EXPECT_EQ(r1[i].position_error_m.has_value(), r1[i].detected);
    EXPECT_LT(*r1[i].beam_index, 35u);
  }
  const auto r2 = run_campaign(c, "abc");
  EXPECT_EQ(r1, r2);
  c.threads = 3;
  EXPECT_EQ(r1, run_campaign(c, "abc"));
  c.threads = 1;
  c.master_seed = 2;
  EXPECT_NE(r1, run_campaign(c, "abc"));
}

TEST(Campaign, GroundBranchBelowAerialHeights) {
  RunConfig c = small_run_config();
  c.uav_heights_m = {15.0};
  c.drops_per_config = 3;
  for (const auto& r : run_campaign(c)) {
    ASSERT_TRUE(r.pl_branch.has_value());
    EXPECT_EQ(*r.pl_branch, PathLossBranch::Ground);
  }
}

TEST(Campaign, SingleDropMatchesCampaignEntry) {
  const RunConfig c = small_run_config(ScenarioKind::UMaAV);
  const auto all = run_campaign(c);
  const CampaignContext ctx(c);
  EXPECT_EQ(run_drop(ctx, 1, 4), all[10]);
}

TEST(Campaign, TargetAbsentRecords) {
  RunConfig c = small_run_config();
  c.with_target = false;
  for (const auto& r : run_campaign(c)) {
    EXPECT_FALSE(r.target_present);
    EXPECT_FALSE(r.true_position_m.has_value());
    EXPECT_FALSE(r.pl_branch.has_value());
    EXPECT_FALSE(r.position_error_m.has_value());
    EXPECT_EQ(r.estimated_position_m.has_value(), r.detected);
  }
  const auto m = aggregate(run_campaign(c));
  for (const auto& g : m.groups) {
    EXPECT_FALSE(g.p_md.has_value());
    ASSERT_TRUE(g.p_fa.has_value());
    EXPECT_EQ(g.n_absent, 6u);
  }
}

TEST(Campaign, InvalidConfigRejectedUpFront) {
  RunConfig c = small_run_config();
  c.drops_per_config = 0;
  EXPECT_THROW(run_campaign(c), std::invalid_argument);
}

TEST(Roc, EtaGrid) {
  EXPECT_EQ(linear_eta_grid(0.0, 10.0, 3), (std::vector<double>{0.0, 5.0, 10.0}));
  EXPECT_EQ(linear_eta_grid(3.4, 3.4, 1), (std::vector<double>{3.4}));
  EXPECT_THROW(linear_eta_grid(0.0, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(linear_eta_grid(2.0, 1.0, 3), std::invalid_argument);
}

TEST(Roc, MonotoneAndBounded) {
  std::vector<DropRecord> with(50), without(40);
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.0, 12.0), v(0.0, 4.0);
  for (auto& r : with) {
    r.target_present = true;
    r.par_db = u(rng);
  }
  for (auto& r : without) r.par_db = v(rng);
  without[3].status = "failed: x";
  without[3].par_db = 100.0;  // failed drops are ignored
  const auto rows = roc_sweep(with, without, linear_eta_grid(-1.0, 13.0, 57));
  ASSERT_EQ(rows.size(), 57u);
  EXPECT_EQ(rows.front().p_fa, 1.0);
  EXPECT_EQ(rows.front().p_d, 1.0);
  EXPECT_EQ(rows.back().p_fa, 0.0);
  EXPECT_EQ(rows.back().p_d, 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].p_fa, rows[i - 1].p_fa);
    EXPECT_LE(rows[i].p_d, rows[i - 1].p_d);
  }
  EXPECT_THROW(roc_sweep({}, without, {1.0}), std::invalid_argument);
}

TEST(Roc, CoherentWithDetectionFlags) {
  RunConfig c = small_run_config();
  const auto with = run_campaign(c);
  c.with_target = false;
  const auto without = run_campaign(c);
  const auto rows = roc_sweep(with, without, {c.detection.eta_db});
  std::vector<DropRecord> all = with;
  all.insert(all.end(), without.begin(), without.end());
  std::size_t det = 0, fa = 0;
  for (const auto& r : with) det += r.detected;
  for (const auto& r : without) fa += r.detected;
  EXPECT_DOUBLE_EQ(rows[0].p_d, static_cast<double>(det) / with.size());
  EXPECT_DOUBLE_EQ(rows[0].p_fa, static_cast<double>(fa) / without.size());
}

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.99), 3.97);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted({7.0}, 0.3), 7.0);
  EXPECT_THROW(quantile_sorted({}, 0.5), std::invalid_argument);
}

TEST(Aggregate, HandBuiltRecords) {
  std::vector<DropRecord> recs;
  auto add = [&](ScenarioKind k, double h, bool present, bool detected, std::optional<double> err,
                 std::string status = "ok") {
    DropRecord r;
    r.scenario = k;
    r.h_uav_m = h;
    r.target_present = present;
    r.detected = detected;
    r.position_error_m = err;
    r.status = std::move(status);
    recs.push_back(r);
  };
  add(ScenarioKind::UMaAV, 50.0, true, true, 3.0);
  add(ScenarioKind::UMiAV, 25.0, true, true, 1.0);
  add(ScenarioKind::UMiAV, 25.0, true, false, std::nullopt);
  add(ScenarioKind::UMiAV, 25.0, true, true, 2.0);
  add(ScenarioKind::UMiAV, 25.0, true, true, 4.0);
  add(ScenarioKind::UMiAV, 25.0, false, true, std::nullopt);
  add(ScenarioKind::UMiAV, 25.0, false, false, std::nullopt);
  add(ScenarioKind::UMiAV, 25.0, true, false, std::nullopt, "failed: boom");

  const MetricsSummary m = aggregate(recs);
  ASSERT_EQ(m.groups.size(), 2u);
  EXPECT_EQ(m.groups[0].scenario, ScenarioKind::UMiAV);
  const GroupMetrics* g = m.find(ScenarioKind::UMiAV, 25.0);
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->n_target, 4u);
  EXPECT_EQ(g->n_detected, 3u);
  EXPECT_EQ(g->n_failed, 1u);
  EXPECT_DOUBLE_EQ(*g->p_md, 0.25);
  EXPECT_DOUBLE_EQ(*g->p_fa, 0.5);
  EXPECT_EQ(g->errors_m, (std::vector<double>{1.0, 2.0, 4.0}));
  EXPECT_DOUBLE_EQ(*g->error_mean_m, 7.0 / 3.0);
  EXPECT_DOUBLE_EQ(*g->error_p50_m, 2.0);
  EXPECT_DOUBLE_EQ(*g->error_p90_m, 3.6);
  EXPECT_DOUBLE_EQ(g->error_cdf(2.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(g->error_cdf(0.5), 0.0);
  EXPECT_EQ(m.find(ScenarioKind::UMaAV, 25.0), nullptr);
  const GroupMetrics* u = m.find(ScenarioKind::UMaAV, 50.0);
  ASSERT_NE(u, nullptr);
  EXPECT_FALSE(u->p_fa.has_value());
}

TEST(Aggregate, NoDetectionsLeavesErrorStatsEmpty) {
  DropRecord r;
  r.target_present = true;
  const MetricsSummary m = aggregate({r, r});
  ASSERT_EQ(m.groups.size(), 1u);
  EXPECT_DOUBLE_EQ(*m.groups[0].p_md, 1.0);
  EXPECT_FALSE(m.groups[0].error_p50_m.has_value());
  EXPECT_FALSE(m.groups[0].error_mean_m.has_value());
}
