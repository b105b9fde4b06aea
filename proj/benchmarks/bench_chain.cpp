#include <benchmark/benchmark.h>

#include "nrradar/montecarlo.hpp"
#include "nrradar/radar.hpp"

using namespace nrradar;

static void BM_GoldSequence(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gold_sequence(0x1234567, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GoldSequence)->Arg(396)->Arg(10000);

static void BM_PrsBank(benchmark::State& state) {
  PrsConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(PrsBank(c));
}
BENCHMARK(BM_PrsBank)->Unit(benchmark::kMillisecond);

static void BM_RangeProfile(benchmark::State& state) {
  const int tones = 198;
  const int cols = static_cast<int>(state.range(0));
  Rng rng(1);
  CMatrix h(tones, static_cast<std::size_t>(cols));
  for (auto& v : h.data()) v = complex_gaussian(rng, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(range_profile(h, tones * static_cast<int>(state.range(1)), 480e3));
}
BENCHMARK(BM_RangeProfile)->Args({1024, 1})->Args({1024, 4})->Unit(benchmark::kMicrosecond);

static void BM_BeamSweep(benchmark::State& state) {
  RunConfig cfg;
  cfg.sweep.method = state.range(0) == 0 ? SweepMethod::Sampled : SweepMethod::Simulate;
  if (cfg.sweep.method == SweepMethod::Simulate) {
    cfg.codebook.n_az = 9;
    cfg.codebook.n_el = 7;
  }
  const CampaignContext ctx(cfg);
  Rng rng(2);
  TargetState t;
  t.position_m = {60.0, 20.0, 50.0};
  const auto ch = build_channel(cfg.scenario, t, cfg.scenario.bs_position(), cfg.clutter, rng).scaled(ctx.budget.signal_scale);
  for (auto _ : state) benchmark::DoNotOptimize(beam_sweep(ch, ctx.bank, ctx.codebook, cfg.sweep, ctx.budget.noise_std, rng));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ctx.codebook.size()));
}
BENCHMARK(BM_BeamSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_RunDrop(benchmark::State& state) {
  RunConfig cfg;
  cfg.scenario = Scenario::defaults(state.range(0) == 0 ? ScenarioKind::UMiAV : ScenarioKind::UMaAV);
  const CampaignContext ctx(cfg);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_drop(ctx, 1, i++ % 4000));
}
BENCHMARK(BM_RunDrop)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
