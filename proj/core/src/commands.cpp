#include "nrradar/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "nrradar/io.hpp"

#ifndef NRRADAR_VERSION
#define NRRADAR_VERSION "0.0.0"
#endif

namespace nrradar {

namespace {

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

RunConfig resolve(const std::filesystem::path& path, std::optional<std::uint64_t> seed, std::optional<int> drops) {
  RunConfig cfg = load_config(path);
  if (seed) cfg.master_seed = *seed;
  if (drops) cfg.drops_per_config = *drops;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
}

std::string records_text(const std::vector<DropRecord>& records) {
  std::ostringstream os;
  write_records_csv(os, records);
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SummaryMetadata metadata_for(const RunConfig& cfg, const std::string& hash, double wall) {
  SummaryMetadata meta;
  meta.tool_version = NRRADAR_VERSION;
  meta.master_seed = cfg.master_seed;
  meta.timestamp_utc = utc_timestamp();
  meta.wall_clock_s = wall;
  meta.config_hashes = {hash};
  meta.link = link_budget(cfg);
  meta.link_config = cfg.link;
  return meta;
}

}  // namespace

int command_run(const RunOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg = resolve(opts.config, opts.seed, opts.drops);
    cfg.threads = opts.threads;
    const std::string hash = config_hash(cfg);
    prepare_dir(opts.out_dir);
    write_text_file(opts.out_dir / "config.resolved.json", serialize_config(cfg));

    const auto records = run_campaign(cfg, hash);
    write_text_file(opts.out_dir / "records.csv", records_text(records));
    const MetricsSummary summary = aggregate(records);
    write_text_file(opts.out_dir / "summary.json", summary_json(summary, metadata_for(cfg, hash, seconds_since(start))));

    const auto failed = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.status != "ok"; });
    log << "wrote " << records.size() << " records (" << failed << " failed) to " << opts.out_dir.string()
        << " [config " << hash << "]\n";
    return static_cast<int>(kExitOk);
  });
}

int command_roc(const RocOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = std::chrono::steady_clock::now();
    RunConfig cfg = resolve(opts.config, opts.seed, opts.drops);
    cfg.threads = opts.threads;
    std::vector<double> grid;
    try {
      grid = linear_eta_grid(opts.eta_min_db, opts.eta_max_db, opts.eta_steps);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    prepare_dir(opts.out_dir);

    RunConfig present = cfg;
    present.with_target = true;
    RunConfig absent = cfg;
    absent.with_target = false;
    // The resolved config records the target-present campaign; the absent one differs only in with_target.
    const std::string hash = config_hash(present);
    write_text_file(opts.out_dir / "config.resolved.json", serialize_config(present));

    auto with = run_campaign(present, hash);
    auto without = run_campaign(absent, config_hash(absent));
    const auto rows = roc_sweep(with, without, grid);

    std::ostringstream roc;
    write_roc_csv(roc, rows);
    write_text_file(opts.out_dir / "roc.csv", roc.str());

    std::vector<DropRecord> all = with;
    all.insert(all.end(), without.begin(), without.end());
    write_text_file(opts.out_dir / "records.csv", records_text(all));
    SummaryMetadata meta = metadata_for(present, hash, seconds_since(start));
    meta.config_hashes.push_back(config_hash(absent));
    write_text_file(opts.out_dir / "summary.json", summary_json(aggregate(all), meta, &rows));

    log << "wrote " << rows.size() << " ROC rows from " << with.size() << " + " << without.size()
        << " drops to " << opts.out_dir.string() << " [config " << hash << "]\n";
    return static_cast<int>(kExitOk);
  });
}

int command_summarize(const SummarizeOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.files.empty()) throw ConfigError("summarize: no record files given");
    std::vector<DropRecord> all;
    SummaryMetadata meta;
    meta.tool_version = NRRADAR_VERSION;
    meta.timestamp_utc = utc_timestamp();
    for (const auto& path : opts.files) {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw IoError("cannot open '" + path.string() + "'");
      auto recs = read_records_csv(in, path.string());
      for (const auto& r : recs)
        if (std::find(meta.config_hashes.begin(), meta.config_hashes.end(), r.config_hash) == meta.config_hashes.end())
          meta.config_hashes.push_back(r.config_hash);
      all.insert(all.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
      meta.sources.push_back(path.string());
    }
    const std::string text = summary_json(aggregate(all), meta);
    out << text;
    if (opts.out) write_text_file(*opts.out, text);
    return static_cast<int>(kExitOk);
  });
}

}  // namespace nrradar
