#include "nrradar/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nrradar {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Reads one JSON object, records which keys were consumed and rejects the rest.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string prefix) : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw ConfigError(where_self() + ": expected a JSON object");
  }

  ObjectReader child(const char* key) {
    static const json empty = json::object();
    seen_.insert(key);
    const auto it = j_.find(key);
    return ObjectReader(it == j_.end() ? empty : *it, path(key));
  }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void read(const char* key, int& target) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
      const auto x = v->get<std::int64_t>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        throw ConfigError(path(key) + ": integer out of range");
      target = static_cast<int>(x);
    }
  }

  void read(const char* key, std::uint32_t& target) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<std::int64_t>() < 0 || v->get<std::uint64_t>() > 0xFFFFFFFFull)
        throw ConfigError(path(key) + ": expected a non-negative 32-bit integer");
      target = static_cast<std::uint32_t>(v->get<std::uint64_t>());
    }
  }

  void read(const char* key, std::uint64_t& target) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(path(key) + ": expected a non-negative integer");
      target = v->get<std::uint64_t>();
    }
  }

  void read(const char* key, double& target) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ConfigError(path(key) + ": expected a number");
      target = v->get<double>();
    }
  }

  void read(const char* key, std::optional<double>& target) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        target.reset();
        return;
      }
      if (!v->is_number()) throw ConfigError(path(key) + ": expected a number or null");
      target = v->get<double>();
    }
  }

  void read(const char* key, bool& target) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(path(key) + ": expected true or false");
      target = v->get<bool>();
    }
  }

  void read(const char* key, std::string& target) {
    if (const json* v = find(key)) {
      if (!v->is_string()) throw ConfigError(path(key) + ": expected a string");
      target = v->get<std::string>();
    }
  }

  template <typename T>
  void read_list(const char* key, std::vector<T>& target) {
    if (const json* v = find(key)) {
      if (!v->is_array()) throw ConfigError(path(key) + ": expected an array");
      std::vector<T> out;
      for (const auto& e : *v) {
        if constexpr (std::is_integral_v<T>) {
          if (!e.is_number_integer()) throw ConfigError(path(key) + ": expected integers");
        } else {
          if (!e.is_number()) throw ConfigError(path(key) + ": expected numbers");
        }
        out.push_back(e.get<T>());
      }
      target = std::move(out);
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown key '" + path(key) + "'");
  }

  std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

 private:
  std::string where_self() const { return prefix_.empty() ? "config" : prefix_; }

  const json& j_;
  std::string prefix_;
  std::set<std::string> seen_;
};

template <typename Enum, typename Parse>
void read_enum(ObjectReader& r, const char* key, Enum& target, Parse parse) {
  std::string name;
  if (!r.find(key)) return;
  r.read(key, name);
  try {
    target = parse(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError(r.path(key) + ": unsupported value '" + name + "'");
  }
}

SweepMethod sweep_method_from_string(const std::string& s) {
  if (s == "sampled") return SweepMethod::Sampled;
  if (s == "simulate") return SweepMethod::Simulate;
  throw std::invalid_argument(s);
}

DetectionStatistic statistic_from_string(const std::string& s) {
  if (s == "averaged") return DetectionStatistic::Averaged;
  if (s == "single_symbol") return DetectionStatistic::SingleSymbol;
  throw std::invalid_argument(s);
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["scenario"] = {{"kind", std::string(to_string(c.scenario.kind))},
                   {"bs_height_m", c.scenario.bs_height_m},
                   {"isd_m", c.scenario.isd_m}};
  j["uav_heights_m"] = c.uav_heights_m;
  j["drops_per_config"] = c.drops_per_config;
  j["with_target"] = c.with_target;
  j["master_seed"] = c.master_seed;
  const PrsConfig& p = c.prs;
  j["prs"] = {{"n_rb", p.n_rb},           {"scs_khz", p.scs_khz},       {"comb_k", p.comb_k},
              {"l_prs", p.l_prs},         {"n_prs", p.n_prs},           {"t_prs_s", p.t_prs_s},
              {"seq_id", p.seq_id},       {"carrier_hz", p.carrier_hz}, {"start_symbol", p.start_symbol},
              {"re_offset", p.re_offset}, {"comb_offsets", p.symbol_offsets()}};
  j["array"] = {{"n_rows", c.array.n_rows},
                {"n_cols", c.array.n_cols},
                {"spacing_wavelengths", c.array.spacing_wavelengths},
                {"tilt_deg", c.array.tilt_deg}};
  j["codebook"] = {{"n_az", c.codebook.n_az},         {"n_el", c.codebook.n_el},
                   {"az_min_deg", c.codebook.az_min_deg}, {"az_max_deg", c.codebook.az_max_deg},
                   {"el_min_deg", c.codebook.el_min_deg}, {"el_max_deg", c.codebook.el_max_deg}};
  j["target"] = {{"rcs_dbsm", c.target.rcs_dbsm},
                 {"radial_velocity_mps", c.target.radial_velocity_mps},
                 {"region", std::string(to_string(c.target.region))},
                 {"min_distance_m", c.target.min_distance_m}};
  j["clutter"] = {{"n_rp", c.clutter.n_rp},
                  {"n_subpaths", c.clutter.n_subpaths},
                  {"min_distance_m", c.clutter.min_distance_m},
                  {"median_delay_spread_s", c.clutter.median_delay_spread_for(c.scenario.kind)},
                  {"lg_delay_spread_std", c.clutter.lg_delay_spread_std},
                  {"angle_spread_deg", c.clutter.angle_spread_deg}};
  j["sweep"] = {{"method", std::string(to_string(c.sweep.method))},
                {"occasions_per_beam", c.sweep.occasions_per_beam}};
  j["detection"] = {{"eta_db", c.detection.eta_db},
                    {"statistic", std::string(to_string(c.detection.statistic))},
                    {"range_oversampling", c.detection.range_oversampling},
                    {"clutter_suppression", c.detection.clutter_suppression}};
  j["link"] = {{"eirp_dbm", c.link.eirp_dbm}, {"noise_figure_db", c.link.noise_figure_db}};
  return j;
}

RunConfig from_json(const json& root) {
  RunConfig c;
  ObjectReader r(root, "");

  {
    ObjectReader s = r.child("scenario");
    ScenarioKind kind = ScenarioKind::UMiAV;
    read_enum(s, "kind", kind, [](const std::string& n) { return scenario_kind_from_string(n); });
    c.scenario = Scenario::defaults(kind);
    s.read("bs_height_m", c.scenario.bs_height_m);
    s.read("isd_m", c.scenario.isd_m);
    s.finish();
  }
  r.read_list("uav_heights_m", c.uav_heights_m);
  r.read("drops_per_config", c.drops_per_config);
  r.read("with_target", c.with_target);
  r.read("master_seed", c.master_seed);
  {
    ObjectReader p = r.child("prs");
    p.read("n_rb", c.prs.n_rb);
    p.read("scs_khz", c.prs.scs_khz);
    p.read("comb_k", c.prs.comb_k);
    p.read("l_prs", c.prs.l_prs);
    p.read("n_prs", c.prs.n_prs);
    p.read("t_prs_s", c.prs.t_prs_s);
    p.read("seq_id", c.prs.seq_id);
    p.read("carrier_hz", c.prs.carrier_hz);
    p.read("start_symbol", c.prs.start_symbol);
    p.read("re_offset", c.prs.re_offset);
    p.read_list("comb_offsets", c.prs.comb_offsets);
    p.finish();
  }
  c.scenario.carrier_hz = c.prs.carrier_hz;
  {
    ObjectReader a = r.child("array");
    a.read("n_rows", c.array.n_rows);
    a.read("n_cols", c.array.n_cols);
    a.read("spacing_wavelengths", c.array.spacing_wavelengths);
    a.read("tilt_deg", c.array.tilt_deg);
    a.finish();
  }
  {
    ObjectReader b = r.child("codebook");
    b.read("n_az", c.codebook.n_az);
    b.read("n_el", c.codebook.n_el);
    b.read("az_min_deg", c.codebook.az_min_deg);
    b.read("az_max_deg", c.codebook.az_max_deg);
    b.read("el_min_deg", c.codebook.el_min_deg);
    b.read("el_max_deg", c.codebook.el_max_deg);
    b.finish();
  }
  {
    ObjectReader t = r.child("target");
    t.read("rcs_dbsm", c.target.rcs_dbsm);
    t.read("radial_velocity_mps", c.target.radial_velocity_mps);
    read_enum(t, "region", c.target.region, [](const std::string& n) { return drop_region_from_string(n); });
    t.read("min_distance_m", c.target.min_distance_m);
    t.finish();
  }
  {
    ObjectReader k = r.child("clutter");
    k.read("n_rp", c.clutter.n_rp);
    k.read("n_subpaths", c.clutter.n_subpaths);
    k.read("min_distance_m", c.clutter.min_distance_m);
    k.read("median_delay_spread_s", c.clutter.median_delay_spread_s);
    k.read("lg_delay_spread_std", c.clutter.lg_delay_spread_std);
    k.read("angle_spread_deg", c.clutter.angle_spread_deg);
    k.finish();
  }
  {
    ObjectReader w = r.child("sweep");
    read_enum(w, "method", c.sweep.method, sweep_method_from_string);
    w.read("occasions_per_beam", c.sweep.occasions_per_beam);
    w.finish();
  }
  {
    ObjectReader d = r.child("detection");
    d.read("eta_db", c.detection.eta_db);
    read_enum(d, "statistic", c.detection.statistic, statistic_from_string);
    d.read("range_oversampling", c.detection.range_oversampling);
    d.read("clutter_suppression", c.detection.clutter_suppression);
    d.finish();
  }
  {
    ObjectReader l = r.child("link");
    l.read("eirp_dbm", c.link.eirp_dbm);
    l.read("noise_figure_db", c.link.noise_figure_db);
    l.finish();
  }
  r.finish();

  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  // Resolve scenario-dependent defaults so that a reload reproduces the same struct.
  c.prs.comb_offsets = c.prs.symbol_offsets();
  c.clutter.median_delay_spread_s = c.clutter.median_delay_spread_for(c.scenario.kind);
  return c;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw IoError(where + ": bad number '" + s + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw IoError(where + ": bad integer '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, const std::string& where) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw IoError(where + ": expected 0 or 1, got '" + s + "'");
}

std::optional<double> opt_double(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, where);
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return from_json(root);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string config_hash(const RunConfig& config) { return fnv1a_hex(to_json(config).dump()); }

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

const std::vector<std::string>& records_csv_columns() {
  static const std::vector<std::string> cols{
      "drop_id",   "scenario",         "h_uav_m",  "true_x_m", "true_y_m", "true_z_m",    "los",
      "target_present", "detected",    "par_db",   "est_x_m",  "est_y_m",  "est_z_m",     "position_error_m",
      "beam_index", "pl_branch",       "status",   "config_hash"};
  return cols;
}

std::string records_csv_header() {
  std::string out;
  for (const auto& c : records_csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

void write_records_csv(std::ostream& out, const std::vector<DropRecord>& records) {
  out << records_csv_header() << '\n';
  auto vec = [&out](const std::optional<Vec3>& v) {
    if (v)
      out << format_double(v->x) << ',' << format_double(v->y) << ',' << format_double(v->z) << ',';
    else
      out << ",,,";
  };
  for (const auto& r : records) {
    out << r.drop_id << ',' << to_string(r.scenario) << ',' << format_double(r.h_uav_m) << ',';
    vec(r.true_position_m);
    out << (r.los ? 1 : 0) << ',' << (r.target_present ? 1 : 0) << ',' << (r.detected ? 1 : 0) << ','
        << format_double(r.par_db) << ',';
    vec(r.estimated_position_m);
    if (r.position_error_m) out << format_double(*r.position_error_m);
    out << ',';
    if (r.beam_index) out << *r.beam_index;
    out << ',';
    if (r.pl_branch) out << to_string(*r.pl_branch);
    out << ',' << sanitize(r.status) << ',' << r.config_hash << '\n';
  }
}

std::vector<DropRecord> read_records_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(source_name + ": empty file, expected a records header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != records_csv_header())
    throw IoError(source_name + ": schema mismatch, header is '" + line + "', expected '" + records_csv_header() + "'");

  const std::size_t n_cols = records_csv_columns().size();
  std::vector<DropRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const auto f = split(line);
    if (f.size() != n_cols)
      throw IoError(where + ": expected " + std::to_string(n_cols) + " fields, got " + std::to_string(f.size()));

    DropRecord r;
    r.drop_id = parse_uint(f[0], where);
    try {
      r.scenario = scenario_kind_from_string(f[1]);
    } catch (const std::invalid_argument& e) {
      throw IoError(where + ": " + e.what());
    }
    r.h_uav_m = parse_double(f[2], where);
    auto vec = [&](std::size_t i) -> std::optional<Vec3> {
      const auto x = opt_double(f[i], where);
      const auto y = opt_double(f[i + 1], where);
      const auto z = opt_double(f[i + 2], where);
      if (!x && !y && !z) return std::nullopt;
      if (!x || !y || !z) throw IoError(where + ": partial position");
      return Vec3{*x, *y, *z};
    };
    r.true_position_m = vec(3);
    r.los = parse_bool(f[6], where);
    r.target_present = parse_bool(f[7], where);
    r.detected = parse_bool(f[8], where);
    r.par_db = parse_double(f[9], where);
    r.estimated_position_m = vec(10);
    r.position_error_m = opt_double(f[13], where);
    if (!f[14].empty()) r.beam_index = static_cast<std::size_t>(parse_uint(f[14], where));
    if (f[15] == "aerial")
      r.pl_branch = PathLossBranch::Aerial;
    else if (f[15] == "ground")
      r.pl_branch = PathLossBranch::Ground;
    else if (!f[15].empty())
      throw IoError(where + ": unknown pl_branch '" + f[15] + "'");
    r.status = f[16];
    r.config_hash = f[17];
    out.push_back(std::move(r));
  }
  return out;
}

void write_roc_csv(std::ostream& out, const std::vector<RocRow>& rows) {
  out << "eta_db,p_fa,p_d\n";
  for (const auto& r : rows)
    out << format_double(r.eta_db) << ',' << format_double(r.p_fa) << ',' << format_double(r.p_d) << '\n';
}

std::string summary_json(const MetricsSummary& summary, const SummaryMetadata& meta, const std::vector<RocRow>* roc) {
  ordered_json j;
  ordered_json m;
  m["tool"] = "nrradar";
  m["version"] = meta.tool_version;
  m["master_seed"] = meta.master_seed ? ordered_json(*meta.master_seed) : ordered_json(nullptr);
  m["timestamp_utc"] = meta.timestamp_utc;
  m["wall_clock_s"] = meta.wall_clock_s;
  m["config_hashes"] = meta.config_hashes;
  if (meta.link_config) {
    m["eirp_dbm"] = meta.link_config->eirp_dbm;
    m["noise_figure_db"] = meta.link_config->noise_figure_db;
  }
  if (meta.link) {
    m["tx_power_dbm"] = meta.link->tx_power_dbm;
    m["subcarrier_power_dbm"] = meta.link->subcarrier_power_dbm;
    m["thermal_floor_dbm"] = meta.link->thermal_floor_dbm;
    m["noise_power_per_tone_dbm"] = meta.link->noise_power_per_tone_dbm;
    m["eirp_conversion"] = "tx_power = EIRP - 10 log10(N), array gain only";
  }
  if (!meta.sources.empty()) m["sources"] = meta.sources;
  j["metadata"] = m;

  ordered_json groups = ordered_json::array();
  for (const auto& g : summary.groups) {
    ordered_json e;
    e["scenario"] = std::string(to_string(g.scenario));
    e["h_uav_m"] = g.h_uav_m;
    e["n_target"] = g.n_target;
    e["n_detected"] = g.n_detected;
    e["p_md"] = opt(g.p_md);
    e["n_absent"] = g.n_absent;
    e["n_false_alarm"] = g.n_false_alarm;
    e["p_fa"] = opt(g.p_fa);
    e["n_failed"] = g.n_failed;
    e["n_errors"] = g.errors_m.size();
    e["error_mean_m"] = opt(g.error_mean_m);
    e["error_p50_m"] = opt(g.error_p50_m);
    e["error_p90_m"] = opt(g.error_p90_m);
    e["error_p99_m"] = opt(g.error_p99_m);
    // Empirical CDF sampled at 101 probability levels: [error_m, probability].
    ordered_json cdf = ordered_json::array();
    if (!g.errors_m.empty())
      for (int i = 0; i <= 100; ++i) cdf.push_back({quantile_sorted(g.errors_m, i / 100.0), i / 100.0});
    e["error_cdf"] = cdf;
    groups.push_back(e);
  }
  j["groups"] = groups;

  if (roc) {
    ordered_json rows = ordered_json::array();
    for (const auto& r : *roc) rows.push_back({{"eta_db", r.eta_db}, {"p_fa", r.p_fa}, {"p_d", r.p_d}});
    j["roc"] = rows;
  }
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace nrradar
