#include "nrradar/radar.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace nrradar {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

struct FftwPlan {
  explicit FftwPlan(fftw_plan p) : plan(p) {}
  ~FftwPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  FftwPlan(const FftwPlan&) = delete;
  FftwPlan& operator=(const FftwPlan&) = delete;
  fftw_plan plan;
};

// Per-path quantities shared by every beam of a drop.
struct PathModel {
  std::vector<SteeringFactors> factors;
  CMatrix delay_phasors;  // (active tone x path) exp(-j 2 pi m K df tau)
};

PathModel make_path_model(const ChannelRealization& channel, const PrsConfig& prs, const ArrayGeometry& geometry) {
  PathModel out;
  const std::size_t n_paths = channel.paths.size();
  const std::size_t n_tones = static_cast<std::size_t>(prs.n_active());
  out.factors.reserve(n_paths);
  out.delay_phasors = CMatrix(n_tones, n_paths);
  const double spacing = prs.tone_spacing_hz();
  for (std::size_t p = 0; p < n_paths; ++p) {
    const auto& path = channel.paths[p];
    out.factors.push_back(steering_factors(geometry, path.direction));
    auto col = out.delay_phasors.column(p);
    for (std::size_t m = 0; m < n_tones; ++m)
      col[m] = std::polar(1.0, -2.0 * kPi * static_cast<double>(m) * spacing * path.delay_s);
  }
  return out;
}

std::vector<double> beam_responses(const PathModel& model, const Beam& beam) {
  std::vector<double> out(model.factors.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = std::norm(steering_inner(beam.factors, model.factors[p]));
  return out;
}

CMatrix synthesize(const ChannelRealization& channel, const PathModel& model, const std::vector<double>& response,
                   const PrsBank& bank, long first_occasion, int n_occasions, double noise_std, Rng& rng) {
  const PrsConfig& prs = bank.config();
  const std::size_t n_tones = static_cast<std::size_t>(prs.n_active());
  const int l_prs = prs.l_prs;
  CMatrix y(n_tones, static_cast<std::size_t>(n_occasions) * static_cast<std::size_t>(l_prs));

  CVector static_part(n_tones, Complex{});
  std::vector<std::size_t> moving;
  for (std::size_t p = 0; p < channel.paths.size(); ++p) {
    const auto& path = channel.paths[p];
    if (path.doppler_hz != 0.0) {
      moving.push_back(p);
      continue;
    }
    const Complex c = path.gain * response[p];
    if (c == Complex{}) continue;
    auto e = model.delay_phasors.column(p);
    for (std::size_t m = 0; m < n_tones; ++m) static_part[m] += c * e[m];
  }

  const double noise_component = noise_std / std::sqrt(2.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector h(n_tones);
  for (int o = 0; o < n_occasions; ++o) {
    const long occasion = first_occasion + o;
    for (int l = 0; l < l_prs; ++l) {
      h = static_part;
      const double t = symbol_time_s(prs, occasion, l);
      for (std::size_t p : moving) {
        const auto& path = channel.paths[p];
        const Complex c = path.gain * response[p] * std::polar(1.0, 2.0 * kPi * path.doppler_hz * t);
        auto e = model.delay_phasors.column(p);
        for (std::size_t m = 0; m < n_tones; ++m) h[m] += c * e[m];
      }
      const auto s = bank.symbols(occasion, l);
      auto out = y.column(static_cast<std::size_t>(o * l_prs + l));
      for (std::size_t m = 0; m < n_tones; ++m) {
        out[m] = h[m] * s[m];
        if (noise_std > 0.0) {
          const double re = normal(rng);
          const double im = normal(rng);
          out[m] += Complex(re, im) * noise_component;
        }
      }
    }
  }
  return y;
}

double energy(const CMatrix& m) {
  double e = 0.0;
  for (const Complex& v : m.data()) e += std::norm(v);
  return e;
}

// Noiseless dwell energy for every beam plus the noise draw of its exact distribution.
std::vector<double> sampled_sweep(const ChannelRealization& channel, const PathModel& model, const PrsBank& bank,
                                  const Codebook& codebook, int occasions_per_beam, double noise_std, Rng& rng,
                                  bool suppress) {
  const PrsConfig& prs = bank.config();
  const std::size_t n_tones = static_cast<std::size_t>(prs.n_active());
  const std::size_t n_sym = static_cast<std::size_t>(occasions_per_beam) * static_cast<std::size_t>(prs.l_prs);

  std::vector<std::size_t> active;
  for (std::size_t p = 0; p < channel.paths.size(); ++p)
    if (!suppress || channel.paths[p].doppler_hz != 0.0) active.push_back(p);
  const std::size_t n = active.size();

  // Slow-time signatures over the first window, mean removed when suppressing.
  CMatrix d(n_sym, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double fd = channel.paths[active[i]].doppler_hz;
    auto col = d.column(i);
    Complex mean{};
    for (int o = 0; o < occasions_per_beam; ++o)
      for (int l = 0; l < prs.l_prs; ++l) {
        const std::size_t idx = static_cast<std::size_t>(o * prs.l_prs + l);
        col[idx] = std::polar(1.0, 2.0 * kPi * fd * symbol_time_s(prs, o, l));
        mean += col[idx];
      }
    if (suppress) {
      mean /= static_cast<double>(n_sym);
      for (auto& v : col) v -= mean;
    }
  }
  CMatrix xy(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex x{}, yv{};
      auto ei = model.delay_phasors.column(active[i]);
      auto ej = model.delay_phasors.column(active[j]);
      for (std::size_t m = 0; m < n_tones; ++m) x += ei[m] * std::conj(ej[m]);
      auto di = d.column(i);
      auto dj = d.column(j);
      for (std::size_t k = 0; k < n_sym; ++k) yv += di[k] * std::conj(dj[k]);
      xy(i, j) = x * yv;
    }

  const double sigma_h = noise_std / bank.config().beta();
  const double dof = static_cast<double>(n_tones) * static_cast<double>(n_sym - (suppress ? 1 : 0));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> gamma(dof > 1.0 ? dof - 1.0 : 1.0, 1.0);
  const double window = static_cast<double>(occasions_per_beam) * prs.t_prs_s;

  std::vector<double> out(codebook.size());
  CVector h(n);
  for (std::size_t b = 0; b < codebook.size(); ++b) {
    const Beam& beam = codebook[b];
    for (std::size_t i = 0; i < n; ++i) {
      const auto& path = channel.paths[active[i]];
      const double c = std::norm(steering_inner(beam.factors, model.factors[active[i]]));
      h[i] = path.gain * c * std::polar(1.0, 2.0 * kPi * path.doppler_hz * window * static_cast<double>(b));
    }
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e += (h[i] * std::conj(h[j]) * xy(i, j)).real();
    e = std::max(e, 0.0);
    if (sigma_h > 0.0) {
      const double a = std::sqrt(e) + sigma_h / std::sqrt(2.0) * normal(rng);
      const double q = sigma_h / std::sqrt(2.0) * normal(rng);
      const double rest = dof > 1.0 ? sigma_h * sigma_h * gamma(rng) : 0.0;
      e = a * a + q * q + rest;
    }
    out[b] = e;
  }
  return out;
}

}  // namespace

std::string_view to_string(SweepMethod m) { return m == SweepMethod::Sampled ? "sampled" : "simulate"; }
std::string_view to_string(DetectionStatistic s) {
  return s == DetectionStatistic::Averaged ? "averaged" : "single_symbol";
}

CMatrix clutter_suppress(const CMatrix& samples) {
  if (samples.cols() < 2) throw std::invalid_argument("clutter_suppress: needs at least two slow-time columns");
  CMatrix out = samples;
  const double inv = 1.0 / static_cast<double>(samples.cols());
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    // Mean taken about the first sample so that a constant row cancels exactly.
    const Complex ref = samples(r, 0);
    Complex dev{};
    for (std::size_t c = 1; c < samples.cols(); ++c) dev += samples(r, c) - ref;
    dev *= inv;
    for (std::size_t c = 0; c < samples.cols(); ++c) out(r, c) = (samples(r, c) - ref) - dev;
  }
  return out;
}

CMatrix matched_filter(const CMatrix& y, const CMatrix& s, double beta) {
  if (y.rows() != s.rows() || y.cols() != s.cols()) throw std::invalid_argument("matched_filter: shape mismatch");
  if (!(beta > 0.0)) throw std::invalid_argument("matched_filter: beta must be positive");
  CMatrix out(y.rows(), y.cols());
  const double inv = 1.0 / (beta * beta);
  auto yd = y.data();
  auto sd = s.data();
  auto od = out.data();
  for (std::size_t i = 0; i < yd.size(); ++i) od[i] = std::conj(sd[i]) * yd[i] * inv;
  return out;
}

std::vector<double> RangeProfile::magnitude(std::size_t column) const {
  auto col = bins.column(column);
  std::vector<double> out(col.size());
  for (std::size_t d = 0; d < col.size(); ++d) out[d] = std::abs(col[d]);
  return out;
}

double range_bin_width_m(int n_r, double tone_spacing_hz) {
  return kSpeedOfLight / (2.0 * static_cast<double>(n_r) * tone_spacing_hz);
}

RangeProfile range_profile(const CMatrix& h_hat, int n_r, double tone_spacing_hz) {
  if (h_hat.rows() == 0 || h_hat.cols() == 0) throw std::invalid_argument("range_profile: empty input");
  if (n_r < static_cast<int>(h_hat.rows())) throw std::invalid_argument("range_profile: n_r below data length");

  const std::size_t nr = static_cast<std::size_t>(n_r);
  const std::size_t cols = h_hat.cols();
  FftwBuffer buf(nr * cols);
  std::unique_ptr<FftwPlan> plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = std::make_unique<FftwPlan>(fftw_plan_many_dft(1, &n_r, static_cast<int>(cols), buf.data, nullptr, 1, n_r,
                                                         buf.data, nullptr, 1, n_r, FFTW_BACKWARD, FFTW_ESTIMATE));
  }
  if (!plan->plan) throw std::runtime_error("range_profile: FFTW planning failed");

  for (std::size_t c = 0; c < cols; ++c) {
    auto src = h_hat.column(c);
    fftw_complex* dst = buf.data + c * nr;
    for (std::size_t k = 0; k < nr; ++k) {
      const Complex v = k < src.size() ? src[k] : Complex{};
      dst[k][0] = v.real();
      dst[k][1] = v.imag();
    }
  }
  fftw_execute(plan->plan);

  RangeProfile out;
  out.bins = CMatrix(nr, cols);
  out.averaged.assign(nr, 0.0);
  out.bin_width_m = range_bin_width_m(n_r, tone_spacing_hz);
  const double scale = 1.0 / static_cast<double>(n_r);
  for (std::size_t c = 0; c < cols; ++c) {
    auto col = out.bins.column(c);
    const fftw_complex* src = buf.data + c * nr;
    for (std::size_t d = 0; d < nr; ++d) {
      col[d] = Complex(src[d][0], src[d][1]) * scale;
      out.averaged[d] += std::abs(col[d]);
    }
  }
  for (auto& v : out.averaged) v /= static_cast<double>(cols);
  return out;
}

DetectionResult par_detect(std::span<const double> profile, double eta_db) {
  if (profile.empty()) throw std::invalid_argument("par_detect: empty profile");
  DetectionResult out;
  const auto peak = std::max_element(profile.begin(), profile.end());
  out.peak_bin = static_cast<int>(peak - profile.begin());
  double sum = 0.0;
  for (double v : profile) sum += v;
  const double mean = sum / static_cast<double>(profile.size());
  if (!(*peak > 0.0) || !(mean > 0.0)) {
    out.par_db = 0.0;
    out.detected = false;
    return out;
  }
  out.par_db = 20.0 * std::log10(*peak / mean);
  out.detected = out.par_db > eta_db;
  return out;
}

Vec3 position_estimate(double range_m, Direction direction, Vec3 bs_position) {
  return bs_position + range_m * unit_vector(direction);
}

double symbol_time_s(const PrsConfig& prs, long occasion, int l) {
  return static_cast<double>(occasion) * prs.t_prs_s + (prs.start_symbol + l) * prs.symbol_duration_s();
}

CMatrix simulate_dwell(const ChannelRealization& channel, const PrsBank& bank, const ArrayGeometry& geometry,
                       const Beam& beam, long first_occasion, int n_occasions, double noise_std, Rng& rng) {
  if (n_occasions < 1) throw std::invalid_argument("simulate_dwell: need at least one occasion");
  const PathModel model = make_path_model(channel, bank.config(), geometry);
  return synthesize(channel, model, beam_responses(model, beam), bank, first_occasion, n_occasions, noise_std, rng);
}

CMatrix dwell_symbols(const PrsBank& bank, long first_occasion, int n_occasions) {
  const PrsConfig& prs = bank.config();
  const std::size_t n_tones = static_cast<std::size_t>(prs.n_active());
  CMatrix s(n_tones, static_cast<std::size_t>(n_occasions) * static_cast<std::size_t>(prs.l_prs));
  for (int o = 0; o < n_occasions; ++o)
    for (int l = 0; l < prs.l_prs; ++l) {
      const auto src = bank.symbols(first_occasion + o, l);
      std::copy(src.begin(), src.end(), s.column(static_cast<std::size_t>(o * prs.l_prs + l)).begin());
    }
  return s;
}

SweepResult beam_sweep(const ChannelRealization& channel, const PrsBank& bank, const Codebook& codebook,
                       const SweepSettings& settings, double noise_std, Rng& rng, bool clutter_suppression) {
  if (codebook.empty()) throw std::invalid_argument("beam_sweep: empty codebook");
  if (settings.occasions_per_beam < 1) throw std::invalid_argument("sweep.occasions_per_beam: must be >= 1");
  const PrsConfig& prs = bank.config();
  if (clutter_suppression && settings.occasions_per_beam * prs.l_prs < 2)
    throw std::invalid_argument("beam_sweep: dwell needs at least two symbols");

  const PathModel model = make_path_model(channel, prs, codebook.geometry());
  SweepResult out;
  if (settings.method == SweepMethod::Sampled) {
    out.power_map = sampled_sweep(channel, model, bank, codebook, settings.occasions_per_beam, noise_std, rng,
                                  clutter_suppression);
  } else {
    out.power_map.resize(codebook.size());
    const int r = settings.occasions_per_beam;
    const CMatrix s0 = dwell_symbols(bank, 0, r);
    for (std::size_t b = 0; b < codebook.size(); ++b) {
      const long first = static_cast<long>(b) * r;
      const CMatrix s = first % prs.n_prs == 0 ? s0 : dwell_symbols(bank, first, r);
      const CMatrix y = synthesize(channel, model, beam_responses(model, codebook[b]), bank, first, r, noise_std, rng);
      CMatrix h = matched_filter(y, s, prs.beta());
      if (clutter_suppression) h = clutter_suppress(h);
      out.power_map[b] = energy(h);
    }
  }

  out.best_index = 0;
  for (std::size_t b = 1; b < out.power_map.size(); ++b)
    if (out.power_map[b] > out.power_map[out.best_index]) out.best_index = b;
  out.degenerate = std::all_of(out.power_map.begin(), out.power_map.end(), [](double v) { return v == 0.0; });
  out.direction = codebook[out.best_index].direction;
  return out;
}

DetectionResult process_drop(const ChannelRealization& channel, const PrsBank& bank, const Codebook& codebook,
                             const ChainConfig& config, Vec3 bs_position, Rng& rng) {
  if (config.range_oversampling < 1) throw std::invalid_argument("detection.range_oversampling: must be >= 1");
  const PrsConfig& prs = bank.config();
  const SweepResult sweep =
      beam_sweep(channel, bank, codebook, config.sweep, config.noise_std, rng, config.clutter_suppression);

  const long first = static_cast<long>(codebook.size()) * config.sweep.occasions_per_beam;
  const PathModel model = make_path_model(channel, prs, codebook.geometry());
  const CMatrix y = synthesize(channel, model, beam_responses(model, codebook[sweep.best_index]), bank, first,
                               prs.n_prs, config.noise_std, rng);
  CMatrix h = matched_filter(y, dwell_symbols(bank, first, prs.n_prs), prs.beta());
  if (config.clutter_suppression) h = clutter_suppress(h);
  const RangeProfile profile = range_profile(h, config.range_oversampling * prs.n_active(), prs.tone_spacing_hz());

  DetectionResult out = config.statistic == DetectionStatistic::Averaged
                            ? par_detect(profile.averaged, config.eta_db)
                            : par_detect(profile.magnitude(0), config.eta_db);
  out.beam_index = sweep.best_index;
  out.direction = sweep.direction;
  out.sweep_degenerate = sweep.degenerate;
  if (out.detected) {
    out.range_m = profile.bin_width_m * out.peak_bin;
    out.position_m = position_estimate(*out.range_m, out.direction, bs_position);
  }
  return out;
}

}  // namespace nrradar
