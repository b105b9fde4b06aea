#pragma once

// Receive chain: beam sweep, matched filter, slow-time clutter suppression,
// range IDFT, PAR detection and position reconstruction.

#include <optional>
#include <string_view>
#include <vector>

#include "nrradar/array.hpp"
#include "nrradar/channel.hpp"
#include "nrradar/common.hpp"
#include "nrradar/prs.hpp"

namespace nrradar {

/// Subtract the slow-time mean of every row. Needs at least two columns.
CMatrix clutter_suppress(const CMatrix& samples);

/// h = conj(s) * y / beta^2, elementwise.
CMatrix matched_filter(const CMatrix& y, const CMatrix& s, double beta);

struct RangeProfile {
  CMatrix bins;                  // (n_r x slow-time) complex r_l(d)
  std::vector<double> averaged;  // mean over l of |r_l(d)|
  double bin_width_m = 0.0;

  int n_r() const { return static_cast<int>(bins.rows()); }
  /// |r_l(d)| of a single slow-time column.
  std::vector<double> magnitude(std::size_t column) const;
};

double range_bin_width_m(int n_r, double tone_spacing_hz);

/// Length-n_r inverse DFT over the tone axis with 1/n_r scaling, zero padded.
RangeProfile range_profile(const CMatrix& h_hat, int n_r, double tone_spacing_hz);

struct DetectionResult {
  bool detected = false;
  double par_db = 0.0;
  int peak_bin = 0;
  std::optional<double> range_m;
  Direction direction;
  std::optional<Vec3> position_m;
  std::size_t beam_index = 0;
  bool sweep_degenerate = false;
};

/// PAR = max |r| / mean |r| in amplitude dB (20 log10). Detection when PAR_dB > eta_db.
DetectionResult par_detect(std::span<const double> profile, double eta_db);

Vec3 position_estimate(double range_m, Direction direction, Vec3 bs_position);

enum class SweepMethod { Sampled, Simulate };
enum class DetectionStatistic { Averaged, SingleSymbol };

std::string_view to_string(SweepMethod m);
std::string_view to_string(DetectionStatistic s);

struct SweepResult {
  std::size_t best_index = 0;
  Direction direction;
  std::vector<double> power_map;  // one entry per codebook beam
  bool degenerate = false;        // every beam returned zero power
};

struct SweepSettings {
  SweepMethod method = SweepMethod::Sampled;
  int occasions_per_beam = 256;
};

/// Slow-time instant of PRS symbol l in occasion `occasion`.
double symbol_time_s(const PrsConfig& prs, long occasion, int l);

/// Received samples (active tone x occasion * l_prs + l) on beam `beam` used for
/// both transmit and receive, over occasions [first, first + count).
CMatrix simulate_dwell(const ChannelRealization& channel, const PrsBank& bank, const ArrayGeometry& geometry,
                       const Beam& beam, long first_occasion, int n_occasions, double noise_std, Rng& rng);

/// Known PRS symbols matching simulate_dwell's layout.
CMatrix dwell_symbols(const PrsBank& bank, long first_occasion, int n_occasions);

/// Beam b dwells on occasions [b R, (b + 1) R). The per-beam statistic is the
/// energy of the matched-filtered, clutter-suppressed dwell. Sampled draws it
/// from its exact distribution (noncentral chi-square); Simulate builds every
/// sample explicitly.
SweepResult beam_sweep(const ChannelRealization& channel, const PrsBank& bank, const Codebook& codebook,
                       const SweepSettings& settings, double noise_std, Rng& rng,
                       bool clutter_suppression = true);

struct ChainConfig {
  double eta_db = 3.4;
  double noise_std = 0.0;
  SweepSettings sweep;
  int range_oversampling = 1;  // N_R = oversampling * active tones
  DetectionStatistic statistic = DetectionStatistic::Averaged;
  bool clutter_suppression = true;
};

/// Sweep, dwell n_prs occasions on the winning beam, then detect and locate.
DetectionResult process_drop(const ChannelRealization& channel, const PrsBank& bank, const Codebook& codebook,
                             const ChainConfig& config, Vec3 bs_position, Rng& rng);

}  // namespace nrradar
