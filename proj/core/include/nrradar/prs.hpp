#pragma once

// Downlink positioning reference signal: Gold sequence, QPSK mapping and the
// comb-structured frequency-domain resource grid of one PRS occasion.

#include <cstdint>
#include <vector>

#include "nrradar/common.hpp"

namespace nrradar {

struct PrsConfig {
  int n_rb = 66;
  double scs_khz = 120.0;
  int comb_k = 4;
  int l_prs = 4;
  int n_prs = 256;
  double t_prs_s = 0.5e-3;
  std::uint32_t seq_id = 0;
  double carrier_hz = 30e9;
  int start_symbol = 0;          // first PRS symbol inside the slot
  int re_offset = 0;             // comb offset of the first PRS symbol
  std::vector<int> comb_offsets; // per-symbol relative offsets; empty selects the standard pattern

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  int numerology() const;
  int n_subcarriers() const { return 12 * n_rb; }
  int n_active() const { return n_subcarriers() / comb_k; }
  double scs_hz() const { return scs_khz * 1e3; }
  double tone_spacing_hz() const { return comb_k * scs_hz(); }
  double symbol_duration_s() const;
  int slots_per_frame() const { return 10 << numerology(); }
  double beta() const;
  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }

  /// Resolved relative offsets k' for symbols 0..l_prs-1.
  std::vector<int> symbol_offsets() const;
  /// Absolute subcarrier of active tone `tone` in PRS symbol `l`.
  int subcarrier_of(int tone, int l) const;
};

/// Standard relative comb offsets for comb size K, cycled to L symbols.
std::vector<int> standard_comb_offsets(int comb_k, int l_prs);

/// Length-31 Gold sequence c(n), n = 0..length-1, with the 1600-sample advance.
std::vector<std::uint8_t> gold_sequence(std::uint64_t c_init, std::size_t length);

/// ((1-2b0) + j(1-2b1)) / sqrt(2) per bit pair.
CVector qpsk_map(std::span<const std::uint8_t> bits);

/// Scrambling initialisation for PRS symbol `symbol_in_slot` of slot `slot`.
std::uint32_t prs_c_init(std::uint32_t seq_id, int slot, int symbol_in_slot);

class ResourceGrid {
 public:
  ResourceGrid(int n_subcarriers, int n_symbols);

  int n_subcarriers() const { return n_subcarriers_; }
  int n_symbols() const { return n_symbols_; }

  Complex value(int k, int l) const { return values_(static_cast<std::size_t>(k), static_cast<std::size_t>(l)); }
  bool active(int k, int l) const { return mask_[static_cast<std::size_t>(l * n_subcarriers_ + k)] != 0; }

  void set(int k, int l, Complex v);

  const CMatrix& values() const { return values_; }

 private:
  int n_subcarriers_;
  int n_symbols_;
  CMatrix values_;
  std::vector<std::uint8_t> mask_;
};

ResourceGrid build_prs_grid(const PrsConfig& config, int occasion_index);

/// Precomputed active-tone symbols of every occasion, indexed (tone, occasion * l_prs + l).
/// Grids are pure functions of the configuration, so one bank is shared by all drops.
class PrsBank {
 public:
  explicit PrsBank(const PrsConfig& config);

  const PrsConfig& config() const { return config_; }
  /// Symbol on active tone `tone` of PRS symbol `l` in occasion `occasion` (taken modulo n_prs).
  Complex symbol(int tone, long occasion, int l) const;
  std::span<const Complex> symbols(long occasion, int l) const;

 private:
  PrsConfig config_;
  CMatrix symbols_;
};

}  // namespace nrradar
