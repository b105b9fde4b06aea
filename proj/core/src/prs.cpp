#include "nrradar/prs.hpp"

#include <algorithm>
#include <string>

namespace nrradar {

namespace {

constexpr std::size_t kGoldAdvance = 1600;
constexpr int kSymbolsPerSlot = 14;

bool is_supported_size(int v) { return v == 2 || v == 4 || v == 6 || v == 12; }

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw std::invalid_argument("prs." + field + ": " + why);
}

}  // namespace

void PrsConfig::validate() const {
  if (n_rb < 1) invalid("n_rb", "must be >= 1");
  if (!is_supported_size(comb_k)) invalid("comb_k", "must be one of {2, 4, 6, 12}");
  if (!is_supported_size(l_prs)) invalid("l_prs", "must be one of {2, 4, 6, 12}");
  if (l_prs < comb_k) invalid("l_prs", "must be >= comb_k");
  if ((12 * n_rb) % comb_k != 0) invalid("comb_k", "12 * n_rb must be divisible by comb_k");
  if (n_prs < 1) invalid("n_prs", "must be >= 1");
  numerology();
  if (!(carrier_hz > 0.0)) invalid("carrier_hz", "must be positive");
  if (seq_id > 4095) invalid("seq_id", "must be < 4096");
  if (start_symbol < 0 || start_symbol + l_prs > kSymbolsPerSlot)
    invalid("start_symbol", "PRS symbols must fit inside one slot");
  if (re_offset < 0 || re_offset >= comb_k) invalid("re_offset", "must be in [0, comb_k)");
  if (!comb_offsets.empty()) {
    if (static_cast<int>(comb_offsets.size()) != l_prs)
      invalid("comb_offsets", "needs exactly l_prs entries");
    for (int o : comb_offsets)
      if (o < 0 || o >= comb_k) invalid("comb_offsets", "entries must be in [0, comb_k)");
  }
  if (!(t_prs_s > l_prs * symbol_duration_s()))
    invalid("t_prs_s", "repetition interval must exceed the occasion length");
}

int PrsConfig::numerology() const {
  for (int mu = 0; mu <= 4; ++mu)
    if (scs_khz == 15.0 * (1 << mu)) return mu;
  invalid("scs_khz", "must be 15 * 2^mu for mu in 0..4");
}

double PrsConfig::symbol_duration_s() const {
  return 1e-3 / (kSymbolsPerSlot * static_cast<double>(1 << numerology()));
}

double PrsConfig::beta() const { return std::sqrt(static_cast<double>(comb_k)); }

std::vector<int> standard_comb_offsets(int comb_k, int l_prs) {
  std::vector<int> base;
  switch (comb_k) {
    case 2: base = {0, 1}; break;
    case 4: base = {0, 2, 1, 3}; break;
    case 6: base = {0, 3, 1, 4, 2, 5}; break;
    case 12: base = {0, 6, 3, 9, 1, 7, 4, 10, 2, 8, 5, 11}; break;
    default: throw std::invalid_argument("unsupported comb size");
  }
  std::vector<int> out(static_cast<std::size_t>(l_prs));
  for (int l = 0; l < l_prs; ++l) out[static_cast<std::size_t>(l)] = base[static_cast<std::size_t>(l) % base.size()];
  return out;
}

std::vector<int> PrsConfig::symbol_offsets() const {
  return comb_offsets.empty() ? standard_comb_offsets(comb_k, l_prs) : comb_offsets;
}

int PrsConfig::subcarrier_of(int tone, int l) const {
  const auto offsets = symbol_offsets();
  return tone * comb_k + (re_offset + offsets[static_cast<std::size_t>(l)]) % comb_k;
}

std::vector<std::uint8_t> gold_sequence(std::uint64_t c_init, std::size_t length) {
  if (c_init >= (std::uint64_t{1} << 31)) throw std::invalid_argument("gold_sequence: c_init must be < 2^31");
  if (length == 0) return {};

  const std::size_t total = kGoldAdvance + length;
  std::vector<std::uint8_t> x1(total + 31, 0);
  std::vector<std::uint8_t> x2(total + 31, 0);
  x1[0] = 1;
  for (std::size_t i = 0; i < 31; ++i) x2[i] = static_cast<std::uint8_t>((c_init >> i) & 1U);

  for (std::size_t n = 0; n < total; ++n) {
    x1[n + 31] = x1[n + 3] ^ x1[n];
    x2[n + 31] = x2[n + 3] ^ x2[n + 2] ^ x2[n + 1] ^ x2[n];
  }

  std::vector<std::uint8_t> c(length);
  for (std::size_t n = 0; n < length; ++n) c[n] = x1[n + kGoldAdvance] ^ x2[n + kGoldAdvance];
  return c;
}

CVector qpsk_map(std::span<const std::uint8_t> bits) {
  if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_map: bit count must be even");
  const double s = 1.0 / std::sqrt(2.0);
  CVector out(bits.size() / 2);
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m] = {s * (1.0 - 2.0 * bits[2 * m]), s * (1.0 - 2.0 * bits[2 * m + 1])};
  }
  return out;
}

std::uint32_t prs_c_init(std::uint32_t seq_id, int slot, int symbol_in_slot) {
  const std::uint64_t id_hi = seq_id / 1024;
  const std::uint64_t id_lo = seq_id % 1024;
  const std::uint64_t t = static_cast<std::uint64_t>(kSymbolsPerSlot * slot + symbol_in_slot + 1);
  const std::uint64_t v = (id_hi << 22) + (t << 10) * (2 * id_lo + 1) + id_lo;
  return static_cast<std::uint32_t>(v % (std::uint64_t{1} << 31));
}

ResourceGrid::ResourceGrid(int n_subcarriers, int n_symbols)
    : n_subcarriers_(n_subcarriers),
      n_symbols_(n_symbols),
      values_(static_cast<std::size_t>(n_subcarriers), static_cast<std::size_t>(n_symbols)),
      mask_(static_cast<std::size_t>(n_subcarriers * n_symbols), 0) {}

void ResourceGrid::set(int k, int l, Complex v) {
  values_(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) = v;
  mask_[static_cast<std::size_t>(l * n_subcarriers_ + k)] = 1;
}

ResourceGrid build_prs_grid(const PrsConfig& config, int occasion_index) {
  config.validate();
  if (occasion_index < 0 || occasion_index >= config.n_prs)
    throw std::invalid_argument("build_prs_grid: occasion_index out of range");

  ResourceGrid grid(config.n_subcarriers(), config.l_prs);
  const int n_active = config.n_active();
  const double beta = config.beta();
  const int slot = occasion_index % config.slots_per_frame();
  const auto offsets = config.symbol_offsets();

  for (int l = 0; l < config.l_prs; ++l) {
    const int first = (config.re_offset + offsets[static_cast<std::size_t>(l)]) % config.comb_k;
    const auto bits = gold_sequence(prs_c_init(config.seq_id, slot, config.start_symbol + l),
                                    2 * static_cast<std::size_t>(n_active));
    const CVector symbols = qpsk_map(bits);
    for (int m = 0; m < n_active; ++m) grid.set(m * config.comb_k + first, l, beta * symbols[static_cast<std::size_t>(m)]);
  }
  return grid;
}

PrsBank::PrsBank(const PrsConfig& config)
    : config_(config),
      symbols_(static_cast<std::size_t>(config.n_active()),
               static_cast<std::size_t>(config.n_prs) * static_cast<std::size_t>(config.l_prs)) {
  for (int o = 0; o < config.n_prs; ++o) {
    const ResourceGrid grid = build_prs_grid(config, o);
    for (int l = 0; l < config.l_prs; ++l) {
      auto col = symbols_.column(static_cast<std::size_t>(o * config.l_prs + l));
      for (int m = 0; m < config.n_active(); ++m) col[static_cast<std::size_t>(m)] = grid.value(config.subcarrier_of(m, l), l);
    }
  }
}

std::span<const Complex> PrsBank::symbols(long occasion, int l) const {
  const long o = occasion % config_.n_prs;
  return symbols_.column(static_cast<std::size_t>(o * config_.l_prs + l));
}

Complex PrsBank::symbol(int tone, long occasion, int l) const {
  return symbols(occasion, l)[static_cast<std::size_t>(tone)];
}

}  // namespace nrradar
