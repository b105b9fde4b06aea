#include <gtest/gtest.h>

#include <set>
#include <string>

#include "nrradar/prs.hpp"

using namespace nrradar;

namespace {

// Plain one-step-at-a-time register model, kept separate from the library.
std::string lfsr_oracle(std::uint32_t c_init, std::size_t length) {
  std::vector<int> x1(31, 0), x2(31, 0);
  x1[0] = 1;
  for (int i = 0; i < 31; ++i) x2[static_cast<std::size_t>(i)] = (c_init >> i) & 1;
  std::string out;
  for (std::size_t n = 0; n < 1600 + length; ++n) {
    if (n >= 1600) out.push_back(static_cast<char>('0' + (x1[0] ^ x2[0])));
    const int f1 = x1[3] ^ x1[0];
    const int f2 = x2[3] ^ x2[2] ^ x2[1] ^ x2[0];
    x1.erase(x1.begin());
    x1.push_back(f1);
    x2.erase(x2.begin());
    x2.push_back(f2);
  }
  return out;
}

std::string bits_to_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (auto b : bits) s.push_back(static_cast<char>('0' + b));
  return s;
}

}  // namespace

TEST(GoldSequence, FrozenReferenceStrings) {
  EXPECT_EQ(bits_to_string(gold_sequence(1, 64)),
            "0000001010000011000000110111010000101011100110101111110111100010");
  EXPECT_EQ(bits_to_string(gold_sequence(0, 32)), "00000010000110100001001001111010");
  EXPECT_EQ(bits_to_string(gold_sequence(0x5a5a5a5, 48)), "000011111110111101001000101111001011100101010101");
}

TEST(GoldSequence, MatchesRegisterOracle) {
  for (std::uint32_t c : {1u, 2u, 12345u, 0x7fffffffu, 1u << 30}) {
    EXPECT_EQ(bits_to_string(gold_sequence(c, 500)), lfsr_oracle(c, 500)) << "c_init=" << c;
  }
}

TEST(GoldSequence, ZeroInitIsAdvancedX1) {
  // x2 stays zero, so the output is x1 alone.
  const auto a = gold_sequence(0, 200);
  const std::string expected = lfsr_oracle(0, 200);
  EXPECT_EQ(bits_to_string(a), expected);
}

TEST(GoldSequence, PrefixIndependentOfLength) {
  const auto short_seq = gold_sequence(987654, 31);
  const auto long_seq = gold_sequence(987654, 4000);
  EXPECT_TRUE(std::equal(short_seq.begin(), short_seq.end(), long_seq.begin()));
}

TEST(GoldSequence, EdgeCases) {
  EXPECT_TRUE(gold_sequence(5, 0).empty());
  EXPECT_THROW(gold_sequence(std::uint64_t{1} << 31, 10), std::invalid_argument);
}

TEST(Qpsk, SignMapping) {
  const double s = 1.0 / std::sqrt(2.0);
  const std::vector<std::uint8_t> b00{0, 0}, b11{1, 1}, b0110{0, 1, 1, 0};
  EXPECT_EQ(qpsk_map(b00)[0], Complex(s, s));
  EXPECT_EQ(qpsk_map(b11)[0], Complex(-s, -s));
  const auto two = qpsk_map(b0110);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], Complex(s, -s));
  EXPECT_EQ(two[1], Complex(-s, s));
}

TEST(Qpsk, UnitMagnitudeAndOddLength) {
  const auto bits = gold_sequence(42, 1000);
  for (const auto& v : qpsk_map(bits)) EXPECT_NEAR(std::abs(v), 1.0, 1e-15);
  const std::vector<std::uint8_t> odd{0, 1, 0};
  EXPECT_THROW(qpsk_map(odd), std::invalid_argument);
}

TEST(PrsConfig, Validation) {
  PrsConfig c;
  EXPECT_NO_THROW(c.validate());
  c.comb_k = 5;
  try {
    c.validate();
    FAIL() << "expected throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("prs.comb_k"), std::string::npos);
  }
  c = PrsConfig{};
  c.l_prs = 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);  // l_prs < comb_k
  c = PrsConfig{};
  c.t_prs_s = 4 * c.symbol_duration_s();
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = PrsConfig{};
  c.scs_khz = 100.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = PrsConfig{};
  c.n_rb = 1;
  c.comb_k = 12;
  c.l_prs = 12;
  EXPECT_NO_THROW(c.validate());
}

TEST(PrsConfig, DerivedQuantities) {
  PrsConfig c;
  EXPECT_EQ(c.numerology(), 3);
  EXPECT_EQ(c.n_active(), 198);
  EXPECT_DOUBLE_EQ(c.beta(), 2.0);
  EXPECT_DOUBLE_EQ(c.tone_spacing_hz(), 480e3);
  EXPECT_NEAR(c.symbol_duration_s(), 1e-3 / 112.0, 1e-18);
  EXPECT_EQ(c.slots_per_frame(), 80);
  EXPECT_EQ(c.symbol_offsets(), (std::vector<int>{0, 2, 1, 3}));
}

TEST(PrsGrid, PaperConfiguration) {
  const PrsConfig c;
  const ResourceGrid g = build_prs_grid(c, 0);
  EXPECT_EQ(g.n_subcarriers(), 792);
  EXPECT_EQ(g.n_symbols(), 4);
  for (int l = 0; l < 4; ++l) {
    int active = 0;
    double power = 0.0;
    for (int k = 0; k < g.n_subcarriers(); ++k) {
      if (g.active(k, l)) {
        ++active;
        EXPECT_NEAR(std::abs(g.value(k, l)), 2.0, 1e-12);
      } else {
        EXPECT_EQ(g.value(k, l), Complex{});
      }
      power += std::norm(g.value(k, l));
    }
    EXPECT_EQ(active, 198);
    EXPECT_NEAR(power / 792.0, 1.0, 1e-12);
  }
}

TEST(PrsGrid, PowerAndCombPropertyAllConfigurations) {
  for (int k : {2, 4, 6, 12}) {
    for (int l : {2, 4, 6, 12}) {
      if (l < k) continue;
      PrsConfig c;
      c.n_rb = 12;
      c.comb_k = k;
      c.l_prs = l;
      c.n_prs = 3;
      c.re_offset = k - 1;
      for (int o = 0; o < c.n_prs; ++o) {
        const ResourceGrid g = build_prs_grid(c, o);
        for (int sym = 0; sym < l; ++sym) {
          std::vector<int> active;
          double power = 0.0;
          for (int sc = 0; sc < g.n_subcarriers(); ++sc) {
            power += std::norm(g.value(sc, sym));
            if (g.active(sc, sym)) active.push_back(sc);
          }
          EXPECT_NEAR(power / g.n_subcarriers(), 1.0, 1e-12) << "K=" << k << " L=" << l;
          ASSERT_EQ(static_cast<int>(active.size()), c.n_active());
          for (std::size_t i = 1; i < active.size(); ++i) EXPECT_EQ(active[i] - active[i - 1], k);
          EXPECT_EQ(active.front(), c.subcarrier_of(0, sym));
        }
      }
    }
  }
}

TEST(PrsGrid, StaggeredOffsetsCoverEverySubcarrier) {
  const PrsConfig c;
  const ResourceGrid g = build_prs_grid(c, 3);
  for (int k = 0; k < g.n_subcarriers(); ++k) {
    int hits = 0;
    for (int l = 0; l < c.l_prs; ++l) hits += g.active(k, l) ? 1 : 0;
    EXPECT_EQ(hits, 1);
  }
}

TEST(PrsGrid, DeterministicAndSeedDependent) {
  PrsConfig a;
  EXPECT_EQ(build_prs_grid(a, 5).values(), build_prs_grid(a, 5).values());
  PrsConfig b = a;
  b.seq_id = 17;
  EXPECT_NE(build_prs_grid(a, 5).values(), build_prs_grid(b, 5).values());
  EXPECT_NE(build_prs_grid(a, 5).values(), build_prs_grid(a, 6).values());
}

TEST(PrsGrid, OccasionOutOfRange) {
  const PrsConfig c;
  EXPECT_THROW(build_prs_grid(c, c.n_prs), std::invalid_argument);
  EXPECT_THROW(build_prs_grid(c, -1), std::invalid_argument);
}

TEST(PrsGrid, ScramblingInitUsesSlotAndSymbol) {
  std::set<std::uint32_t> seen;
  for (int slot = 0; slot < 4; ++slot)
    for (int sym = 0; sym < 14; ++sym) seen.insert(prs_c_init(0, slot, sym));
  EXPECT_EQ(seen.size(), 56u);
  for (std::uint32_t id : {0u, 1023u, 1024u, 4095u}) EXPECT_LT(prs_c_init(id, 79, 13), 1u << 31);
}

TEST(PrsBank, MatchesGrids) {
  PrsConfig c;
  c.n_prs = 8;
  const PrsBank bank(c);
  for (int o = 0; o < c.n_prs; ++o) {
    const ResourceGrid g = build_prs_grid(c, o);
    for (int l = 0; l < c.l_prs; ++l)
      for (int m = 0; m < c.n_active(); m += 17) EXPECT_EQ(bank.symbol(m, o, l), g.value(c.subcarrier_of(m, l), l));
  }
  // Occasions beyond n_prs repeat the pattern.
  EXPECT_EQ(bank.symbol(3, 8 + 2, 1), bank.symbol(3, 2, 1));
}
