#include <gtest/gtest.h>

#include "nrradar/array.hpp"

using namespace nrradar;

namespace {

double norm2(const CVector& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

Complex inner(const CVector& a, const CVector& b) {
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

CVector random_unit(Rng& rng, std::size_t n) {
  CVector v(n);
  for (auto& x : v) x = complex_gaussian(rng, 1.0);
  const double s = norm2(v);
  for (auto& x : v) x /= s;
  return v;
}

}  // namespace

TEST(Steering, BroadsideIsUniform) {
  const ArrayGeometry g{4, 8, 0.5, 0.0};
  const CVector a = steering_vector(g, {0.0, 0.0});
  ASSERT_EQ(a.size(), 32u);
  for (const auto& x : a) {
    EXPECT_NEAR(x.real(), 1.0 / std::sqrt(32.0), 1e-15);
    EXPECT_NEAR(x.imag(), 0.0, 1e-15);
  }
}

TEST(Steering, EndfireColumnsAlternate) {
  const ArrayGeometry g{2, 2, 0.5, 0.0};
  const CVector a = steering_vector(g, {deg_to_rad(90.0), 0.0});
  // Element index r * n_cols + c; the second column is shifted by pi.
  for (int r = 0; r < 2; ++r) {
    const Complex c0 = a[static_cast<std::size_t>(r * 2)];
    const Complex c1 = a[static_cast<std::size_t>(r * 2 + 1)];
    EXPECT_NEAR(std::arg(c0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(std::remainder(std::arg(c1) - kPi, 2.0 * kPi)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(c1), 0.5, 1e-15);
  }
}

TEST(Steering, UnitNormAndElementMagnitude) {
  Rng rng(3);
  std::uniform_real_distribution<double> az(-kPi, kPi), el(-kPi / 2, kPi / 2);
  for (double tilt : {0.0, deg_to_rad(45.0)}) {
    const ArrayGeometry g{6, 5, 0.5, tilt};
    for (int i = 0; i < 50; ++i) {
      const CVector a = steering_vector(g, {az(rng), el(rng)});
      EXPECT_NEAR(norm2(a), 1.0, 1e-12);
      for (const auto& x : a) EXPECT_NEAR(std::abs(x), 1.0 / std::sqrt(30.0), 1e-15);
    }
  }
}

TEST(Steering, InnerProductsOnDftGrid) {
  const ArrayGeometry g{1, 8, 0.5, 0.0};
  const Direction d0{0.0, 0.0};
  // Column direction cosines 0 and 2/8 are orthogonal for half-wavelength spacing.
  const Direction d1{std::asin(0.25), 0.0};
  EXPECT_NEAR(std::abs(inner(steering_vector(g, d0), steering_vector(g, d0))), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(inner(steering_vector(g, d0), steering_vector(g, d1))), 0.0, 1e-12);
}

TEST(Steering, SeparableInnerMatchesFullVectors) {
  Rng rng(11);
  std::uniform_real_distribution<double> az(-1.0, 1.0), el(-0.2, 1.4);
  const ArrayGeometry g{5, 7, 0.5, deg_to_rad(30.0)};
  for (int i = 0; i < 40; ++i) {
    const Direction a{az(rng), el(rng)}, b{az(rng), el(rng)};
    const Complex fast = steering_inner(steering_factors(g, a), steering_factors(g, b));
    const Complex slow = inner(steering_vector(g, a), steering_vector(g, b));
    EXPECT_NEAR(std::abs(fast - slow), 0.0, 1e-12);
  }
}

TEST(Steering, ReciprocityTransmitEqualsReceive) {
  const ArrayGeometry g{4, 4, 0.5, deg_to_rad(20.0)};
  const Direction d{0.3, 0.4};
  EXPECT_EQ(steering_vector(g, d), steering_vector(g, d));
}

TEST(Steering, DirectionRoundTrip) {
  Rng rng(5);
  std::uniform_real_distribution<double> az(-kPi, kPi - 1e-9), el(-1.5, 1.5);
  for (int i = 0; i < 100; ++i) {
    const Direction d{az(rng), el(rng)};
    const Direction back = direction_of(3.7 * unit_vector(d));
    EXPECT_NEAR(back.azimuth_rad, d.azimuth_rad, 1e-12);
    EXPECT_NEAR(back.elevation_rad, d.elevation_rad, 1e-12);
  }
  const Direction north = direction_of({0.0, 10.0, 0.0});
  EXPECT_NEAR(north.azimuth_rad, kPi / 2, 1e-15);
  EXPECT_NEAR(north.elevation_rad, 0.0, 1e-15);
  EXPECT_THROW(direction_of({0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(Geometry, Validation) {
  EXPECT_THROW((ArrayGeometry{0, 4, 0.5, 0.0}).validate(), std::invalid_argument);
  EXPECT_THROW((ArrayGeometry{4, 0, 0.5, 0.0}).validate(), std::invalid_argument);
  EXPECT_THROW((ArrayGeometry{4, 4, 0.0, 0.0}).validate(), std::invalid_argument);
}

TEST(Codebook, SingleBeamAtSpanCenter) {
  const ArrayGeometry g{4, 4, 0.5, 0.0};
  const Codebook cb = dft_codebook(g, 1, 1, {-0.5, 0.5}, {-0.2, 0.2});
  ASSERT_EQ(cb.size(), 1u);
  for (const auto& x : cb[0].weights()) EXPECT_NEAR(std::abs(x - Complex(0.25, 0.0)), 0.0, 1e-15);
}

TEST(Codebook, CountNormAndStep) {
  const ArrayGeometry g{8, 8, 0.5, 0.0};
  const AngleSpan az{deg_to_rad(-60.0), deg_to_rad(60.0)}, el{deg_to_rad(-10.0), deg_to_rad(80.0)};
  const Codebook cb = dft_codebook(g, 16, 8, az, el);
  ASSERT_EQ(cb.size(), 128u);
  for (const auto& b : cb.beams()) EXPECT_NEAR(norm2(b.weights()), 1.0, 1e-12);
  EXPECT_NEAR(cb.az_step_rad(), az.width() / 15.0, 1e-15);
  EXPECT_NEAR(cb.el_step_rad(), el.width() / 7.0, 1e-15);
  // Elevation-major ordering.
  EXPECT_NEAR(cb[1].direction.azimuth_rad - cb[0].direction.azimuth_rad, cb.az_step_rad(), 1e-12);
  EXPECT_EQ(cb[1].direction.elevation_rad, cb[0].direction.elevation_rad);
  EXPECT_NEAR(cb[16].direction.elevation_rad - cb[0].direction.elevation_rad, cb.el_step_rad(), 1e-12);
  EXPECT_EQ(cb.index(3, 2), 35u);
}

TEST(Codebook, EmptySpanRejected) {
  const ArrayGeometry g{4, 4, 0.5, 0.0};
  EXPECT_THROW(dft_codebook(g, 2, 1, {0.1, 0.1}, {0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(dft_codebook(g, 1, 3, {0.0, 0.0}, {0.2, 0.2}), std::invalid_argument);
  EXPECT_THROW(dft_codebook(g, 0, 1, {0.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
  EXPECT_NO_THROW(dft_codebook(g, 1, 1, {0.1, 0.1}, {0.2, 0.2}));
}

TEST(Codebook, BestBeamIsAdjacentGridPoint) {
  const ArrayGeometry g{8, 8, 0.5, deg_to_rad(45.0)};
  const AngleSpan az{deg_to_rad(-60.0), deg_to_rad(60.0)}, el{deg_to_rad(0.0), deg_to_rad(80.0)};
  const Codebook cb = dft_codebook(g, 9, 6, az, el);
  Rng rng(21);
  std::uniform_real_distribution<double> uaz(az.min_rad, az.max_rad), uel(el.min_rad, el.max_rad);
  auto best_for = [&](Direction d) {
    const auto f = steering_factors(g, d);
    std::size_t best = 0;
    double best_gain = -1.0;
    for (std::size_t b = 0; b < cb.size(); ++b) {
      const double v = std::abs(steering_inner(cb[b].factors, f));
      if (v > best_gain) {
        best_gain = v;
        best = b;
      }
    }
    return best;
  };
  // On-grid directions select their own beam.
  for (std::size_t b = 0; b < cb.size(); ++b) EXPECT_EQ(best_for(cb[b].direction), b);
  // Off-grid directions select a beam within one raster step on each axis.
  for (int i = 0; i < 200; ++i) {
    const Direction d{uaz(rng), uel(rng)};
    const Direction w = cb[best_for(d)].direction;
    EXPECT_LE(std::abs(w.azimuth_rad - d.azimuth_rad), cb.az_step_rad() + 1e-12);
    EXPECT_LE(std::abs(w.elevation_rad - d.elevation_rad), cb.el_step_rad() + 1e-12);
  }
}

TEST(BeamformedGain, IdentityAndOrthogonality) {
  const ArrayGeometry g{4, 4, 0.5, 0.0};
  const CVector a = steering_vector(g, {0.2, 0.3});
  EXPECT_NEAR(std::abs(beamformed_gain(a, a, a, a) - Complex(1.0, 0.0)), 0.0, 1e-12);
  const CVector b = steering_vector(g, {0.0, 0.0});
  const CVector c = steering_vector(g, {std::asin(0.5), 0.0});  // orthogonal column phase ramp
  EXPECT_NEAR(std::abs(beamformed_gain(b, c, a, a)), 0.0, 1e-12);
  EXPECT_THROW(beamformed_gain(CVector(3), a, a, a), std::invalid_argument);
  EXPECT_THROW(beamformed_gain(a, a, a, CVector(15)), std::invalid_argument);
}

TEST(BeamformedGain, MatchesExplicitMatrixAtN16) {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const CVector w = random_unit(rng, 16), ar = random_unit(rng, 16), at = random_unit(rng, 16),
                  f = random_unit(rng, 16);
    // H = a_rx a_tx^H, then w^H H f.
    Complex ref{};
    for (std::size_t i = 0; i < 16; ++i) {
      Complex hf{};
      for (std::size_t j = 0; j < 16; ++j) hf += ar[i] * std::conj(at[j]) * f[j];
      ref += std::conj(w[i]) * hf;
    }
    const Complex got = beamformed_gain(w, ar, at, f);
    EXPECT_LE(std::abs(got - ref), 1e-10 * std::max(std::abs(ref), 1e-300));
  }
}
