#include "nrradar/array.hpp"

#include <algorithm>

namespace nrradar {

void ArrayGeometry::validate() const {
  if (n_rows < 1) throw std::invalid_argument("array.n_rows: must be >= 1");
  if (n_cols < 1) throw std::invalid_argument("array.n_cols: must be >= 1");
  if (!(spacing_wavelengths > 0.0)) throw std::invalid_argument("array.spacing_wavelengths: must be positive");
}

Vec3 unit_vector(Direction dir) {
  const double ce = std::cos(dir.elevation_rad);
  return {std::cos(dir.azimuth_rad) * ce, std::sin(dir.azimuth_rad) * ce, std::sin(dir.elevation_rad)};
}

Direction direction_of(Vec3 v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw std::invalid_argument("direction_of: zero vector");
  double az = std::atan2(v.y, v.x);
  if (az >= kPi) az -= 2.0 * kPi;
  const double el = std::asin(std::clamp(v.z / n, -1.0, 1.0));
  return {az, el};
}

namespace {

CVector linear_factor(int n, double spacing, double cosine) {
  CVector out(static_cast<std::size_t>(n));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::polar(scale, 2.0 * kPi * spacing * i * cosine);
  return out;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

}  // namespace

SteeringFactors steering_factors(const ArrayGeometry& geometry, Direction dir) {
  const Vec3 u = unit_vector(dir);
  const double st = std::sin(geometry.tilt_rad);
  const double ct = std::cos(geometry.tilt_rad);
  // Direction cosines along the column (y) and tilted row axes.
  const double u_col = u.y;
  const double u_row = -st * u.x + ct * u.z;
  return {linear_factor(geometry.n_rows, geometry.spacing_wavelengths, u_row),
          linear_factor(geometry.n_cols, geometry.spacing_wavelengths, u_col)};
}

CVector steering_vector(const ArrayGeometry& geometry, Direction dir) {
  return Beam{dir, steering_factors(geometry, dir)}.weights();
}

Complex steering_inner(const SteeringFactors& beam, const SteeringFactors& path) {
  return inner(beam.row, path.row) * inner(beam.col, path.col);
}

Complex beamformed_gain(std::span<const Complex> w, std::span<const Complex> a_rx,
                        std::span<const Complex> a_tx, std::span<const Complex> f) {
  if (w.size() != a_rx.size() || a_tx.size() != f.size() || w.size() != f.size())
    throw std::invalid_argument("beamformed_gain: vector length mismatch");
  return inner(w, a_rx) * inner(a_tx, f);
}

CVector Beam::weights() const {
  CVector out(factors.row.size() * factors.col.size());
  std::size_t idx = 0;
  for (const Complex& r : factors.row)
    for (const Complex& c : factors.col) out[idx++] = r * c;
  return out;
}

Codebook::Codebook(ArrayGeometry geometry, std::vector<Beam> beams, int n_az, int n_el, AngleSpan az, AngleSpan el)
    : geometry_(geometry), beams_(std::move(beams)), n_az_(n_az), n_el_(n_el), az_(az), el_(el) {}

double Codebook::az_step_rad() const { return n_az_ > 1 ? az_.width() / (n_az_ - 1) : 0.0; }
double Codebook::el_step_rad() const { return n_el_ > 1 ? el_.width() / (n_el_ - 1) : 0.0; }

Codebook dft_codebook(const ArrayGeometry& geometry, int n_az, int n_el, AngleSpan az_span, AngleSpan el_span) {
  geometry.validate();
  if (n_az < 1 || n_el < 1) throw std::invalid_argument("dft_codebook: beam counts must be >= 1");
  if (n_az > 1 && !(az_span.width() > 0.0)) throw std::invalid_argument("dft_codebook: empty azimuth span");
  if (n_el > 1 && !(el_span.width() > 0.0)) throw std::invalid_argument("dft_codebook: empty elevation span");
  if (el_span.min_rad < -kPi / 2 || el_span.max_rad > kPi / 2)
    throw std::invalid_argument("dft_codebook: elevation span outside [-90, 90] deg");

  auto grid = [](int n, AngleSpan s, int i) {
    return n == 1 ? s.center() : s.min_rad + s.width() * i / (n - 1);
  };

  std::vector<Beam> beams;
  beams.reserve(static_cast<std::size_t>(n_az * n_el));
  for (int e = 0; e < n_el; ++e) {
    for (int a = 0; a < n_az; ++a) {
      const Direction dir{grid(n_az, az_span, a), grid(n_el, el_span, e)};
      beams.push_back({dir, steering_factors(geometry, dir)});
    }
  }
  return Codebook(geometry, std::move(beams), n_az, n_el, az_span, el_span);
}

}  // namespace nrradar
