#pragma once

// Uniform planar array, steering vectors and the analog beam codebook.
//
// Frame: x east, y north, z up. Azimuth is measured from +x towards +y,
// elevation from the horizontal plane. With zero tilt the array boresight is
// +x, columns are laid out along y and rows along z. A positive tilt rotates
// the panel upwards about the y axis.

#include <vector>

#include "nrradar/common.hpp"

namespace nrradar {

struct ArrayGeometry {
  int n_rows = 32;
  int n_cols = 32;
  double spacing_wavelengths = 0.5;
  double tilt_rad = 0.0;

  int size() const { return n_rows * n_cols; }
  void validate() const;
};

struct Direction {
  double azimuth_rad = 0.0;
  double elevation_rad = 0.0;

  friend bool operator==(const Direction&, const Direction&) = default;
};

/// (cos az cos el, sin az cos el, sin el)
Vec3 unit_vector(Direction dir);
/// Direction of a non-zero vector; azimuth wrapped to [-pi, pi).
Direction direction_of(Vec3 v);

/// Row and column factors of a separable steering vector: a = row (x) col.
struct SteeringFactors {
  CVector row;  // length n_rows, unit norm
  CVector col;  // length n_cols, unit norm
};

SteeringFactors steering_factors(const ArrayGeometry& geometry, Direction dir);

/// Full length-N steering vector, element index r * n_cols + c, unit norm.
CVector steering_vector(const ArrayGeometry& geometry, Direction dir);

/// a(beam)^H a(path) evaluated through the separable factors in O(rows + cols).
Complex steering_inner(const SteeringFactors& beam, const SteeringFactors& path);

/// (w^H a_rx)(a_tx^H f)
Complex beamformed_gain(std::span<const Complex> w, std::span<const Complex> a_rx,
                        std::span<const Complex> a_tx, std::span<const Complex> f);

struct AngleSpan {
  double min_rad = 0.0;
  double max_rad = 0.0;
  double width() const { return max_rad - min_rad; }
  double center() const { return 0.5 * (min_rad + max_rad); }
};

struct Beam {
  Direction direction;
  SteeringFactors factors;

  CVector weights() const;
};

/// Beams on a uniform (azimuth, elevation) raster, elevation-major order.
class Codebook {
 public:
  Codebook(ArrayGeometry geometry, std::vector<Beam> beams, int n_az, int n_el, AngleSpan az, AngleSpan el);

  const ArrayGeometry& geometry() const { return geometry_; }
  std::size_t size() const { return beams_.size(); }
  bool empty() const { return beams_.empty(); }
  const Beam& operator[](std::size_t i) const { return beams_[i]; }
  const std::vector<Beam>& beams() const { return beams_; }

  int n_az() const { return n_az_; }
  int n_el() const { return n_el_; }
  double az_step_rad() const;
  double el_step_rad() const;
  std::size_t index(int i_az, int i_el) const { return static_cast<std::size_t>(i_el * n_az_ + i_az); }

 private:
  ArrayGeometry geometry_;
  std::vector<Beam> beams_;
  int n_az_;
  int n_el_;
  AngleSpan az_;
  AngleSpan el_;
};

Codebook dft_codebook(const ArrayGeometry& geometry, int n_az, int n_el, AngleSpan az_span, AngleSpan el_span);

}  // namespace nrradar
