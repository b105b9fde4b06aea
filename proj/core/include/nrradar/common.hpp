#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace nrradar {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double horizontal_norm() const { return std::hypot(x, y); }
};

/// Dense complex matrix, column-major so that each slow-time column is contiguous.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

  std::span<Complex> column(std::size_t c) { return {data_.data() + c * rows_, rows_}; }
  std::span<const Complex> column(std::size_t c) const { return {data_.data() + c * rows_, rows_}; }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  CVector data_;
};

/// Circularly-symmetric complex Gaussian sample with total variance `std * std`.
inline Complex complex_gaussian(Rng& rng, double std) {
  std::normal_distribution<double> n(0.0, std / std::sqrt(2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace nrradar
