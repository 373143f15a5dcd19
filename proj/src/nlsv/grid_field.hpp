#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "nlsv/fft.hpp"

namespace nlsv {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& a);

/// Periodic cube [-L/2, L/2)^3 sampled at n points per axis.
///
/// Node (ix, iy, iz) sits at x = -L/2 + ix*h, so the origin is the node
/// (n/2, n/2, n/2). Storage is row-major with x fastest:
/// index = (iz*n + iy)*n + ix.
class Grid {
 public:
  Grid(int n, double box_length);

  int n() const noexcept { return n_; }
  double box_length() const noexcept { return box_length_; }
  double spacing() const noexcept { return box_length_ / n_; }
  double cell_volume() const noexcept;
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_ * n_; }

  double coordinate(int i) const noexcept { return -0.5 * box_length_ + i * spacing(); }
  std::size_t index(int ix, int iy, int iz) const noexcept {
    return (static_cast<std::size_t>(iz) * n_ + iy) * n_ + ix;
  }
  Vec3 point(std::size_t idx) const noexcept;

  /// Per-axis wavenumbers 2*pi*m/L in FFT order m = 0..n/2-1, -n/2..-1.
  const std::vector<double>& wavenumbers() const noexcept { return k_; }
  /// Wavenumbers for first derivatives: identical except the Nyquist entry is 0.
  const std::vector<double>& derivative_wavenumbers() const noexcept { return k_derivative_; }
  /// Signed mode index m for FFT position i.
  int mode(int i) const noexcept { return i < n_ / 2 ? i : i - n_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.box_length_ == b.box_length_;
  }

 private:
  int n_;
  double box_length_;
  std::vector<double> k_;
  std::vector<double> k_derivative_;
};

/// |k|^2 for every spectral position of the grid.
std::vector<double> wavenumber_squared(const Grid& g);

class RealField;

/// Complex samples on a Grid.
class Field {
 public:
  explicit Field(const Grid& grid);
  Field(const Grid& grid, ComplexBuffer values);

  template <class F>
  static Field from_function(const Grid& grid, F&& f) {
    Field out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.point(i));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<Complex> values() noexcept { return values_; }
  std::span<const Complex> values() const noexcept { return values_; }
  ComplexBuffer& buffer() noexcept { return values_; }
  const ComplexBuffer& buffer() const noexcept { return values_; }
  Complex& operator[](std::size_t i) noexcept { return values_[i]; }
  const Complex& operator[](std::size_t i) const noexcept { return values_[i]; }

  Field& operator*=(Complex s);
  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  friend Field operator*(Complex s, Field f) { return f *= s; }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }

  bool all_finite() const noexcept;
  RealField real_part() const;
  RealField modulus_squared() const;

 private:
  Grid grid_;
  ComplexBuffer values_;
};

/// Real samples on a Grid (potentials, cutoffs, densities).
class RealField {
 public:
  explicit RealField(const Grid& grid);
  RealField(const Grid& grid, std::vector<double> values);

  template <class F>
  static RealField from_function(const Grid& grid, F&& f) {
    RealField out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.point(i));
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  bool all_finite() const noexcept;
  Field to_complex() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Fourier-series coefficients c_k, u(x) = sum_k c_k e^{i k.x}.
/// Parseval: sum_j |u_j|^2 h^3 = L^3 sum_k |c_k|^2.
class SpectralField {
 public:
  SpectralField(const Grid& grid, ComplexBuffer coeffs);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  std::span<Complex> coefficients() noexcept { return coeffs_; }
  ComplexBuffer& buffer() noexcept { return coeffs_; }
  const Complex& at_mode(int mx, int my, int mz) const;

 private:
  Grid grid_;
  ComplexBuffer coeffs_;
};

SpectralField transform_forward(const Field& f);
Field transform_inverse(const SpectralField& s);

/// L^3 * sum |c_k|^2, the continuum mass of the trigonometric interpolant.
double spectral_mass(const SpectralField& s);

/// Discrete L^p norm (sum |u|^p h^3)^{1/p}; p = infinity gives max |u|.
/// Supported exponents: 2, 3, 4, 5, 6 and infinity.
double lp_norm(const Field& f, double p);

/// sum |u|^p h^3 for any p >= 1.
double integrate_power(const Field& f, double p);

/// L^3 sum |k|^2 |c_k|^2, i.e. the integral of |grad u|^2.
double grad_norm_sq(const Field& f);
double grad_norm_sq(const SpectralField& s);

/// sum of f h^3.
double integrate(const RealField& f);
/// sum w |u|^2 h^3.
double integrate_weighted_density(const RealField& w, const Field& u);
/// sum conj(a) b h^3.
Complex inner_product(const Field& a, const Field& b);

/// Spectral partial derivatives d/dx, d/dy, d/dz.
std::array<Field, 3> spectral_gradient(const Field& f);
/// Spectral Laplacian.
Field spectral_laplacian(const Field& f);

/// Translate by whole grid cells, periodic wrap: out(x) = f(x - shift*h).
Field shifted(const Field& f, int sx, int sy, int sz);

/// Zero every mode with |m| > n/3 on any axis (2/3 rule).
void apply_two_thirds_mask(SpectralField& s);
/// Fraction of spectral mass outside the 2/3-rule band.
double high_band_mass_fraction(const SpectralField& s);

/// Random field with Gaussian-weighted spectrum inside the lower two thirds,
/// multiplied by a Gaussian envelope exp(-|x-c|^2/width^2), then band-limited
/// again and scaled to unit peak modulus. The second mask leaves a small
/// ringing tail; with width <= L/10 the mass beyond 3L/8 of the center is
/// below 1e-5 of the total even at n = 32.
Field random_band_limited(const Grid& g, std::mt19937_64& rng, double envelope_width,
                          Vec3 center = {});

}  // namespace nlsv
