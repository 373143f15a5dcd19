#include "nlsv/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlsv/error.hpp"

namespace nlsv {

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Grid::Grid(int n, double box_length) : n_(n), box_length_(box_length) {
  require(n >= 8, "grid: n must be >= 8 (got " + std::to_string(n) + ")");
  require((n & (n - 1)) == 0, "grid: n must be a power of two (got " + std::to_string(n) + ")");
  require(std::isfinite(box_length) && box_length > 0.0, "grid: box_length must be positive");
  k_.resize(n);
  k_derivative_.resize(n);
  const double dk = 2.0 * std::numbers::pi / box_length;
  for (int i = 0; i < n; ++i) {
    k_[i] = dk * mode(i);
    k_derivative_[i] = (i == n / 2) ? 0.0 : k_[i];
  }
}

double Grid::cell_volume() const noexcept {
  const double h = spacing();
  return h * h * h;
}

Vec3 Grid::point(std::size_t idx) const noexcept {
  const std::size_t n = n_;
  const int ix = static_cast<int>(idx % n);
  const int iy = static_cast<int>((idx / n) % n);
  const int iz = static_cast<int>(idx / (n * n));
  return {coordinate(ix), coordinate(iy), coordinate(iz)};
}

std::vector<double> wavenumber_squared(const Grid& g) {
  const int n = g.n();
  const auto& k = g.wavenumbers();
  std::vector<double> out(g.size());
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) out[idx++] = k[ix] * k[ix] + k[iy] * k[iy] + k[iz] * k[iz];
  return out;
}

// ---------------------------------------------------------------------------

Field::Field(const Grid& grid) : grid_(grid), values_(grid.size(), Complex{}) {}

Field::Field(const Grid& grid, ComplexBuffer values) : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "field: value count does not match grid");
}

Field& Field::operator*=(Complex s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field& Field::operator+=(const Field& other) {
  require(other.grid_ == grid_, "field: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require(other.grid_ == grid_, "field: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

RealField Field::real_part() const {
  RealField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].real();
  return out;
}

RealField Field::modulus_squared() const {
  RealField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = std::norm(values_[i]);
  return out;
}

RealField::RealField(const Grid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

RealField::RealField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "real field: value count does not match grid");
}

bool RealField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field RealField::to_complex() const {
  Field out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i];
  return out;
}

SpectralField::SpectralField(const Grid& grid, ComplexBuffer coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  require(coeffs_.size() == grid_.size(), "spectral field: coefficient count does not match grid");
}

const Complex& SpectralField::at_mode(int mx, int my, int mz) const {
  const int n = grid_.n();
  auto wrap = [n](int m) { return ((m % n) + n) % n; };
  return coeffs_[grid_.index(wrap(mx), wrap(my), wrap(mz))];
}

// ---------------------------------------------------------------------------

SpectralField transform_forward(const Field& f) {
  ComplexBuffer data = f.buffer();
  fft3_forward(data, f.grid().n());
  const double scale = 1.0 / static_cast<double>(f.size());
  for (auto& c : data) c *= scale;
  return SpectralField(f.grid(), std::move(data));
}

Field transform_inverse(const SpectralField& s) {
  ComplexBuffer data(s.coefficients().begin(), s.coefficients().end());
  fft3_backward(data, s.grid().n());
  return Field(s.grid(), std::move(data));
}

double spectral_mass(const SpectralField& s) {
  double sum = 0.0;
  for (const auto& c : s.coefficients()) sum += std::norm(c);
  const double L = s.grid().box_length();
  return sum * L * L * L;
}

double integrate_power(const Field& f, double p) {
  require(p >= 1.0 && std::isfinite(p), "integrate_power: exponent must be finite and >= 1");
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& v : f.values()) sum += std::norm(v);
  } else if (p == 4.0) {
    for (const auto& v : f.values()) {
      const double a = std::norm(v);
      sum += a * a;
    }
  } else if (p == 6.0) {
    for (const auto& v : f.values()) {
      const double a = std::norm(v);
      sum += a * a * a;
    }
  } else {
    for (const auto& v : f.values()) sum += std::pow(std::abs(v), p);
  }
  return sum * f.grid().cell_volume();
}

double lp_norm(const Field& f, double p) {
  if (std::isinf(p) && p > 0) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  const bool supported = p == 2.0 || p == 3.0 || p == 4.0 || p == 5.0 || p == 6.0;
  if (!supported) fail(ErrorCode::InvalidArgument, "lp_norm: unsupported exponent p = " + std::to_string(p));
  return std::pow(integrate_power(f, p), 1.0 / p);
}

double grad_norm_sq(const SpectralField& s) {
  const Grid& g = s.grid();
  const int n = g.n();
  const auto& k = g.wavenumbers();
  const auto c = s.coefficients();
  double sum = 0.0;
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy) {
      const double kyz = k[iy] * k[iy] + k[iz] * k[iz];
      for (int ix = 0; ix < n; ++ix, ++idx) sum += (k[ix] * k[ix] + kyz) * std::norm(c[idx]);
    }
  const double L = g.box_length();
  return sum * L * L * L;
}

double grad_norm_sq(const Field& f) { return grad_norm_sq(transform_forward(f)); }

double integrate(const RealField& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return sum * f.grid().cell_volume();
}

double integrate_weighted_density(const RealField& w, const Field& u) {
  require(w.grid() == u.grid(), "integrate_weighted_density: grid mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * std::norm(u[i]);
  return sum * u.grid().cell_volume();
}

Complex inner_product(const Field& a, const Field& b) {
  require(a.grid() == b.grid(), "inner_product: grid mismatch");
  Complex sum{};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum * a.grid().cell_volume();
}

std::array<Field, 3> spectral_gradient(const Field& f) {
  const Grid& g = f.grid();
  const int n = g.n();
  const auto& k = g.derivative_wavenumbers();
  ComplexBuffer hat = f.buffer();
  fft3_forward(hat, n);
  const double scale = 1.0 / static_cast<double>(f.size());
  std::array<Field, 3> out{Field(g), Field(g), Field(g)};
  for (int axis = 0; axis < 3; ++axis) {
    ComplexBuffer& d = out[axis].buffer();
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix, ++idx) {
          const double kk = axis == 0 ? k[ix] : (axis == 1 ? k[iy] : k[iz]);
          d[idx] = Complex(0.0, kk * scale) * hat[idx];
        }
    fft3_backward(d, n);
  }
  return out;
}

Field spectral_laplacian(const Field& f) {
  const Grid& g = f.grid();
  const auto k2 = wavenumber_squared(g);
  ComplexBuffer data = f.buffer();
  fft3_forward(data, g.n());
  const double scale = 1.0 / static_cast<double>(f.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= -k2[i] * scale;
  fft3_backward(data, g.n());
  return Field(g, std::move(data));
}

Field shifted(const Field& f, int sx, int sy, int sz) {
  const Grid& g = f.grid();
  const int n = g.n();
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  Field out(g);
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        out[g.index(wrap(ix + sx), wrap(iy + sy), wrap(iz + sz))] = f[g.index(ix, iy, iz)];
  return out;
}

namespace {

bool in_two_thirds_band(int m, int n) { return 3 * std::abs(m) <= n; }

}  // namespace

void apply_two_thirds_mask(SpectralField& s) {
  const Grid& g = s.grid();
  const int n = g.n();
  auto c = s.coefficients();
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix, ++idx)
        if (!in_two_thirds_band(g.mode(ix), n) || !in_two_thirds_band(g.mode(iy), n) ||
            !in_two_thirds_band(g.mode(iz), n))
          c[idx] = 0.0;
}

double high_band_mass_fraction(const SpectralField& s) {
  const Grid& g = s.grid();
  const int n = g.n();
  const auto c = s.coefficients();
  double high = 0.0;
  double total = 0.0;
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix, ++idx) {
        const double a = std::norm(c[idx]);
        total += a;
        if (!in_two_thirds_band(g.mode(ix), n) || !in_two_thirds_band(g.mode(iy), n) ||
            !in_two_thirds_band(g.mode(iz), n))
          high += a;
      }
  return total > 0.0 ? high / total : 0.0;
}

Field random_band_limited(const Grid& g, std::mt19937_64& rng, double envelope_width, Vec3 center) {
  require(envelope_width > 0.0, "random_band_limited: envelope width must be positive");
  const int n = g.n();
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexBuffer hat(g.size(), Complex{});
  const double band = n / 3.0;
  std::size_t idx = 0;
  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix, ++idx) {
        const double re = normal(rng);
        const double im = normal(rng);
        const int mx = g.mode(ix), my = g.mode(iy), mz = g.mode(iz);
        if (!in_two_thirds_band(mx, n) || !in_two_thirds_band(my, n) || !in_two_thirds_band(mz, n)) continue;
        const double m2 = static_cast<double>(mx * mx + my * my + mz * mz);
        hat[idx] = Complex(re, im) * std::exp(-m2 / (0.0625 * band * band));
      }
  fft3_backward(hat, n);
  const double w2 = envelope_width * envelope_width;
  double peak = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const Vec3 d = g.point(i) - center;
    hat[i] *= std::exp(-dot(d, d) / w2);
    peak = std::max(peak, std::abs(hat[i]));
  }
  Field out(g, std::move(hat));
  SpectralField s = transform_forward(out);
  apply_two_thirds_mask(s);
  Field limited = transform_inverse(s);
  if (peak > 0.0) limited *= 1.0 / peak;
  return limited;
}

}  // namespace nlsv
