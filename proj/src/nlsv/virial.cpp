#include "nlsv/virial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlsv/error.hpp"

namespace nlsv {

namespace {

// Blend on t = s - 1 in [0, 1]: (1 - t)^5 (1 + 7t + 26t^2 + 70t^3 + 155t^4).
constexpr std::array<double, 10> kBlend = {1.0, 2.0, 1.0, 0.0, 0.0, -301.0, 973.0, -1226.0, 705.0, -155.0};

}  // namespace

std::array<double, 5> cutoff_radial(double s) {
  if (s <= 1.0) return {s * s, 2.0 * s, 2.0, 0.0, 0.0};
  if (s >= 2.0) return {0.0, 0.0, 0.0, 0.0, 0.0};
  const double t = s - 1.0;
  std::array<double, 5> d{};
  for (int k = 0; k < 5; ++k) {
    double acc = 0.0;
    for (int j = static_cast<int>(kBlend.size()) - 1; j >= k; --j) {
      double falling = 1.0;  // j! / (j - k)!
      for (int m = 0; m < k; ++m) falling *= j - m;
      acc = acc * t + kBlend[j] * falling;
    }
    d[k] = acc;
  }
  return d;
}

CutoffProfile::CutoffProfile(const Grid& g)
    : chi(g),
      grad{RealField(g), RealField(g), RealField(g)},
      hess{RealField(g), RealField(g), RealField(g), RealField(g), RealField(g), RealField(g)},
      lap(g),
      bilap(g) {}

CutoffProfile build_cutoff(const Grid& g, double R) {
  if (!(R > 0.0) || !(2.0 * R < 0.5 * g.box_length()))
    fail(ErrorCode::InvalidArgument, "build_cutoff: need 0 < 2R < L/2 so the support fits in the box");
  CutoffProfile cut(g);
  cut.R = R;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = g.point(i);
    const double r = norm(x);
    const double s = r / R;
    if (s <= 1.0) {
      cut.chi[i] = r * r;
      cut.grad[0][i] = 2.0 * x.x;
      cut.grad[1][i] = 2.0 * x.y;
      cut.grad[2][i] = 2.0 * x.z;
      cut.hess[0][i] = cut.hess[1][i] = cut.hess[2][i] = 2.0;
      cut.lap[i] = 6.0;
      continue;
    }
    if (s >= 2.0) continue;
    const auto phi = cutoff_radial(s);
    const double d1 = R * phi[1];
    const double d2 = phi[2];
    const double d3 = phi[3] / R;
    const double d4 = phi[4] / (R * R);
    const double e[3] = {x.x / r, x.y / r, x.z / r};
    cut.chi[i] = R * R * phi[0];
    for (int a = 0; a < 3; ++a) cut.grad[a][i] = d1 * e[a];
    const int pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    for (int p = 0; p < 6; ++p) {
      const int a = pairs[p][0], b = pairs[p][1];
      cut.hess[p][i] = d2 * e[a] * e[b] + d1 / r * ((a == b ? 1.0 : 0.0) - e[a] * e[b]);
    }
    cut.lap[i] = d2 + 2.0 * d1 / r;
    cut.bilap[i] = d4 + 4.0 * d3 / r;
  }
  return cut;
}

double virial_z(const Field& u, const CutoffProfile& cut) { return integrate_weighted_density(cut.chi, u); }

namespace {

double first_from_gradient(const Field& u, const std::array<Field, 3>& du, const CutoffProfile& cut) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Complex s = cut.grad[0][i] * du[0][i] + cut.grad[1][i] * du[1][i] + cut.grad[2][i] * du[2][i];
    acc += (s * std::conj(u[i])).imag();
  }
  return 2.0 * acc * u.grid().cell_volume();
}

double second_from_gradient(const Field& u, const std::array<Field, 3>& du, const RealField& coupling,
                            const CutoffProfile& cut, int sigma) {
  double hess_term = 0.0, quartic = 0.0, bilap = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Complex a = du[0][i], b = du[1][i], c = du[2][i];
    hess_term += cut.hess[0][i] * std::norm(a) + cut.hess[1][i] * std::norm(b) + cut.hess[2][i] * std::norm(c) +
                 2.0 * (cut.hess[3][i] * (a * std::conj(b)).real() + cut.hess[4][i] * (a * std::conj(c)).real() +
                        cut.hess[5][i] * (b * std::conj(c)).real());
    const double rho = std::norm(u[i]);
    quartic += cut.lap[i] * rho * rho;
    bilap += cut.bilap[i] * rho;
    pot += coupling[i] * rho;
  }
  const double dv = u.grid().cell_volume();
  return (4.0 * hess_term - sigma * quartic - bilap - 2.0 * pot) * dv;
}

}  // namespace

double virial_first(const Field& u, const CutoffProfile& cut) {
  require(u.grid() == cut.chi.grid(), "virial_first: grid mismatch");
  return first_from_gradient(u, spectral_gradient(u), cut);
}

RealField cutoff_potential_coupling(const PotentialSpec& spec, const CutoffProfile& cut) {
  const Grid& g = cut.chi.grid();
  RealField out(g);
  if (spec.is_zero()) return out;
  const auto gv = gradient_field(spec, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = cut.grad[0][i] * gv[0][i] + cut.grad[1][i] * gv[1][i] + cut.grad[2][i] * gv[2][i];
  return out;
}

double virial_second(const Field& u, const RealField& coupling, const CutoffProfile& cut, int sigma) {
  require(u.grid() == cut.chi.grid() && coupling.grid() == u.grid(), "virial_second: grid mismatch");
  return second_from_gradient(u, spectral_gradient(u), coupling, cut, sigma);
}

double virial_second(const Field& u, const PotentialSpec& spec, const CutoffProfile& cut, int sigma) {
  return virial_second(u, cutoff_potential_coupling(spec, cut), cut, sigma);
}

double coercivity_probe(const Field& u, const RealField& x_dot_grad_v) {
  require(u.grid() == x_dot_grad_v.grid(), "coercivity_probe: grid mismatch");
  const double grad_sq = grad_norm_sq(u);
  const double l4 = integrate_power(u, 4.0);
  return 8.0 * grad_sq - 6.0 * l4 - 4.0 * integrate_weighted_density(x_dot_grad_v, u);
}

double coercivity_probe(const Field& u, const PotentialSpec& spec) {
  if (spec.is_zero()) return coercivity_probe(u, RealField(u.grid()));
  return coercivity_probe(u, radial_derivative(spec, u.grid()));
}

double defocusing_beta(const AdmissibilityReport& report) {
  if (!report.confining_kato)
    fail(ErrorCode::Unsupported, "defocusing_beta: ||(x.grad V)_+||_K unavailable for this potential");
  constexpr double four_pi = 4.0 * std::numbers::pi;
  return 4.0 * (2.0 - *report.confining_kato / four_pi) / (1.0 + report.kato_norm_positive / four_pi);
}

FrameHook virial_hook(const PotentialSpec& spec, const CutoffProfile& cut, int sigma) {
  const Grid& g = cut.chi.grid();
  RealField coupling = cutoff_potential_coupling(spec, cut);
  RealField xgv = spec.is_zero() ? RealField(g) : radial_derivative(spec, g);
  return [&cut, sigma, coupling = std::move(coupling), xgv = std::move(xgv)](const Field& u, FrameDiagnostics& d) {
    const auto du = spectral_gradient(u);
    d.z = virial_z(u, cut);
    d.dz = first_from_gradient(u, du, cut);
    d.d2z = second_from_gradient(u, du, coupling, cut, sigma);
    d.coercivity = 8.0 * d.grad_sq - 6.0 * std::pow(d.l4, 4.0) - 4.0 * integrate_weighted_density(xgv, u);
  };
}

VirialSeries virial_series(const Trajectory& traj) {
  const auto& f = traj.frames;
  VirialSeries s;
  for (std::size_t i = 1; i + 1 < f.size(); ++i) {
    require(f[i - 1].z && f[i].z && f[i + 1].z && f[i].dz && f[i].d2z,
            "virial_series: frames lack virial quantities (run with virial_hook)");
    const double h1 = f[i].t - f[i - 1].t;
    const double h2 = f[i + 1].t - f[i].t;
    const double z0 = *f[i - 1].z, z1 = *f[i].z, z2 = *f[i + 1].z;
    s.times.push_back(f[i].t);
    s.z.push_back(z1);
    s.dz_analytic.push_back(*f[i].dz);
    s.d2z_analytic.push_back(*f[i].d2z);
    // Three-point formulas, second order on uniform spacing.
    s.dz_fd.push_back((h1 * h1 * (z2 - z1) + h2 * h2 * (z1 - z0)) / (h1 * h2 * (h1 + h2)));
    s.d2z_fd.push_back(2.0 * (h1 * (z2 - z1) - h2 * (z1 - z0)) / (h1 * h2 * (h1 + h2)));
    s.coercivity.push_back(f[i].coercivity.value_or(std::numeric_limits<double>::quiet_NaN()));
  }
  return s;
}

VirialErrors virial_errors(const VirialSeries& s) {
  VirialErrors e;
  double dz_scale = 0.0, d2z_scale = 0.0, dz_err = 0.0, d2z_err = 0.0;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    dz_scale = std::max(dz_scale, std::abs(s.dz_analytic[i]));
    d2z_scale = std::max(d2z_scale, std::abs(s.d2z_analytic[i]));
    dz_err = std::max(dz_err, std::abs(s.dz_fd[i] - s.dz_analytic[i]));
    d2z_err = std::max(d2z_err, std::abs(s.d2z_fd[i] - s.d2z_analytic[i]));
  }
  e.dz = dz_scale > 0.0 ? dz_err / dz_scale : dz_err;
  e.d2z = d2z_scale > 0.0 ? d2z_err / d2z_scale : d2z_err;
  return e;
}

}  // namespace nlsv
