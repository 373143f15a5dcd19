#include "nlsv/ground_states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nlsv/error.hpp"

namespace nlsv {

namespace {

// out = IFFT(m(k) * FFT(f)) for a real radial multiplier table.
Field apply_multiplier(const Field& f, const std::vector<double>& m) {
  ComplexBuffer data = f.buffer();
  const int n = f.grid().n();
  fft3_forward(data, n);
  const double scale = 1.0 / static_cast<double>(f.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= m[i] * scale;
  fft3_backward(data, n);
  return Field(f.grid(), std::move(data));
}

double l2(const Field& f) { return std::sqrt(integrate_power(f, 2.0)); }

double re_inner(const Field& a, const Field& b) { return inner_product(a, b).real(); }

void fill_pohozaev(GroundStateResult& r) {
  const double w2 = r.omega * r.omega;
  const FormValues& f = r.norms;
  r.pohozaev_residual_1 = std::abs(f.h_form - 3.0 * w2 * f.mass) / f.h_form;
  r.pohozaev_residual_2 = std::abs(f.l4_fourth - 4.0 * w2 * f.mass) / f.l4_fourth;
}

// Real part, with stray negative values (ringing in the far tail) projected to
// their modulus.
Field project_real_nonnegative(const Field& f) {
  Field out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::abs(f[i].real());
  return out;
}

}  // namespace

Field interpolate_radial(const RadialProfile& q, const Grid& g, Vec3 center, double scale) {
  require(scale > 0.0, "interpolate_radial: scale must be positive");
  return Field::from_function(g, [&](const Vec3& x) { return Complex(q(norm(x - center) / scale), 0.0); });
}

double elliptic_residual(const Field& q, const RealField& V, double omega) {
  require(q.grid() == V.grid(), "elliptic_residual: grid mismatch");
  const Field lap = spectral_laplacian(q);
  Field res(q.grid());
  Field cubic(q.grid());
  const double w2 = omega * omega;
  for (std::size_t i = 0; i < q.size(); ++i) {
    cubic[i] = std::norm(q[i]) * q[i];
    res[i] = -lap[i] + V[i] * q[i] + w2 * q[i] - cubic[i];
  }
  return l2(res) / l2(cubic);
}

FreeGroundState solve_free_ground_state(const Grid& g, const RadialShootingOptions& opts) {
  RadialProfile radial = solve_radial_ground_state(opts);
  const RadialNorms rn = radial_norms(radial);
  GroundStateResult r(g);
  r.profile = interpolate_radial(radial, g);
  const RealField zero(g);
  r.norms = form_values(r.profile, zero);
  r.omega = 1.0;
  fill_pohozaev(r);
  r.elliptic_residual = elliptic_residual(r.profile, zero, 1.0);
  r.wv_value = wv(r.norms);
  r.source = "free";
  r.extra = pohozaev_extra_term(r.profile, 1.0, r.norms, PotentialSpec::zero());
  return {std::move(radial), rn, std::move(r)};
}

Field maximizer_initial_guess(const RadialProfile& q, const RealField& V, double compression) {
  const auto vals = V.values();
  const std::size_t imin = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  return interpolate_radial(q, V.grid(), V.grid().point(imin), compression);
}

PohozaevExtra pohozaev_extra_term(const Field& q, double omega, const FormValues& norms,
                                  const PotentialSpec& spec) {
  PohozaevExtra p;
  if (!spec.is_zero()) {
    const RealField V = evaluate(spec, q.grid());
    const RealField xgv = radial_derivative(spec, q.grid());
    RealField w(q.grid());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 4.0 * V[i] + 2.0 * xgv[i];
    p.extra = integrate_weighted_density(w, q);
  }
  const double w2 = omega * omega;
  p.relative = std::abs(p.extra) / norms.h_form;
  p.residual_with_extra_1 = std::abs(norms.h_form - 3.0 * w2 * norms.mass - p.extra) / norms.h_form;
  p.residual_with_extra_2 = std::abs(norms.l4_fourth - 4.0 * w2 * norms.mass - p.extra) / norms.l4_fourth;
  return p;
}

// ---------------------------------------------------------------------------

namespace {

struct AscentState {
  Field psi;
  Field grad;        // L^2 gradient of log W_V
  double log_w = 0.0;
  double mass = 0.0;
  double h_form = 0.0;
  double l4 = 0.0;
  double residual = 0.0;  // relative Euler-Lagrange residual, projected on the 2/3 band
  double cubic_norm = 0.0;

  explicit AscentState(const Grid& g) : psi(g), grad(g) {}
};

AscentState evaluate_state(Field psi, const RealField& V, const std::vector<double>& k2) {
  const Grid& g = psi.grid();
  AscentState s(g);
  const SpectralField hat = transform_forward(psi);
  const double grad_sq = grad_norm_sq(hat);
  ComplexBuffer lap(hat.coefficients().begin(), hat.coefficients().end());
  for (std::size_t i = 0; i < lap.size(); ++i) lap[i] *= k2[i];
  fft3_backward(lap, g.n());  // -Lap psi
  const double dv = g.cell_volume();
  double mass = 0.0, l4 = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a = std::norm(psi[i]);
    mass += a;
    l4 += a * a;
    pot += V[i] * a;
  }
  s.mass = mass * dv;
  s.l4 = l4 * dv;
  s.h_form = grad_sq + pot * dv;
  if (!(s.h_form > 0.0)) {
    s.log_w = -std::numeric_limits<double>::infinity();
    return s;
  }
  s.log_w = std::log(s.l4) - 0.5 * std::log(s.mass) - 1.5 * std::log(s.h_form);

  // r = H psi + (h/3M) psi - (4h/3P)|psi|^2 psi = -(h/3) grad
  double cub2 = 0.0;
  const double a = s.h_form / (3.0 * s.mass);
  const double b = 4.0 * s.h_form / (3.0 * s.l4);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const Complex hpsi = lap[i] + V[i] * psi[i];
    const Complex cubic = std::norm(psi[i]) * psi[i];
    const Complex r = hpsi + a * psi[i] - b * cubic;
    cub2 += std::norm(b * cubic);
    s.grad[i] = -3.0 / s.h_form * r;
  }
  s.cubic_norm = std::sqrt(cub2 * dv);
  s.psi = std::move(psi);
  return s;
}

// Ascent direction P grad with P = kappa/(kappa + |k|^2) on the 2/3 band and 0
// outside it. The iteration is a Galerkin scheme on that band: iterates stay
// band-limited, which also keeps them away from grid-scale concentration where
// the discrete W_V exceeds the continuum supremum. The residual is measured on
// the same band.
Field ascent_direction(AscentState& s, const std::vector<double>& precond) {
  const Grid& g = s.psi.grid();
  ComplexBuffer data = s.grad.buffer();
  fft3_forward(data, g.n());
  const double scale = 1.0 / static_cast<double>(data.size());
  double band2 = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] *= scale;
    if (precond[i] > 0.0) band2 += std::norm(data[i]);
    data[i] *= precond[i];
  }
  const double L = g.box_length();
  s.residual = (s.h_form / 3.0) * std::sqrt(band2 * L * L * L) / s.cubic_norm;
  fft3_backward(data, g.n());
  return Field(g, std::move(data));
}

Field normalized(Field f) {
  const double n = l2(f);
  f *= 1.0 / n;
  return f;
}

}  // namespace

GroundStateResult maximize_wv(const PotentialSpec& spec, const RealField& V, const Field& init,
                              const MaximizerOptions& opts) {
  require(V.grid() == init.grid(), "maximize_wv: grid mismatch");
  const bool has_negative = std::any_of(spec.terms().begin(), spec.terms().end(),
                                        [](const PotentialTerm& t) { return t.amplitude < 0.0; }) &&
                            std::any_of(V.values().begin(), V.values().end(), [](double v) { return v < 0.0; });
  if (!has_negative)
    fail(ErrorCode::InvalidArgument,
         "maximize_wv: V_- = 0, supremum not attained; use free Q");
  const double k_neg = kato_norm(potential_profile(spec, Part::Negative));
  if (k_neg >= 4.0 * std::numbers::pi) {
    std::ostringstream msg;
    msg << "maximize_wv: ||V_-||_K = " << k_neg << " >= 4 pi, the form may not be coercive";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  require(init.all_finite() && l2(init) > 0.0, "maximize_wv: initial field must be nonzero and finite");

  const Grid& g = V.grid();
  const std::vector<double> k2 = wavenumber_squared(g);
  Field start = [&] {
    SpectralField hat = transform_forward(init);
    apply_two_thirds_mask(hat);
    return transform_inverse(hat);
  }();
  AscentState cur = evaluate_state(normalized(std::move(start)), V, k2);
  const double kappa = cur.h_form / (3.0 * cur.mass);
  std::vector<double> precond(k2.size());
  {
    const int n = g.n();
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix, ++idx) {
          const bool in_band = 3 * std::abs(g.mode(ix)) <= n && 3 * std::abs(g.mode(iy)) <= n &&
                               3 * std::abs(g.mode(iz)) <= n;
          precond[idx] = in_band ? kappa / (kappa + k2[idx]) : 0.0;
        }
  }

  // On a periodic box nearly constant states with H -> 0+ make W_V unbounded,
  // so an ascent that spreads to the box faces is stopped.
  std::vector<std::size_t> rim;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = g.point(i);
    if (std::max({std::abs(x.x), std::abs(x.y), std::abs(x.z)}) > 0.375 * g.box_length()) rim.push_back(i);
  }
  auto rim_fraction = [&](const Field& psi) {
    double m = 0.0;
    for (std::size_t i : rim) m += std::norm(psi[i]);
    return m * g.cell_volume() / integrate_power(psi, 2.0);
  };

  GroundStateResult result(g);
  Field dir = ascent_direction(cur, precond);
  double tau = 0.0;
  {
    const double dn = l2(dir);
    tau = dn > 0.0 ? 0.05 / dn : 1.0;
  }
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    result.residual_history.push_back(cur.residual);
    result.wv_history.push_back(std::exp(cur.log_w));
    if (cur.residual < opts.tol) break;
    if (const double rf = rim_fraction(cur.psi); rf > opts.max_rim_fraction) {
      std::ostringstream msg;
      msg << "maximize_wv: ascent spreads to the box faces (mass fraction " << rf
          << " beyond 3/8 of the box); enlarge the box";
      throw ConvergenceError(msg.str(), result.residual_history);
    }

    const double slope = re_inner(cur.grad, dir);
    if (!(slope > 0.0)) break;
    // trust region: never move more than max_step relative to ||psi|| = 1
    double step = std::min(tau, opts.max_step / l2(dir));
    bool accepted = false;
    AscentState trial(g);
    for (int bt = 0; bt < 60; ++bt) {
      Field cand = cur.psi;
      for (std::size_t i = 0; i < cand.size(); ++i) cand[i] += step * dir[i];
      trial = evaluate_state(normalized(std::move(cand)), V, k2);
      const double gain = trial.log_w - cur.log_w;
      const double round = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(cur.log_w);
      if (gain >= opts.armijo * step * slope - round) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    Field new_dir = ascent_direction(trial, precond);
    // BB2 step in the preconditioned metric: -<s, y> / <y, P y>
    double sy = 0.0, ypy = 0.0;
    for (std::size_t i = 0; i < cur.psi.size(); ++i) {
      const Complex s = trial.psi[i] - cur.psi[i];
      const Complex y = trial.grad[i] - cur.grad[i];
      const Complex py = new_dir[i] - dir[i];
      sy += (std::conj(s) * y).real();
      ypy += (std::conj(y) * py).real();
    }
    const double bb = (ypy != 0.0) ? -sy / ypy : 0.0;
    tau = (std::isfinite(bb) && bb > 0.0) ? bb : 2.0 * step;
    cur = std::move(trial);
    dir = std::move(new_dir);
  }
  result.iterations = it;
  if (cur.residual >= opts.tol) {
    std::ostringstream msg;
    msg << "maximize_wv: no convergence after " << it << " iterations, Euler-Lagrange residual "
        << cur.residual << " (target " << opts.tol << ")";
    throw ConvergenceError(msg.str(), result.residual_history);
  }

  {
    const double width_cells = 1.0 / (std::sqrt(cur.h_form / (3.0 * cur.mass)) * g.spacing());
    if (width_cells < opts.min_width_cells) {
      std::ostringstream msg;
      msg << "maximize_wv: maximizer is under-resolved (1/omega = " << width_cells
          << " cells); refine the grid";
      fail(ErrorCode::Numerical, msg.str());
    }
  }

  // psi -> Q = 2 ||H^{1/2} psi|| / (sqrt 3 ||psi||_4^2) psi
  const Field psi = project_real_nonnegative(cur.psi);
  const FormValues fp = form_values(psi, V);
  const double c = 2.0 * std::sqrt(fp.h_form) / (std::sqrt(3.0) * std::sqrt(fp.l4_fourth));
  result.profile = Complex(c, 0.0) * psi;
  result.norms = form_values(result.profile, V);
  result.omega = std::sqrt(result.norms.h_form) / (std::sqrt(3.0) * std::sqrt(result.norms.mass));
  fill_pohozaev(result);
  result.elliptic_residual = elliptic_residual(result.profile, V, result.omega);
  result.wv_value = wv(result.norms);
  result.source = "maximizer";
  if (spec.has_gradient()) result.extra = pohozaev_extra_term(result.profile, result.omega, result.norms, spec);
  return result;
}

GroundStateResult solve_fixed_frequency(const PotentialSpec& spec, const RealField& V, double omega,
                                        const Field& init, double tol, int max_iterations) {
  require(omega > 0.0, "solve_fixed_frequency: omega must be positive");
  require(V.grid() == init.grid(), "solve_fixed_frequency: grid mismatch");
  const Grid& g = V.grid();
  const auto k2 = wavenumber_squared(g);
  const double w2 = omega * omega;
  std::vector<double> l0(k2.size()), inv_l0(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    l0[i] = k2[i] + w2;
    inv_l0[i] = 1.0 / l0[i];
  }
  GroundStateResult result(g);
  Field q = init;
  int it = 0;
  double res = elliptic_residual(q, V, omega);
  for (; it < max_iterations && res > tol; ++it) {
    result.residual_history.push_back(res);
    Field nonlin(g);
    for (std::size_t i = 0; i < q.size(); ++i) nonlin[i] = std::norm(q[i]) * q[i] - V[i] * q[i];
    const Field lq = apply_multiplier(q, l0);
    const double s = re_inner(q, lq) / re_inner(q, nonlin);
    require(s > 0.0 && std::isfinite(s), "solve_fixed_frequency: stabilizing factor lost positivity");
    Field next = apply_multiplier(nonlin, inv_l0);
    next *= std::pow(s, 1.5);
    q = std::move(next);
    res = elliptic_residual(q, V, omega);
  }
  result.iterations = it;
  if (res > tol) {
    std::ostringstream msg;
    msg << "solve_fixed_frequency: residual " << res << " after " << it << " iterations";
    throw ConvergenceError(msg.str(), result.residual_history);
  }
  result.profile = project_real_nonnegative(q);
  result.norms = form_values(result.profile, V);
  result.omega = omega;
  fill_pohozaev(result);
  result.elliptic_residual = elliptic_residual(result.profile, V, omega);
  result.wv_value = wv(result.norms);
  result.source = "fixed_frequency";
  if (spec.has_gradient()) result.extra = pohozaev_extra_term(result.profile, omega, result.norms, spec);
  return result;
}

}  // namespace nlsv
