#include "nlsv/propagator.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nlsv/error.hpp"

namespace nlsv {

void validate(const EvolutionConfig& cfg, const std::string& prefix) {
  std::vector<ConfigViolation> v;
  auto key = [&](const char* name) { return prefix + "." + name; };
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) v.push_back({key("dt"), "must be a finite number > 0"});
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) v.push_back({key("t_end"), "must be a finite number >= 0"});
  if (cfg.sigma < -1 || cfg.sigma > 1) v.push_back({key("sigma"), "must be -1, 0 or 1"});
  if (cfg.save_stride < 1) v.push_back({key("save_stride"), "must be >= 1"});
  if (!(cfg.blowup_factor > 1.0)) v.push_back({key("blowup_factor"), "must be > 1"});
  if (!(cfg.high_band_limit > 0.0 && cfg.high_band_limit <= 1.0))
    v.push_back({key("high_band_limit"), "must lie in (0, 1]"});
  if (cfg.dt > 0.0 && cfg.t_end > 0.0 && std::isfinite(cfg.dt) && std::isfinite(cfg.t_end)) {
    const double steps = cfg.t_end / cfg.dt;
    if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps))
      v.push_back({key("t_end"), "must be an integer multiple of dt"});
  }
  if (!v.empty()) throw ConfigError(std::move(v));
}

namespace {

bool in_band(int m, int n) { return 3 * std::abs(m) <= n; }

}  // namespace

SplitStep::SplitStep(const RealField& V, double dt, int sigma, bool dealias)
    : V_(V), dt_(dt), sigma_(sigma), dealias_(dealias) {
  require(std::isfinite(dt) && dt != 0.0, "SplitStep: dt must be finite and nonzero");
  require(sigma >= -1 && sigma <= 1, "SplitStep: sigma must be -1, 0 or 1");
  const Grid& g = V.grid();
  const auto k2 = wavenumber_squared(g);
  const double scale = 1.0 / static_cast<double>(g.size());
  half_kinetic_.resize(k2.size());
  full_kinetic_.resize(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    half_kinetic_[i] = std::polar(scale, -0.5 * k2[i] * dt);
    full_kinetic_[i] = std::polar(scale, -k2[i] * dt);
  }
  if (dealias_ && sigma_ != 0) {
    const int n = g.n();
    band_.resize(g.size());
    std::size_t idx = 0;
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix, ++idx)
          band_[idx] = in_band(g.mode(ix), n) && in_band(g.mode(iy), n) && in_band(g.mode(iz), n);
  }
}

void SplitStep::kinetic(Field& u, const std::vector<Complex>& phase) const {
  ComplexBuffer& data = u.buffer();
  const int n = u.grid().n();
  fft3_forward(data, n);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= phase[i];
  fft3_backward(data, n);
}

void SplitStep::potential_and_nonlinear(Field& u) const {
  ComplexBuffer& data = u.buffer();
  if (sigma_ == 0) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= std::polar(1.0, -V_[i] * dt_);
  } else if (!dealias_) {
    for (std::size_t i = 0; i < data.size(); ++i)
      data[i] *= std::polar(1.0, -(V_[i] - sigma_ * std::norm(data[i])) * dt_);
  } else {
    // |u| is invariant under this substep, so the phase uses a real,
    // band-limited density and mass is conserved exactly.
    const int n = u.grid().n();
    ComplexBuffer rho(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) rho[i] = std::norm(data[i]);
    fft3_forward(rho, n);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] *= band_[i] ? scale : 0.0;
    fft3_backward(rho, n);
    for (std::size_t i = 0; i < data.size(); ++i)
      data[i] *= std::polar(1.0, -(V_[i] - sigma_ * rho[i].real()) * dt_);
  }
}

void SplitStep::advance(Field& u) const { advance(u, 1); }

void SplitStep::advance(Field& u, int steps) const {
  require(u.grid() == V_.grid(), "SplitStep: grid mismatch");
  if (steps <= 0) return;
  kinetic(u, half_kinetic_);
  for (int s = 0; s < steps; ++s) {
    potential_and_nonlinear(u);
    kinetic(u, s + 1 < steps ? full_kinetic_ : half_kinetic_);
  }
}

Field strang_step(const Field& u, const RealField& V, const EvolutionConfig& cfg) {
  validate(cfg);
  Field out = u;
  SplitStep(V, cfg.dt, cfg.sigma, cfg.dealias).advance(out);
  if (!out.all_finite()) fail(ErrorCode::Numerical, "strang_step: non-finite values after step 1");
  return out;
}

Field linear_flow(const Field& u, const RealField& V, double t, double max_dt) {
  require(max_dt > 0.0, "linear_flow: max_dt must be positive");
  Field out = u;
  if (t == 0.0) return out;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / max_dt - 1e-9)));
  SplitStep(V, t / steps, 0, false).advance(out, steps);
  return out;
}

const char* to_string(EvolutionStatus s) {
  switch (s) {
    case EvolutionStatus::Completed: return "completed";
    case EvolutionStatus::NonFinite: return "non_finite";
    case EvolutionStatus::ResolutionLoss: return "resolution_loss";
  }
  return "unknown";
}

FrameDiagnostics frame_diagnostics(const Field& u, const RealField& V, int sigma, double mass0) {
  FrameDiagnostics d;
  const SpectralField hat = transform_forward(u);
  const FormValues f = form_values(hat, u, V);
  d.mass = f.mass;
  d.h_form = f.h_form;
  d.grad_sq = f.grad_sq;
  d.energy_v = energy(f, sigma);
  d.energy_0 = free_energy(f, sigma);
  d.l4 = std::pow(f.l4_fourth, 0.25);
  double s3 = 0.0, s5 = 0.0, s6 = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::norm(u[i]);
    const double m = std::sqrt(a);
    s3 += a * m;
    s5 += a * a * m;
    s6 += a * a * a;
    peak = std::max(peak, a);
  }
  const double dv = u.grid().cell_volume();
  d.l3 = std::cbrt(s3 * dv);
  d.l5 = std::pow(s5 * dv, 0.2);
  d.l6 = std::pow(s6 * dv, 1.0 / 6.0);
  d.linf = std::sqrt(peak);
  d.g = std::sqrt(mass0 * std::max(0.0, f.h_form));
  d.high_band = high_band_mass_fraction(hat);
  return d;
}

Trajectory evolve(const Field& u0, const RealField& V, const EvolutionConfig& cfg, const FrameHook& hook) {
  validate(cfg);
  require(u0.grid() == V.grid(), "evolve: grid mismatch");
  require(u0.all_finite(), "evolve: initial data is not finite");
  Trajectory traj;
  traj.config = cfg;
  const int total = static_cast<int>(std::llround(cfg.t_end / cfg.dt));
  const SplitStep stepper(V, cfg.dt, cfg.sigma, cfg.dealias);
  const double mass0 = integrate_power(u0, 2.0);

  Field u = u0;
  double linf0 = 0.0;
  auto record = [&](int step) {
    FrameDiagnostics d = frame_diagnostics(u, V, cfg.sigma, mass0);
    d.step = step;
    d.t = step * cfg.dt;
    if (hook) hook(u, d);
    traj.frames.push_back(d);
    if (cfg.keep_fields) traj.fields.push_back(u);
    return d;
  };
  linf0 = record(0).linf;

  for (int step = 0; step < total;) {
    const int chunk = std::min(cfg.save_stride, total - step);
    stepper.advance(u, chunk);
    step += chunk;
    if (!u.all_finite()) {
      traj.status = EvolutionStatus::NonFinite;
      traj.abort_step = step;
      std::ostringstream msg;
      msg << "non-finite values at step " << step << " (frame " << traj.frames.size() << ", t = " << step * cfg.dt
          << "), resolution lost";
      traj.abort_reason = msg.str();
      return traj;
    }
    const FrameDiagnostics d = record(step);
    if (d.linf > cfg.blowup_factor * linf0 || d.high_band > cfg.high_band_limit) {
      traj.status = EvolutionStatus::ResolutionLoss;
      traj.abort_step = step;
      std::ostringstream msg;
      msg << "resolution loss at step " << step << " (t = " << d.t << "): ||u||_inf / ||u0||_inf = "
          << d.linf / linf0 << ", high-band mass fraction " << d.high_band;
      traj.abort_reason = msg.str();
      return traj;
    }
  }
  return traj;
}

double wraparound_horizon(const Field& u0) {
  const SpectralField hat = transform_forward(u0);
  const double mass = spectral_mass(hat);
  require(mass > 0.0, "wraparound_horizon: zero field");
  const double k_axis = std::sqrt(grad_norm_sq(hat) / (3.0 * mass));
  if (k_axis == 0.0) return std::numeric_limits<double>::infinity();
  return 0.2 * u0.grid().box_length() / (2.0 * k_axis);
}

DecayFit dispersive_decay_probe(const Trajectory& traj, double t_min, double t_max) {
  if (!(t_min > 0.0) || !(t_max >= 10.0 * t_min * (1.0 - 1e-12))) {
    std::ostringstream msg;
    msg << "dispersive_decay_probe: window [" << t_min << ", " << t_max
        << "] must satisfy 0 < t_min and span at least one decade";
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  const double lo = t_min * (1.0 - 1e-12);
  const double hi = t_max * (1.0 + 1e-12);
  for (const auto& f : traj.frames) {
    if (f.t < lo || f.t > hi) continue;
    require(f.linf > 0.0, "dispersive_decay_probe: zero frame");
    const double x = std::log(f.t), y = std::log(f.linf);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 3) fail(ErrorCode::InvalidArgument, "dispersive_decay_probe: fewer than 3 frames inside the window");
  DecayFit fit;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.exponent * sx) / n;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.points = n;
  return fit;
}

Field scattering_state(const Trajectory& traj, const RealField& V, std::size_t frame) {
  require(frame < traj.fields.size(), "scattering_state: frame not stored (run with keep_fields)");
  return linear_flow(traj.fields[frame], V, -traj.frames[frame].t, traj.config.dt);
}

ScatteringSeries scattering_extract(const Trajectory& traj, const RealField& V) {
  require(traj.fields.size() == traj.frames.size() && !traj.fields.empty(),
          "scattering_extract: trajectory was run without keep_fields");
  ScatteringSeries out;
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    out.times.push_back(traj.frames[i].t);
    out.l4_series.push_back(traj.frames[i].l4);
    if (i == 0) continue;
    // psi(t_i) - psi(t_{i-1}) = e^{i t_{i-1} H} (e^{i (t_i - t_{i-1}) H} u(t_i) - u(t_{i-1})), and
    // the mass + form norm is invariant under e^{isH}.
    const double span = traj.frames[i].t - traj.frames[i - 1].t;
    const Field diff = linear_flow(traj.fields[i], V, -span, traj.config.dt) - traj.fields[i - 1];
    const FormValues f = form_values(diff, V);
    out.cauchy_increments.push_back(std::sqrt(std::max(0.0, f.mass + f.h_form)));
  }
  return out;
}

const std::array<StrichartzPair, 4>& admissible_pairs() {
  static const std::array<StrichartzPair, 4> pairs{{
      {5.0, 5.0},
      {4.0, 6.0},
      {std::numeric_limits<double>::infinity(), 3.0},
      {8.0, 4.0},
  }};
  return pairs;
}

SNormProxy s_norm_proxy(const Trajectory& traj) {
  SNormProxy out;
  const auto& frames = traj.frames;
  auto lr = [](const FrameDiagnostics& f, double r) {
    if (r == 3.0) return f.l3;
    if (r == 4.0) return f.l4;
    if (r == 5.0) return f.l5;
    return f.l6;
  };
  const auto& pairs = admissible_pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [q, r] = pairs[p];
    double value = 0.0;
    if (std::isinf(q)) {
      for (const auto& f : frames) value = std::max(value, lr(f, r));
    } else {
      for (std::size_t i = 1; i < frames.size(); ++i) {
        const double dt = frames[i].t - frames[i - 1].t;
        value += 0.5 * dt * (std::pow(lr(frames[i], r), q) + std::pow(lr(frames[i - 1], r), q));
      }
      value = std::pow(value, 1.0 / q);
    }
    out.per_pair[p] = value;
    out.value = std::max(out.value, value);
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << "# nlsv trajectory v1\n";
  out << "t,mass,E_V,E_0,L4,Linf,g,z_R,dz_analytic,d2z_analytic\n";
  out.precision(17);
  auto opt = [&](const std::optional<double>& v) {
    if (v) out << *v;
  };
  for (const auto& f : traj.frames) {
    out << f.t << ',' << f.mass << ',' << f.energy_v << ',' << f.energy_0 << ',' << f.l4 << ',' << f.linf << ','
        << f.g << ',';
    opt(f.z);
    out << ',';
    opt(f.dz);
    out << ',';
    opt(f.d2z);
    out << '\n';
  }
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace nlsv
