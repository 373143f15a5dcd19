#include "nlsv/radial_ground_state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "nlsv/error.hpp"
#include "nlsv/quadrature.hpp"

namespace nlsv {

namespace {

using State = std::array<double, 2>;  // (Q, Q')

constexpr double kStartRadius = 1e-4;

void rhs(const State& s, State& ds, double r) {
  ds[0] = s[1];
  ds[1] = -2.0 / r * s[1] + s[0] - s[0] * s[0] * s[0];
}

State series_start(double q0, double r) {
  // Q = q0 + (q0 - q0^3) r^2 / 6 + O(r^4)
  const double c = (q0 - q0 * q0 * q0) / 6.0;
  return {q0 + c * r * r, 2.0 * c * r};
}

enum class Shot { Overshoot, Undershoot, Undecided };

// Overshoot: Q crosses zero (Q(0) too large). Undershoot: Q turns back up
// while positive (Q(0) too small).
template <class Observer>
Shot shoot(double q0, double r_end, Observer&& observe) {
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_dense_output(1e-14, 1e-14, odeint::runge_kutta_dopri5<State>());
  State s = series_start(q0, kStartRadius);
  stepper.initialize(s, kStartRadius, 1e-4);
  while (stepper.current_time() < r_end) {
    stepper.do_step(rhs);
    const State& cur = stepper.current_state();
    if (!observe(stepper)) return Shot::Undecided;
    if (cur[0] < 0.0) return Shot::Overshoot;
    if (cur[1] > 0.0) return Shot::Undershoot;
  }
  return Shot::Undecided;
}

Shot classify(double q0, double r_end) {
  return shoot(q0, r_end, [](const auto&) { return true; });
}

}  // namespace

RadialProfile::RadialProfile(double q0, std::vector<double> r, std::vector<double> q,
                             std::vector<double> dq, double rmax)
    : q0_(q0), rmax_(rmax), r_(std::move(r)), q_(std::move(q)), dq_(std::move(dq)) {
  require(r_.size() >= 2 && r_.size() == q_.size() && q_.size() == dq_.size(),
          "radial profile: inconsistent table");
  dr_ = r_[1] - r_[0];
  const double rm = r_.back();
  tail_c_ = q_.back() * rm * std::exp(rm);
}

double RadialProfile::operator()(double r) const {
  r = std::abs(r);
  if (r >= r_.back()) return r > rmax_ ? 0.0 : tail_c_ * std::exp(-r) / r;
  const std::size_t i = std::min(static_cast<std::size_t>(r / dr_), r_.size() - 2);
  const double t = (r - r_[i]) / dr_;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * q_[i] + h10 * dr_ * dq_[i] + h01 * q_[i + 1] + h11 * dr_ * dq_[i + 1];
}

double RadialProfile::derivative(double r) const {
  r = std::abs(r);
  if (r >= r_.back()) return r > rmax_ ? 0.0 : -tail_c_ * std::exp(-r) * (1.0 + 1.0 / r) / r;
  const std::size_t i = std::min(static_cast<std::size_t>(r / dr_), r_.size() - 2);
  const double t = (r - r_[i]) / dr_;
  const double t2 = t * t;
  const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
  return (d00 * q_[i] + d01 * q_[i + 1]) / dr_ + d10 * dq_[i] + d11 * dq_[i + 1];
}

RadialProfile solve_radial_ground_state(const RadialShootingOptions& opts, RadialBisectionInfo* info) {
  require(opts.rmax > 10.0, "radial ground state: rmax must exceed 10 so that Q(rmax) < 1e-10");
  require(opts.bracket_lo > 0.0 && opts.bracket_hi > opts.bracket_lo, "radial ground state: invalid bracket");
  double lo = opts.bracket_lo, hi = opts.bracket_hi;
  const double r_end = opts.rmax;
  const Shot s_lo = classify(lo, r_end);
  const Shot s_hi = classify(hi, r_end);
  if (s_lo != Shot::Undershoot || s_hi != Shot::Overshoot) {
    std::ostringstream msg;
    msg << "radial ground state: bracket [" << lo << ", " << hi << "] does not straddle Q(0); "
        << "lower end " << (s_lo == Shot::Undershoot ? "undershoots" : "does not undershoot")
        << ", upper end " << (s_hi == Shot::Overshoot ? "overshoots" : "does not overshoot");
    throw ConvergenceError(msg.str(), {lo, hi});
  }
  int it = 0;
  while ((hi - lo) > opts.tol * hi && it < 200) {
    const double mid = 0.5 * (lo + hi);
    const Shot s = classify(mid, r_end);
    if (s == Shot::Overshoot) {
      hi = mid;
    } else if (s == Shot::Undershoot) {
      lo = mid;
    } else {
      break;  // stayed on the separatrix up to rmax: as good as it gets
    }
    ++it;
  }
  if (info) *info = {it, lo, hi};
  const double q0 = 0.5 * (lo + hi);

  // tabulate on a uniform radial mesh until Q falls below the match value
  std::vector<double> rs, qs, dqs;
  const double dr = opts.table_step;
  rs.push_back(0.0);
  qs.push_back(q0);
  dqs.push_back(0.0);
  double next = dr;
  bool done = false;
  shoot(q0, r_end, [&](const auto& stepper) {
    while (!done && next <= stepper.current_time()) {
      State s;
      if (next < kStartRadius) {
        s = series_start(q0, next);
      } else {
        stepper.calc_state(next, s);
      }
      rs.push_back(next);
      qs.push_back(s[0]);
      dqs.push_back(s[1]);
      if (s[0] < opts.match_value) done = true;
      next = dr * static_cast<double>(rs.size());
    }
    return !done;
  });
  if (!done)
    throw ConvergenceError("radial ground state: profile never fell below the match value", {q0});
  return RadialProfile(q0, std::move(rs), std::move(qs), std::move(dqs), opts.rmax);
}

RadialNorms radial_norms(const RadialProfile& q) {
  constexpr double four_pi = 4.0 * std::numbers::pi;
  const double rm = q.match_radius();
  const double rmax = q.rmax();
  std::vector<double> breaks;
  for (double r = 0.5; r < rm; r += 0.5) breaks.push_back(r);
  breaks.push_back(rm);
  for (double r = rm + 4.0; r < rmax; r += 4.0) breaks.push_back(r);
  RadialNorms n;
  n.mass = four_pi * integrate_1d([&q](double r) { const double v = q(r); return v * v * r * r; }, 0.0, rmax, breaks);
  n.grad_sq = four_pi * integrate_1d([&q](double r) { const double v = q.derivative(r); return v * v * r * r; }, 0.0, rmax, breaks);
  n.l4_fourth = four_pi * integrate_1d([&q](double r) { const double v = q(r); return v * v * v * v * r * r; }, 0.0, rmax, breaks);
  return n;
}

}  // namespace nlsv
