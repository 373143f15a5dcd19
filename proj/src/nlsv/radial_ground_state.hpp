#pragma once

#include <vector>

namespace nlsv {

/// Positive radial solution of Q'' + (2/r) Q' - Q + Q^3 = 0, Q'(0) = 0.
///
/// Stored as a table on [0, match_radius] with cubic Hermite interpolation,
/// continued by the exact linear tail C e^{-r}/r (the cubic term is below 1e-9
/// relative there) up to rmax and zero beyond.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(double q0, std::vector<double> r, std::vector<double> q, std::vector<double> dq,
                double rmax);

  double q0() const noexcept { return q0_; }
  double rmax() const noexcept { return rmax_; }
  double match_radius() const noexcept { return r_.empty() ? 0.0 : r_.back(); }
  double tail_coefficient() const noexcept { return tail_c_; }
  const std::vector<double>& radii() const noexcept { return r_; }
  const std::vector<double>& values() const noexcept { return q_; }

  double operator()(double r) const;
  double derivative(double r) const;

 private:
  double q0_ = 0.0;
  double rmax_ = 0.0;
  double tail_c_ = 0.0;
  double dr_ = 0.0;
  std::vector<double> r_, q_, dq_;
};

struct RadialShootingOptions {
  double rmax = 30.0;
  double tol = 1e-13;         // bisection width on Q(0), relative
  double bracket_lo = 4.0;
  double bracket_hi = 4.8;
  double match_value = 1e-3;  // switch to the tail once Q drops below this
  double table_step = 2.5e-3;
};

struct RadialBisectionInfo {
  int iterations = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Throws ConvergenceError when the bracket does not straddle the ground state.
RadialProfile solve_radial_ground_state(const RadialShootingOptions& opts = {},
                                        RadialBisectionInfo* info = nullptr);

struct RadialNorms {
  double mass = 0.0;       // 4 pi int Q^2 r^2 dr
  double grad_sq = 0.0;    // 4 pi int Q'^2 r^2 dr
  double l4_fourth = 0.0;  // 4 pi int Q^4 r^2 dr
};

RadialNorms radial_norms(const RadialProfile& q);

}  // namespace nlsv
