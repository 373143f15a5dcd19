#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlsv/forms.hpp"
#include "nlsv/grid_field.hpp"

namespace nlsv {

struct EvolutionConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  int sigma = 1;          // +1 focusing, -1 defocusing, 0 linear
  bool dealias = true;    // 2/3-rule mask on |u|^2 before the phase rotation
  int save_stride = 10;   // steps between frames
  double blowup_factor = 50.0;  // abort when ||u||_inf exceeds this multiple of its initial value
  double high_band_limit = 0.1; // abort when the top spectral band holds this fraction of mass
  bool keep_fields = false;     // store the field at every frame
};

/// Throws ConfigError listing every invalid field, keys prefixed by `prefix`.
void validate(const EvolutionConfig& cfg, const std::string& prefix = "evolution");

/// One Strang step: half kinetic, potential plus nonlinear phase, half kinetic.
/// dt may be negative, which runs the flow backward.
class SplitStep {
 public:
  SplitStep(const RealField& V, double dt, int sigma, bool dealias);
  void advance(Field& u) const;
  /// `steps` consecutive steps with the adjacent half kinetic substeps fused.
  void advance(Field& u, int steps) const;
  double dt() const noexcept { return dt_; }

 private:
  RealField V_;
  double dt_;
  int sigma_;
  bool dealias_;
  void kinetic(Field& u, const std::vector<Complex>& phase) const;
  void potential_and_nonlinear(Field& u) const;

  std::vector<Complex> half_kinetic_;  // e^{-i|k|^2 dt/2} / n^3
  std::vector<Complex> full_kinetic_;  // e^{-i|k|^2 dt} / n^3
  std::vector<unsigned char> band_;    // 1 inside the 2/3 band
};

Field strang_step(const Field& u, const RealField& V, const EvolutionConfig& cfg);

/// e^{-itH} u by Strang steps of the linear flow with |step| <= max_dt.
/// For V = 0 the result is exact for any step.
Field linear_flow(const Field& u, const RealField& V, double t, double max_dt);

struct FrameDiagnostics {
  int step = 0;
  double t = 0.0;
  double mass = 0.0;
  double energy_v = 0.0;
  double energy_0 = 0.0;
  double h_form = 0.0;
  double grad_sq = 0.0;
  double l3 = 0.0;  // ||u||_3
  double l4 = 0.0;  // ||u||_4
  double l5 = 0.0;
  double l6 = 0.0;
  double linf = 0.0;
  double g = 0.0;   // ||u0||_2 ||H^{1/2} u(t)||_2
  double high_band = 0.0;
  std::optional<double> z;    // localized virial quantities, filled by a hook
  std::optional<double> dz;
  std::optional<double> d2z;
  std::optional<double> coercivity;
};

enum class EvolutionStatus { Completed, NonFinite, ResolutionLoss };
const char* to_string(EvolutionStatus s);

struct Trajectory {
  EvolutionConfig config;
  std::vector<FrameDiagnostics> frames;
  std::vector<Field> fields;  // parallel to frames when keep_fields is set
  EvolutionStatus status = EvolutionStatus::Completed;
  std::string abort_reason;
  int abort_step = -1;

  bool aborted() const noexcept { return status != EvolutionStatus::Completed; }
};

using FrameHook = std::function<void(const Field& u, FrameDiagnostics& d)>;

FrameDiagnostics frame_diagnostics(const Field& u, const RealField& V, int sigma, double mass0);

/// Runs to t_end or to the first abort; an abort keeps the frames produced so
/// far and records the reason.
Trajectory evolve(const Field& u0, const RealField& V, const EvolutionConfig& cfg, const FrameHook& hook = {});

/// Latest time for which the periodic images of dispersing data stay
/// negligible: 0.2 L / (2 k_axis), with k_axis the per-axis RMS wavenumber.
double wraparound_horizon(const Field& u0);

struct DecayFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 0;
};

/// Least-squares slope of log ||u||_inf against log t over frames in
/// [t_min, t_max]; the window must span at least one decade.
DecayFit dispersive_decay_probe(const Trajectory& traj, double t_min, double t_max);

struct ScatteringSeries {
  std::vector<double> times;
  std::vector<double> cauchy_increments;  // ||psi(t_{n+1}) - psi(t_n)|| in the mass + form norm
  std::vector<double> l4_series;
};

/// Increments of psi(t_n) = e^{+i t_n H} u(t_n) between stored frames and the
/// L^4 series. Needs keep_fields.
ScatteringSeries scattering_extract(const Trajectory& traj, const RealField& V);
/// psi(t_n) for one stored frame.
Field scattering_state(const Trajectory& traj, const RealField& V, std::size_t frame);

struct StrichartzPair {
  double q;  // time exponent, infinity allowed
  double r;  // space exponent
};

/// The fixed admissible set, each with 2/q + 3/r = 1.
const std::array<StrichartzPair, 4>& admissible_pairs();

struct SNormProxy {
  double value = 0.0;
  std::array<double, 4> per_pair{};
};

/// max over the admissible set of the trapezoidal L^q_t L^r_x norm over the frames.
SNormProxy s_norm_proxy(const Trajectory& traj);

/// Columns t, mass, E_V, E_0, L4, Linf, g, z_R, dz_analytic, d2z_analytic
/// after a versioned comment line.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace nlsv
