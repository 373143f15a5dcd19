#pragma once

#include <array>
#include <vector>

#include "nlsv/grid_field.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/propagator.hpp"

namespace nlsv {

/// chi_R(x) = R^2 phi(|x|/R) with phi(s) = s^2 on [0, 1], 0 on [2, inf) and a
/// degree-9 polynomial on [1, 2] matching value and four derivatives at both
/// ends. Every derivative field is sampled from the closed form.
struct CutoffProfile {
  double R = 0.0;
  RealField chi;
  std::array<RealField, 3> grad;
  std::array<RealField, 6> hess;  // xx, yy, zz, xy, xz, yz
  RealField lap;
  RealField bilap;

  explicit CutoffProfile(const Grid& g);
};

/// phi and its first four derivatives at s = |x|/R.
std::array<double, 5> cutoff_radial(double s);

/// chi_R <= kCutoffBound R^2 everywhere (max of phi on [1, 2], rounded up).
inline constexpr double kCutoffBound = 1.45;

/// Needs 2R < L/2 so the support fits in the box.
CutoffProfile build_cutoff(const Grid& g, double R);

/// int chi_R |u|^2.
double virial_z(const Field& u, const CutoffProfile& cut);
/// 2 Im int (grad chi_R . grad u) conj(u).
double virial_first(const Field& u, const CutoffProfile& cut);

/// Pointwise grad chi_R . grad V, precomputed once per potential.
RealField cutoff_potential_coupling(const PotentialSpec& spec, const CutoffProfile& cut);

/// 4 sum_jk Re int d_jk chi d_j u d_k conj(u) - sigma int lap chi |u|^4
///   - int bilap chi |u|^2 - 2 int (grad chi . grad V)|u|^2.
double virial_second(const Field& u, const RealField& coupling, const CutoffProfile& cut, int sigma = 1);
double virial_second(const Field& u, const PotentialSpec& spec, const CutoffProfile& cut, int sigma = 1);

/// 8 ||grad u||^2 - 6 ||u||_4^4 - 4 int (x.grad V)|u|^2.
double coercivity_probe(const Field& u, const RealField& x_dot_grad_v);
double coercivity_probe(const Field& u, const PotentialSpec& spec);

/// 4 (2 - ||(x.grad V)_+||_K / 4 pi) / (1 + ||V_+||_K / 4 pi). Throws
/// Unsupported when the confining norm is unavailable.
double defocusing_beta(const AdmissibilityReport& report);

/// Frame hook filling z, dz, d2z and the coercivity quantity. Keeps a
/// reference to `cut`, which must outlive it.
FrameHook virial_hook(const PotentialSpec& spec, const CutoffProfile& cut, int sigma);

struct VirialSeries {
  std::vector<double> times;  // interior frames only
  std::vector<double> z;
  std::vector<double> dz_analytic;
  std::vector<double> d2z_analytic;
  std::vector<double> dz_fd;
  std::vector<double> d2z_fd;
  std::vector<double> coercivity;
};

/// Centered finite differences on the saved frames, endpoints excluded.
/// Needs frames produced with virial_hook.
VirialSeries virial_series(const Trajectory& traj);

struct VirialErrors {
  double dz = 0.0;   // max |dz_fd - dz_analytic| / max |dz_analytic|
  double d2z = 0.0;  // max |d2z_fd - d2z_analytic| / max |d2z_analytic|
};

VirialErrors virial_errors(const VirialSeries& s);

}  // namespace nlsv
