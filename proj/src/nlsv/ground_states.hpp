#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlsv/forms.hpp"
#include "nlsv/grid_field.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/radial_ground_state.hpp"

namespace nlsv {

struct PohozaevExtra {
  double extra = 0.0;                  // int (4V + 2 x.grad V)|Q|^2
  double relative = 0.0;               // |extra| / h_form
  double residual_with_extra_1 = 0.0;  // |h_form - 3 w^2 mass - extra| / h_form
  double residual_with_extra_2 = 0.0;  // |l4_fourth - 4 w^2 mass - extra| / l4_fourth
};

struct GroundStateResult {
  Field profile;
  double omega = 1.0;
  FormValues norms;
  double pohozaev_residual_1 = 0.0;  // |h_form - 3 w^2 mass| / h_form
  double pohozaev_residual_2 = 0.0;  // |l4_fourth - 4 w^2 mass| / l4_fourth
  double elliptic_residual = 0.0;    // ||(-Lap + V) Q + w^2 Q - |Q|^2 Q|| / || |Q|^2 Q ||
  double wv_value = 0.0;
  int iterations = 0;
  std::string source;                // "free", "maximizer" or "fixed_frequency"
  std::optional<PohozaevExtra> extra;
  std::vector<double> residual_history;
  std::vector<double> wv_history;

  explicit GroundStateResult(const Grid& g) : profile(g) {}
};

/// Q(|x - c| / scale) sampled on the grid.
Field interpolate_radial(const RadialProfile& q, const Grid& g, Vec3 center = {}, double scale = 1.0);

struct FreeGroundState {
  RadialProfile radial;
  RadialNorms radial_norms;
  GroundStateResult on_grid;
};

FreeGroundState solve_free_ground_state(const Grid& g, const RadialShootingOptions& opts = {});

/// Relative L^2 residual of (-Lap + V) Q + w^2 Q - |Q|^2 Q = 0.
double elliptic_residual(const Field& q, const RealField& V, double omega);

struct MaximizerOptions {
  double tol = 1e-7;            // relative Euler-Lagrange residual
  int max_iterations = 4000;
  double pohozaev_tol = 1e-3;
  double compression = 0.8;     // initial guess Q(|x - x_min| / compression)
  double armijo = 1e-4;
  double max_step = 1.0;        // largest update, relative to ||psi||
  double min_width_cells = 2.0; // refuse maximizers narrower than this (1/omega in cells)
  double max_rim_fraction = 1e-3; // mass allowed beyond 3/8 of the box before giving up
};

/// Free Q centered at the minimum of V and compressed.
Field maximizer_initial_guess(const RadialProfile& q, const RealField& V, double compression);

/// Maximizes W_V by preconditioned projected ascent; the limit psi is rescaled
/// to the solution of (-Lap + V) Q + w^2 Q - Q^3 = 0.
/// Refuses V with empty negative part and V with ||V_-||_K >= 4 pi.
GroundStateResult maximize_wv(const PotentialSpec& spec, const RealField& V, const Field& init,
                              const MaximizerOptions& opts = {});

/// Needs x.grad V (not available for ball_indicator).
PohozaevExtra pohozaev_extra_term(const Field& q, double omega, const FormValues& norms,
                                  const PotentialSpec& spec);

/// Solves (-Lap + V) Q + w^2 Q - Q^3 = 0 at a prescribed w by Petviashvili
/// iteration; in general not a W_V maximizer.
GroundStateResult solve_fixed_frequency(const PotentialSpec& spec, const RealField& V, double omega,
                                        const Field& init, double tol = 1e-10, int max_iterations = 2000);

}  // namespace nlsv
