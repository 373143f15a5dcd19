#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlsv/grid_field.hpp"

namespace nlsv {

enum class PotentialFamily { Zero, GaussianBump, GaussianWell, BallIndicator, Yukawa, Sum };

const char* to_string(PotentialFamily f);

// One analytic member. `shape` is the width sigma (gaussians, V = A exp(-|x-c|^2/sigma^2)),
// the radius R (ball, V = A on |x-c| < R) or the decay mu (yukawa, V = A exp(-mu r)/r).
struct PotentialTerm {
  PotentialFamily family = PotentialFamily::Zero;
  double amplitude = 0.0;
  double shape = 1.0;
  Vec3 center{};

  double length_scale() const;
};

class PotentialSpec {
 public:
  PotentialSpec() = default;  // V = 0

  static PotentialSpec zero() { return {}; }
  static PotentialSpec gaussian_bump(double amplitude, double width, Vec3 center = {});
  static PotentialSpec gaussian_well(double amplitude, double width, Vec3 center = {});
  static PotentialSpec ball_indicator(double amplitude, double radius, Vec3 center = {});
  static PotentialSpec yukawa(double amplitude, double decay, Vec3 center = {});
  static PotentialSpec sum(const std::vector<PotentialSpec>& members);

  PotentialFamily family() const;
  const std::vector<PotentialTerm>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// All members centered at the origin.
  bool radial_flag() const;
  /// Shared center of all members, if any.
  std::optional<Vec3> common_center() const;
  bool has_gradient() const;
  double largest_length_scale() const;

  /// Scaled copy r^{-2} V((x - a)/r).
  PotentialSpec rescaled(double r, Vec3 shift = {}) const;
  PotentialSpec scaled(double lambda) const;

  double value(const Vec3& x) const;
  /// Throws Unsupported for ball_indicator members.
  Vec3 gradient(const Vec3& x) const;
  double x_dot_grad(const Vec3& x) const;

  /// Value at distance r from the common center.
  double radial_value(double r) const;
  /// r V'(r) about the common center.
  double radial_r_dvdr(double r) const;

 private:
  explicit PotentialSpec(std::vector<PotentialTerm> terms) : terms_(std::move(terms)) {}
  static PotentialSpec single(PotentialFamily family, double amplitude, double shape, Vec3 center,
                              const char* shape_name);

  std::vector<PotentialTerm> terms_;
};

enum class Part { Signed, Negative, Positive, Absolute };

double apply_part(double v, Part part);

/// Pointwise scalar function with optional radial structure, fed to the
/// Kato and L^{3/2} norms.
struct ScalarProfile {
  std::function<double(const Vec3&)> value;
  std::optional<Vec3> center;                   // set when radial about this point
  std::function<double(double)> radial;         // valid when center is set
  std::vector<double> breakpoints;              // radii of kinks
  double length_scale = 1.0;
  double truncation_radius = 0.0;               // |f| negligible beyond (radial path)
  double lattice_pad = 0.0;                     // support padding for the lattice path
  // Sample for a node of a lattice with spacing h: equals value() except on a
  // yukawa center, where it is the average over the ball of equal cell volume.
  std::function<double(const Vec3&, double)> cell_value;
  std::vector<Vec3> centers;
  // Radial parts g(|x - c|) >= 0, one per member center, such that |f| - sum g
  // is bounded and vanishes away from overlaps; the lattice path integrates
  // them against 1/|x - y| exactly in 1D.
  struct SingularPart {
    Vec3 center;
    std::function<double(double)> g;
  };
  std::vector<SingularPart> singular_parts;
  std::string non_integrable;  // non-empty when the Kato integral diverges
  bool x_dot_grad = false;
  Part part = Part::Signed;
  bool identically_zero = false;
};

ScalarProfile potential_profile(const PotentialSpec& spec, Part part = Part::Signed);
/// Profile of x.grad V (origin-dependent). Throws Unsupported for ball_indicator.
ScalarProfile radial_derivative_profile(const PotentialSpec& spec, Part part = Part::Signed);

struct QuadratureSettings {
  double rel_tol = 1e-11;
  int scan_points = 65;       // radial supremum scan on [0, 8 l]
  int lattice_points = 9;     // candidate x per axis, non-radial path
  int grid_n = 64;            // quadrature grid per axis, non-radial path
};

/// Samples V (or a part of it) on the grid. Ball indicators are cell-averaged
/// on cells cut by the sphere; a yukawa center sitting on a node gets the
/// analytic average over the ball of equal cell volume.
RealField evaluate(const PotentialSpec& spec, const Grid& g, Part part = Part::Signed);
/// Samples x.grad V. Throws Unsupported for ball_indicator.
RealField radial_derivative(const PotentialSpec& spec, const Grid& g);
/// Samples grad V component-wise. Throws Unsupported for ball_indicator.
std::array<RealField, 3> gradient_field(const PotentialSpec& spec, const Grid& g);

double kato_norm(const ScalarProfile& f, const QuadratureSettings& quad = {});
double kato_norm(const PotentialSpec& spec, const QuadratureSettings& quad = {});
double l32_norm(const ScalarProfile& f, const QuadratureSettings& quad = {});

struct AdmissibilityReport {
  double kato_norm = 0.0;
  double kato_norm_negative = 0.0;
  double kato_norm_positive = 0.0;
  double l32_norm = 0.0;
  bool repulsive = true;
  std::optional<double> confining_kato;     // ||(x.grad V)_+||_K, absent for ball_indicator
  bool passes_small_negative = true;        // ||V_-||_K < 4 pi
  std::optional<bool> passes_confining_4pi;
  std::optional<bool> passes_confining_8pi;
};

AdmissibilityReport admissibility(const PotentialSpec& spec, const QuadratureSettings& quad = {});

}  // namespace nlsv
