#include "nlsv/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nlsv/error.hpp"
#include "nlsv/quadrature.hpp"

namespace nlsv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

// Radius of the ball with the volume of a cubic cell of side h.
double equal_volume_radius(double h) { return std::cbrt(3.0 / (4.0 * kPi)) * h; }

double term_radial(const PotentialTerm& t, double r) {
  switch (t.family) {
    case PotentialFamily::GaussianBump:
    case PotentialFamily::GaussianWell:
      return t.amplitude * std::exp(-r * r / (t.shape * t.shape));
    case PotentialFamily::BallIndicator:
      return r < t.shape ? t.amplitude : 0.0;
    case PotentialFamily::Yukawa:
      return t.amplitude * std::exp(-t.shape * r) / r;
    default:
      return 0.0;
  }
}

// r V'(r) for a single member.
double term_r_dvdr(const PotentialTerm& t, double r) {
  switch (t.family) {
    case PotentialFamily::GaussianBump:
    case PotentialFamily::GaussianWell:
      return -2.0 * r * r / (t.shape * t.shape) * term_radial(t, r);
    case PotentialFamily::Yukawa:
      return -(t.shape * r + 1.0) * term_radial(t, r);
    case PotentialFamily::BallIndicator:
      fail(ErrorCode::Unsupported, "ball_indicator has no pointwise gradient (distributional derivative)");
    default:
      return 0.0;
  }
}

// Average of A e^{-mu r}/r over a ball of radius rho around its center.
double yukawa_ball_average(const PotentialTerm& t, double rho) {
  const double mr = t.shape * rho;
  return 3.0 * t.amplitude * (-std::expm1(-mr) - mr * std::exp(-mr)) / (t.shape * t.shape * rho * rho * rho);
}

// Average of x.grad V = -A e^{-mu r}(mu + 1/r) over the same ball.
double yukawa_ball_average_rdvdr(const PotentialTerm& t, double rho) {
  const double mr = t.shape * rho;
  const double avg_exp =
      3.0 * (2.0 - std::exp(-mr) * (mr * mr + 2.0 * mr + 2.0)) / (mr * mr * mr);
  return -yukawa_ball_average(t, rho) - t.shape * t.amplitude * avg_exp;
}

double truncation_radius(const PotentialTerm& t) {
  switch (t.family) {
    case PotentialFamily::GaussianBump:
    case PotentialFamily::GaussianWell:
      return 12.0 * t.shape;
    case PotentialFamily::BallIndicator:
      return t.shape;
    case PotentialFamily::Yukawa:
      return 45.0 / t.shape;
    default:
      return 0.0;
  }
}

std::vector<double> term_breakpoints(const PotentialTerm& t) {
  const double l = t.length_scale();
  switch (t.family) {
    case PotentialFamily::BallIndicator:
      return {t.shape};
    case PotentialFamily::Yukawa:
      return {0.1 * l, l, 4.0 * l, 12.0 * l, 25.0 * l};
    case PotentialFamily::GaussianBump:
    case PotentialFamily::GaussianWell:
      return {0.5 * l, l, 2.0 * l, 4.0 * l, 7.0 * l};
    default:
      return {};
  }
}

bool same_point(const Vec3& a, const Vec3& b) { return a == b; }

double sample_with_singular_cells(const PotentialSpec& spec, const Vec3& x, double h, bool x_dot_grad);

}  // namespace

const char* to_string(PotentialFamily f) {
  switch (f) {
    case PotentialFamily::Zero: return "zero";
    case PotentialFamily::GaussianBump: return "gaussian_bump";
    case PotentialFamily::GaussianWell: return "gaussian_well";
    case PotentialFamily::BallIndicator: return "ball_indicator";
    case PotentialFamily::Yukawa: return "yukawa";
    case PotentialFamily::Sum: return "sum";
  }
  return "unknown";
}

double PotentialTerm::length_scale() const {
  return family == PotentialFamily::Yukawa ? 1.0 / shape : shape;
}


PotentialSpec PotentialSpec::single(PotentialFamily family, double amplitude, double shape,
                                    Vec3 center, const char* shape_name) {
  const std::string name = to_string(family);
  require(std::isfinite(amplitude), name + ": amplitude must be finite");
  require(std::isfinite(shape) && shape > 0.0, name + ": " + shape_name + " must be positive");
  require(std::isfinite(center.x) && std::isfinite(center.y) && std::isfinite(center.z),
          name + ": center must be finite");
  if (amplitude == 0.0) return {};
  return PotentialSpec({PotentialTerm{family, amplitude, shape, center}});
}

PotentialSpec PotentialSpec::gaussian_bump(double amplitude, double width, Vec3 center) {
  require(amplitude > 0.0, "gaussian_bump: amplitude must be positive");
  return single(PotentialFamily::GaussianBump, amplitude, width, center, "width");
}

PotentialSpec PotentialSpec::gaussian_well(double amplitude, double width, Vec3 center) {
  require(amplitude < 0.0, "gaussian_well: amplitude must be negative");
  return single(PotentialFamily::GaussianWell, amplitude, width, center, "width");
}

PotentialSpec PotentialSpec::ball_indicator(double amplitude, double radius, Vec3 center) {
  return single(PotentialFamily::BallIndicator, amplitude, radius, center, "radius");
}

PotentialSpec PotentialSpec::yukawa(double amplitude, double decay, Vec3 center) {
  return single(PotentialFamily::Yukawa, amplitude, decay, center, "decay");
}

PotentialSpec PotentialSpec::sum(const std::vector<PotentialSpec>& members) {
  std::vector<PotentialTerm> terms;
  for (const auto& m : members) terms.insert(terms.end(), m.terms_.begin(), m.terms_.end());
  return PotentialSpec(std::move(terms));
}

PotentialFamily PotentialSpec::family() const {
  if (terms_.empty()) return PotentialFamily::Zero;
  if (terms_.size() == 1) return terms_.front().family;
  return PotentialFamily::Sum;
}

bool PotentialSpec::radial_flag() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const PotentialTerm& t) { return t.center == Vec3{}; });
}

std::optional<Vec3> PotentialSpec::common_center() const {
  if (terms_.empty()) return Vec3{};
  const Vec3 c = terms_.front().center;
  for (const auto& t : terms_)
    if (!same_point(t.center, c)) return std::nullopt;
  return c;
}

bool PotentialSpec::has_gradient() const {
  return std::none_of(terms_.begin(), terms_.end(), [](const PotentialTerm& t) {
    return t.family == PotentialFamily::BallIndicator;
  });
}

double PotentialSpec::largest_length_scale() const {
  double l = 0.0;
  for (const auto& t : terms_) l = std::max(l, t.length_scale());
  return l > 0.0 ? l : 1.0;
}

PotentialSpec PotentialSpec::rescaled(double r, Vec3 shift) const {
  require(r > 0.0, "rescaled: scale must be positive");
  std::vector<PotentialTerm> terms = terms_;
  for (auto& t : terms) {
    if (t.family == PotentialFamily::Yukawa) {
      // r^{-2} A e^{-mu |x|/r}/(|x|/r) = (A/r) e^{-(mu/r)|x|}/|x|
      t.amplitude /= r;
      t.shape /= r;
    } else {
      t.amplitude /= r * r;
      t.shape *= r;
    }
    t.center = r * t.center + shift;
  }
  return PotentialSpec(std::move(terms));
}

PotentialSpec PotentialSpec::scaled(double lambda) const {
  require(std::isfinite(lambda), "scaled: factor must be finite");
  if (lambda == 0.0) return {};
  std::vector<PotentialTerm> terms = terms_;
  for (auto& t : terms) {
    t.amplitude *= lambda;
    if (t.family == PotentialFamily::GaussianBump && t.amplitude < 0.0)
      t.family = PotentialFamily::GaussianWell;
    else if (t.family == PotentialFamily::GaussianWell && t.amplitude > 0.0)
      t.family = PotentialFamily::GaussianBump;
  }
  return PotentialSpec(std::move(terms));
}

double PotentialSpec::value(const Vec3& x) const {
  double v = 0.0;
  for (const auto& t : terms_) v += term_radial(t, norm(x - t.center));
  return v;
}

Vec3 PotentialSpec::gradient(const Vec3& x) const {
  Vec3 g{};
  for (const auto& t : terms_) {
    const Vec3 d = x - t.center;
    const double r = norm(d);
    if (r == 0.0) {
      if (t.family == PotentialFamily::BallIndicator) term_r_dvdr(t, r);
      continue;
    }
    // grad V = V'(r) d / r = (r V'(r)) d / r^2
    g = g + (term_r_dvdr(t, r) / (r * r)) * d;
  }
  return g;
}

double PotentialSpec::x_dot_grad(const Vec3& x) const { return dot(x, gradient(x)); }

double PotentialSpec::radial_value(double r) const {
  double v = 0.0;
  for (const auto& t : terms_) v += term_radial(t, r);
  return v;
}

double PotentialSpec::radial_r_dvdr(double r) const {
  double v = 0.0;
  for (const auto& t : terms_) v += term_r_dvdr(t, r);
  return v;
}

double apply_part(double v, Part part) {
  switch (part) {
    case Part::Negative: return std::min(v, 0.0);
    case Part::Positive: return std::max(v, 0.0);
    case Part::Absolute: return std::abs(v);
    case Part::Signed: break;
  }
  return v;
}

namespace {

ScalarProfile base_profile(const PotentialSpec& spec, Part part) {
  ScalarProfile p;
  p.part = part;
  p.identically_zero = spec.is_zero();
  p.length_scale = spec.largest_length_scale();
  for (const auto& t : spec.terms()) {
    p.truncation_radius = std::max(p.truncation_radius, truncation_radius(t));
    const double pad = t.family == PotentialFamily::Yukawa ? 14.0 / t.shape
                       : t.family == PotentialFamily::BallIndicator ? t.shape
                                                                    : 6.0 * t.shape;
    p.lattice_pad = std::max(p.lattice_pad, pad);
    const auto b = term_breakpoints(t);
    p.breakpoints.insert(p.breakpoints.end(), b.begin(), b.end());
    p.centers.push_back(t.center);
  }
  std::sort(p.breakpoints.begin(), p.breakpoints.end());
  return p;
}

// Members grouped by center, each group a radial profile about its center;
// fn maps (term, r) to the member's contribution. The lattice path integrates
// the groups exactly and sums only the bounded overlap remainder.
template <class Fn>
std::vector<ScalarProfile::SingularPart> center_groups(const PotentialSpec& spec, Part part, bool origin_only, Fn fn) {
  std::vector<ScalarProfile::SingularPart> parts;
  std::vector<Vec3> seen;
  for (const auto& t : spec.terms()) {
    if (origin_only && !(t.center == Vec3{})) continue;
    if (std::find(seen.begin(), seen.end(), t.center) != seen.end()) continue;
    seen.push_back(t.center);
    std::vector<PotentialTerm> group;
    for (const auto& u : spec.terms())
      if (u.center == t.center) group.push_back(u);
    parts.push_back({t.center, [group, fn, part](double r) {
                       double v = 0.0;
                       for (const auto& u : group) v += fn(u, r);
                       return std::abs(apply_part(v, part));
                     }});
  }
  return parts;
}

}  // namespace

ScalarProfile potential_profile(const PotentialSpec& spec, Part part) {
  ScalarProfile p = base_profile(spec, part);
  p.singular_parts = center_groups(spec, part, false, [](const PotentialTerm& t, double r) { return term_radial(t, r); });
  p.value = [spec, part](const Vec3& x) { return apply_part(spec.value(x), part); };
  p.cell_value = [spec, part](const Vec3& x, double h) {
    return apply_part(sample_with_singular_cells(spec, x, h, false), part);
  };
  if (auto c = spec.common_center()) {
    p.center = *c;
    p.radial = [spec, part](double r) { return apply_part(spec.radial_value(r), part); };
  }
  return p;
}

ScalarProfile radial_derivative_profile(const PotentialSpec& spec, Part part) {
  if (!spec.has_gradient())
    fail(ErrorCode::Unsupported, "radial_derivative: ball_indicator has only a distributional derivative");
  ScalarProfile p = base_profile(spec, part);
  p.x_dot_grad = true;
  for (const auto& t : spec.terms())
    if (t.family == PotentialFamily::Yukawa && !(t.center == Vec3{}))
      p.non_integrable =
          "x.grad V of a yukawa member centered off the origin behaves like |c|/|x-c|^2; "
          "its Kato integral diverges";
  // x.grad V is radial only about the origin.
  p.singular_parts = center_groups(spec, part, true, [](const PotentialTerm& t, double r) { return term_r_dvdr(t, r); });
  p.value = [spec, part](const Vec3& x) { return apply_part(spec.x_dot_grad(x), part); };
  p.cell_value = [spec, part](const Vec3& x, double h) {
    return apply_part(sample_with_singular_cells(spec, x, h, true), part);
  };
  if (spec.radial_flag()) {
    p.center = Vec3{};
    p.radial = [spec, part](double r) { return apply_part(spec.radial_r_dvdr(r), part); };
  }
  return p;
}

// ---------------------------------------------------------------------------

namespace {

// Sample of a potential-derived quantity on a node that may hit a yukawa center.
double sample_with_singular_cells(const PotentialSpec& spec, const Vec3& x, double h, bool x_dot_grad) {
  double v = 0.0;
  const double rho = equal_volume_radius(h);
  for (const auto& t : spec.terms()) {
    const Vec3 d = x - t.center;
    const double r = norm(d);
    if (t.family == PotentialFamily::Yukawa && r < 1e-9 * h) {
      v += x_dot_grad ? yukawa_ball_average_rdvdr(t, rho) : yukawa_ball_average(t, rho);
      continue;
    }
    if (!x_dot_grad) {
      v += term_radial(t, r);
    } else if (r > 0.0) {
      v += term_r_dvdr(t, r) / (r * r) * dot(x, d);
    }
  }
  return v;
}

// Volume fraction of a cell inside a ball, by midpoint subsampling.
double ball_fraction(const Vec3& cell_center, double h, const Vec3& c, double R) {
  constexpr int m = 6;
  int inside = 0;
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const Vec3 p{cell_center.x + ((i + 0.5) / m - 0.5) * h, cell_center.y + ((j + 0.5) / m - 0.5) * h,
                     cell_center.z + ((k + 0.5) / m - 0.5) * h};
        if (norm(p - c) < R) ++inside;
      }
  return static_cast<double>(inside) / (m * m * m);
}

double sample_value(const PotentialSpec& spec, const Vec3& x, double h) {
  double v = 0.0;
  const double rho = equal_volume_radius(h);
  const double half_diag = 0.5 * std::sqrt(3.0) * h;
  for (const auto& t : spec.terms()) {
    const double r = norm(x - t.center);
    if (t.family == PotentialFamily::Yukawa && r < 1e-9 * h) {
      v += yukawa_ball_average(t, rho);
    } else if (t.family == PotentialFamily::BallIndicator && std::abs(r - t.shape) < half_diag) {
      v += t.amplitude * ball_fraction(x, h, t.center, t.shape);
    } else {
      v += term_radial(t, r);
    }
  }
  return v;
}

}  // namespace

RealField evaluate(const PotentialSpec& spec, const Grid& g, Part part) {
  RealField out(g);
  if (spec.is_zero()) return out;
  const double h = g.spacing();
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = apply_part(sample_value(spec, g.point(i), h), part);
  return out;
}

RealField radial_derivative(const PotentialSpec& spec, const Grid& g) {
  if (!spec.has_gradient())
    fail(ErrorCode::Unsupported, "radial_derivative: ball_indicator has only a distributional derivative");
  RealField out(g);
  if (spec.is_zero()) return out;
  const double h = g.spacing();
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = sample_with_singular_cells(spec, g.point(i), h, true);
  return out;
}

std::array<RealField, 3> gradient_field(const PotentialSpec& spec, const Grid& g) {
  if (!spec.has_gradient())
    fail(ErrorCode::Unsupported, "gradient: ball_indicator has only a distributional derivative");
  std::array<RealField, 3> out{RealField(g), RealField(g), RealField(g)};
  if (spec.is_zero()) return out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 v = spec.gradient(g.point(i));
    out[0][i] = v.x;
    out[1][i] = v.y;
    out[2][i] = v.z;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kato norm

namespace {

// F(s) = 4 pi [ (1/s) int_0^s |f| r^2 dr + int_s^T |f| r dr ], maximized over s.
struct RadialKato {
  const ScalarProfile& f;
  double tol;

  double seg_inner(double a, double b) const {
    return integrate_1d([this](double r) { return std::abs(f.radial(r)) * r * r; }, a, b,
                        f.breakpoints, tol);
  }
  double seg_outer(double a, double b) const {
    return integrate_1d([this](double r) { return std::abs(f.radial(r)) * r; }, a, b,
                        f.breakpoints, tol);
  }
  static double combine(double s, double inner, double outer) {
    return kFourPi * (s > 0.0 ? inner / s + outer : outer);
  }
};

double kato_radial(const ScalarProfile& f, const QuadratureSettings& quad) {
  RadialKato k{f, quad.rel_tol};
  const int m = std::max(quad.scan_points, 3);
  const double T = f.truncation_radius;
  const double s_max = 8.0 * f.length_scale;
  std::vector<double> s(m), inner(m), outer(m);
  for (int j = 0; j < m; ++j) s[j] = s_max * j / (m - 1);
  outer[0] = k.seg_outer(0.0, T);
  inner[0] = 0.0;
  for (int j = 1; j < m; ++j) {
    const double a = std::min(s[j - 1], T), b = std::min(s[j], T);
    inner[j] = inner[j - 1] + k.seg_inner(a, b);
    outer[j] = std::max(outer[j - 1] - k.seg_outer(a, b), 0.0);
  }
  double best = -1.0;
  int best_j = 0;
  for (int j = 0; j < m; ++j) {
    const double v = RadialKato::combine(s[j], inner[j], outer[j]);
    if (v > best) {
      best = v;
      best_j = j;
    }
  }
  const int lo_j = std::max(best_j - 1, 0);
  const double lo = s[lo_j];
  const double hi = s[std::min(best_j + 1, m - 1)];
  auto F = [&](double x) {
    const double b = std::min(x, T), a = std::min(lo, T);
    return RadialKato::combine(x, inner[lo_j] + k.seg_inner(a, b), std::max(outer[lo_j] - k.seg_outer(a, b), 0.0));
  };
  double refined = 0.0;
  golden_section_max(F, lo, hi, 1e-6 * f.length_scale, &refined);
  return std::max(best, refined);
}

// Direct quadrature on a uniform cube containing the support.
struct KatoGrid {
  int n = 0;
  double h = 0.0;
  Vec3 lo{};
  std::vector<double> xs, ys, zs, w;  // nonzero nodes: position and |f| h^3
  std::vector<double> abs_f;          // cell-sampled |f| per node, full lattice
  std::vector<double> rem;            // |f| minus singular parts per node

  Vec3 node(int i, int j, int k) const { return {lo.x + i * h, lo.y + j * h, lo.z + k * h}; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * n + j) * n + i;
  }
};

// |f(x)| - sum_c g_c(|x - c|), bounded and zero away from overlaps; on a
// center the limit is taken from a point nudged off it.
double kato_remainder(const ScalarProfile& f, Vec3 x, double h) {
  for (const auto& sp : f.singular_parts)
    if (norm(x - sp.center) < 1e-9 * h) x.x += 1e-7 * h;
  const double total = std::abs(f.value(x));
  double v = total, scale = total;
  for (const auto& sp : f.singular_parts) {
    const double g = sp.g(norm(x - sp.center));
    v -= g;
    scale += g;
  }
  return std::abs(v) <= 1e-13 * scale ? 0.0 : v;
}

// Newton potential of the radial density g about its center, at distance d.
double radial_newton(const std::function<double(double)>& g, double d, double T,
                     const std::vector<double>& breakpoints) {
  const double outer = d < T ? integrate_1d([&g](double r) { return g(r) * r; }, d, T, breakpoints, 1e-10) : 0.0;
  if (d <= 0.0) return kFourPi * outer;
  const double inner = integrate_1d([&g](double r) { return g(r) * r * r; }, 0.0, std::min(d, T), breakpoints, 1e-10);
  return kFourPi * (inner / d + outer);
}

KatoGrid build_kato_grid(const ScalarProfile& f, const QuadratureSettings& quad) {
  KatoGrid kg;
  Vec3 cmin = f.centers.front(), cmax = f.centers.front();
  for (const auto& c : f.centers) {
    cmin = {std::min(cmin.x, c.x), std::min(cmin.y, c.y), std::min(cmin.z, c.z)};
    cmax = {std::max(cmax.x, c.x), std::max(cmax.y, c.y), std::max(cmax.z, c.z)};
  }
  const double extent = std::max({cmax.x - cmin.x, cmax.y - cmin.y, cmax.z - cmin.z});
  const double side = extent + 2.0 * (f.lattice_pad + 1e-3 * f.length_scale);
  const Vec3 mid = 0.5 * (cmin + cmax);
  kg.n = std::max(quad.grid_n, 8);
  kg.h = side / (kg.n - 1);
  kg.lo = mid - Vec3{0.5 * side, 0.5 * side, 0.5 * side};
  // put the first center on a node so its singular cell (if any) is handled exactly
  const Vec3 c0 = f.centers.front();
  auto align = [&kg](double lo, double c) { return c - std::round((c - lo) / kg.h) * kg.h; };
  kg.lo = {align(kg.lo.x, c0.x), align(kg.lo.y, c0.y), align(kg.lo.z, c0.z)};
  kg.abs_f.resize(static_cast<std::size_t>(kg.n) * kg.n * kg.n);
  kg.rem.resize(kg.abs_f.size());
  const double h3 = kg.h * kg.h * kg.h;
  for (int k = 0; k < kg.n; ++k)
    for (int j = 0; j < kg.n; ++j)
      for (int i = 0; i < kg.n; ++i) {
        const Vec3 x = kg.node(i, j, k);
        kg.abs_f[kg.index(i, j, k)] = std::abs(f.cell_value(x, kg.h));
        const double v = kato_remainder(f, x, kg.h);
        kg.rem[kg.index(i, j, k)] = v;
        if (v != 0.0) {
          kg.xs.push_back(x.x);
          kg.ys.push_back(x.y);
          kg.zs.push_back(x.z);
          kg.w.push_back(v * h3);
        }
      }
  return kg;
}

// int |f(y)|/|x - y| dy for the lattice node (i, j, k); the node's own cell is
// replaced by the ball of equal volume, int_{|y|<rho} dy/|y| = 2 pi rho^2.
double kato_at_node(const ScalarProfile& f, const KatoGrid& kg, int i, int j, int k) {
  const Vec3 x = kg.node(i, j, k);
  const double eps2 = 0.25 * kg.h * kg.h;
  double sum = 0.0;
  for (std::size_t q = 0; q < kg.w.size(); ++q) {
    const double dx = kg.xs[q] - x.x, dy = kg.ys[q] - x.y, dz = kg.zs[q] - x.z;
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 > eps2) sum += kg.w[q] / std::sqrt(d2);
  }
  const double rho = equal_volume_radius(kg.h);
  sum += kg.rem[kg.index(i, j, k)] * 2.0 * kPi * rho * rho;
  for (const auto& sp : f.singular_parts)
    sum += radial_newton(sp.g, norm(x - sp.center), f.truncation_radius, f.breakpoints);
  return sum;
}

double kato_lattice(const ScalarProfile& f, const QuadratureSettings& quad) {
  const KatoGrid kg = build_kato_grid(f, quad);
  if (kg.w.empty() && f.singular_parts.empty()) return 0.0;

  // candidate lattice over the bounding box of the centers, widened by one length scale
  Vec3 cmin = f.centers.front(), cmax = f.centers.front();
  for (const auto& c : f.centers) {
    cmin = {std::min(cmin.x, c.x), std::min(cmin.y, c.y), std::min(cmin.z, c.z)};
    cmax = {std::max(cmax.x, c.x), std::max(cmax.y, c.y), std::max(cmax.z, c.z)};
  }
  const double l = f.length_scale;
  cmin = cmin - Vec3{l, l, l};
  cmax = cmax + Vec3{l, l, l};
  const int m = std::max(quad.lattice_points, 2);
  auto snap = [&kg](double x, double lo) {
    return std::clamp(static_cast<int>(std::lround((x - lo) / kg.h)), 0, kg.n - 1);
  };

  double best = -1.0;
  int bi = 0, bj = 0, bk = 0;
  for (int c = 0; c < m; ++c)
    for (int b = 0; b < m; ++b)
      for (int a = 0; a < m; ++a) {
        const double tx = static_cast<double>(a) / (m - 1);
        const double ty = static_cast<double>(b) / (m - 1);
        const double tz = static_cast<double>(c) / (m - 1);
        const int i = snap(cmin.x + tx * (cmax.x - cmin.x), kg.lo.x);
        const int j = snap(cmin.y + ty * (cmax.y - cmin.y), kg.lo.y);
        const int k = snap(cmin.z + tz * (cmax.z - cmin.z), kg.lo.z);
        const double v = kato_at_node(f, kg, i, j, k);
        if (v > best) {
          best = v;
          bi = i;
          bj = j;
          bk = k;
        }
      }

  // local hill climb over the 26 neighbouring nodes
  for (int step = 0; step < 400; ++step) {
    double next = best;
    int ni = bi, nj = bj, nk = bk;
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int i = bi + di, j = bj + dj, k = bk + dk;
          if ((di == 0 && dj == 0 && dk == 0) || i < 0 || j < 0 || k < 0 || i >= kg.n ||
              j >= kg.n || k >= kg.n)
            continue;
          const double v = kato_at_node(f, kg, i, j, k);
          if (v > next) {
            next = v;
            ni = i;
            nj = j;
            nk = k;
          }
        }
    if (next <= best) break;
    best = next;
    bi = ni;
    bj = nj;
    bk = nk;
  }
  return best;
}

}  // namespace

double kato_norm(const ScalarProfile& f, const QuadratureSettings& quad) {
  if (f.identically_zero) return 0.0;
  if (!f.non_integrable.empty()) fail(ErrorCode::Numerical, "kato_norm: " + f.non_integrable);
  const double k = f.center ? kato_radial(f, quad) : kato_lattice(f, quad);
  if (!std::isfinite(k)) fail(ErrorCode::Numerical, "kato_norm: integral is not finite (non-integrable singularity)");
  return k;
}

double kato_norm(const PotentialSpec& spec, const QuadratureSettings& quad) {
  return kato_norm(potential_profile(spec, Part::Signed), quad);
}

double l32_norm(const ScalarProfile& f, const QuadratureSettings& quad) {
  if (f.identically_zero) return 0.0;
  double integral = 0.0;
  if (f.center) {
    integral = kFourPi * integrate_1d([&f](double r) { return std::pow(std::abs(f.radial(r)), 1.5) * r * r; },
                                      0.0, f.truncation_radius, f.breakpoints, quad.rel_tol);
  } else {
    const KatoGrid kg = build_kato_grid(f, quad);
    const double h3 = kg.h * kg.h * kg.h;
    for (double v : kg.abs_f) integral += std::pow(v, 1.5) * h3;
  }
  if (!std::isfinite(integral)) fail(ErrorCode::Numerical, "l32_norm: integral is not finite");
  return std::pow(integral, 2.0 / 3.0);
}

namespace {

// V >= 0 and x.grad V <= 0 at every sample point.
bool sampled_repulsive(const PotentialSpec& spec, const QuadratureSettings& quad) {
  const double scale = [&] {
    double a = 0.0;
    for (const auto& t : spec.terms()) a = std::max(a, std::abs(t.amplitude));
    return a;
  }();
  const double tol = 1e-13 * scale;
  if (spec.radial_flag()) {
    const ScalarProfile p = potential_profile(spec);
    const int m = 4001;
    for (int i = 1; i <= m; ++i) {
      const double r = p.truncation_radius * i / m;
      if (spec.radial_value(r) < -tol || spec.radial_r_dvdr(r) > tol) return false;
    }
    return true;
  }
  ScalarProfile p = potential_profile(spec);
  const KatoGrid kg = build_kato_grid(p, {quad.rel_tol, quad.scan_points, quad.lattice_points, 48});
  for (int k = 0; k < kg.n; ++k)
    for (int j = 0; j < kg.n; ++j)
      for (int i = 0; i < kg.n; ++i) {
        const Vec3 x = kg.node(i, j, k);
        bool at_center = false;
        for (const auto& c : p.centers) at_center = at_center || norm(x - c) < 1e-9 * kg.h;
        if (at_center) continue;
        if (spec.value(x) < -tol || spec.x_dot_grad(x) > tol) return false;
      }
  return true;
}

}  // namespace

AdmissibilityReport admissibility(const PotentialSpec& spec, const QuadratureSettings& quad) {
  AdmissibilityReport rep;
  if (spec.is_zero()) {
    rep.confining_kato = 0.0;
    rep.passes_confining_4pi = true;
    rep.passes_confining_8pi = true;
    return rep;
  }
  rep.kato_norm = kato_norm(potential_profile(spec, Part::Signed), quad);
  rep.kato_norm_negative = kato_norm(potential_profile(spec, Part::Negative), quad);
  rep.kato_norm_positive = kato_norm(potential_profile(spec, Part::Positive), quad);
  rep.l32_norm = l32_norm(potential_profile(spec, Part::Signed), quad);
  rep.passes_small_negative = rep.kato_norm_negative < kFourPi;
  const bool confining_defined = spec.has_gradient() &&
                                  radial_derivative_profile(spec, Part::Positive).non_integrable.empty();
  if (confining_defined) {
    rep.confining_kato = kato_norm(radial_derivative_profile(spec, Part::Positive), quad);
    rep.passes_confining_4pi = *rep.confining_kato < kFourPi;
    rep.passes_confining_8pi = *rep.confining_kato < 2.0 * kFourPi;
    rep.repulsive = sampled_repulsive(spec, quad);
  } else {
    rep.repulsive = spec.has_gradient() && sampled_repulsive(spec, quad);
  }
  return rep;
}

}  // namespace nlsv
