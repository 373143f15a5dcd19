#include "nlsv/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsv/error.hpp"

namespace nlsv {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr double kSlack = 1e-9;
}  // namespace

FormValues form_values(const SpectralField& u_hat, const Field& u, const RealField& V) {
  require(u.grid() == V.grid() && u_hat.grid() == u.grid(), "form_values: grid mismatch");
  FormValues f;
  f.grad_sq = grad_norm_sq(u_hat);
  const double dv = u.grid().cell_volume();
  double mass = 0.0, l4 = 0.0, pot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::norm(u[i]);
    mass += a;
    l4 += a * a;
    pot += V[i] * a;
  }
  f.mass = mass * dv;
  f.l4_fourth = l4 * dv;
  f.potential_term = pot * dv;
  f.h_form = f.grad_sq + f.potential_term;
  return f;
}

FormValues form_values(const Field& u, const RealField& V) {
  return form_values(transform_forward(u), u, V);
}

double energy(const FormValues& f, double sigma) { return 0.5 * f.h_form - 0.25 * sigma * f.l4_fourth; }

double free_energy(const FormValues& f, double sigma) {
  return 0.5 * f.grad_sq - 0.25 * sigma * f.l4_fourth;
}

double wv(const FormValues& f) {
  if (!(f.mass > 0.0)) fail(ErrorCode::InvalidArgument, "wv: zero field");
  if (!(f.h_form > 0.0))
    fail(ErrorCode::Numerical, "wv: nonpositive form value, H is not coercive on this input");
  return f.l4_fourth / (std::sqrt(f.mass) * std::pow(f.h_form, 1.5));
}

double wv(const Field& u, const RealField& V) { return wv(form_values(u, V)); }

KatoPositivityCheck kato_positivity_check(const Field& u, const RealField& V, double kato_V) {
  require(u.grid() == V.grid(), "kato_positivity_check: grid mismatch");
  require(kato_V >= 0.0, "kato_positivity_check: Kato norm must be nonnegative");
  KatoPositivityCheck c;
  double lhs = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) lhs += std::abs(V[i]) * std::norm(u[i]);
  c.lhs = lhs * u.grid().cell_volume();
  c.rhs = kato_V / kFourPi * grad_norm_sq(u);
  c.holds = c.lhs <= c.rhs * (1.0 + kSlack);
  return c;
}

SplitInequalityCheck split_inequality_check(double a1, double a2, double b1, double b2, double c1,
                                            double c2, double eps) {
  require(a1 > 0 && a2 > 0 && b1 > 0 && b2 > 0 && c1 > 0 && c2 > 0,
          "split_inequality_check: all of a1, a2, b1, b2, c1, c2 must be positive");
  require(eps > 0.0 && eps < 1.0, "split_inequality_check: eps must lie in (0, 1)");
  SplitInequalityCheck c;
  const double ratio = a2 / a1;
  c.applicable = eps < ratio && ratio < 1.0 / eps;
  c.lhs = (c1 + c2) / (std::sqrt(a1 + a2) * std::pow(b1 + b2, 1.5));
  const double q1 = c1 / (std::sqrt(a1) * std::pow(b1, 1.5));
  const double q2 = c2 / (std::sqrt(a2) * std::pow(b2, 1.5));
  c.rhs = (1.0 - eps / 8.0) * std::max(q1, q2);
  c.holds = !c.applicable || c.lhs <= c.rhs * (1.0 + kSlack);
  return c;
}

SandwichCheck form_sandwich(const FormValues& f, double kato_negative, double kato_total) {
  SandwichCheck s;
  s.h_form = f.h_form;
  s.lower = (1.0 - kato_negative / kFourPi) * f.grad_sq;
  s.upper = (1.0 + kato_total / kFourPi) * f.grad_sq;
  const double tol = kSlack * std::max(f.grad_sq, 1e-300);
  s.holds = s.lower <= f.h_form + tol && f.h_form <= s.upper + tol;
  return s;
}

}  // namespace nlsv
