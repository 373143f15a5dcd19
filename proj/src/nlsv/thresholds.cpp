#include "nlsv/thresholds.hpp"

#include <algorithm>
#include <cmath>

#include "nlsv/error.hpp"

namespace nlsv {

const char* to_string(ThresholdSource s) {
  return s == ThresholdSource::Free ? "free" : "perturbed";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::BelowGlobal: return "below_global";
    case Verdict::AboveLine: return "above_line";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

ThresholdReport thresholds_from_norms(const FormValues& f, ThresholdSource source) {
  require(f.mass > 0.0 && f.h_form > 0.0 && f.l4_fourth > 0.0,
          "thresholds: generating state must have positive mass, form and L^4 norm");
  ThresholdReport r;
  r.source = source;
  r.me = f.mass * (0.5 * f.h_form - 0.25 * f.l4_fourth);
  r.alpha = std::sqrt(f.mass * f.h_form);
  r.c_gn = wv(f);
  r.me_consistency = std::abs(r.me - r.alpha * r.alpha / 6.0) / std::abs(r.me);
  r.c_gn_consistency = std::abs(r.c_gn - 4.0 / (3.0 * r.alpha)) / r.c_gn;
  if (!(r.me > 0.0)) fail(ErrorCode::Numerical, "thresholds: generating state has nonpositive M E");
  return r;
}

ThresholdReport free_thresholds(const RadialNorms& q) {
  FormValues f;
  f.mass = q.mass;
  f.grad_sq = q.grad_sq;
  f.h_form = q.grad_sq;
  f.l4_fourth = q.l4_fourth;
  return thresholds_from_norms(f, ThresholdSource::Free);
}

ThresholdReport compute_thresholds(const PotentialSpec& spec, const GroundStateResult& state) {
  const bool perturbed = std::any_of(spec.terms().begin(), spec.terms().end(),
                                     [](const PotentialTerm& t) { return t.amplitude < 0.0; });
  if (perturbed) {
    if (state.source != "maximizer")
      fail(ErrorCode::InvalidArgument,
           "compute_thresholds: V_- != 0 needs the W_V maximizer, got a '" + state.source + "' state");
    return thresholds_from_norms(state.norms, ThresholdSource::Perturbed);
  }
  if (state.source != "free")
    fail(ErrorCode::InvalidArgument,
         "compute_thresholds: V_- = 0 needs the free ground state, got a '" + state.source + "' state");
  FormValues f = state.norms;
  f.h_form = f.grad_sq;
  return thresholds_from_norms(f, ThresholdSource::Free);
}

Classification classify(const FormValues& u0, const ThresholdReport& report) {
  Classification c;
  c.mass = u0.mass;
  c.energy_v = energy(u0);
  c.energy_0 = free_energy(u0);
  c.mass_energy = c.mass * c.energy_v;
  c.g0 = std::sqrt(std::max(0.0, u0.mass * u0.h_form));
  const bool below_me = c.mass_energy < report.me * (1.0 - kBoundarySlack);
  if (below_me && c.g0 < report.alpha * (1.0 - kBoundarySlack))
    c.verdict = Verdict::BelowGlobal;
  else if (below_me && c.g0 > report.alpha * (1.0 + kBoundarySlack))
    c.verdict = Verdict::AboveLine;
  else
    c.verdict = Verdict::Indeterminate;
  return c;
}

Classification classify(const Field& u0, const RealField& V, const ThresholdReport& report) {
  return classify(form_values(u0, V), report);
}

double threshold_function(double x, const ThresholdReport& report) {
  require(x >= 0.0, "threshold_function: x must be nonnegative");
  return 0.5 * x * x - x * x * x / (3.0 * report.alpha);
}

ComparabilityCheck comparability_bounds(const FormValues& f, double energy_value) {
  ComparabilityCheck c;
  c.lower = 2.0 * energy_value;
  c.upper = 6.0 * energy_value;
  c.h_form = f.h_form;
  const double slack = kBoundarySlack * std::max(std::abs(c.upper), std::abs(f.h_form));
  c.holds = c.lower - slack <= f.h_form && f.h_form <= c.upper + slack;
  return c;
}

}  // namespace nlsv
