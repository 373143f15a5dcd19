#pragma once

#include <string>

#include "nlsv/forms.hpp"
#include "nlsv/ground_states.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/radial_ground_state.hpp"

namespace nlsv {

enum class ThresholdSource { Free, Perturbed };
const char* to_string(ThresholdSource s);

struct ThresholdReport {
  double me = 0.0;     // M E of the generating state
  double alpha = 0.0;  // ||Q||_2 ||H^{1/2} Q||_2
  double c_gn = 0.0;   // W of the generating state
  ThresholdSource source = ThresholdSource::Free;
  double me_consistency = 0.0;    // |me - alpha^2/6| / me
  double c_gn_consistency = 0.0;  // |c_gn - 4/(3 alpha)| / c_gn
};

/// Thresholds from the norms of the generating state. For the free state
/// h_form = grad_sq and E = E_0.
ThresholdReport thresholds_from_norms(const FormValues& f, ThresholdSource source);

/// Free thresholds from the radial ground state (grid independent).
ThresholdReport free_thresholds(const RadialNorms& q);

/// Uses the free ground state when V_- = 0 and the maximizer otherwise; a
/// perturbed potential with a state of any other origin is rejected.
ThresholdReport compute_thresholds(const PotentialSpec& spec, const GroundStateResult& state);

enum class Verdict { BelowGlobal, AboveLine, Indeterminate };
const char* to_string(Verdict v);

struct Classification {
  double mass = 0.0;
  double energy_v = 0.0;
  double energy_0 = 0.0;
  double mass_energy = 0.0;  // M[u0] E_V[u0]
  double g0 = 0.0;           // ||u0||_2 ||H^{1/2} u0||_2
  Verdict verdict = Verdict::Indeterminate;
};

inline constexpr double kBoundarySlack = 1e-9;

Classification classify(const FormValues& u0, const ThresholdReport& report);
Classification classify(const Field& u0, const RealField& V, const ThresholdReport& report);

/// f(x) = x^2/2 - x^3/(3 alpha), maximal at x = alpha with value alpha^2/6.
double threshold_function(double x, const ThresholdReport& report);

struct ComparabilityCheck {
  double lower = 0.0;  // 2E
  double upper = 0.0;  // 6E
  double h_form = 0.0;
  bool holds = false;
};

/// 2E <= h_form <= 6E, with relative slack kBoundarySlack.
ComparabilityCheck comparability_bounds(const FormValues& f, double energy);

}  // namespace nlsv
