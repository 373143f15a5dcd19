// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlsv/config.hpp"
#include "nlsv/experiments.hpp"
#include "nlsv/forms.hpp"
#include "nlsv/ground_states.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/propagator.hpp"
#include "nlsv/thresholds.hpp"
#include "nlsv/virial.hpp"

using namespace nlsv;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kPohozaevGradLo = 2.997, kPohozaevGradHi = 3.003;
constexpr double kPohozaevL4Lo = 3.996, kPohozaevL4Hi = 4.004;
constexpr double kRadialSeconds = 5.0;
constexpr double kThresholdAlgebraTol = 1e-3;
constexpr double kThresholdSeconds = 60.0;
constexpr double kEulerLagrangeTol = 1e-6;
constexpr double kMaximizerPohozaevTol = 1e-3;
constexpr double kKatoRelTol = 1e-3;
constexpr double kMassDriftTol = 1e-10;
constexpr double kOrderRatioLo = 3.5, kOrderRatioHi = 4.5;
constexpr double kVirialRelTol = 1e-2;
constexpr double kFreeDecayLo = -1.55, kFreeDecayHi = -1.45;
constexpr double kBumpDecayLo = -1.7, kBumpDecayHi = -1.3;
constexpr double kDispersiveSeconds = 120.0;
constexpr int kFuzzTrials = 1000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Shared ground-state work on the 64^3, L = 16 grid.
const Grid& grid64() {
  static const Grid g(64, 16.0);
  return g;
}

const FreeGroundState& free64() {
  static const FreeGroundState f = solve_free_ground_state(grid64());
  return f;
}

PotentialSpec reference_well() {
  // ||V_-||_K = 2 pi |A| sigma^2 = 0.5.
  return PotentialSpec::gaussian_well(-0.5 / (2.0 * kPi * 0.25), 0.5);
}

std::optional<GroundStateResult> g_maximizer;

const GroundStateResult& well_maximizer() {
  if (!g_maximizer) {
    const PotentialSpec well = reference_well();
    const RealField V = evaluate(well, grid64());
    g_maximizer.emplace(maximize_wv(well, V, maximizer_initial_guess(free64().radial, V, 0.8)));
  }
  return *g_maximizer;
}

double max_relative_drift(const Trajectory& t, double FrameDiagnostics::*field) {
  double worst = 0.0;
  const double ref = t.frames.front().*field;
  for (const auto& f : t.frames) worst = std::max(worst, std::abs(f.*field - ref) / std::abs(ref));
  return worst;
}

bool strictly_decreasing(const std::vector<double>& v, std::size_t from = 0) {
  for (std::size_t i = from + 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::vector<double> l4_series(const Trajectory& t) {
  std::vector<double> out;
  for (const auto& f : t.frames) out.push_back(f.l4);
  return out;
}

FormValues frame_forms(const FrameDiagnostics& d) {
  FormValues f;
  f.mass = d.mass;
  f.h_form = d.h_form;
  f.grad_sq = d.grad_sq;
  f.l4_fourth = std::pow(d.l4, 4.0);
  f.potential_term = d.h_form - d.grad_sq;
  return f;
}

EvolutionConfig evolution(double dt, int steps, int stride, int sigma = 1) {
  EvolutionConfig c;
  c.dt = dt;
  c.t_end = dt * steps;
  c.save_stride = stride;
  c.sigma = sigma;
  c.dealias = false;
  return c;
}

// Mass drift on both runs and the E_V drift ratio between dt and dt/2.
struct DriftStudy {
  double mass_drift = 0.0;
  double energy_ratio = 0.0;
  double energy_drift_coarse = 0.0;
  double energy_drift_fine = 0.0;
  Trajectory coarse;
};

DriftStudy drift_study(const Field& u0, const RealField& V, double dt, int steps, int stride, int sigma) {
  DriftStudy s;
  s.coarse = evolve(u0, V, evolution(dt, steps, stride, sigma));
  const Trajectory fine = evolve(u0, V, evolution(0.5 * dt, 2 * steps, 2 * stride, sigma));
  if (s.coarse.aborted() || fine.aborted()) throw std::runtime_error("drift study aborted: " + s.coarse.abort_reason);
  s.mass_drift = std::max(max_relative_drift(s.coarse, &FrameDiagnostics::mass),
                          max_relative_drift(fine, &FrameDiagnostics::mass));
  s.energy_drift_coarse = max_relative_drift(s.coarse, &FrameDiagnostics::energy_v);
  s.energy_drift_fine = max_relative_drift(fine, &FrameDiagnostics::energy_v);
  s.energy_ratio = s.energy_drift_coarse / s.energy_drift_fine;
  return s;
}

Outcome c1_pohozaev() {
  const auto t0 = Clock::now();
  const RadialNorms n = radial_norms(solve_radial_ground_state());
  const double secs = seconds_since(t0);
  const double r1 = n.grad_sq / n.mass, r2 = n.l4_fourth / n.mass;
  const bool pass = r1 >= kPohozaevGradLo && r1 <= kPohozaevGradHi && r2 >= kPohozaevL4Lo && r2 <= kPohozaevL4Hi &&
                    secs < kRadialSeconds;
  return {pass, fmt("|grad Q|^2/|Q|^2 = %.6f, |Q|_4^4/|Q|^2 = %.6f, %.2f s", r1, r2, secs)};
}

Outcome c2_threshold_algebra() {
  const auto t0 = Clock::now();
  const ThresholdReport free_r = free_thresholds(free64().radial_norms);
  const ThresholdReport well_r = compute_thresholds(reference_well(), well_maximizer());
  const double secs = seconds_since(t0);
  auto gn = [](const ThresholdReport& r) { return std::abs(r.c_gn * 3.0 * r.alpha - 4.0); };
  const bool pass = free_r.me_consistency < kThresholdAlgebraTol && gn(free_r) < kThresholdAlgebraTol &&
                    well_r.me_consistency < kThresholdAlgebraTol && gn(well_r) < kThresholdAlgebraTol &&
                    secs < kThresholdSeconds;
  return {pass, fmt("V=0: ME err %.1e, GN err %.1e; well: ME err %.1e, GN err %.1e; %.1f s", free_r.me_consistency,
                    gn(free_r), well_r.me_consistency, gn(well_r), secs)};
}

Outcome c3_maximizer() {
  const GroundStateResult& m = well_maximizer();
  const RealField V = evaluate(reference_well(), grid64());
  const double wv_free = wv(free64().on_grid.norms);
  const double wv_free_at_well = wv(maximizer_initial_guess(free64().radial, V, 1.0), V);
  const double el = m.residual_history.back();
  const bool pass = el < kEulerLagrangeTol && m.pohozaev_residual_1 < kMaximizerPohozaevTol &&
                    m.pohozaev_residual_2 < kMaximizerPohozaevTol && m.wv_value > std::max(wv_free, wv_free_at_well);
  return {pass, fmt("EL residual %.1e after %d iterations, Pohozaev %.1e / %.1e, W_V(Q_V) = %.6f > W_V(Q) = %.6f "
                    "(W_0(Q) = %.6f), omega = %.4f",
                    el, m.iterations, m.pohozaev_residual_1, m.pohozaev_residual_2, m.wv_value, wv_free_at_well,
                    wv_free, m.omega)};
}

Outcome c4_kato() {
  const double ball = kato_norm(PotentialSpec::ball_indicator(1.0, 1.0));
  const double yuk = kato_norm(PotentialSpec::yukawa(1.0, 1.0));
  const double eb = std::abs(ball - 2.0 * kPi) / (2.0 * kPi);
  const double ey = std::abs(yuk - 4.0 * kPi) / (4.0 * kPi);
  return {eb < kKatoRelTol && ey < kKatoRelTol,
          fmt("ball(1,1) = %.8f (rel err %.1e), yukawa(1,1) = %.8f (rel err %.1e)", ball, eb, yuk, ey)};
}

Outcome c5_conservation() {
  const Grid& g = grid64();
  const RealField V = evaluate(PotentialSpec::gaussian_bump(1.0, 1.0), g);
  const Field u0 = Complex(0.5, 0.0) * free64().on_grid.profile;
  const DriftStudy s = drift_study(u0, V, 2.5e-3, 2000, 50, 1);
  const bool pass = s.mass_drift < kMassDriftTol && s.energy_ratio >= kOrderRatioLo && s.energy_ratio <= kOrderRatioHi;
  return {pass, fmt("2000 steps dt=2.5e-3: mass drift %.1e, E_V drift %.2e vs %.2e at dt/2, ratio %.3f", s.mass_drift,
                    s.energy_drift_coarse, s.energy_drift_fine, s.energy_ratio)};
}

Outcome c6_virial() {
  const Grid& g = grid64();
  const PotentialSpec bump = PotentialSpec::gaussian_bump(1.0, 1.0);
  const RealField V = evaluate(bump, g);
  const CutoffProfile cut = build_cutoff(g, 3.5);
  const Field u0 = Field::from_function(g, [](const Vec3& x) { return Complex(2.0 * std::exp(-dot(x, x)), 0.0); });
  auto run = [&](double dt, double t_end, int stride) {
    const Trajectory t =
        evolve(u0, V, evolution(dt, static_cast<int>(std::llround(t_end / dt)), stride), virial_hook(bump, cut, 1));
    if (t.aborted()) throw std::runtime_error("virial run aborted: " + t.abort_reason);
    return virial_errors(virial_series(t)).d2z;
  };
  const double gate = run(1e-3, 0.2, 1);
  const double coarse = run(1e-3, 0.4, 40);
  const double fine = run(5e-4, 0.4, 40);
  const double ratio = coarse / fine;
  const bool pass = gate < kVirialRelTol && ratio >= kOrderRatioLo && ratio <= kOrderRatioHi;
  return {pass, fmt("d2z rel err %.2e at dt=1e-3; frames 40 steps apart: %.2e vs %.2e at dt/2, ratio %.3f", gate, coarse,
                    fine, ratio)};
}

Outcome c7_dispersive() {
  const auto t0 = Clock::now();
  const Grid g(128, 80.0);
  const Field u0 = Field::from_function(g, [](const Vec3& x) { return Complex(std::exp(-dot(x, x)), 0.0); });
  const double horizon = wraparound_horizon(u0);
  constexpr double t_min = 0.75, t_max = 7.5;
  auto fit = [&](const PotentialSpec& spec, double dt, int stride) {
    const Trajectory t = evolve(u0, evaluate(spec, g), evolution(dt, static_cast<int>(std::llround(8.0 / dt)), stride, 0));
    return dispersive_decay_probe(t, t_min, t_max).exponent;
  };
  const double free_exp = fit(PotentialSpec::zero(), 0.25, 1);
  const double bump_exp = fit(PotentialSpec::gaussian_bump(0.5, 1.0), 0.05, 5);
  const double secs = seconds_since(t0);
  const bool pass = t_max <= horizon && free_exp >= kFreeDecayLo && free_exp <= kFreeDecayHi &&
                    bump_exp >= kBumpDecayLo && bump_exp <= kBumpDecayHi && secs < kDispersiveSeconds;
  return {pass, fmt("window [%.2f, %.2f] (horizon %.2f): V=0 exponent %.4f, bump exponent %.4f, %.1f s", t_min, t_max,
                    horizon, free_exp, bump_exp, secs)};
}

Outcome c8_dichotomy() {
  const Grid& g = grid64();
  const RealField V(g);
  const ThresholdReport r = compute_thresholds(PotentialSpec::zero(), free64().on_grid);
  const Field below0 = Complex(0.9, 0.0) * free64().on_grid.profile;
  const Field above0 = Complex(1.1, 0.0) * free64().on_grid.profile;
  const Verdict vb = classify(below0, V, r).verdict, va = classify(above0, V, r).verdict;
  const EvolutionConfig ec = evolution(2.5e-3, 400, 10);
  const Trajectory tb = evolve(below0, V, ec);
  const Trajectory ta = evolve(above0, V, ec);
  double max_below = 0.0, min_above = std::numeric_limits<double>::infinity();
  bool comparable = true;
  for (const auto& f : tb.frames) {
    max_below = std::max(max_below, f.g);
    comparable = comparable && comparability_bounds(frame_forms(f), f.energy_v).holds;
  }
  for (const auto& f : ta.frames) min_above = std::min(min_above, f.g);
  const bool pass = vb == Verdict::BelowGlobal && va == Verdict::AboveLine && !tb.aborted() && max_below < r.alpha &&
                    min_above > r.alpha && comparable;
  return {pass, fmt("alpha = %.4f; 0.9Q: max g/alpha = %.4f over %zu frames, 2E <= h <= 6E %s; 1.1Q: min g/alpha = %.4f "
                    "over %zu frames (%s)",
                    r.alpha, max_below / r.alpha, tb.frames.size(), comparable ? "held" : "failed",
                    min_above / r.alpha, ta.frames.size(), to_string(ta.status))};
}

Outcome c9_scattering() {
  const Grid g(64, 24.0);
  const PotentialSpec bump = PotentialSpec::gaussian_bump(1.0, 1.0);
  const RealField V = evaluate(bump, g);
  const FreeGroundState q = solve_free_ground_state(g);
  const ThresholdReport r = compute_thresholds(bump, q.on_grid);
  const Field u0 = Complex(0.5, 0.0) * q.on_grid.profile;
  const Verdict v = classify(u0, V, r).verdict;
  EvolutionConfig ec = evolution(5e-3, 600, 50);
  ec.keep_fields = true;
  const Trajectory t = evolve(u0, V, ec);
  if (t.aborted()) return {false, "run aborted: " + t.abort_reason};
  const ScatteringSeries s = scattering_extract(t, V);
  const std::size_t n = s.cauchy_increments.size();
  const bool inc_down = n >= 5 && strictly_decreasing(s.cauchy_increments, n - 5);
  const bool l4_down = strictly_decreasing(s.l4_series);
  std::ostringstream tail;
  for (std::size_t i = n >= 5 ? n - 5 : 0; i < n; ++i) tail << " " << fmt("%.3e", s.cauchy_increments[i]);
  return {v == Verdict::BelowGlobal && inc_down && l4_down,
          fmt("verdict %s; last 5 increments:%s; L4 %.4f -> %.4f (%s)", to_string(v), tail.str().c_str(),
              s.l4_series.front(), s.l4_series.back(), l4_down ? "strictly decreasing" : "not monotone")};
}

Outcome c10_fuzz() {
  Json doc = Json::parse(R"({"experiment":"inequality-fuzz","seed":20240611})");
  doc["fuzz"] = {{"trials", kFuzzTrials}, {"grid_n", 32}, {"box_length", 16.0}};
  const RunResult res = run_experiment(parse_config(doc), doc, false);
  const Json& j = res.report["result"];
  const int kato = j["kato_positivity"]["violations"], sandwich = j["form_sandwich"]["violations"],
            split = j["split_inequality"]["violations"];
  return {kato == 0 && sandwich == 0 && split == 0 && j["trials"] == kFuzzTrials,
          fmt("%d trials each: Kato positivity %d violations (worst lhs/rhs %.3f), sandwich %d, split lemma %d "
              "(worst lhs/rhs %.3f)",
              kFuzzTrials, kato, j["kato_positivity"]["worst_lhs_over_rhs"].get<double>(), sandwich, split,
              j["split_inequality"]["worst_lhs_over_rhs"].get<double>())};
}

Outcome c11_defocusing() {
  const double beta = defocusing_beta(admissibility(PotentialSpec::zero()));
  const Grid& g = grid64();
  const RealField V(g);
  const Field u0 = Field::from_function(g, [](const Vec3& x) { return Complex(2.0 * std::exp(-dot(x, x)), 0.0); });
  const DriftStudy s = drift_study(u0, V, 2.5e-3, 600, 20, -1);
  const bool l4_down = strictly_decreasing(l4_series(s.coarse));
  const bool pass = beta == 8.0 && s.mass_drift < kMassDriftTol && s.energy_ratio >= kOrderRatioLo &&
                    s.energy_ratio <= kOrderRatioHi && l4_down;
  return {pass, fmt("beta = %.17g; mass drift %.1e, E drift ratio %.3f, L4 %s", beta, s.mass_drift, s.energy_ratio,
                    l4_down ? "strictly decreasing" : "not monotone")};
}

}  // namespace

// Optional arguments restrict the run to the named criteria ("C6").
int main(int argc, char** argv) {
  const std::vector<std::string> only(argv + 1, argv + argc);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"C1 free ground state Pohozaev", c1_pohozaev},
      {"C2 threshold algebra", c2_threshold_algebra},
      {"C3 perturbed maximizer", c3_maximizer},
      {"C4 Kato norm oracles", c4_kato},
      {"C5 conservation", c5_conservation},
      {"C6 virial identity", c6_virial},
      {"C7 dispersive decay", c7_dispersive},
      {"C8 dichotomy invariance", c8_dichotomy},
      {"C9 scattering proxy", c9_scattering},
      {"C10 inequality fuzzing", c10_fuzz},
      {"C11 defocusing", c11_defocusing},
  };
  int failed = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    const std::string id = std::string(name).substr(0, std::string(name).find(' '));
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    ++ran;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
