#include "nlsv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "nlsv/error.hpp"
#include "nlsv/forms.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/propagator.hpp"
#include "nlsv/reports.hpp"
#include "nlsv/snapshot.hpp"
#include "nlsv/virial.hpp"

namespace nlsv {

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return kExitInternal;
  switch (err->code()) {
    case ErrorCode::Config:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Unsupported: return kExitConfig;
    case ErrorCode::Numerical:
    case ErrorCode::Convergence: return kExitNumerical;
    case ErrorCode::Io: return kExitIo;
  }
  return kExitInternal;
}

namespace {

bool has_negative_part(const PotentialSpec& spec) {
  return std::any_of(spec.terms().begin(), spec.terms().end(), [](const PotentialTerm& t) { return t.amplitude < 0.0; });
}

MaximizerOptions maximizer_options(const GroundStateConfig& gs) {
  MaximizerOptions o;
  o.tol = gs.tol;
  o.max_iterations = gs.max_iterations;
  o.compression = gs.compression;
  return o;
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

double relative_to(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), std::numeric_limits<double>::min());
}

// Conservation, L^4 behavior and the abort record of a trajectory.
Json trajectory_summary(const Trajectory& tr) {
  Json j;
  j["status"] = to_string(tr.status);
  j["abort_reason"] = tr.aborted() ? Json(tr.abort_reason) : Json(nullptr);
  j["abort_step"] = tr.aborted() ? Json(tr.abort_step) : Json(nullptr);
  j["frames"] = tr.frames.size();
  const auto& f0 = tr.frames.front();
  const auto& fl = tr.frames.back();
  double mass_drift = 0.0, energy_drift = 0.0;
  bool l4_decreasing = true;
  for (std::size_t i = 0; i < tr.frames.size(); ++i) {
    mass_drift = std::max(mass_drift, relative_to(tr.frames[i].mass, f0.mass));
    energy_drift = std::max(energy_drift, relative_to(tr.frames[i].energy_v, f0.energy_v));
    if (i > 0 && !(tr.frames[i].l4 < tr.frames[i - 1].l4)) l4_decreasing = false;
  }
  j["t_final"] = fl.t;
  j["mass_drift"] = mass_drift;
  j["energy_drift"] = energy_drift;
  j["l4_initial"] = f0.l4;
  j["l4_final"] = fl.l4;
  j["l4_strictly_decreasing"] = l4_decreasing;
  j["initial_frame"] = f0;
  j["final_frame"] = fl;
  return j;
}

// Position of g(t) relative to alpha along the run.
Json g_invariance(const Trajectory& tr, const ThresholdReport& report, Verdict verdict) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& f : tr.frames) {
    lo = std::min(lo, f.g / report.alpha);
    hi = std::max(hi, f.g / report.alpha);
  }
  Json j{{"min_g_over_alpha", lo}, {"max_g_over_alpha", hi}};
  if (verdict == Verdict::BelowGlobal) j["holds"] = hi < 1.0;
  else if (verdict == Verdict::AboveLine) j["holds"] = lo > 1.0;
  else j["holds"] = nullptr;
  return j;
}

Json comparability_summary(const Trajectory& tr) {
  int violations = 0;
  double worst_lower = std::numeric_limits<double>::infinity(), worst_upper = std::numeric_limits<double>::infinity();
  for (const auto& f : tr.frames) {
    const ComparabilityCheck c = comparability_bounds(frame_forms(f), f.energy_v);
    if (!c.holds) ++violations;
    worst_lower = std::min(worst_lower, c.h_form - c.lower);
    worst_upper = std::min(worst_upper, c.upper - c.h_form);
  }
  return {{"frames_checked", tr.frames.size()},
          {"violations", violations},
          {"min_margin_lower", worst_lower},
          {"min_margin_upper", worst_upper}};
}

Json virial_summary(const Trajectory& tr, double R, double alpha) {
  double max_dz = 0.0, min_d2z = std::numeric_limits<double>::infinity();
  double c0 = std::numeric_limits<double>::infinity();
  for (const auto& f : tr.frames) {
    if (f.dz) max_dz = std::max(max_dz, std::abs(*f.dz));
    if (f.d2z) min_d2z = std::min(min_d2z, *f.d2z);
    if (f.coercivity) c0 = std::min(c0, *f.coercivity);
  }
  return {{"R", R},
          {"max_abs_dz", max_dz},
          {"R_times_alpha", R * alpha},
          {"min_d2z", min_d2z},
          {"c0_estimate", c0}};
}

Json beta_json(const AdmissibilityReport& adm) {
  try {
    return {{"value", defocusing_beta(adm)}, {"reason", nullptr}};
  } catch (const Error& e) {
    return {{"value", nullptr}, {"reason", e.what()}};
  }
}

class Artifacts {
 public:
  Artifacts(const ExperimentConfig& cfg, bool enabled) : dir_(cfg.output_dir), enabled_(enabled) {
    if (!enabled_) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory '" + dir_ + "': " + ec.message());
  }

  std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }

  void csv(const Trajectory& tr, const std::string& name) {
    if (!enabled_) return;
    write_trajectory_csv(tr, path(name));
    files_.push_back(path(name));
  }
  void snapshot(const Field& f, const std::string& name) {
    if (!enabled_) return;
    save_snapshot(f, path(name));
    files_.push_back(path(name));
  }
  void report(const Json& j) {
    if (!enabled_) return;
    write_json(j, path("report.json"));
    files_.push_back(path("report.json"));
  }
  std::vector<std::string> files() const { return files_; }

 private:
  std::string dir_;
  bool enabled_;
  std::vector<std::string> files_;
};

// ---------------------------------------------------------------------------

Json run_ground_state(const ExperimentConfig& cfg, const RealField& V, Artifacts& out) {
  const Grid g = cfg.grid();
  Json j;
  FreeGroundState free = solve_free_ground_state(g);
  j["free"] = {{"q0", free.radial.q0()},
               {"radial_norms", free.radial_norms},
               {"radial_pohozaev_ratio_1", free.radial_norms.grad_sq / free.radial_norms.mass},
               {"radial_pohozaev_ratio_2", free.radial_norms.l4_fourth / free.radial_norms.mass},
               {"on_grid", free.on_grid}};
  const double wv_free = wv(free.on_grid.norms);
  j["wv_free"] = wv_free;
  if (cfg.save_snapshots) out.snapshot(free.on_grid.profile, "ground_state_free.nlsf");

  if (has_negative_part(cfg.potential)) {
    const MaximizerOptions opts = maximizer_options(cfg.ground_state);
    const GroundStateResult m =
        maximize_wv(cfg.potential, V, maximizer_initial_guess(free.radial, V, opts.compression), opts);
    j["maximizer"] = m;
    // The free candidate placed at the bottom of the well, measured with V.
    const double wv_candidate = wv(maximizer_initial_guess(free.radial, V, 1.0), V);
    j["wv_free_candidate_with_v"] = wv_candidate;
    j["maximizer_beats_free"] = m.wv_value > std::max(wv_free, wv_candidate);
    if (cfg.save_snapshots) out.snapshot(m.profile, "ground_state_maximizer.nlsf");

    Json others = Json::array();
    for (const Vec3& c : cfg.ground_state.extra_centers) {
      Json entry{{"center", c}};
      try {
        const GroundStateResult r =
            maximize_wv(cfg.potential, V, interpolate_radial(free.radial, g, c, opts.compression), opts);
        entry["result"] = r;
        entry["wv_difference"] = r.wv_value - m.wv_value;
      } catch (const Error& e) {
        entry["error"] = error_json(e);
      }
      others.push_back(entry);
    }
    j["extra_starts"] = others;
  } else {
    j["maximizer"] = nullptr;
    j["maximizer_note"] = "V has no negative part: the supremum of W_V is approached by translates of free Q and "
                          "is not attained";
  }

  if (!cfg.potential.is_zero() && cfg.ground_state.fixed_frequency_surrogate) {
    if (cfg.potential.has_gradient()) {
      const GroundStateResult s = solve_fixed_frequency(cfg.potential, V, 1.0, free.on_grid.profile);
      j["fixed_frequency"] = s;
    } else {
      j["fixed_frequency"] = nullptr;
    }
  }
  return j;
}

Json run_thresholds(const ExperimentConfig& cfg, const RealField& V) {
  const ThresholdContext ctx = threshold_context(cfg, V);
  Json j;
  j["thresholds"] = ctx.report;
  j["free_thresholds"] = free_thresholds(ctx.free.radial_norms);
  j["generator"] = ctx.maximizer ? Json(*ctx.maximizer) : Json(ctx.free.on_grid);
  j["me_over_alpha_sq"] = ctx.report.me / (ctx.report.alpha * ctx.report.alpha);
  j["c_gn_times_3alpha"] = ctx.report.c_gn * 3.0 * ctx.report.alpha;
  const Field u0 = make_initial_data(cfg, cfg.grid(), &ctx);
  j["initial_data_classification"] = classify(u0, V, ctx.report);
  return j;
}

struct EvolveOutcome {
  Json json;
  bool aborted = false;
};

EvolveOutcome run_evolve(const ExperimentConfig& cfg, const RealField& V, Artifacts& out) {
  const Grid g = cfg.grid();
  const ThresholdContext ctx = threshold_context(cfg, V);
  const Field u0 = make_initial_data(cfg, g, &ctx);
  const Classification cls = classify(u0, V, ctx.report);
  EvolutionConfig ec = cfg.evolution;
  ec.keep_fields = cfg.keep_fields;

  std::optional<CutoffProfile> cut;
  FrameHook hook;
  if (cfg.potential.has_gradient()) {
    cut.emplace(build_cutoff(g, cfg.virial_radii.front()));
    hook = virial_hook(cfg.potential, *cut, ec.sigma);
  }
  const Trajectory tr = evolve(u0, V, ec, hook);

  Json j;
  j["thresholds"] = ctx.report;
  j["classification"] = cls;
  j["trajectory"] = trajectory_summary(tr);
  j["g_invariance"] = g_invariance(tr, ctx.report, cls.verdict);
  j["comparability"] = cls.verdict == Verdict::BelowGlobal ? comparability_summary(tr) : Json(nullptr);
  j["virial"] = cut ? virial_summary(tr, cut->R, ctx.report.alpha) : Json(nullptr);
  j["s_norm_proxy"] = s_norm_proxy(tr);
  j["scattering"] = ec.keep_fields ? Json(scattering_extract(tr, V)) : Json(nullptr);
  out.csv(tr, "trajectory.csv");
  if (cfg.save_snapshots) {
    out.snapshot(u0, "initial.nlsf");
    if (!tr.fields.empty()) out.snapshot(tr.fields.back(), "final.nlsf");
  }
  return {j, tr.aborted()};
}

Json run_dichotomy_scan(const ExperimentConfig& cfg, const RealField& V) {
  const ThresholdContext ctx = threshold_context(cfg, V);
  Json rows = Json::array();
  for (double lambda : cfg.scan_lambdas) {
    Field u0 = ctx.generator();
    u0 *= lambda;
    const Classification cls = classify(u0, V, ctx.report);
    Json row{{"lambda", lambda}, {"classification", cls}, {"verdict", to_string(cls.verdict)}};
    if (cfg.scan_evolve) {
      EvolutionConfig ec = cfg.evolution;
      ec.keep_fields = false;
      const Trajectory tr = evolve(u0, V, ec);
      row["trajectory"] = trajectory_summary(tr);
      row["g_invariance"] = g_invariance(tr, ctx.report, cls.verdict);
    }
    rows.push_back(row);
  }
  return {{"thresholds", ctx.report}, {"scan", rows}};
}

// Every radius gets its own copy of the per-frame diagnostics.
struct MultiRadiusRun {
  Trajectory trajectory;
  std::vector<Trajectory> per_radius;
};

MultiRadiusRun evolve_with_radii(const Field& u0, const RealField& V, const EvolutionConfig& ec,
                                 const PotentialSpec& spec, const std::vector<CutoffProfile>& cuts) {
  std::vector<FrameHook> hooks;
  for (const auto& c : cuts) hooks.push_back(virial_hook(spec, c, ec.sigma));
  std::vector<std::vector<FrameDiagnostics>> frames(cuts.size());
  const FrameHook hook = [&](const Field& u, FrameDiagnostics& d) {
    for (std::size_t r = 0; r < hooks.size(); ++r) {
      FrameDiagnostics copy = d;
      hooks[r](u, copy);
      frames[r].push_back(copy);
    }
    d = frames.front().back();
  };
  MultiRadiusRun run{evolve(u0, V, ec, hook), {}};
  for (std::size_t r = 0; r < cuts.size(); ++r) {
    Trajectory t = run.trajectory;
    t.frames = frames[r];
    run.per_radius.push_back(std::move(t));
  }
  return run;
}

EvolveOutcome run_virial_check(const ExperimentConfig& cfg, const RealField& V, const AdmissibilityReport& adm,
                               Artifacts& out) {
  if (!cfg.potential.has_gradient())
    fail(ErrorCode::Unsupported, "virial-check needs an analytic gradient of V (ball_indicator has none)");
  const Grid g = cfg.grid();
  const ThresholdContext ctx = threshold_context(cfg, V);
  const Field u0 = make_initial_data(cfg, g, &ctx);
  std::vector<CutoffProfile> cuts;
  for (double R : cfg.virial_radii) cuts.push_back(build_cutoff(g, R));

  EvolutionConfig coarse = cfg.evolution;
  coarse.keep_fields = false;
  EvolutionConfig fine = coarse;
  fine.dt = coarse.dt / 2.0;
  fine.save_stride = coarse.save_stride * 2;
  const MultiRadiusRun a = evolve_with_radii(u0, V, coarse, cfg.potential, cuts);
  const MultiRadiusRun b = evolve_with_radii(u0, V, fine, cfg.potential, cuts);

  Json table = Json::array();
  std::vector<double> remainders;
  for (std::size_t r = 0; r < cuts.size(); ++r) {
    const VirialSeries sa = virial_series(a.per_radius[r]);
    const VirialSeries sb = virial_series(b.per_radius[r]);
    const VirialErrors ea = virial_errors(sa);
    const VirialErrors eb = virial_errors(sb);
    double remainder = 0.0;
    for (std::size_t i = 0; i < sa.times.size(); ++i)
      remainder = std::max(remainder, std::abs(sa.d2z_analytic[i] - sa.coercivity[i]));
    remainders.push_back(remainder);
    Json row = virial_summary(a.per_radius[r], cuts[r].R, ctx.report.alpha);
    row["fd_error_dz"] = ea.dz;
    row["fd_error_d2z"] = ea.d2z;
    row["fd_error_dz_half_dt"] = eb.dz;
    row["fd_error_d2z_half_dt"] = eb.d2z;
    row["d2z_error_ratio"] = eb.d2z > 0.0 ? Json(ea.d2z / eb.d2z) : Json(nullptr);
    row["remainder"] = remainder;
    table.push_back(row);
  }
  bool decreasing = true;
  for (std::size_t r = 1; r < remainders.size(); ++r)
    if (!(remainders[r] < remainders[r - 1])) decreasing = false;

  Json j;
  j["thresholds"] = ctx.report;
  j["classification"] = classify(u0, V, ctx.report);
  j["trajectory"] = trajectory_summary(a.trajectory);
  j["trajectory_half_dt"] = trajectory_summary(b.trajectory);
  j["radii"] = table;
  j["remainder_decreasing_in_R"] = decreasing;
  j["beta"] = beta_json(adm);
  out.csv(a.trajectory, "trajectory.csv");
  return {j, a.trajectory.aborted() || b.trajectory.aborted()};
}

EvolveOutcome run_dispersive_check(const ExperimentConfig& cfg, const RealField& V, Artifacts& out) {
  const Grid g = cfg.grid();
  std::optional<ThresholdContext> ctx;
  if (cfg.initial_data.family == InitialDataConfig::Family::ScaledGroundState) ctx = threshold_context(cfg, V);
  const Field u0 = make_initial_data(cfg, g, ctx ? &*ctx : nullptr);
  const double horizon = wraparound_horizon(u0);
  if (cfg.dispersive_t_max > horizon) {
    std::ostringstream msg;
    msg << "exceeds the wraparound horizon " << horizon << " of this data (0.2 L / (2 k_axis)); enlarge the box";
    throw ConfigError(std::vector<ConfigViolation>{{"dispersive.t_max", msg.str()}});
  }
  EvolutionConfig ec = cfg.evolution;
  ec.keep_fields = false;
  const Trajectory tr = evolve(u0, V, ec);
  Json j;
  j["horizon"] = horizon;
  j["trajectory"] = trajectory_summary(tr);
  j["fit"] = tr.aborted() ? Json(nullptr) : Json(dispersive_decay_probe(tr, cfg.dispersive_t_min, cfg.dispersive_t_max));
  out.csv(tr, "trajectory.csv");
  return {j, tr.aborted()};
}

EvolveOutcome run_defocusing(const ExperimentConfig& cfg, const RealField& V, const AdmissibilityReport& adm,
                             Artifacts& out) {
  const Grid g = cfg.grid();
  std::optional<ThresholdContext> ctx;
  if (cfg.initial_data.family == InitialDataConfig::Family::ScaledGroundState) ctx = threshold_context(cfg, V);
  const Field u0 = make_initial_data(cfg, g, ctx ? &*ctx : nullptr);
  EvolutionConfig ec = cfg.evolution;
  ec.keep_fields = cfg.keep_fields;
  std::optional<CutoffProfile> cut;
  FrameHook hook;
  if (cfg.potential.has_gradient()) {
    cut.emplace(build_cutoff(g, cfg.virial_radii.front()));
    hook = virial_hook(cfg.potential, *cut, ec.sigma);
  }
  const Trajectory tr = evolve(u0, V, ec, hook);
  Json j;
  j["beta"] = beta_json(adm);
  j["trajectory"] = trajectory_summary(tr);
  j["s_norm_proxy"] = s_norm_proxy(tr);
  j["virial"] = cut ? virial_summary(tr, cut->R, std::numeric_limits<double>::quiet_NaN()) : Json(nullptr);
  if (cut) j["virial"].erase("R_times_alpha");
  out.csv(tr, "trajectory.csv");
  return {j, tr.aborted()};
}

// Random radial potential about a grid node with ||V_-||_K < 4 pi.
PotentialSpec random_admissible_potential(std::mt19937_64& rng, const Grid& g, AdmissibilityReport& adm) {
  std::uniform_int_distribution<int> family(0, 4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = g.n();
  std::uniform_int_distribution<int> node(n / 2 - n / 8, n / 2 + n / 8);
  const std::size_t idx = (static_cast<std::size_t>(node(rng)) * n + node(rng)) * n + node(rng);
  const Vec3 c = g.point(idx);
  auto amplitude = [&] { return std::exp(std::log(0.05) + unit(rng) * std::log(100.0)); };  // [0.05, 5]
  auto width = [&] { return 1.0 + 2.0 * unit(rng); };
  PotentialSpec spec;
  switch (family(rng)) {
    case 0: spec = PotentialSpec::gaussian_bump(amplitude(), width(), c); break;
    case 1: spec = PotentialSpec::gaussian_well(-amplitude(), width(), c); break;
    case 2: spec = PotentialSpec::ball_indicator((unit(rng) < 0.5 ? -1.0 : 1.0) * amplitude(), width(), c); break;
    case 3: spec = PotentialSpec::yukawa((unit(rng) < 0.5 ? -1.0 : 1.0) * amplitude(), 0.5 + 1.5 * unit(rng), c); break;
    default:
      spec = PotentialSpec::sum({PotentialSpec::gaussian_bump(amplitude(), width(), c),
                                 PotentialSpec::gaussian_well(-amplitude(), width(), c)});
  }
  adm = admissibility(spec);
  while (!adm.passes_small_negative) {
    spec = spec.scaled(0.5);
    adm = admissibility(spec);
  }
  return spec;
}

Json run_inequality_fuzz(const ExperimentConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const Grid g(cfg.fuzz_grid_n, cfg.fuzz_box_length);
  constexpr int kFieldsPerPotential = 10;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  int kato_violations = 0, sandwich_violations = 0;
  double worst_kato_ratio = 0.0;
  Json kato_examples = Json::array();
  PotentialSpec spec;
  AdmissibilityReport adm;
  std::optional<RealField> V;
  Vec3 center{};
  for (int trial = 0; trial < cfg.fuzz_trials; ++trial) {
    if (trial % kFieldsPerPotential == 0) {
      spec = random_admissible_potential(rng, g, adm);
      V.emplace(evaluate(spec, g));
      center = spec.common_center().value_or(Vec3{});
    }
    const double w = g.box_length() / 16.0 + unit(rng) * g.box_length() / 16.0;
    const double spread = g.box_length() / 8.0;
    const Vec3 offset{spread * (2 * unit(rng) - 1), spread * (2 * unit(rng) - 1), spread * (2 * unit(rng) - 1)};
    const Field u = random_band_limited(g, rng, w, center + offset);
    const KatoPositivityCheck k = kato_positivity_check(u, *V, adm.kato_norm);
    const SandwichCheck s = form_sandwich(form_values(u, *V), adm.kato_norm_negative, adm.kato_norm);
    if (k.rhs > 0.0) worst_kato_ratio = std::max(worst_kato_ratio, k.lhs / k.rhs);
    if (!k.holds) {
      ++kato_violations;
      if (kato_examples.size() < 5)
        kato_examples.push_back({{"trial", trial}, {"potential", potential_to_json(spec)}, {"check", k}});
    }
    if (!s.holds) ++sandwich_violations;
  }

  int split_violations = 0;
  double worst_split_ratio = 0.0;
  Json split_examples = Json::array();
  auto log_uniform = [&] { return std::exp(std::log(1e-3) + unit(rng) * std::log(1e6)); };
  for (int trial = 0; trial < cfg.fuzz_trials; ++trial) {
    const double eps = std::max(1e-6, unit(rng) * (1.0 - 1e-6));
    const double a1 = log_uniform();
    // a2 / a1 drawn log-uniformly inside (eps, 1/eps).
    const double ratio = std::exp(std::log(eps) * (1.0 - 2.0 * (0.001 + 0.998 * unit(rng))));
    const double a2 = a1 * ratio;
    const double b1 = log_uniform(), b2 = log_uniform(), c1 = log_uniform(), c2 = log_uniform();
    const SplitInequalityCheck c = split_inequality_check(a1, a2, b1, b2, c1, c2, eps);
    if (c.applicable) worst_split_ratio = std::max(worst_split_ratio, c.lhs / c.rhs);
    if (!c.applicable || !c.holds) {
      ++split_violations;
      if (split_examples.size() < 5)
        split_examples.push_back({{"trial", trial},
                                  {"inputs", {a1, a2, b1, b2, c1, c2}},
                                  {"eps", eps},
                                  {"check", c}});
    }
  }

  return {{"grid", {{"n", g.n()}, {"box_length", g.box_length()}}},
          {"trials", cfg.fuzz_trials},
          {"fields_per_potential", kFieldsPerPotential},
          {"kato_positivity", {{"violations", kato_violations},
                               {"worst_lhs_over_rhs", worst_kato_ratio},
                               {"examples", kato_examples}}},
          {"form_sandwich", {{"violations", sandwich_violations}}},
          {"split_inequality", {{"violations", split_violations},
                                {"worst_lhs_over_rhs", worst_split_ratio},
                                {"examples", split_examples}}},
          {"total_violations", kato_violations + sandwich_violations + split_violations}};
}

}  // namespace

ThresholdContext threshold_context(const ExperimentConfig& cfg, const RealField& V) {
  ThresholdContext ctx{solve_free_ground_state(cfg.grid()), std::nullopt, {}};
  if (has_negative_part(cfg.potential)) {
    const MaximizerOptions opts = maximizer_options(cfg.ground_state);
    ctx.maximizer.emplace(
        maximize_wv(cfg.potential, V, maximizer_initial_guess(ctx.free.radial, V, opts.compression), opts));
    ctx.report = compute_thresholds(cfg.potential, *ctx.maximizer);
  } else {
    ctx.report = free_thresholds(ctx.free.radial_norms);
  }
  return ctx;
}

Field make_initial_data(const ExperimentConfig& cfg, const Grid& g, const ThresholdContext* ctx) {
  const InitialDataConfig& d = cfg.initial_data;
  switch (d.family) {
    case InitialDataConfig::Family::ScaledGroundState: {
      require(ctx != nullptr, "make_initial_data: scaled_ground_state needs the ground state");
      Field u = ctx->generator();
      u *= d.lambda;
      return u;
    }
    case InitialDataConfig::Family::Gaussian:
      return Field::from_function(g, [&](const Vec3& x) {
        const Vec3 r = x - d.center;
        return d.amplitude * std::exp(-dot(r, r) / (d.width * d.width)) *
               std::exp(Complex(0.0, dot(d.boost, x)));
      });
    case InitialDataConfig::Family::FromSnapshot:
      return load_snapshot(d.path, g);
  }
  fail(ErrorCode::InvalidArgument, "make_initial_data: unknown family");
}

RunResult run_experiment(const ExperimentConfig& cfg, const Json& effective_config, bool write_files) {
  Artifacts out(cfg, write_files);
  const Grid g = cfg.grid();
  const AdmissibilityReport adm = admissibility(cfg.potential);
  Json report = report_header(effective_config, cfg, adm);
  const bool needs_grid_v = cfg.experiment != Experiment::InequalityFuzz;
  const RealField V = needs_grid_v ? evaluate(cfg.potential, g) : RealField(Grid(8, 1.0));

  RunResult result;
  Json body;
  bool aborted = false;
  switch (cfg.experiment) {
    case Experiment::GroundState: body = run_ground_state(cfg, V, out); break;
    case Experiment::Thresholds: body = run_thresholds(cfg, V); break;
    case Experiment::Evolve: {
      auto r = run_evolve(cfg, V, out);
      body = std::move(r.json);
      aborted = r.aborted;
      break;
    }
    case Experiment::DichotomyScan: body = run_dichotomy_scan(cfg, V); break;
    case Experiment::VirialCheck: {
      auto r = run_virial_check(cfg, V, adm, out);
      body = std::move(r.json);
      aborted = r.aborted;
      break;
    }
    case Experiment::DispersiveCheck: {
      auto r = run_dispersive_check(cfg, V, out);
      body = std::move(r.json);
      aborted = r.aborted;
      break;
    }
    case Experiment::DefocusingEvolve: {
      auto r = run_defocusing(cfg, V, adm, out);
      body = std::move(r.json);
      aborted = r.aborted;
      break;
    }
    case Experiment::InequalityFuzz: body = run_inequality_fuzz(cfg); break;
  }
  report["result"] = std::move(body);
  report["exit_code"] = aborted ? kExitNumerical : kExitOk;
  out.report(report);
  result.report = std::move(report);
  result.exit_code = aborted ? kExitNumerical : kExitOk;
  result.files = out.files();
  return result;
}

}  // namespace nlsv
