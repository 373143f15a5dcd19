#include "nlsv/reports.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "nlsv/error.hpp"

namespace nlsv {

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const char* library_version() { return NLSV_VERSION_STRING; }

void to_json(Json& j, const Vec3& v) { j = Json::array({v.x, v.y, v.z}); }

void to_json(Json& j, const FormValues& f) {
  j = {{"mass", f.mass},
       {"h_form", f.h_form},
       {"grad_sq", f.grad_sq},
       {"l4_fourth", f.l4_fourth},
       {"potential_term", f.potential_term}};
}

void to_json(Json& j, const RadialNorms& n) {
  j = {{"mass", n.mass}, {"grad_sq", n.grad_sq}, {"l4_fourth", n.l4_fourth}};
}

void to_json(Json& j, const PohozaevExtra& p) {
  j = {{"extra", p.extra},
       {"relative", p.relative},
       {"residual_with_extra_1", p.residual_with_extra_1},
       {"residual_with_extra_2", p.residual_with_extra_2}};
}

void to_json(Json& j, const GroundStateResult& r) {
  j = {{"source", r.source},
       {"omega", r.omega},
       {"norms", r.norms},
       {"pohozaev_residual_1", r.pohozaev_residual_1},
       {"pohozaev_residual_2", r.pohozaev_residual_2},
       {"elliptic_residual", r.elliptic_residual},
       {"wv_value", r.wv_value},
       {"iterations", r.iterations},
       {"final_residual", r.residual_history.empty() ? Json(nullptr) : Json(r.residual_history.back())},
       {"extra", r.extra ? Json(*r.extra) : Json(nullptr)}};
}

void to_json(Json& j, const ThresholdReport& r) {
  j = {{"me", r.me},
       {"alpha", r.alpha},
       {"c_gn", r.c_gn},
       {"source", to_string(r.source)},
       {"me_consistency", r.me_consistency},
       {"c_gn_consistency", r.c_gn_consistency}};
}

void to_json(Json& j, const Classification& c) {
  j = {{"mass", c.mass},
       {"energy_v", c.energy_v},
       {"energy_0", c.energy_0},
       {"mass_energy", c.mass_energy},
       {"g0", c.g0},
       {"verdict", to_string(c.verdict)}};
}

void to_json(Json& j, const ComparabilityCheck& c) {
  j = {{"lower", c.lower}, {"upper", c.upper}, {"h_form", c.h_form}, {"holds", c.holds}};
}

void to_json(Json& j, const AdmissibilityReport& r) {
  auto opt_bool = [](const std::optional<bool>& b) { return b ? Json(*b) : Json(nullptr); };
  j = {{"kato_norm", r.kato_norm},
       {"kato_norm_negative", r.kato_norm_negative},
       {"kato_norm_positive", r.kato_norm_positive},
       {"l32_norm", r.l32_norm},
       {"repulsive", r.repulsive},
       {"confining_kato", optional_number(r.confining_kato)},
       {"passes_small_negative", r.passes_small_negative},
       {"passes_confining_4pi", opt_bool(r.passes_confining_4pi)},
       {"passes_confining_8pi", opt_bool(r.passes_confining_8pi)}};
}

void to_json(Json& j, const EvolutionConfig& c) {
  j = {{"dt", c.dt},
       {"t_end", c.t_end},
       {"sigma", c.sigma},
       {"dealias", c.dealias},
       {"save_stride", c.save_stride},
       {"blowup_factor", c.blowup_factor},
       {"high_band_limit", c.high_band_limit}};
}

void to_json(Json& j, const FrameDiagnostics& d) {
  j = {{"step", d.step},
       {"t", d.t},
       {"mass", d.mass},
       {"energy_v", d.energy_v},
       {"energy_0", d.energy_0},
       {"h_form", d.h_form},
       {"grad_sq", d.grad_sq},
       {"l4", d.l4},
       {"linf", d.linf},
       {"g", d.g},
       {"high_band", d.high_band},
       {"z", optional_number(d.z)},
       {"dz", optional_number(d.dz)},
       {"d2z", optional_number(d.d2z)},
       {"coercivity", optional_number(d.coercivity)}};
}

void to_json(Json& j, const DecayFit& f) {
  j = {{"exponent", f.exponent},
       {"intercept", f.intercept},
       {"t_min", f.t_min},
       {"t_max", f.t_max},
       {"points", f.points}};
}

void to_json(Json& j, const SNormProxy& s) {
  Json pairs = Json::array();
  const auto& adm = admissible_pairs();
  for (std::size_t i = 0; i < adm.size(); ++i)
    pairs.push_back({{"q", std::isinf(adm[i].q) ? Json("inf") : Json(adm[i].q)},
                     {"r", adm[i].r},
                     {"value", s.per_pair[i]}});
  j = {{"value", s.value}, {"pairs", pairs}};
}

void to_json(Json& j, const ScatteringSeries& s) {
  j = {{"times", s.times}, {"cauchy_increments", s.cauchy_increments}, {"l4_series", s.l4_series}};
}

void to_json(Json& j, const KatoPositivityCheck& c) {
  j = {{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}};
}

void to_json(Json& j, const SandwichCheck& c) {
  j = {{"lower", c.lower}, {"upper", c.upper}, {"h_form", c.h_form}, {"holds", c.holds}};
}

void to_json(Json& j, const SplitInequalityCheck& c) {
  j = {{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}, {"applicable", c.applicable}};
}

std::uint64_t run_hash(const Json& effective_config) {
  Json copy = effective_config;
  if (copy.is_object()) copy.erase("output_dir");
  return config_hash(copy);
}

Json report_header(const Json& effective_config, const ExperimentConfig& cfg, const AdmissibilityReport& adm) {
  return {{"library_version", library_version()},
          {"config_hash", hex64(run_hash(effective_config))},
          {"timestamp", utc_timestamp()},
          {"experiment", to_string(cfg.experiment)},
          {"config", effective_config},
          {"potential", potential_to_json(cfg.potential)},
          {"admissibility", adm}};
}

Json error_json(const std::exception& e) {
  Json j;
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    j["error"] = to_string(ce->code());
    Json list = Json::array();
    for (const auto& v : ce->violations()) list.push_back({{"key", v.key}, {"message", v.message}});
    j["violations"] = list;
  } else if (const auto* conv = dynamic_cast<const ConvergenceError*>(&e)) {
    j["error"] = to_string(conv->code());
    j["residual_history_tail"] = std::vector<double>(
        conv->residual_history().end() - std::min<std::ptrdiff_t>(10, conv->residual_history().size()),
        conv->residual_history().end());
  } else if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = to_string(err->code());
  } else {
    j["error"] = "internal";
  }
  j["message"] = e.what();
  return j;
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace nlsv
