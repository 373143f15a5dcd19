#include "nlsv/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nlsv/error.hpp"

namespace nlsv {

namespace {

struct ExperimentName {
  Experiment e;
  const char* name;
};

constexpr ExperimentName kExperiments[] = {
    {Experiment::GroundState, "ground-state"},
    {Experiment::Thresholds, "thresholds"},
    {Experiment::Evolve, "evolve"},
    {Experiment::DichotomyScan, "dichotomy-scan"},
    {Experiment::VirialCheck, "virial-check"},
    {Experiment::DispersiveCheck, "dispersive-check"},
    {Experiment::DefocusingEvolve, "defocusing-evolve"},
    {Experiment::InequalityFuzz, "inequality-fuzz"},
};

// Collects violations while reading one JSON object.
class Section {
 public:
  Section(const Json* obj, std::string path, std::vector<ConfigViolation>& out)
      : obj_(obj), path_(std::move(path)), out_(out) {}

  static Section child(const Json& root, const std::string& key, std::vector<ConfigViolation>& out) {
    if (!root.contains(key)) return Section(nullptr, key, out);
    const Json& j = root.at(key);
    if (!j.is_object()) {
      out.push_back({key, "must be an object"});
      return Section(nullptr, key, out);
    }
    return Section(&j, key, out);
  }

  std::string key(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }
  bool has(const std::string& name) const { return obj_ && obj_->contains(name); }
  const Json& at(const std::string& name) const { return obj_->at(name); }
  void violation(const std::string& name, const std::string& message) { out_.push_back({key(name), message}); }

  void allow(std::initializer_list<const char*> names) {
    if (!obj_) return;
    std::set<std::string> ok(names.begin(), names.end());
    for (auto it = obj_->begin(); it != obj_->end(); ++it)
      if (!ok.count(it.key())) violation(it.key(), "unknown key");
  }

  template <class Pred>
  void number(const std::string& name, double& out, Pred ok, const char* requirement) {
    if (!has(name)) return;
    const Json& j = at(name);
    if (!j.is_number()) {
      violation(name, "must be a number");
      return;
    }
    const double v = j.get<double>();
    if (!std::isfinite(v) || !ok(v)) {
      violation(name, requirement);
      return;
    }
    out = v;
  }

  template <class Pred>
  void integer(const std::string& name, int& out, Pred ok, const char* requirement) {
    if (!has(name)) return;
    const Json& j = at(name);
    if (!j.is_number_integer()) {
      violation(name, "must be an integer");
      return;
    }
    const long long v = j.get<long long>();
    if (v < -1000000000LL || v > 1000000000LL || !ok(static_cast<int>(v))) {
      violation(name, requirement);
      return;
    }
    out = static_cast<int>(v);
  }

  void boolean(const std::string& name, bool& out) {
    if (!has(name)) return;
    if (!at(name).is_boolean()) {
      violation(name, "must be true or false");
      return;
    }
    out = at(name).get<bool>();
  }

  void string(const std::string& name, std::string& out) {
    if (!has(name)) return;
    if (!at(name).is_string()) {
      violation(name, "must be a string");
      return;
    }
    out = at(name).get<std::string>();
  }

  bool vec3(const std::string& name, Vec3& out) {
    if (!has(name)) return false;
    return read_vec3(at(name), key(name), out, out_);
  }

  static bool read_vec3(const Json& j, const std::string& key, Vec3& out, std::vector<ConfigViolation>& sink) {
    if (!j.is_array() || j.size() != 3 || !std::all_of(j.begin(), j.end(), [](const Json& x) { return x.is_number(); })) {
      sink.push_back({key, "must be an array of 3 numbers"});
      return false;
    }
    out = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (!std::isfinite(out.x) || !std::isfinite(out.y) || !std::isfinite(out.z)) {
      sink.push_back({key, "must be finite"});
      return false;
    }
    return true;
  }

 private:
  const Json* obj_;
  std::string path_;
  std::vector<ConfigViolation>& out_;
};

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

const auto positive = [](double v) { return v > 0.0; };

}  // namespace

const char* to_string(Experiment e) {
  for (const auto& x : kExperiments)
    if (x.e == e) return x.name;
  return "unknown";
}

std::optional<Experiment> experiment_from_string(const std::string& s) {
  for (const auto& x : kExperiments)
    if (s == x.name) return x.e;
  return std::nullopt;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& x : kExperiments) v.emplace_back(x.name);
    return v;
  }();
  return names;
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError(std::vector<ConfigViolation>{{assignment, "override must have the form key=value"}});
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError(std::vector<ConfigViolation>{{key, "override key has an empty component"}});
    if (!node->is_object()) throw ConfigError(std::vector<ConfigViolation>{{key, "override descends into a non-object value"}});
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

PotentialSpec parse_potential(const Json& j, const std::string& key, std::vector<ConfigViolation>& out) {
  if (!j.is_object()) {
    out.push_back({key, "must be an object"});
    return {};
  }
  Section s(&j, key, out);
  std::string family = "zero";
  s.string("family", family);
  if (family == "zero") {
    s.allow({"family"});
    return {};
  }
  if (family == "sum") {
    s.allow({"family", "members"});
    if (!s.has("members") || !s.at("members").is_array() || s.at("members").empty()) {
      s.violation("members", "must be a nonempty array of potentials");
      return {};
    }
    std::vector<PotentialSpec> members;
    const Json& arr = s.at("members");
    for (std::size_t i = 0; i < arr.size(); ++i)
      members.push_back(parse_potential(arr[i], s.key("members") + "[" + std::to_string(i) + "]", out));
    return PotentialSpec::sum(members);
  }
  const char* shape_key = nullptr;
  if (family == "gaussian_bump" || family == "gaussian_well") shape_key = "width";
  else if (family == "ball_indicator") shape_key = "radius";
  else if (family == "yukawa") shape_key = "decay";
  else {
    s.violation("family", "unknown potential family '" + family +
                              "' (zero, gaussian_bump, gaussian_well, ball_indicator, yukawa, sum)");
    return {};
  }
  s.allow({"family", "amplitude", shape_key, "center"});
  const std::size_t before = out.size();
  double amplitude = std::numeric_limits<double>::quiet_NaN();
  double shape = std::numeric_limits<double>::quiet_NaN();
  Vec3 center{};
  if (!s.has("amplitude")) s.violation("amplitude", "is required");
  if (!s.has(shape_key)) s.violation(shape_key, "is required");
  if (family == "gaussian_bump")
    s.number("amplitude", amplitude, positive, "must be > 0 for gaussian_bump");
  else if (family == "gaussian_well")
    s.number("amplitude", amplitude, [](double v) { return v < 0.0; }, "must be < 0 for gaussian_well");
  else
    s.number("amplitude", amplitude, [](double) { return true; }, "must be finite");
  s.number(shape_key, shape, positive, "must be > 0");
  s.vec3("center", center);
  if (out.size() != before) return {};
  if (family == "gaussian_bump") return PotentialSpec::gaussian_bump(amplitude, shape, center);
  if (family == "gaussian_well") return PotentialSpec::gaussian_well(amplitude, shape, center);
  if (family == "ball_indicator") return PotentialSpec::ball_indicator(amplitude, shape, center);
  return PotentialSpec::yukawa(amplitude, shape, center);
}

Json potential_to_json(const PotentialSpec& spec) {
  auto term_json = [](const PotentialTerm& t) {
    Json j;
    j["family"] = to_string(t.family);
    j["amplitude"] = t.amplitude;
    const char* shape = t.family == PotentialFamily::BallIndicator ? "radius"
                        : t.family == PotentialFamily::Yukawa      ? "decay"
                                                                   : "width";
    j[shape] = t.shape;
    j["center"] = {t.center.x, t.center.y, t.center.z};
    return j;
  };
  if (spec.is_zero()) return Json{{"family", "zero"}};
  if (spec.terms().size() == 1) return term_json(spec.terms().front());
  Json members = Json::array();
  for (const auto& t : spec.terms()) members.push_back(term_json(t));
  return Json{{"family", "sum"}, {"members", members}};
}

ExperimentConfig parse_config(const Json& doc) {
  std::vector<ConfigViolation> v;
  ExperimentConfig cfg;
  if (!doc.is_object()) throw ConfigError(std::vector<ConfigViolation>{{"(root)", "configuration must be a JSON object"}});
  Section root(&doc, "", v);
  root.allow({"experiment", "grid", "potential", "evolution", "initial_data", "ground_state", "virial", "dispersive",
              "scan", "fuzz", "outputs", "output_dir", "seed"});

  std::string name;
  if (!root.has("experiment")) {
    root.violation("experiment", "is required");
  } else {
    root.string("experiment", name);
    if (auto e = experiment_from_string(name)) cfg.experiment = *e;
    else if (root.at("experiment").is_string()) root.violation("experiment", "unknown experiment '" + name + "'");
  }

  Section grid = Section::child(doc, "grid", v);
  grid.allow({"n", "box_length"});
  grid.integer("n", cfg.grid_n, [](int n) { return power_of_two(n) && n >= 8 && n <= 512; },
               "must be a power of two in [8, 512]");
  grid.number("box_length", cfg.box_length, positive, "must be > 0");

  if (doc.contains("potential")) {
    cfg.potential_json = doc.at("potential");
    cfg.potential = parse_potential(doc.at("potential"), "potential", v);
  } else {
    cfg.potential_json = Json{{"family", "zero"}};
  }

  Section ev = Section::child(doc, "evolution", v);
  ev.allow({"dt", "t_end", "sigma", "dealias", "save_stride", "blowup_factor", "high_band_limit"});
  auto any = [](double) { return true; };
  auto any_int = [](int) { return true; };
  ev.number("dt", cfg.evolution.dt, any, "");
  ev.number("t_end", cfg.evolution.t_end, any, "");
  ev.integer("sigma", cfg.evolution.sigma, any_int, "");
  ev.boolean("dealias", cfg.evolution.dealias);
  ev.integer("save_stride", cfg.evolution.save_stride, any_int, "");
  ev.number("blowup_factor", cfg.evolution.blowup_factor, any, "");
  ev.number("high_band_limit", cfg.evolution.high_band_limit, any, "");
  try {
    validate(cfg.evolution, "evolution");
  } catch (const ConfigError& e) {
    v.insert(v.end(), e.violations().begin(), e.violations().end());
  }

  Section init = Section::child(doc, "initial_data", v);
  init.allow({"family", "lambda", "amplitude", "width", "center", "boost", "path"});
  std::string family = "scaled_ground_state";
  init.string("family", family);
  if (family == "scaled_ground_state") cfg.initial_data.family = InitialDataConfig::Family::ScaledGroundState;
  else if (family == "gaussian") cfg.initial_data.family = InitialDataConfig::Family::Gaussian;
  else if (family == "from_snapshot") cfg.initial_data.family = InitialDataConfig::Family::FromSnapshot;
  else init.violation("family", "unknown family '" + family + "' (scaled_ground_state, gaussian, from_snapshot)");
  init.number("lambda", cfg.initial_data.lambda, positive, "must be > 0");
  init.number("amplitude", cfg.initial_data.amplitude, any, "must be finite");
  init.number("width", cfg.initial_data.width, positive, "must be > 0");
  init.vec3("center", cfg.initial_data.center);
  init.vec3("boost", cfg.initial_data.boost);
  init.string("path", cfg.initial_data.path);
  if (cfg.initial_data.family == InitialDataConfig::Family::FromSnapshot) {
    if (cfg.initial_data.path.empty()) init.violation("path", "is required for from_snapshot");
    else if (!std::filesystem::exists(cfg.initial_data.path))
      init.violation("path", "file '" + cfg.initial_data.path + "' does not exist");
  }

  Section gs = Section::child(doc, "ground_state", v);
  gs.allow({"tol", "max_iterations", "compression", "extra_centers", "fixed_frequency_surrogate"});
  gs.number("tol", cfg.ground_state.tol, positive, "must be > 0");
  gs.integer("max_iterations", cfg.ground_state.max_iterations, [](int n) { return n >= 1; }, "must be >= 1");
  gs.number("compression", cfg.ground_state.compression, [](double c) { return c > 0.0 && c <= 2.0; },
            "must lie in (0, 2]");
  gs.boolean("fixed_frequency_surrogate", cfg.ground_state.fixed_frequency_surrogate);
  if (gs.has("extra_centers")) {
    const Json& arr = gs.at("extra_centers");
    if (!arr.is_array()) {
      gs.violation("extra_centers", "must be an array of [x, y, z] points");
    } else {
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Vec3 c;
        if (Section::read_vec3(arr[i], gs.key("extra_centers") + "[" + std::to_string(i) + "]", c, v))
          cfg.ground_state.extra_centers.push_back(c);
      }
    }
  }

  Section vir = Section::child(doc, "virial", v);
  vir.allow({"radii"});
  cfg.virial_radii = {cfg.box_length / 8.0, cfg.box_length / 6.0};
  if (vir.has("radii")) {
    const Json& arr = vir.at("radii");
    if (!arr.is_array() || arr.empty()) {
      vir.violation("radii", "must be a nonempty array of numbers");
    } else {
      cfg.virial_radii.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string k = vir.key("radii") + "[" + std::to_string(i) + "]";
        if (!arr[i].is_number()) {
          v.push_back({k, "must be a number"});
          continue;
        }
        const double R = arr[i].get<double>();
        if (!(R > 0.0) || !(2.0 * R < 0.5 * cfg.box_length))
          v.push_back({k, "must satisfy 0 < 2R < L/2"});
        else
          cfg.virial_radii.push_back(R);
      }
    }
  }

  Section disp = Section::child(doc, "dispersive", v);
  disp.allow({"t_min", "t_max"});
  disp.number("t_min", cfg.dispersive_t_min, positive, "must be > 0");
  disp.number("t_max", cfg.dispersive_t_max, positive, "must be > 0");

  Section scan = Section::child(doc, "scan", v);
  scan.allow({"lambdas", "evolve"});
  scan.boolean("evolve", cfg.scan_evolve);
  if (scan.has("lambdas")) {
    const Json& arr = scan.at("lambdas");
    if (!arr.is_array() || arr.empty() ||
        !std::all_of(arr.begin(), arr.end(), [](const Json& x) { return x.is_number() && x.get<double>() > 0.0; }))
      scan.violation("lambdas", "must be a nonempty array of positive numbers");
    else
      cfg.scan_lambdas = arr.get<std::vector<double>>();
  }

  Section fuzz = Section::child(doc, "fuzz", v);
  fuzz.allow({"trials", "grid_n", "box_length"});
  fuzz.integer("trials", cfg.fuzz_trials, [](int n) { return n >= 1; }, "must be >= 1");
  fuzz.integer("grid_n", cfg.fuzz_grid_n, [](int n) { return power_of_two(n) && n >= 8 && n <= 256; },
               "must be a power of two in [8, 256]");
  fuzz.number("box_length", cfg.fuzz_box_length, positive, "must be > 0");

  Section outputs = Section::child(doc, "outputs", v);
  outputs.allow({"snapshots", "keep_fields"});
  outputs.boolean("snapshots", cfg.save_snapshots);
  outputs.boolean("keep_fields", cfg.keep_fields);

  root.string("output_dir", cfg.output_dir);
  if (root.has("seed")) {
    const Json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      root.violation("seed", "must be a nonnegative integer");
    else
      cfg.seed = s.get<std::uint64_t>();
  }

  // Cross-field requirements of the individual experiments.
  const bool evolving = cfg.experiment == Experiment::Evolve || cfg.experiment == Experiment::VirialCheck ||
                        cfg.experiment == Experiment::DispersiveCheck ||
                        cfg.experiment == Experiment::DefocusingEvolve ||
                        (cfg.experiment == Experiment::DichotomyScan && cfg.scan_evolve);
  if (evolving && !(cfg.evolution.t_end > 0.0)) v.push_back({"evolution.t_end", "must be > 0 for " + name});
  if (cfg.experiment == Experiment::DispersiveCheck) {
    if (cfg.evolution.sigma != 0) v.push_back({"evolution.sigma", "must be 0 for dispersive-check"});
    if (!(cfg.dispersive_t_min > 0.0)) v.push_back({"dispersive.t_min", "is required for dispersive-check"});
    if (!(cfg.dispersive_t_max >= 10.0 * cfg.dispersive_t_min))
      v.push_back({"dispersive.t_max", "window must span at least one decade (t_max >= 10 t_min)"});
    if (cfg.dispersive_t_max > cfg.evolution.t_end * (1.0 + 1e-12))
      v.push_back({"dispersive.t_max", "must not exceed evolution.t_end"});
  }
  if (cfg.experiment == Experiment::DefocusingEvolve && cfg.evolution.sigma != -1)
    v.push_back({"evolution.sigma", "must be -1 for defocusing-evolve"});
  if ((cfg.experiment == Experiment::Evolve || cfg.experiment == Experiment::VirialCheck) && cfg.evolution.sigma != 1)
    v.push_back({"evolution.sigma", "must be 1 for " + name});
  const double half = 0.5 * cfg.box_length;
  for (std::size_t i = 0; i < cfg.ground_state.extra_centers.size(); ++i) {
    const Vec3& c = cfg.ground_state.extra_centers[i];
    if (std::max({std::abs(c.x), std::abs(c.y), std::abs(c.z)}) >= half)
      v.push_back({"ground_state.extra_centers[" + std::to_string(i) + "]", "must lie inside the box"});
  }

  if (!v.empty()) throw ConfigError(std::move(v));
  return cfg;
}

std::uint64_t config_hash(const Json& doc) {
  const std::string text = doc.dump();  // object keys are sorted
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open config '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::vector<ConfigViolation>{{"(file)", std::string("'") + path + "' is not valid JSON: " + e.what()}});
  }
}

}  // namespace nlsv
