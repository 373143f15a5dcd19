#include "nlsv/nlsv.h"

#include <exception>
#include <memory>
#include <new>
#include <string>

#include "nlsv/config.hpp"
#include "nlsv/error.hpp"
#include "nlsv/experiments.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/reports.hpp"
#include "nlsv/snapshot.hpp"

struct nlsv_config {
  nlsv::Json doc;
  std::string text;
};

struct nlsv_report {
  std::string text;
  int exit_code = 0;
};

struct nlsv_field {
  nlsv::Field field;
};

namespace {

thread_local std::string g_last_error;

nlsv_status status_of(const std::exception& e) {
  const auto* err = dynamic_cast<const nlsv::Error*>(&e);
  if (!err) return NLSV_ERR_INTERNAL;
  switch (err->code()) {
    case nlsv::ErrorCode::InvalidArgument: return NLSV_ERR_INVALID_ARGUMENT;
    case nlsv::ErrorCode::Config: return NLSV_ERR_CONFIG;
    case nlsv::ErrorCode::Numerical: return NLSV_ERR_NUMERICAL;
    case nlsv::ErrorCode::Io: return NLSV_ERR_IO;
    case nlsv::ErrorCode::Unsupported: return NLSV_ERR_UNSUPPORTED;
    case nlsv::ErrorCode::Convergence: return NLSV_ERR_CONVERGENCE;
  }
  return NLSV_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes and the error document.
template <class F>
nlsv_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const nlsv::Json::exception& e) {
    const nlsv::ConfigError wrapped(std::vector<nlsv::ConfigViolation>{{"(json)", e.what()}});
    g_last_error = nlsv::error_json(wrapped).dump();
    return NLSV_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = R"({"error":"internal","message":"out of memory"})";
    return NLSV_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = nlsv::error_json(e).dump();
    return status_of(e);
  }
}

nlsv_status null_argument(const char* what) {
  g_last_error = nlsv::Json{{"error", "invalid_argument"}, {"message", std::string(what) + " is null"}}.dump();
  return NLSV_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* nlsv_version(void) { return nlsv::library_version(); }

const char* nlsv_status_name(nlsv_status status) {
  switch (status) {
    case NLSV_OK: return "ok";
    case NLSV_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case NLSV_ERR_CONFIG: return "config";
    case NLSV_ERR_NUMERICAL: return "numerical";
    case NLSV_ERR_IO: return "io";
    case NLSV_ERR_UNSUPPORTED: return "unsupported";
    case NLSV_ERR_CONVERGENCE: return "convergence";
    case NLSV_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int nlsv_exit_code(nlsv_status status) {
  switch (status) {
    case NLSV_OK: return nlsv::kExitOk;
    case NLSV_ERR_INVALID_ARGUMENT:
    case NLSV_ERR_CONFIG:
    case NLSV_ERR_UNSUPPORTED: return nlsv::kExitConfig;
    case NLSV_ERR_NUMERICAL:
    case NLSV_ERR_CONVERGENCE: return nlsv::kExitNumerical;
    case NLSV_ERR_IO: return nlsv::kExitIo;
    case NLSV_ERR_INTERNAL: break;
  }
  return nlsv::kExitInternal;
}

const char* nlsv_last_error(void) { return g_last_error.c_str(); }

nlsv_status nlsv_config_from_json(const char* json, nlsv_config** out) {
  if (!json) return null_argument("json");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto cfg = std::make_unique<nlsv_config>();
    cfg->doc = nlsv::Json::parse(json);
    cfg->text = cfg->doc.dump();
    *out = cfg.release();
    return NLSV_OK;
  });
}

nlsv_status nlsv_config_from_file(const char* path, nlsv_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    auto cfg = std::make_unique<nlsv_config>();
    cfg->doc = nlsv::load_json_file(path);
    cfg->text = cfg->doc.dump();
    *out = cfg.release();
    return NLSV_OK;
  });
}

nlsv_status nlsv_config_override(nlsv_config* config, const char* assignment) {
  if (!config) return null_argument("config");
  if (!assignment) return null_argument("assignment");
  return guarded([&] {
    nlsv::apply_override(config->doc, assignment);
    config->text = config->doc.dump();
    return NLSV_OK;
  });
}

nlsv_status nlsv_config_validate(const nlsv_config* config) {
  if (!config) return null_argument("config");
  return guarded([&] {
    nlsv::parse_config(config->doc);
    return NLSV_OK;
  });
}

const char* nlsv_config_json(const nlsv_config* config) { return config ? config->text.c_str() : ""; }

void nlsv_config_free(nlsv_config* config) { delete config; }

nlsv_status nlsv_run(const nlsv_config* config, int write_files, nlsv_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    const nlsv::ExperimentConfig cfg = nlsv::parse_config(config->doc);
    const nlsv::RunResult r = nlsv::run_experiment(cfg, config->doc, write_files != 0);
    auto rep = std::make_unique<nlsv_report>();
    rep->text = r.report.dump(2);
    rep->exit_code = r.exit_code;
    *out = rep.release();
    return r.exit_code == nlsv::kExitOk ? NLSV_OK : NLSV_ERR_NUMERICAL;
  });
}

const char* nlsv_report_json(const nlsv_report* report) { return report ? report->text.c_str() : ""; }

int nlsv_report_exit_code(const nlsv_report* report) { return report ? report->exit_code : nlsv::kExitInternal; }

void nlsv_report_free(nlsv_report* report) { delete report; }

nlsv_status nlsv_potential_admissibility(const char* potential_json, nlsv_report** out) {
  if (!potential_json) return null_argument("potential_json");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::vector<nlsv::ConfigViolation> violations;
    const nlsv::PotentialSpec spec = nlsv::parse_potential(nlsv::Json::parse(potential_json), "potential", violations);
    if (!violations.empty()) throw nlsv::ConfigError(std::move(violations));
    auto rep = std::make_unique<nlsv_report>();
    rep->text = nlsv::Json(nlsv::admissibility(spec)).dump(2);
    *out = rep.release();
    return NLSV_OK;
  });
}

nlsv_status nlsv_field_load(const char* path, nlsv_field** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new nlsv_field{nlsv::load_snapshot(path)};
    return NLSV_OK;
  });
}

nlsv_status nlsv_field_save(const nlsv_field* field, const char* path) {
  if (!field) return null_argument("field");
  if (!path) return null_argument("path");
  return guarded([&] {
    nlsv::save_snapshot(field->field, path);
    return NLSV_OK;
  });
}

nlsv_status nlsv_field_create(int n, double box_length, const double* interleaved, nlsv_field** out) {
  if (!interleaved) return null_argument("interleaved");
  if (!out) return null_argument("out");
  return guarded([&] {
    const nlsv::Grid g(n, box_length);
    nlsv::Field f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = nlsv::Complex(interleaved[2 * i], interleaved[2 * i + 1]);
    *out = new nlsv_field{std::move(f)};
    return NLSV_OK;
  });
}

int nlsv_field_n(const nlsv_field* field) { return field ? field->field.grid().n() : 0; }

double nlsv_field_box_length(const nlsv_field* field) { return field ? field->field.grid().box_length() : 0.0; }

nlsv_status nlsv_field_copy(const nlsv_field* field, double* dst, size_t capacity) {
  if (!field) return null_argument("field");
  if (!dst) return null_argument("dst");
  return guarded([&] {
    const std::size_t need = 2 * field->field.size();
    if (capacity < need)
      nlsv::fail(nlsv::ErrorCode::InvalidArgument,
                 "nlsv_field_copy: capacity " + std::to_string(capacity) + " < " + std::to_string(need));
    for (std::size_t i = 0; i < field->field.size(); ++i) {
      dst[2 * i] = field->field[i].real();
      dst[2 * i + 1] = field->field[i].imag();
    }
    return NLSV_OK;
  });
}

void nlsv_field_free(nlsv_field* field) { delete field; }

}  // extern "C"
