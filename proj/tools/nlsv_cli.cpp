#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nlsv/nlsv.h"

namespace {

constexpr const char* kExperiments[] = {"ground-state",     "thresholds",       "evolve",
                                        "dichotomy-scan",   "virial-check",     "dispersive-check",
                                        "defocusing-evolve", "inequality-fuzz"};

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
      continue;
    }
    out += c;
  }
  return out + "\"";
}

int report_failure(nlsv_status status) {
  std::printf("%s\n", nlsv_last_error());
  return nlsv_exit_code(status);
}

struct ConfigDeleter {
  void operator()(nlsv_config* c) const { nlsv_config_free(c); }
};
struct ReportDeleter {
  void operator()(nlsv_report* r) const { nlsv_report_free(r); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the cubic Schrodinger equation with a potential"};
  app.set_version_flag("--version", std::string(nlsv_version()));
  app.require_subcommand(1);

  std::string config_path, output_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  for (const char* name : kExperiments) {
    CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--output", output_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "seed for randomized checks (overrides seed)");
    sub->add_option("--override", overrides, "dotted.key=value, repeatable")->take_all();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::printf("{\"error\":\"config\",\"message\":%s}\n", json_string(e.what()).c_str());
    return nlsv_exit_code(NLSV_ERR_CONFIG);
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  nlsv_config* raw = nullptr;
  nlsv_status st = config_path.empty() ? nlsv_config_from_json("{}", &raw)
                                       : nlsv_config_from_file(config_path.c_str(), &raw);
  if (st != NLSV_OK) return report_failure(st);
  const std::unique_ptr<nlsv_config, ConfigDeleter> cfg(raw);

  std::vector<std::string> assignments{"experiment=" + json_string(experiment)};
  if (!output_dir.empty()) assignments.push_back("output_dir=" + json_string(output_dir));
  if (seed) assignments.push_back("seed=" + std::to_string(*seed));
  assignments.insert(assignments.end(), overrides.begin(), overrides.end());
  for (const auto& a : assignments)
    if ((st = nlsv_config_override(cfg.get(), a.c_str())) != NLSV_OK) return report_failure(st);

  nlsv_report* rep_raw = nullptr;
  st = nlsv_run(cfg.get(), 1, &rep_raw);
  if (!rep_raw) return report_failure(st);
  const std::unique_ptr<nlsv_report, ReportDeleter> rep(rep_raw);
  std::printf("%s\n", nlsv_report_json(rep.get()));
  return nlsv_report_exit_code(rep.get());
}
