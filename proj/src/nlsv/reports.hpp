#pragma once

#include <string>

#include "nlsv/config.hpp"
#include "nlsv/forms.hpp"
#include "nlsv/ground_states.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/propagator.hpp"
#include "nlsv/radial_ground_state.hpp"
#include "nlsv/thresholds.hpp"

namespace nlsv {

const char* library_version();

// JSON forms picked up by nlohmann through argument-dependent lookup.
void to_json(Json& j, const Vec3& v);
void to_json(Json& j, const FormValues& f);
void to_json(Json& j, const RadialNorms& n);
void to_json(Json& j, const PohozaevExtra& p);
void to_json(Json& j, const GroundStateResult& r);  // profile excluded
void to_json(Json& j, const ThresholdReport& r);
void to_json(Json& j, const Classification& c);
void to_json(Json& j, const ComparabilityCheck& c);
void to_json(Json& j, const AdmissibilityReport& r);
void to_json(Json& j, const EvolutionConfig& c);
void to_json(Json& j, const FrameDiagnostics& d);
void to_json(Json& j, const DecayFit& f);
void to_json(Json& j, const SNormProxy& s);
void to_json(Json& j, const ScatteringSeries& s);
void to_json(Json& j, const KatoPositivityCheck& c);
void to_json(Json& j, const SandwichCheck& c);
void to_json(Json& j, const SplitInequalityCheck& c);

/// Common head of every report: version, config hash, timestamp, the
/// effective config and the admissibility report of its potential.
Json report_header(const Json& effective_config, const ExperimentConfig& cfg, const AdmissibilityReport& adm);

/// Hash of the effective config with output_dir removed, so the same run
/// written to different directories hashes equally.
std::uint64_t run_hash(const Json& effective_config);

/// Machine-readable error document.
Json error_json(const std::exception& e);

/// Pretty-printed, sorted keys, trailing newline. Throws Io with the path.
void write_json(const Json& j, const std::string& path);

}  // namespace nlsv
