#include "nlsv/error.hpp"

namespace nlsv {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Config: return "config";
    case ErrorCode::Numerical: return "numerical";
    case ErrorCode::Io: return "io";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Convergence: return "convergence";
  }
  return "unknown";
}

namespace {

std::string join_violations(const std::vector<ConfigViolation>& violations) {
  std::string out = "invalid configuration:";
  for (const auto& v : violations) out += " [" + v.key + ": " + v.message + "]";
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : Error(ErrorCode::Config, join_violations(violations)),
      violations_(std::move(violations)) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace nlsv
