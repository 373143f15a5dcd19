#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlsv {

enum class ErrorCode {
  InvalidArgument,
  Config,
  Numerical,
  Io,
  Unsupported,
  Convergence,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ConfigViolation {
  std::string key;
  std::string message;
};

// Carries every violation found, not only the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residual_history)
      : Error(ErrorCode::Convergence, what), history_(std::move(residual_history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace nlsv
