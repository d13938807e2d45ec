#pragma once

#include <stdexcept>
#include <string>

namespace outpost {

enum class ErrorCode {
  InvalidParameter,
  NoAdmissibleRoot,
  Supercritical,
  InvalidGeometry,
  ResolutionExceeded,
  TooCloseToDiagonalCircle,
  OutsideDomainD,
  NonConvergent,
  QuadratureNotConverged,
  PrecisionBudgetExceeded,
  NotPositiveDefinite,
  OutOfRegime,
  EnvelopeViolation,
  MaxRejections,
  PreconditionViolated,
  Inconclusive,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code), detail_(what) {}
  ErrorCode code() const { return code_; }
  // message without the code prefix
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace outpost
