#include "outpost/error.hpp"

namespace outpost {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::NoAdmissibleRoot: return "NoAdmissibleRoot";
    case ErrorCode::Supercritical: return "Supercritical";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::ResolutionExceeded: return "ResolutionExceeded";
    case ErrorCode::TooCloseToDiagonalCircle: return "TooCloseToDiagonalCircle";
    case ErrorCode::OutsideDomainD: return "OutsideDomainD";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::PrecisionBudgetExceeded: return "PrecisionBudgetExceeded";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::OutOfRegime: return "OutOfRegime";
    case ErrorCode::EnvelopeViolation: return "EnvelopeViolation";
    case ErrorCode::MaxRejections: return "MaxRejections";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace outpost
