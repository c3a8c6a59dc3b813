#include "hodgelab/errors.hpp"

namespace hodgelab {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveMetric: return "NonPositiveMetric";
    case ErrorCode::DegenerateFiber: return "DegenerateFiber";
    case ErrorCode::InconsistentAutomorphy: return "InconsistentAutomorphy";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegreeError: return "DegreeError";
    case ErrorCode::RankMismatch: return "RankMismatch";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::MissingSDerivative: return "MissingSDerivative";
    case ErrorCode::RankZero: return "RankZero";
    case ErrorCode::ProjectionResidual: return "ProjectionResidual";
    case ErrorCode::IllConditionedGram: return "IllConditionedGram";
    case ErrorCode::NotUntwisted: return "NotUntwisted";
    case ErrorCode::HarmonicLeak: return "HarmonicLeak";
    case ErrorCode::SingularShift: return "SingularShift";
    case ErrorCode::NotFiberwiseFlat: return "NotFiberwiseFlat";
    case ErrorCode::NotParallel: return "NotParallel";
    case ErrorCode::NotProductFamily: return "NotProductFamily";
    case ErrorCode::Precondition: return "Precondition";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace hodgelab
