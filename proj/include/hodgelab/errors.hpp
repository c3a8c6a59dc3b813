#pragma once

#include <stdexcept>
#include <string>

namespace hodgelab {

enum class ErrorCode {
  NonPositiveMetric,
  DegenerateFiber,
  InconsistentAutomorphy,
  Unsupported,
  ShapeMismatch,
  DegreeError,
  RankMismatch,
  SolverDivergence,
  MissingSDerivative,
  RankZero,
  ProjectionResidual,
  IllConditionedGram,
  NotUntwisted,
  HarmonicLeak,
  SingularShift,
  NotFiberwiseFlat,
  NotParallel,
  NotProductFamily,
  Precondition,
  ConfigError,
  IoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace hodgelab
