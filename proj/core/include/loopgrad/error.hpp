#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace loopgrad {

enum class ErrorKind {
  // lie_core
  UnsupportedAlgebra,
  AlgebraMismatch,
  InvalidGroupElement,
  InvalidAutomorphism,
  NoOuterAutomorphism,
  NotFiniteOrder,
  NumericalFailure,
  // loop_algebra
  TwistViolation,
  TwistMismatch,
  TruncationWarning,
  NotAbsolutelyConvergent,
  NonMonotone,
  // gradation
  ZeroFieldInfiniteDimensional,
  FieldHasZeros,
  NonIntegerSpectrum,
  WindowLeakage,
  DefectiveOperator,
  // normalizer
  QuadratureFailure,
  StepSizeUnderflow,
  InconsistentMonodromy,
  NonIntegerKPrime,
  Undecided,
  // classify
  UnsupportedTwist,
  RealizationOrderMismatch,
  NoMatch,
  Ambiguous,
  // plumbing
  SchemaError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for rejections that signal a violated mathematical condition on the
/// input (as opposed to I/O trouble or a numerical breakdown).
bool is_mathematical_rejection(ErrorKind kind) noexcept;

/// Name of the condition an input failed, e.g. "twist eigenspace constraint".
std::string_view violated_condition(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace loopgrad
