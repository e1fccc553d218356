#include "loopgrad/error.hpp"

namespace loopgrad {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnsupportedAlgebra: return "UnsupportedAlgebra";
    case ErrorKind::AlgebraMismatch: return "AlgebraMismatch";
    case ErrorKind::InvalidGroupElement: return "InvalidGroupElement";
    case ErrorKind::InvalidAutomorphism: return "InvalidAutomorphism";
    case ErrorKind::NoOuterAutomorphism: return "NoOuterAutomorphism";
    case ErrorKind::NotFiniteOrder: return "NotFiniteOrder";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::TwistViolation: return "TwistViolation";
    case ErrorKind::TwistMismatch: return "TwistMismatch";
    case ErrorKind::TruncationWarning: return "TruncationWarning";
    case ErrorKind::NotAbsolutelyConvergent: return "NotAbsolutelyConvergent";
    case ErrorKind::NonMonotone: return "NonMonotone";
    case ErrorKind::ZeroFieldInfiniteDimensional: return "ZeroFieldInfiniteDimensional";
    case ErrorKind::FieldHasZeros: return "FieldHasZeros";
    case ErrorKind::NonIntegerSpectrum: return "NonIntegerSpectrum";
    case ErrorKind::WindowLeakage: return "WindowLeakage";
    case ErrorKind::DefectiveOperator: return "DefectiveOperator";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorKind::InconsistentMonodromy: return "InconsistentMonodromy";
    case ErrorKind::NonIntegerKPrime: return "NonIntegerKPrime";
    case ErrorKind::Undecided: return "Undecided";
    case ErrorKind::UnsupportedTwist: return "UnsupportedTwist";
    case ErrorKind::RealizationOrderMismatch: return "RealizationOrderMismatch";
    case ErrorKind::NoMatch: return "NoMatch";
    case ErrorKind::Ambiguous: return "Ambiguous";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_mathematical_rejection(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnsupportedAlgebra:
    case ErrorKind::AlgebraMismatch:
    case ErrorKind::InvalidGroupElement:
    case ErrorKind::InvalidAutomorphism:
    case ErrorKind::NoOuterAutomorphism:
    case ErrorKind::NotFiniteOrder:
    case ErrorKind::TwistViolation:
    case ErrorKind::TwistMismatch:
    case ErrorKind::NotAbsolutelyConvergent:
    case ErrorKind::NonMonotone:
    case ErrorKind::ZeroFieldInfiniteDimensional:
    case ErrorKind::FieldHasZeros:
    case ErrorKind::NonIntegerSpectrum:
    case ErrorKind::WindowLeakage:
    case ErrorKind::NonIntegerKPrime:
    case ErrorKind::UnsupportedTwist:
      return true;
    default:
      return false;
  }
}

std::string_view violated_condition(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnsupportedAlgebra: return "algebra label in {A1, A2, A3, A4}";
    case ErrorKind::AlgebraMismatch: return "operands belong to the same algebra";
    case ErrorKind::InvalidGroupElement: return "invertible matrix of the defining representation";
    case ErrorKind::InvalidAutomorphism: return "invertible bracket-preserving linear map";
    case ErrorKind::NoOuterAutomorphism: return "Dynkin diagram admits a nontrivial symmetry";
    case ErrorKind::NotFiniteOrder: return "a^K = id";
    case ErrorKind::TwistViolation: return "twist eigenspace constraint a(x_k) = eps_K^k x_k";
    case ErrorKind::TwistMismatch: return "operands share one twist (a, K)";
    case ErrorKind::NotAbsolutelyConvergent: return "absolute convergence of the mode expansion";
    case ErrorKind::NonMonotone: return "orientation-preserving circle diffeomorphism (f' > 0)";
    case ErrorKind::ZeroFieldInfiniteDimensional:
      return "nonzero vector field (X = 0 forces |k| <= C ||eta||_1, hence infinite-dimensional grading subspaces)";
    case ErrorKind::FieldHasZeros: return "vector field is nowhere zero";
    case ErrorKind::NonIntegerSpectrum: return "grading operator has integer spectrum";
    case ErrorKind::WindowLeakage: return "operator preserves the truncated mode window";
    case ErrorKind::NonIntegerKPrime: return "K' = kappa K is an integer";
    case ErrorKind::UnsupportedTwist: return "twist order r = 1, or r = 2 for A_n with n >= 2";
    default: return "";
  }
}

}  // namespace loopgrad
