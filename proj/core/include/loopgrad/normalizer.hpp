#pragma once

// Reduction of a grading operator -i X + i ad(eta) on L_{a,K} to the standard
// operator -i d/ds on L_{a',K'}: rectify X, transport eta, solve
// kappa gamma^{-1} gamma' = -eta and read off the monodromy g, a' = a o Ad(g).

#include <optional>
#include <vector>

#include "loopgrad/gradation.hpp"

namespace loopgrad {

struct RectificationResult {
  CircleDiffeoLift f = CircleDiffeoLift::identity(1);
  double kappa = 1.0;
  double quadrature_error = 0.0;
  double pushforward_residual = 0.0;  // max |v f' - kappa| on a check grid
  double period_residual = 0.0;       // |f(2pi/K) - f(0) - 2pi/K|
  int samples = 0;
};

/// f(s) = kappa int_0^s ds'/v(s'), kappa = (2pi/K) / int_0^{2pi/K} ds/v, via the
/// Fourier series of 1/v with adaptive sample doubling. Throws FieldHasZeros,
/// QuadratureFailure.
RectificationResult rectify_vector_field(const VectorFieldK& X, double target = 1e-12);

struct OrientedProblem {
  GradingOperator Q;
  TwistPtr twist;
  bool flipped = false;
};

/// For negative v, passes to xi(s) -> xi(-s) on L_{a^{-1},K}.
OrientedProblem orientation_fix(const GradingOperator& Q);

struct TransportResult {
  LoopElement eta;
  int window = 0;
  double truncation = 0.0;
};

/// eta o f^{-1} by oversampled projection; the window doubles until the
/// out-of-window energy is below tol. Exact (no sampling) for rotations.
TransportResult transport(const LoopElement& eta, const CircleDiffeoLift& f, double tol = 1e-12, int max_window = 4096);

struct OdeOptions {
  int steps = 4096;          // uniform nodes per period
  bool adaptive = true;      // subdivide steps whose local error exceeds local_tol
  double local_tol = 1e-13;
  int max_depth = 24;
  int periods = 2;
};

/// Dense path gamma on [0, periods * 2pi/K], gamma(0) = I.
struct ConjugationPath {
  double kappa = 1.0;
  double h = 0.0;
  int steps_per_period = 0;
  std::vector<CMatrix> nodes;
  std::vector<CMatrix> derivatives;
  double determinant_drift = 0.0;  // max |det - 1| before renormalization
  double ode_residual = 0.0;       // max ||kappa gamma' + gamma eta|| at nodes
  int substeps = 0;

  double length() const { return h * static_cast<double>(nodes.size() - 1); }
  /// Cubic Hermite interpolation between nodes.
  CMatrix at(double s) const;
  CMatrix derivative_at(double s) const;
};

/// RK4 with step doubling and local Richardson extrapolation; the determinant
/// is projected back to 1 after every node. Throws StepSizeUnderflow.
ConjugationPath solve_conjugation_ode(const LoopElement& eta, double kappa, const OdeOptions& opts = {});

struct MonodromyResult {
  CMatrix g;
  double residual = 0.0;  // max over interior points of gamma(s+T) - a(g gamma(s))
  int checks = 0;
};

/// g = a^{-1}(gamma(2pi/K)). Throws InconsistentMonodromy when the defining
/// relation fails at interior points by more than tol.
MonodromyResult monodromy(const ConjugationPath& path, const TwistData& twist, double tol = 1e-8);

struct NormalizeOptions {
  OdeOptions ode;
  double integrality_tol = 1e-6;
  double order_tol = 1e-8;
  double transport_tol = 1e-12;
  int max_window = 4096;
  double monodromy_tol = 1e-8;
};

struct NormalizationResult {
  AlgebraAutomorphism a_prime;
  int K_prime = 1;
  TwistPtr twist_prime;
  std::vector<int> dims;  // dim of the eps_{K'}^m eigenspace of a', m = 0..K'-1

  double kappa = 1.0;
  double integrality_residual = 0.0;
  double order_residual = 0.0;
  double semisimplicity_residual = 0.0;
  double shift_residual = 0.0;  // ||gamma eta gamma^{-1} + kappa gamma' gamma^{-1}|| on nodes
  bool flipped = false;

  TwistPtr source_twist;  // after the orientation fix
  RectificationResult rectification;
  TransportResult transported;
  ConjugationPath path;
  MonodromyResult monodromy;
  NormalizeOptions options;
};

/// Throws NonIntegerKPrime when kappa K is not an integer and NonIntegerSpectrum
/// when a'^{K'} != id (the spectrum of Q is then not integral).
NormalizationResult normalize(const GradingOperator& Q, const NormalizeOptions& opts = {});

struct ComparisonResult {
  bool equivalent = false;
  std::string reason;
};

/// K' = K'' and a' conjugate to a'' in Aut g. Throws Undecided when the
/// conjugacy invariants cannot be computed reliably.
ComparisonResult compare_normalizations(const NormalizationResult& r1, const NormalizationResult& r2);
ComparisonResult compare_automorphisms(const AlgebraAutomorphism& a1, int K1, const AlgebraAutomorphism& a2, int K2);

/// The operator A Q A^{-1} for A = (f, Ad(exp zeta)): v -> (v f') o f^{-1},
/// eta -> u (eta o f^{-1}) u^{-1} + v_new u' u^{-1}. Sampled and projected.
GradingOperator conjugate_grading_operator(const GradingOperator& Q, const CircleDiffeoLift& f, const LoopElement& zeta,
                                           double tol = 1e-12, int max_window = 4096);

struct OrderEstimate {
  double order = 0.0;
  std::vector<int> steps;
  std::vector<double> differences;  // ||g_n - g_{2n}||
  double doubling_residual = 0.0;   // ||g_N - g_{2N}|| at the production step count N
};

/// Observed order of the monodromy under step doubling (non-adaptive runs).
OrderEstimate estimate_convergence_order(const LoopElement& eta, double kappa, int production_steps = 4096);

}  // namespace loopgrad
