#pragma once

// Grading operators Q xi = -i v xi' + i [eta, xi] on twisted loop algebras,
// their spectra on truncated mode windows, and the phase flow.

#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "loopgrad/loop_algebra.hpp"

namespace loopgrad {

/// X = v d/ds with v(s) = sum_n v_n e^{i n K s}, v_{-n} = conj(v_n).
class VectorFieldK {
 public:
  /// Throws SchemaError when the coefficients are not conjugate symmetric.
  VectorFieldK(int K, std::map<int, Complex> harmonics);
  static VectorFieldK constant(int K, double c);
  /// v = c0 + sum_n (a_n cos(nKs) + b_n sin(nKs)).
  static VectorFieldK from_real_series(int K, double c0, std::span<const std::pair<double, double>> ab);

  int K() const { return K_; }
  const std::map<int, Complex>& harmonics() const { return v_; }
  Complex coefficient(int n) const;
  int max_harmonic() const;
  double operator()(double s) const;
  bool is_zero() const { return v_.empty(); }
  bool is_constant() const;
  /// v_0 (the constant value when is_constant()).
  double mean() const { return coefficient(0).real(); }
  /// v'(s) = -v(-s), i.e. v'_n = -v_{-n}.
  VectorFieldK reflected() const;

 private:
  int K_;
  std::map<int, Complex> v_;
};

struct VectorFieldReport {
  double min_abs = 0.0;
  int sign = 1;
};

/// Throws ZeroFieldInfiniteDimensional for v = 0 and FieldHasZeros when v
/// vanishes or changes sign on the refined grid.
VectorFieldReport validate_vector_field(const VectorFieldK& X);

class GradingOperator {
 public:
  /// Throws TwistMismatch when X.K differs from the twist order of eta.
  GradingOperator(VectorFieldK X, LoopElement eta);
  /// Q = -i d/ds on L_{a,K}.
  static GradingOperator standard(const TwistPtr& twist);

  const VectorFieldK& X() const { return X_; }
  const LoopElement& eta() const { return eta_; }
  const TwistPtr& twist() const { return eta_.twist(); }

 private:
  VectorFieldK X_;
  LoopElement eta_;
};

/// (X xi)_k = sum_n v_n i (k - nK) x_{k-nK}.
LoopElement apply_vector_field(const VectorFieldK& X, const LoopElement& xi);
LoopElement apply_grading_operator(const GradingOperator& Q, const LoopElement& xi);

using LoopOperator = std::function<LoopElement(const LoopElement&)>;

struct DerivationReport {
  double max_residual = 0.0;
  std::vector<double> residuals;
  bool ok = true;
};

/// Residual ||Q[xi,eta] - [Q xi,eta] - [xi,Q eta]||_1 per pair.
DerivationReport check_derivation(const LoopOperator& Q, std::span<const std::pair<LoopElement, LoopElement>> pairs,
                                  double tol = 1e-9);
DerivationReport check_derivation(const GradingOperator& Q, std::span<const std::pair<LoopElement, LoopElement>> pairs,
                                  double tol = 1e-9);

/// D xi = -X(xi) + [eta, xi]; Q = i D.
class Derivation {
 public:
  Derivation(VectorFieldK X, LoopElement eta);
  const VectorFieldK& X() const { return X_; }
  const LoopElement& eta() const { return eta_; }
  LoopElement operator()(const LoopElement& xi) const;
  GradingOperator grading_operator() const;

 private:
  VectorFieldK X_;
  LoopElement eta_;
};

Derivation derivation_from_pair(VectorFieldK X, LoopElement eta);

struct GradationEntry {
  int degree = 0;
  std::vector<LoopElement> basis;
  double eigenvalue_deviation = 0.0;  // max |lambda - degree| over the cluster
  double residual = 0.0;              // max ||Q xi - degree xi|| over the basis
};

struct GradationTable {
  TwistPtr twist;
  int window = 0;
  std::vector<GradationEntry> entries;  // degrees ascending
  double leakage = 0.0;
  double max_residual = 0.0;
  double max_eigenvalue_deviation = 0.0;

  int total_dim() const;
  const GradationEntry* find(int degree) const;

  // Window basis (ambient coordinates, orthonormal columns) and the graded
  // basis expressed in it.
  CMatrix window_basis;
  CMatrix graded_basis;
  std::vector<int> column_degree;
  Eigen::PartialPivLU<CMatrix> coordinates;
};

/// Ambient coordinate index (k + N) dim + i for modes |k| <= N.
CVector to_window_vector(const LoopElement& xi, int N);
LoopElement from_window_vector(const TwistPtr& twist, const CVector& v, int N);

/// Grading subspaces of Q on the window |k| <= N. Requires constant v.
/// Throws WindowLeakage, NonIntegerSpectrum or DefectiveOperator.
GradationTable grading_subspaces(const GradingOperator& Q, int N, double tol = 1e-6);

/// Components xi_k in the table's graded basis. Throws WindowLeakage when xi
/// is not inside the window.
std::map<int, LoopElement> decompose(const LoopElement& xi, const GradationTable& table);

/// Phi(tau, xi) = sum_k e^{-ik tau} xi_k.
LoopElement flow(double tau, const LoopElement& xi, const GradationTable& table);

/// max residual of [G_k, G_l] subset G_{k+l} over basis pairs whose bracket
/// stays inside the window.
double gradation_bracket_residual(const GradationTable& table, const GradingOperator& Q);

/// Degree-k dimensions dim G_k for the standard gradation: dim of the
/// eps_K^k eigenspace of a.
std::map<int, int> standard_dimensions(const TwistData& twist, int N);

}  // namespace loopgrad
