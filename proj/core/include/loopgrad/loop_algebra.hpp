#pragma once

// Twisted loop algebras L_{a,K}(g) represented by finite Fourier-Laurent mode
// families xi(sigma) = sum_k e^{i k sigma} x_k, with a(x_k) = eps_K^k x_k.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "loopgrad/lie_core.hpp"

namespace loopgrad {

class TwistData {
 public:
  /// Throws NotFiniteOrder unless ||a^K - id|| <= tol.
  TwistData(AlgebraAutomorphism a, int K, double tol = kDefaultTol);

  const AlgebraPtr& algebra() const { return a_.algebra(); }
  const AlgebraAutomorphism& automorphism() const { return a_; }
  int K() const { return K_; }
  double period() const { return 2.0 * kPi / K_; }

  int residue(int k) const { return ((k % K_) + K_) % K_; }
  /// eps_K^k
  Complex eps(int k) const { return std::polar(1.0, 2.0 * kPi * residue(k) / K_); }
  /// Projector onto the eps_K^k eigenspace of a.
  const CMatrix& projector(int k) const { return spaces_[static_cast<std::size_t>(residue(k))].projector; }
  const CMatrix& eigenbasis(int k) const { return spaces_[static_cast<std::size_t>(residue(k))].basis; }
  const std::vector<Eigenspace>& eigenspaces() const { return spaces_; }
  const GroupLift& group_lift() const { return lift_; }

 private:
  AlgebraAutomorphism a_;
  int K_;
  std::vector<Eigenspace> spaces_;
  GroupLift lift_;
};

using TwistPtr = std::shared_ptr<const TwistData>;

TwistPtr make_twist(AlgebraAutomorphism a, int K, double tol = kDefaultTol);
TwistPtr untwisted(const AlgebraPtr& alg);
bool same_twist(const TwistData& a, const TwistData& b);

using ModeMap = std::map<int, CVector>;

class LoopElement {
 public:
  /// Validated construction; throws TwistViolation naming the offending mode.
  static LoopElement make(TwistPtr twist, ModeMap modes, double tol = kDefaultTol);
  static LoopElement zero(TwistPtr twist);
  static LoopElement monomial(TwistPtr twist, int k, const CVector& x, double tol = kDefaultTol);

  const TwistPtr& twist() const { return twist_; }
  const AlgebraPtr& algebra() const { return twist_->algebra(); }
  const ModeMap& modes() const { return modes_; }
  bool is_zero() const { return modes_.empty(); }
  /// max |k| over stored modes (0 for the zero element).
  int max_abs_mode() const;
  CVector mode(int k) const;

  LoopElement operator+(const LoopElement& other) const;
  LoopElement operator-(const LoopElement& other) const;
  LoopElement operator*(Complex s) const;
  friend LoopElement operator*(Complex s, const LoopElement& x) { return x * s; }

  /// d/dsigma: x_k -> i k x_k.
  LoopElement derivative() const;
  /// Mode reflection x_k -> x_{-k}, an isomorphism onto L_{a^{-1},K}.
  LoopElement reflected(TwistPtr inverse_twist) const;
  /// Re-tags the element with an equal twist object.
  LoopElement retagged(TwistPtr twist) const;

  /// max over modes of ||a(x_k) - eps_K^k x_k||.
  double twist_residual() const;

  /// Unvalidated construction for results that satisfy the constraint by
  /// construction; exact zero modes are dropped.
  static LoopElement trusted(TwistPtr twist, ModeMap modes);

 private:
  LoopElement(TwistPtr twist, ModeMap modes);
  TwistPtr twist_;
  ModeMap modes_;
};

/// sum_k ||x_k||_max, a norm used for residual reporting.
double mode_norm(const LoopElement& x);

/// [xi, eta]_k = sum_l [xi_{k-l}, eta_l]. Throws TwistMismatch.
LoopElement loop_bracket(const LoopElement& xi, const LoopElement& eta);

CVector evaluate(const LoopElement& xi, double sigma);
/// j-th sigma-derivative at sigma.
CVector evaluate_derivative(const LoopElement& xi, double sigma, int order);
AlgebraElement evaluate_element(const LoopElement& xi, double sigma);

/// Uniform grid sigma_j = 2 pi j / M.
std::vector<double> uniform_grid(int M);
std::vector<CVector> sample(const LoopElement& xi, int M);

struct ProjectionResult {
  LoopElement element;
  /// max norm of the discrete Fourier modes outside the window (or of the edge
  /// modes when the grid leaves no room outside the window).
  double truncation = 0.0;
};

/// Trapezoidal evaluation of x_k = (1/2pi) int e^{-iks} xi(s) ds for |k| <= window,
/// projected onto the twist eigenspaces. M = samples.size() >= 2 window + 1.
/// With tol set, throws TruncationWarning when truncation > tol.
ProjectionResult fourier_project(std::span<const CVector> samples, TwistPtr twist, int window,
                                 std::optional<double> tol = std::nullopt);

struct SeminormEstimate {
  double value = 0.0;        // grid + golden-section estimate, a lower bound
  double upper_bound = 0.0;  // max_j sum_k |k|^j ||x_k||
};

SeminormEstimate seminorm_estimate(const LoopElement& xi, int m);
/// ||xi||_m = max_{0<=j<m} max_sigma ||xi^{(j)}(sigma)||.
double seminorm(const LoopElement& xi, int m);

struct BracketBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
};

/// ||[xi,eta]||_m <= 2^{m-1} C ||xi||_m ||eta||_m.
BracketBoundReport check_bracket_bound(const LoopElement& xi, const LoopElement& eta, int m);

struct ModeSequence {
  std::function<CVector(int)> mode;
  /// Set when x_k = 0 for |k| > support_radius.
  std::optional<int> support_radius;
};

struct ConvergenceReport {
  bool convergent = false;
  int terms = 0;                       // largest |k| summed
  std::vector<double> sums;            // per derivative order j: sum_k |k|^j ||x_k||
  std::vector<double> last_ratio;      // per j: ratio of the last two dyadic block sums
  double regrouping_residual = 0.0;
};

struct ConvergenceOptions {
  int first_block = 16;
  int max_terms = 1 << 16;
  double ratio_threshold = 0.9;
  double regroup_tol = 1e-10;
  double sample_point = 0.37;
};

/// Dyadic-block Cauchy test on sum_k ||(ik)^j e^{iks} x_k||, j < m_max, plus a
/// regrouping test (ascending |k| versus residue classes mod 3). Throws
/// NotAbsolutelyConvergent when a block sum fails to contract.
ConvergenceReport absolute_convergence_check(const ModeSequence& seq, int m_max, const ConvergenceOptions& opts = {});

// --- circle diffeomorphisms and the automorphism group ----------------------

/// Lift f(sigma) = sigma + c + sum_n (a_n cos(nK sigma) + b_n sin(nK sigma)).
struct ElementaryLift {
  double rotation = 0.0;
  std::vector<std::pair<double, double>> harmonics;  // (a_n, b_n), n = 1, 2, ...
};

/// Orientation-preserving lift commuting with sigma -> sigma + 2pi/K, stored as
/// a composition of elementary lifts and their inverses.
class CircleDiffeoLift {
 public:
  static CircleDiffeoLift identity(int K);
  static CircleDiffeoLift rotation(int K, double c);
  /// Throws NonMonotone if f' <= 0 somewhere on a validation grid.
  static CircleDiffeoLift from_series(int K, ElementaryLift lift);

  int K() const { return K_; }
  double operator()(double sigma) const;
  double derivative(double sigma) const;
  double inverse_at(double y) const;

  CircleDiffeoLift inverse() const;
  /// (*this) o other
  CircleDiffeoLift compose(const CircleDiffeoLift& other) const;

  bool is_rotation() const;
  /// Net rotation when is_rotation().
  double net_rotation() const;
  /// min f' on a grid of `samples` points over one period.
  double min_derivative(int samples = 1024) const;
  /// Single elementary piece, if the lift is one.
  std::optional<ElementaryLift> elementary() const;

 private:
  struct Piece {
    ElementaryLift lift;
    bool inverted;
  };
  explicit CircleDiffeoLift(int K) : K_(K) {}
  static double eval(const ElementaryLift& e, int K, double s);
  static double eval_derivative(const ElementaryLift& e, int K, double s);
  static double solve(const ElementaryLift& e, int K, double y);

  int K_;
  std::vector<Piece> pieces_;  // f = pieces_[0] o pieces_[1] o ...
};

/// alpha in L_{Int(a),K}(Aut g): a pointwise product of constant automorphisms
/// commuting with a and factors exp(ad zeta), each possibly reparametrised.
class LoopAutomorphismElement {
 public:
  static LoopAutomorphismElement identity(TwistPtr twist);
  /// Throws TwistViolation unless b a = a b.
  static LoopAutomorphismElement constant(TwistPtr twist, const AlgebraAutomorphism& b, double tol = kDefaultTol);
  static LoopAutomorphismElement exp_ad(const LoopElement& zeta);

  const TwistPtr& twist() const { return twist_; }
  /// dim x dim matrix alpha(sigma).
  CMatrix evaluate(double sigma) const;
  bool is_constant() const;

  /// Pointwise product (alpha * beta)(s) = alpha(s) beta(s).
  LoopAutomorphismElement operator*(const LoopAutomorphismElement& other) const;
  LoopAutomorphismElement inverse() const;
  /// alpha o h
  LoopAutomorphismElement precompose(const CircleDiffeoLift& h) const;

  /// max over sampled sigma of bracket-preservation and equivariance residuals.
  double validation_residual(int samples = 16) const;

 private:
  struct Factor {
    std::optional<CMatrix> constant;
    std::optional<LoopElement> zeta;
    bool inverted = false;
    std::vector<CircleDiffeoLift> reparam;  // applied as reparam[0] o reparam[1] o ...
  };
  explicit LoopAutomorphismElement(TwistPtr twist) : twist_(std::move(twist)) {}
  TwistPtr twist_;
  std::vector<Factor> factors_;
};

struct LoopAutomorphism {
  CircleDiffeoLift f;
  LoopAutomorphismElement alpha;
};

LoopAutomorphism identity_automorphism(TwistPtr twist);
/// (f1, a1)(f2, a2) = (f1 o f2, a1 (a2 o f1^{-1})).
LoopAutomorphism compose_loop_automorphisms(const LoopAutomorphism& first, const LoopAutomorphism& second);
/// (f, a)^{-1} = (f^{-1}, a^{-1} o f).
LoopAutomorphism inverse_loop_automorphism(const LoopAutomorphism& g);

/// A_{(f,alpha)} xi = alpha (xi o f^{-1}), projected onto |k| <= window. Exact
/// for a rotation with a constant alpha. With tol set, throws TruncationWarning.
ProjectionResult apply_loop_automorphism(const CircleDiffeoLift& f, const LoopAutomorphismElement& alpha,
                                         const LoopElement& xi, int window, std::optional<double> tol = std::nullopt);
ProjectionResult apply_loop_automorphism(const LoopAutomorphism& g, const LoopElement& xi, int window,
                                         std::optional<double> tol = std::nullopt);

}  // namespace loopgrad
