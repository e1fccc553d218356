#pragma once

// Finite-dimensional complex simple Lie algebras of type A_n (n <= 4) in a
// Chevalley basis, together with their defining matrix realization sl(n+1).

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "loopgrad/error.hpp"

namespace loopgrad {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Default tolerance for order and automorphism checks.
inline constexpr double kDefaultTol = 1e-9;

/// Nonzero entry c^k_{ij} of [e_i, e_j] = sum_k c^k_{ij} e_k.
struct StructureConstant {
  int i;
  int j;
  int k;
  Complex value;
};

/// A positive root alpha_first + ... + alpha_{last-1} of A_n, i.e. the matrix
/// unit E_{first,last} (0-based rows/columns of the defining representation).
struct PositiveRoot {
  int first;
  int last;
  int height() const { return last - first; }
};

class SimpleLieAlgebra {
 public:
  const std::string& label() const { return label_; }
  int rank() const { return rank_; }
  int dim() const { return dim_; }
  int defining_dim() const { return rank_ + 1; }

  const std::vector<std::string>& basis_labels() const { return basis_labels_; }
  const std::vector<StructureConstant>& structure_constants() const { return constants_; }
  double bracket_constant() const { return bracket_constant_; }

  /// Basis ordering: positive root vectors by height, Cartan h_1..h_n, then
  /// negative root vectors in the same order as the positive ones.
  const std::vector<PositiveRoot>& positive_roots() const { return roots_; }
  int positive_root_index(int r) const { return r; }
  int cartan_index(int i) const { return static_cast<int>(roots_.size()) + i; }
  int negative_root_index(int r) const { return static_cast<int>(roots_.size()) + rank_ + r; }
  /// Basis index of E_{row,col} for row != col.
  int matrix_unit_index(int row, int col) const;

  const CMatrix& basis_matrix(int i) const { return basis_matrices_[static_cast<std::size_t>(i)]; }

  CVector bracket(const CVector& x, const CVector& y) const;
  CMatrix to_matrix(const CVector& x) const;
  /// Coordinates of a traceless matrix; the trace part is discarded.
  CVector from_matrix(const CMatrix& m) const;
  /// Matrix of ad(x) in the algebra basis.
  CMatrix ad_matrix(const CVector& x) const;

  /// max over basis triples of the Jacobi identity residual.
  double jacobi_residual() const;
  /// max over basis pairs of |abstract bracket - matrix commutator| in coordinates.
  double realization_residual() const;

  bool same_as(const SimpleLieAlgebra& other) const { return label_ == other.label_; }

 private:
  friend std::shared_ptr<const SimpleLieAlgebra> build_algebra(std::string_view label);
  SimpleLieAlgebra() = default;

  std::string label_;
  int rank_ = 0;
  int dim_ = 0;
  std::vector<std::string> basis_labels_;
  std::vector<PositiveRoot> roots_;
  std::vector<CMatrix> basis_matrices_;
  std::vector<StructureConstant> constants_;
  std::vector<std::vector<std::pair<int, StructureConstant>>> by_first_;  // constants grouped by i
  double bracket_constant_ = 0.0;
};

using AlgebraPtr = std::shared_ptr<const SimpleLieAlgebra>;

/// Supported labels: A1, A2, A3, A4. Throws UnsupportedAlgebra otherwise.
AlgebraPtr build_algebra(std::string_view label);

/// C = sum_{i,j,k} |c^k_{ij}|, the constant of ||[x,y]|| <= C ||x|| ||y||.
double bracket_bound_constant(const SimpleLieAlgebra& alg);

class AlgebraElement {
 public:
  AlgebraElement(AlgebraPtr alg, CVector coeffs);
  static AlgebraElement zero(AlgebraPtr alg);
  static AlgebraElement basis(AlgebraPtr alg, int i);

  const AlgebraPtr& algebra() const { return alg_; }
  const CVector& coeffs() const { return coeffs_; }
  Complex operator[](int i) const { return coeffs_(i); }

  AlgebraElement operator+(const AlgebraElement& other) const;
  AlgebraElement operator-(const AlgebraElement& other) const;
  AlgebraElement operator*(Complex s) const;
  friend AlgebraElement operator*(Complex s, const AlgebraElement& x) { return x * s; }

 private:
  AlgebraPtr alg_;
  CVector coeffs_;
};

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

/// max_i |x^i|.
double norm_max(const AlgebraElement& x);
double norm_max(const CVector& x);

/// Matrix of the defining representation. Any invertible matrix is accepted
/// (Ad factors through the projective group); use is_special() for SL checks.
class GroupElement {
 public:
  explicit GroupElement(CMatrix m);
  static GroupElement identity(int n);

  const CMatrix& matrix() const { return m_; }
  int size() const { return static_cast<int>(m_.rows()); }
  Complex determinant() const { return m_.determinant(); }
  bool is_special(double tol = 1e-10) const { return std::abs(determinant() - 1.0) <= tol; }

 private:
  CMatrix m_;
};

class AlgebraAutomorphism {
 public:
  /// Validates size, invertibility and bracket preservation (within tol scaled
  /// by the squared entry magnitude). The zero matrix is rejected here.
  AlgebraAutomorphism(AlgebraPtr alg, CMatrix m, double tol = kDefaultTol);
  static AlgebraAutomorphism identity(AlgebraPtr alg);

  const AlgebraPtr& algebra() const { return alg_; }
  const CMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

  CVector apply(const CVector& x) const { return m_ * x; }
  AlgebraElement apply(const AlgebraElement& x) const;

  AlgebraAutomorphism inverse() const;
  /// (*this) o other
  AlgebraAutomorphism compose(const AlgebraAutomorphism& other) const;
  AlgebraAutomorphism power(int k) const;

  /// max over basis pairs of ||a[e_i,e_j] - [a e_i, a e_j]||.
  double bracket_preservation_residual() const;

 private:
  struct Trusted {};
  AlgebraAutomorphism(AlgebraPtr alg, CMatrix m, Trusted) : alg_(std::move(alg)), m_(std::move(m)) {}

  AlgebraPtr alg_;
  CMatrix m_;
};

/// Ad(g): x -> g x g^{-1}.
AlgebraAutomorphism inner_automorphism(const AlgebraPtr& alg, const GroupElement& g);

/// The order-2 outer automorphism x -> -x^T. Throws NoOuterAutomorphism for A1.
AlgebraAutomorphism diagram_automorphism(const AlgebraPtr& alg);

std::optional<int> automorphism_order(const AlgebraAutomorphism& a, int k_max, double tol = kDefaultTol);

/// ||a^K - id||_max.
double order_residual(const AlgebraAutomorphism& a, int K);

struct Eigenspace {
  int m;           // class in Z_K; eigenvalue eps_K^m
  CMatrix basis;   // dim x d, orthonormal columns in canonical echelon form
  CMatrix projector;
};

/// Decomposition of g into eigenspaces of a (a^K = id) by projection averaging
/// P_m = (1/K) sum_l eps_K^{-ml} a^l. Entries are listed for m = 0..K-1,
/// including zero-dimensional ones.
std::vector<Eigenspace> eigenspace_gradation(const AlgebraAutomorphism& a, int K, double tol = kDefaultTol);

/// max residual of [g_m, g_n] subset g_{m+n mod K} over basis vectors.
double gradation_bracket_residual(const SimpleLieAlgebra& alg, const std::vector<Eigenspace>& spaces);

/// The group-level automorphism of SL(N) belonging to an algebra automorphism:
/// inner: g -> h g h^{-1}; outer: g -> h (g^T)^{-1} h^{-1}, with a(x) = -h x^T h^{-1}.
struct GroupLift {
  CMatrix h;  // det h = 1
  bool outer = false;
};

GroupLift lift_to_group(const AlgebraAutomorphism& a, double tol = 1e-8);
CMatrix apply_group(const GroupLift& lift, const CMatrix& g);
CMatrix apply_group_inverse(const GroupLift& lift, const CMatrix& g);

/// Orthonormal basis of the column space of `spanning`, canonicalised so that
/// the result depends only on the subspace: reduced echelon form followed by
/// Gram-Schmidt, pivots real positive.
CMatrix canonical_basis(const CMatrix& spanning, double tol);

/// exp of a square complex matrix (scaling and squaring, Pade).
CMatrix matrix_exp(const CMatrix& m);

double max_abs(const CMatrix& m);

}  // namespace loopgrad
