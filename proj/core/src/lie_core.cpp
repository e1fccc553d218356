#include "loopgrad/lie_core.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "loopgrad/error.hpp"

namespace loopgrad {

namespace {

std::string root_label(char prefix, const PositiveRoot& r) {
  std::string s(1, prefix);
  for (int i = r.first; i < r.last; ++i) s += std::to_string(i + 1);
  return s;
}

}  // namespace

AlgebraPtr build_algebra(std::string_view label) {
  if (label.size() != 2 || label[0] != 'A' || label[1] < '1' || label[1] > '4') {
    fail(ErrorKind::UnsupportedAlgebra, "'" + std::string(label) + "' is not one of A1, A2, A3, A4");
  }
  std::shared_ptr<SimpleLieAlgebra> alg(new SimpleLieAlgebra());
  alg->label_ = std::string(label);
  alg->rank_ = label[1] - '0';
  const int n = alg->rank_;
  const int N = n + 1;

  for (int h = 1; h <= n; ++h) {
    for (int first = 0; first + h < N; ++first) alg->roots_.push_back({first, first + h});
  }
  const int nroots = static_cast<int>(alg->roots_.size());
  alg->dim_ = 2 * nroots + n;

  auto unit = [N](int r, int c) {
    CMatrix m = CMatrix::Zero(N, N);
    m(r, c) = 1.0;
    return m;
  };
  for (const auto& r : alg->roots_) {
    alg->basis_matrices_.push_back(unit(r.first, r.last));
    alg->basis_labels_.push_back(root_label('e', r));
  }
  for (int i = 0; i < n; ++i) {
    alg->basis_matrices_.push_back(unit(i, i) - unit(i + 1, i + 1));
    alg->basis_labels_.push_back("h" + std::to_string(i + 1));
  }
  for (const auto& r : alg->roots_) {
    alg->basis_matrices_.push_back(unit(r.last, r.first));
    alg->basis_labels_.push_back(root_label('f', r));
  }

  const int d = alg->dim_;
  alg->by_first_.resize(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const CMatrix& bi = alg->basis_matrices_[static_cast<std::size_t>(i)];
      const CMatrix& bj = alg->basis_matrices_[static_cast<std::size_t>(j)];
      const CVector c = alg->from_matrix(bi * bj - bj * bi);
      for (int k = 0; k < d; ++k) {
        if (c(k) != Complex(0.0)) {
          StructureConstant sc{i, j, k, c(k)};
          alg->constants_.push_back(sc);
          alg->by_first_[static_cast<std::size_t>(i)].push_back({j, sc});
          alg->bracket_constant_ += std::abs(c(k));
        }
      }
    }
  }
  return alg;
}

double bracket_bound_constant(const SimpleLieAlgebra& alg) {
  double c = 0.0;
  for (const auto& sc : alg.structure_constants()) c += std::abs(sc.value);
  return c;
}

int SimpleLieAlgebra::matrix_unit_index(int row, int col) const {
  for (std::size_t r = 0; r < roots_.size(); ++r) {
    if (roots_[r].first == row && roots_[r].last == col) return positive_root_index(static_cast<int>(r));
    if (roots_[r].first == col && roots_[r].last == row) return negative_root_index(static_cast<int>(r));
  }
  fail(ErrorKind::NumericalFailure, "no matrix unit E_{" + std::to_string(row) + "," + std::to_string(col) + "}");
}

CVector SimpleLieAlgebra::bracket(const CVector& x, const CVector& y) const {
  CVector out = CVector::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    const Complex xi = x(i);
    if (xi == Complex(0.0)) continue;
    for (const auto& [j, sc] : by_first_[static_cast<std::size_t>(i)]) out(sc.k) += sc.value * xi * y(j);
  }
  return out;
}

CMatrix SimpleLieAlgebra::to_matrix(const CVector& x) const {
  const int N = defining_dim();
  CMatrix m = CMatrix::Zero(N, N);
  const int nroots = static_cast<int>(roots_.size());
  for (int r = 0; r < nroots; ++r) {
    m(roots_[static_cast<std::size_t>(r)].first, roots_[static_cast<std::size_t>(r)].last) += x(positive_root_index(r));
    m(roots_[static_cast<std::size_t>(r)].last, roots_[static_cast<std::size_t>(r)].first) += x(negative_root_index(r));
  }
  for (int i = 0; i < rank_; ++i) {
    m(i, i) += x(cartan_index(i));
    m(i + 1, i + 1) -= x(cartan_index(i));
  }
  return m;
}

CVector SimpleLieAlgebra::from_matrix(const CMatrix& m) const {
  const int N = defining_dim();
  CVector x = CVector::Zero(dim_);
  const int nroots = static_cast<int>(roots_.size());
  for (int r = 0; r < nroots; ++r) {
    x(positive_root_index(r)) = m(roots_[static_cast<std::size_t>(r)].first, roots_[static_cast<std::size_t>(r)].last);
    x(negative_root_index(r)) = m(roots_[static_cast<std::size_t>(r)].last, roots_[static_cast<std::size_t>(r)].first);
  }
  const Complex mean = m.trace() / static_cast<double>(N);
  Complex running = 0.0;
  for (int i = 0; i < rank_; ++i) {
    running += m(i, i) - mean;
    x(cartan_index(i)) = running;
  }
  return x;
}

CMatrix SimpleLieAlgebra::ad_matrix(const CVector& x) const {
  CMatrix ad = CMatrix::Zero(dim_, dim_);
  for (const auto& sc : constants_) {
    if (x(sc.i) != Complex(0.0)) ad(sc.k, sc.j) += x(sc.i) * sc.value;
  }
  return ad;
}

double SimpleLieAlgebra::jacobi_residual() const {
  // ad is a representation iff the Jacobi identity holds on all basis triples.
  std::vector<CMatrix> ads;
  ads.reserve(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) ads.push_back(ad_matrix(CVector::Unit(dim_, i)));
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      const CVector bij = bracket(CVector::Unit(dim_, i), CVector::Unit(dim_, j));
      const CMatrix lhs = ads[static_cast<std::size_t>(i)] * ads[static_cast<std::size_t>(j)] -
                          ads[static_cast<std::size_t>(j)] * ads[static_cast<std::size_t>(i)];
      worst = std::max(worst, max_abs(lhs - ad_matrix(bij)));
    }
  }
  return worst;
}

double SimpleLieAlgebra::realization_residual() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j < dim_; ++j) {
      const CMatrix& bi = basis_matrices_[static_cast<std::size_t>(i)];
      const CMatrix& bj = basis_matrices_[static_cast<std::size_t>(j)];
      const CMatrix abstract = to_matrix(bracket(CVector::Unit(dim_, i), CVector::Unit(dim_, j)));
      worst = std::max(worst, max_abs(abstract - (bi * bj - bj * bi)));
    }
  }
  return worst;
}

// --- elements ---------------------------------------------------------------

AlgebraElement::AlgebraElement(AlgebraPtr alg, CVector coeffs) : alg_(std::move(alg)), coeffs_(std::move(coeffs)) {
  if (!alg_ || coeffs_.size() != alg_->dim()) {
    fail(ErrorKind::AlgebraMismatch, "coordinate vector length does not match algebra dimension");
  }
}

AlgebraElement AlgebraElement::zero(AlgebraPtr alg) {
  const int d = alg->dim();
  return AlgebraElement(std::move(alg), CVector::Zero(d));
}

AlgebraElement AlgebraElement::basis(AlgebraPtr alg, int i) {
  const int d = alg->dim();
  return AlgebraElement(std::move(alg), CVector::Unit(d, i));
}

namespace {
void require_same(const AlgebraPtr& a, const AlgebraPtr& b) {
  if (a != b && !a->same_as(*b)) fail(ErrorKind::AlgebraMismatch, a->label() + " vs " + b->label());
}
}  // namespace

AlgebraElement AlgebraElement::operator+(const AlgebraElement& other) const {
  require_same(alg_, other.alg_);
  return AlgebraElement(alg_, coeffs_ + other.coeffs_);
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& other) const {
  require_same(alg_, other.alg_);
  return AlgebraElement(alg_, coeffs_ - other.coeffs_);
}

AlgebraElement AlgebraElement::operator*(Complex s) const { return AlgebraElement(alg_, coeffs_ * s); }

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same(x.algebra(), y.algebra());
  return AlgebraElement(x.algebra(), x.algebra()->bracket(x.coeffs(), y.coeffs()));
}

double norm_max(const CVector& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }
double norm_max(const AlgebraElement& x) { return norm_max(x.coeffs()); }

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// --- group elements ---------------------------------------------------------

GroupElement::GroupElement(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) fail(ErrorKind::InvalidGroupElement, "matrix must be square and nonempty");
  Eigen::FullPivLU<CMatrix> lu(m_);
  if (!lu.isInvertible()) fail(ErrorKind::InvalidGroupElement, "matrix is not invertible");
}

GroupElement GroupElement::identity(int n) { return GroupElement(CMatrix::Identity(n, n)); }

// --- automorphisms ----------------------------------------------------------

AlgebraAutomorphism::AlgebraAutomorphism(AlgebraPtr alg, CMatrix m, double tol) : alg_(std::move(alg)), m_(std::move(m)) {
  const int d = alg_->dim();
  if (m_.rows() != d || m_.cols() != d) fail(ErrorKind::InvalidAutomorphism, "matrix size does not match algebra dimension");
  if (max_abs(m_) == 0.0) fail(ErrorKind::InvalidAutomorphism, "zero matrix");
  Eigen::FullPivLU<CMatrix> lu(m_);
  if (!lu.isInvertible()) fail(ErrorKind::InvalidAutomorphism, "matrix is not invertible");
  const double scale = std::max(1.0, max_abs(m_) * max_abs(m_));
  const double res = bracket_preservation_residual();
  if (res > tol * scale) {
    fail(ErrorKind::InvalidAutomorphism, "bracket preservation residual " + std::to_string(res));
  }
}

AlgebraAutomorphism AlgebraAutomorphism::identity(AlgebraPtr alg) {
  const int d = alg->dim();
  return AlgebraAutomorphism(std::move(alg), CMatrix::Identity(d, d), Trusted{});
}

AlgebraElement AlgebraAutomorphism::apply(const AlgebraElement& x) const {
  require_same(alg_, x.algebra());
  return AlgebraElement(alg_, m_ * x.coeffs());
}

AlgebraAutomorphism AlgebraAutomorphism::inverse() const { return AlgebraAutomorphism(alg_, m_.inverse(), Trusted{}); }

AlgebraAutomorphism AlgebraAutomorphism::compose(const AlgebraAutomorphism& other) const {
  require_same(alg_, other.alg_);
  return AlgebraAutomorphism(alg_, m_ * other.m_, Trusted{});
}

AlgebraAutomorphism AlgebraAutomorphism::power(int k) const {
  CMatrix base = k >= 0 ? m_ : CMatrix(m_.inverse());
  CMatrix out = CMatrix::Identity(dim(), dim());
  for (int i = 0; i < std::abs(k); ++i) out = base * out;
  return AlgebraAutomorphism(alg_, std::move(out), Trusted{});
}

double AlgebraAutomorphism::bracket_preservation_residual() const {
  const int d = dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const CVector lhs = m_ * alg_->bracket(CVector::Unit(d, i), CVector::Unit(d, j));
      const CVector rhs = alg_->bracket(m_.col(i), m_.col(j));
      worst = std::max(worst, norm_max(CVector(lhs - rhs)));
    }
  }
  return worst;
}

AlgebraAutomorphism inner_automorphism(const AlgebraPtr& alg, const GroupElement& g) {
  if (g.size() != alg->defining_dim()) {
    fail(ErrorKind::InvalidGroupElement, "expected a " + std::to_string(alg->defining_dim()) + "x" +
                                             std::to_string(alg->defining_dim()) + " matrix");
  }
  const CMatrix ginv = g.matrix().inverse();
  CMatrix m(alg->dim(), alg->dim());
  for (int j = 0; j < alg->dim(); ++j) m.col(j) = alg->from_matrix(g.matrix() * alg->basis_matrix(j) * ginv);
  return AlgebraAutomorphism(alg, std::move(m));
}

AlgebraAutomorphism diagram_automorphism(const AlgebraPtr& alg) {
  if (alg->rank() < 2) fail(ErrorKind::NoOuterAutomorphism, alg->label() + " diagram has no symmetry");
  CMatrix m(alg->dim(), alg->dim());
  for (int j = 0; j < alg->dim(); ++j) m.col(j) = alg->from_matrix(-alg->basis_matrix(j).transpose());
  return AlgebraAutomorphism(alg, std::move(m));
}

double order_residual(const AlgebraAutomorphism& a, int K) {
  CMatrix p = CMatrix::Identity(a.dim(), a.dim());
  for (int i = 0; i < K; ++i) p = a.matrix() * p;
  return max_abs(p - CMatrix::Identity(a.dim(), a.dim()));
}

std::optional<int> automorphism_order(const AlgebraAutomorphism& a, int k_max, double tol) {
  const CMatrix id = CMatrix::Identity(a.dim(), a.dim());
  CMatrix p = id;
  for (int k = 1; k <= k_max; ++k) {
    p = a.matrix() * p;
    if (max_abs(p - id) <= tol) return k;
  }
  return std::nullopt;
}

CMatrix canonical_basis(const CMatrix& spanning, double tol) {
  CMatrix rows = spanning.transpose();
  const Eigen::Index r = rows.rows();
  const Eigen::Index n = rows.cols();
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < n && rank < r; ++col) {
    Eigen::Index best = rank;
    double best_abs = 0.0;
    for (Eigen::Index p = rank; p < r; ++p) {
      if (std::abs(rows(p, col)) > best_abs) {
        best_abs = std::abs(rows(p, col));
        best = p;
      }
    }
    if (best_abs <= tol) continue;
    rows.row(rank).swap(rows.row(best));
    rows.row(rank) /= rows(rank, col);
    for (Eigen::Index p = 0; p < r; ++p) {
      if (p != rank && rows(p, col) != Complex(0.0)) rows.row(p) -= rows(p, col) * rows.row(rank);
    }
    ++rank;
  }
  CMatrix q(n, rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    CVector v = rows.row(j).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i < j; ++i) v -= q.col(i) * q.col(i).dot(v);
    }
    q.col(j) = v / v.norm();
  }
  return q;
}

std::vector<Eigenspace> eigenspace_gradation(const AlgebraAutomorphism& a, int K, double tol) {
  if (K < 1) fail(ErrorKind::NotFiniteOrder, "K must be positive");
  const double res = order_residual(a, K);
  if (res > tol) fail(ErrorKind::NotFiniteOrder, "||a^K - id|| = " + std::to_string(res) + " for K = " + std::to_string(K));
  const int d = a.dim();
  std::vector<CMatrix> powers;
  powers.push_back(CMatrix::Identity(d, d));
  for (int l = 1; l < K; ++l) powers.push_back(a.matrix() * powers.back());

  std::vector<Eigenspace> out;
  int total = 0;
  for (int m = 0; m < K; ++m) {
    CMatrix p = CMatrix::Zero(d, d);
    for (int l = 0; l < K; ++l) p += std::polar(1.0, -2.0 * kPi * m * l / K) * powers[static_cast<std::size_t>(l)];
    p /= static_cast<double>(K);
    const double tr = p.trace().real();
    const int rank = static_cast<int>(std::lround(tr));
    if (std::abs(tr - rank) > 1e-6 || std::abs(p.trace().imag()) > 1e-6) {
      fail(ErrorKind::NumericalFailure, "projector trace " + std::to_string(tr) + " is not an integer");
    }
    CMatrix basis = rank > 0 ? canonical_basis(p, 1e-7 * std::max(1.0, max_abs(p))) : CMatrix(d, 0);
    if (basis.cols() != rank) fail(ErrorKind::NumericalFailure, "defective eigenstructure for class " + std::to_string(m));
    const Complex eig = std::polar(1.0, 2.0 * kPi * m / K);
    if (rank > 0 && max_abs(a.matrix() * basis - eig * basis) > std::sqrt(tol) * std::max(1.0, max_abs(a.matrix()))) {
      fail(ErrorKind::NumericalFailure, "eigenspace residual too large for class " + std::to_string(m));
    }
    total += rank;
    out.push_back({m, std::move(basis), std::move(p)});
  }
  if (total != d) fail(ErrorKind::NumericalFailure, "eigenspace dimensions sum to " + std::to_string(total));
  return out;
}

double gradation_bracket_residual(const SimpleLieAlgebra& alg, const std::vector<Eigenspace>& spaces) {
  const int K = static_cast<int>(spaces.size());
  double worst = 0.0;
  for (const auto& sm : spaces) {
    for (const auto& sn : spaces) {
      const auto& target = spaces[static_cast<std::size_t>((sm.m + sn.m) % K)];
      for (Eigen::Index i = 0; i < sm.basis.cols(); ++i) {
        for (Eigen::Index j = 0; j < sn.basis.cols(); ++j) {
          const CVector b = alg.bracket(sm.basis.col(i), sn.basis.col(j));
          worst = std::max(worst, norm_max(CVector(b - target.projector * b)));
        }
      }
    }
  }
  return worst;
}

// --- group lift -------------------------------------------------------------

namespace {

// Solves M_j h + s * h N_j = 0 for all j, returning the normalised null vector.
std::optional<CMatrix> intertwiner(const AlgebraAutomorphism& a, bool outer, double tol) {
  const auto& alg = *a.algebra();
  const int N = alg.defining_dim();
  const int d = alg.dim();
  const CMatrix id = CMatrix::Identity(N, N);
  CMatrix system(static_cast<Eigen::Index>(d) * N * N, N * N);
  for (int j = 0; j < d; ++j) {
    const CMatrix aj = alg.to_matrix(a.matrix().col(j));
    const CMatrix& bj = alg.basis_matrix(j);
    CMatrix block = outer ? CMatrix(Eigen::kroneckerProduct(id, aj) + Eigen::kroneckerProduct(bj, id))
                          : CMatrix(Eigen::kroneckerProduct(id, aj) - Eigen::kroneckerProduct(bj.transpose(), id));
    system.middleRows(static_cast<Eigen::Index>(j) * N * N, N * N) = block;
  }
  Eigen::JacobiSVD<CMatrix> svd(system, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smin > tol * std::max(1.0, smax)) return std::nullopt;
  CVector v = svd.matrixV().col(N * N - 1);
  CMatrix h = Eigen::Map<CMatrix>(v.data(), N, N);
  const Complex det = h.determinant();
  if (std::abs(det) < 1e-300) return std::nullopt;
  h /= std::pow(det, 1.0 / N);
  return h;
}

}  // namespace

GroupLift lift_to_group(const AlgebraAutomorphism& a, double tol) {
  if (auto h = intertwiner(a, false, tol)) return {*h, false};
  if (a.algebra()->rank() >= 2) {
    if (auto h = intertwiner(a, true, tol)) return {*h, true};
  }
  fail(ErrorKind::NumericalFailure, "automorphism has no group lift within tolerance");
}

CMatrix apply_group(const GroupLift& lift, const CMatrix& g) {
  const CMatrix hinv = lift.h.inverse();
  if (!lift.outer) return lift.h * g * hinv;
  return lift.h * g.transpose().inverse() * hinv;
}

CMatrix apply_group_inverse(const GroupLift& lift, const CMatrix& g) {
  const CMatrix hinv = lift.h.inverse();
  const CMatrix inner = hinv * g * lift.h;
  if (!lift.outer) return inner;
  return inner.transpose().inverse();
}

CMatrix matrix_exp(const CMatrix& m) { return m.exp(); }

}  // namespace loopgrad
