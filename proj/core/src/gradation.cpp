#include "loopgrad/gradation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "loopgrad/error.hpp"

namespace loopgrad {

// --- vector fields ----------------------------------------------------------

VectorFieldK::VectorFieldK(int K, std::map<int, Complex> harmonics) : K_(K) {
  if (K_ < 1) fail(ErrorKind::SchemaError, "vector field K must be positive");
  double scale = 0.0;
  for (const auto& [n, c] : harmonics) scale = std::max(scale, std::abs(c));
  for (const auto& [n, c] : harmonics) {
    auto it = harmonics.find(-n);
    const Complex partner = it == harmonics.end() ? Complex(0.0) : it->second;
    if (std::abs(c - std::conj(partner)) > 1e-12 * std::max(1.0, scale)) {
      fail(ErrorKind::SchemaError, "vector field is not real: v_" + std::to_string(n) + " != conj(v_" + std::to_string(-n) + ")");
    }
  }
  for (const auto& [n, c] : harmonics) {
    if (c != Complex(0.0)) v_.emplace(n, n == 0 ? Complex(c.real(), 0.0) : c);
  }
}

VectorFieldK VectorFieldK::constant(int K, double c) { return VectorFieldK(K, {{0, Complex(c)}}); }

VectorFieldK VectorFieldK::from_real_series(int K, double c0, std::span<const std::pair<double, double>> ab) {
  std::map<int, Complex> v{{0, Complex(c0)}};
  for (std::size_t i = 0; i < ab.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    const Complex c(0.5 * ab[i].first, -0.5 * ab[i].second);
    v[n] = c;
    v[-n] = std::conj(c);
  }
  return VectorFieldK(K, std::move(v));
}

Complex VectorFieldK::coefficient(int n) const {
  auto it = v_.find(n);
  return it == v_.end() ? Complex(0.0) : it->second;
}

int VectorFieldK::max_harmonic() const {
  int m = 0;
  for (const auto& [n, c] : v_) m = std::max(m, std::abs(n));
  return m;
}

double VectorFieldK::operator()(double s) const {
  double out = 0.0;
  for (const auto& [n, c] : v_) out += (c * std::polar(1.0, n * K_ * s)).real();
  return out;
}

bool VectorFieldK::is_constant() const { return max_harmonic() == 0; }

VectorFieldK VectorFieldK::reflected() const {
  std::map<int, Complex> out;
  for (const auto& [n, c] : v_) out.emplace(-n, -c);
  return VectorFieldK(K_, std::move(out));
}

VectorFieldReport validate_vector_field(const VectorFieldK& X) {
  if (X.is_zero()) {
    fail(ErrorKind::ZeroFieldInfiniteDimensional,
         "X = 0: then |k| <= C ||eta||_1 on every nonzero grading subspace, which must be infinite-dimensional");
  }
  double scale = 0.0;
  for (const auto& [n, c] : X.harmonics()) scale += std::abs(c);
  const int M = std::max(1024, 64 * X.max_harmonic());
  const double T = 2.0 * kPi / X.K();
  const double h = T / M;
  double prev = X(0.0);
  const int sign = prev > 0 ? 1 : -1;
  double best = std::abs(prev);
  int arg = 0;
  for (int i = 1; i <= M; ++i) {
    const double v = X(i * h);
    if (v == 0.0 || (v > 0) != (prev > 0)) {
      fail(ErrorKind::FieldHasZeros, "v changes sign near s = " + std::to_string(i * h));
    }
    if (std::abs(v) < best) {
      best = std::abs(v);
      arg = i;
    }
    prev = v;
  }
  // golden-section refinement of min |v| around the grid argmin
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = (arg - 1) * h;
  double b = (arg + 1) * h;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = std::abs(X(c));
  double fd = std::abs(X(d));
  for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc; c = b - phi * (b - a); fc = std::abs(X(c));
    } else {
      a = c; c = d; fc = fd; d = a + phi * (b - a); fd = std::abs(X(d));
    }
  }
  best = std::min({best, fc, fd});
  if (best <= 1e-12 * std::max(1.0, scale)) {
    fail(ErrorKind::FieldHasZeros, "min |v| = " + std::to_string(best));
  }
  return {best, sign};
}

// --- grading operators ------------------------------------------------------

GradingOperator::GradingOperator(VectorFieldK X, LoopElement eta) : X_(std::move(X)), eta_(std::move(eta)) {
  if (X_.K() != eta_.twist()->K()) {
    fail(ErrorKind::TwistMismatch, "vector field period 2pi/" + std::to_string(X_.K()) + " differs from the twist order");
  }
}

GradingOperator GradingOperator::standard(const TwistPtr& twist) {
  return GradingOperator(VectorFieldK::constant(twist->K(), 1.0), LoopElement::zero(twist));
}

LoopElement apply_vector_field(const VectorFieldK& X, const LoopElement& xi) {
  if (X.K() != xi.twist()->K()) fail(ErrorKind::TwistMismatch, "vector field K differs from the twist order");
  const int K = X.K();
  ModeMap out;
  for (const auto& [n, c] : X.harmonics()) {
    for (const auto& [k, x] : xi.modes()) {
      CVector y = (c * Complex(0.0, k)) * x;
      auto [it, inserted] = out.try_emplace(k + n * K, y);
      if (!inserted) it->second += y;
    }
  }
  return LoopElement::trusted(xi.twist(), std::move(out));
}

LoopElement apply_grading_operator(const GradingOperator& Q, const LoopElement& xi) {
  return apply_vector_field(Q.X(), xi) * Complex(0.0, -1.0) + loop_bracket(Q.eta(), xi) * kI;
}

DerivationReport check_derivation(const LoopOperator& Q, std::span<const std::pair<LoopElement, LoopElement>> pairs,
                                  double tol) {
  DerivationReport rep;
  for (const auto& [x, y] : pairs) {
    const LoopElement lhs = Q(loop_bracket(x, y));
    const LoopElement rhs = loop_bracket(Q(x), y) + loop_bracket(x, Q(y));
    const double r = seminorm(lhs - rhs, 1);
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  rep.ok = rep.max_residual < tol;
  return rep;
}

DerivationReport check_derivation(const GradingOperator& Q, std::span<const std::pair<LoopElement, LoopElement>> pairs,
                                  double tol) {
  return check_derivation([&Q](const LoopElement& x) { return apply_grading_operator(Q, x); }, pairs, tol);
}

Derivation::Derivation(VectorFieldK X, LoopElement eta) : X_(std::move(X)), eta_(std::move(eta)) {
  if (X_.K() != eta_.twist()->K()) fail(ErrorKind::TwistMismatch, "vector field K differs from the twist order");
}

LoopElement Derivation::operator()(const LoopElement& xi) const {
  if (!same_twist(*xi.twist(), *eta_.twist())) fail(ErrorKind::TwistMismatch, "argument lives in another loop algebra");
  return loop_bracket(eta_, xi) - apply_vector_field(X_, xi);
}

GradingOperator Derivation::grading_operator() const { return GradingOperator(X_, eta_); }

Derivation derivation_from_pair(VectorFieldK X, LoopElement eta) { return Derivation(std::move(X), std::move(eta)); }

// --- grading subspaces ------------------------------------------------------

int GradationTable::total_dim() const {
  int n = 0;
  for (const auto& e : entries) n += static_cast<int>(e.basis.size());
  return n;
}

const GradationEntry* GradationTable::find(int degree) const {
  for (const auto& e : entries) {
    if (e.degree == degree) return &e;
  }
  return nullptr;
}

CVector to_window_vector(const LoopElement& xi, int N) {
  const int d = xi.algebra()->dim();
  CVector out = CVector::Zero((2 * N + 1) * d);
  for (const auto& [k, x] : xi.modes()) {
    if (std::abs(k) > N) fail(ErrorKind::WindowLeakage, "mode " + std::to_string(k) + " outside window " + std::to_string(N));
    out.segment((k + N) * d, d) = x;
  }
  return out;
}

LoopElement from_window_vector(const TwistPtr& twist, const CVector& v, int N) {
  const int d = twist->algebra()->dim();
  ModeMap modes;
  for (int k = -N; k <= N; ++k) {
    CVector x = v.segment((k + N) * d, d);
    if (norm_max(x) > 0.0) modes.emplace(k, std::move(x));
  }
  return LoopElement::trusted(twist, std::move(modes));
}

namespace {

CMatrix window_basis(const TwistData& twist, int N) {
  const int d = twist.algebra()->dim();
  int cols = 0;
  for (int k = -N; k <= N; ++k) cols += static_cast<int>(twist.eigenbasis(k).cols());
  CMatrix B = CMatrix::Zero((2 * N + 1) * d, cols);
  int c = 0;
  for (int k = -N; k <= N; ++k) {
    const CMatrix& e = twist.eigenbasis(k);
    B.block((k + N) * d, c, d, e.cols()) = e;
    c += static_cast<int>(e.cols());
  }
  return B;
}

}  // namespace

GradationTable grading_subspaces(const GradingOperator& Q, int N, double tol) {
  if (N < 0) fail(ErrorKind::SchemaError, "window radius must be nonnegative");
  validate_vector_field(Q.X());
  if (!Q.X().is_constant()) {
    fail(ErrorKind::WindowLeakage, "non-constant v does not preserve a finite mode window; rectify the vector field first");
  }
  const TwistPtr& tw = Q.twist();
  const int d = tw->algebra()->dim();
  const CMatrix B = window_basis(*tw, N);
  const int n = static_cast<int>(B.cols());

  GradationTable table;
  table.twist = tw;
  table.window = N;

  CMatrix A(B.rows(), n);
  double leakage = 0.0;
  for (int j = 0; j < n; ++j) {
    const LoopElement xi = from_window_vector(tw, B.col(j), N);
    const LoopElement q = apply_grading_operator(Q, xi);
    CVector col = CVector::Zero(B.rows());
    for (const auto& [k, x] : q.modes()) {
      if (std::abs(k) > N) leakage = std::max(leakage, norm_max(x));
      else col.segment((k + N) * d, d) = x;
    }
    A.col(j) = col;
  }
  const CMatrix Qm = B.adjoint() * A;
  leakage = std::max(leakage, max_abs(A - B * Qm));
  table.leakage = leakage;
  const double scale = std::max(1.0, max_abs(Qm));
  if (leakage > 1e-9 * scale) {
    fail(ErrorKind::WindowLeakage, "Q maps the window |k| <= " + std::to_string(N) + " outside itself (leakage " + std::to_string(leakage) + ")");
  }
  if (n == 0) return table;

  Eigen::ComplexEigenSolver<CMatrix> es(Qm, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "eigenvalue computation failed");
  std::map<int, double> deviation;
  for (int i = 0; i < n; ++i) {
    const Complex lam = es.eigenvalues()(i);
    const double r = std::round(lam.real());
    const double dev = std::abs(lam - r);
    if (dev > tol) {
      fail(ErrorKind::NonIntegerSpectrum, "eigenvalue " + std::to_string(lam.real()) + (lam.imag() >= 0 ? "+" : "") +
                                              std::to_string(lam.imag()) + "i is not an integer");
    }
    double& slot = deviation[static_cast<int>(r)];
    slot = std::max(slot, dev);
  }

  std::vector<CMatrix> blocks;
  int total = 0;
  for (const auto& [deg, dev] : deviation) {
    CMatrix M = Qm - static_cast<double>(deg) * CMatrix::Identity(n, n);
    Eigen::BDCSVD<CMatrix> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int null = 0;
    for (int i = 0; i < n; ++i) {
      if (s(i) <= tol * scale) ++null;
    }
    const CMatrix kernel = svd.matrixV().rightCols(null);
    const CMatrix basis = canonical_basis(B * kernel, 1e-9);
    GradationEntry entry;
    entry.degree = deg;
    entry.eigenvalue_deviation = dev;
    for (int c = 0; c < basis.cols(); ++c) {
      entry.basis.push_back(from_window_vector(tw, basis.col(c), N));
      const CVector w = B.adjoint() * basis.col(c);
      entry.residual = std::max(entry.residual, norm_max(CVector(Qm * w - static_cast<double>(deg) * w)));
      table.column_degree.push_back(deg);
    }
    table.max_residual = std::max(table.max_residual, entry.residual);
    table.max_eigenvalue_deviation = std::max(table.max_eigenvalue_deviation, dev);
    total += static_cast<int>(basis.cols());
    blocks.push_back(basis);
    table.entries.push_back(std::move(entry));
  }
  if (total != n) {
    fail(ErrorKind::DefectiveOperator,
         "eigenspaces span " + std::to_string(total) + " of " + std::to_string(n) + " window dimensions");
  }
  table.window_basis = B;
  table.graded_basis = CMatrix(B.rows(), n);
  int c = 0;
  for (const auto& b : blocks) {
    table.graded_basis.middleCols(c, b.cols()) = b;
    c += static_cast<int>(b.cols());
  }
  table.coordinates = Eigen::PartialPivLU<CMatrix>(CMatrix(B.adjoint() * table.graded_basis));
  return table;
}

std::map<int, LoopElement> decompose(const LoopElement& xi, const GradationTable& table) {
  if (!same_twist(*xi.twist(), *table.twist)) fail(ErrorKind::TwistMismatch, "element and table have different twists");
  const CVector a = to_window_vector(xi, table.window);
  const CVector c = table.coordinates.solve(CVector(table.window_basis.adjoint() * a));
  std::map<int, LoopElement> out;
  const int n = static_cast<int>(c.size());
  int start = 0;
  while (start < n) {
    const int deg = table.column_degree[static_cast<std::size_t>(start)];
    int end = start;
    while (end < n && table.column_degree[static_cast<std::size_t>(end)] == deg) ++end;
    const CVector part = table.graded_basis.middleCols(start, end - start) * c.segment(start, end - start);
    out.emplace(deg, from_window_vector(table.twist, part, table.window));
    start = end;
  }
  return out;
}

LoopElement flow(double tau, const LoopElement& xi, const GradationTable& table) {
  LoopElement out = LoopElement::zero(table.twist);
  for (const auto& [deg, part] : decompose(xi, table)) out = out + part * std::polar(1.0, -deg * tau);
  return out.retagged(xi.twist());
}

double gradation_bracket_residual(const GradationTable& table, const GradingOperator& Q) {
  std::vector<std::pair<int, const LoopElement*>> all;
  for (const auto& e : table.entries) {
    for (const auto& b : e.basis) all.emplace_back(e.degree, &b);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const LoopElement r = loop_bracket(*all[i].second, *all[j].second);
      if (r.is_zero() || r.max_abs_mode() > table.window) continue;
      const double deg = all[i].first + all[j].first;
      worst = std::max(worst, mode_norm(apply_grading_operator(Q, r) - r * Complex(deg)));
    }
  }
  return worst;
}

std::map<int, int> standard_dimensions(const TwistData& twist, int N) {
  std::map<int, int> out;
  for (int k = -N; k <= N; ++k) {
    const int dim = static_cast<int>(twist.eigenbasis(k).cols());
    if (dim > 0) out[k] = dim;
  }
  return out;
}

}  // namespace loopgrad
