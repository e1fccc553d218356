#include "loopgrad/loop_algebra.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "loopgrad/error.hpp"

namespace loopgrad {

// --- twist ------------------------------------------------------------------

TwistData::TwistData(AlgebraAutomorphism a, int K, double tol) : a_(std::move(a)), K_(K) {
  if (K_ < 1) fail(ErrorKind::NotFiniteOrder, "twist order K must be positive");
  const double res = order_residual(a_, K_);
  if (res > tol) fail(ErrorKind::NotFiniteOrder, "||a^K - id|| = " + std::to_string(res));
  spaces_ = eigenspace_gradation(a_, K_, tol);
  lift_ = lift_to_group(a_);
}

TwistPtr make_twist(AlgebraAutomorphism a, int K, double tol) {
  return std::make_shared<const TwistData>(std::move(a), K, tol);
}

TwistPtr untwisted(const AlgebraPtr& alg) { return make_twist(AlgebraAutomorphism::identity(alg), 1); }

bool same_twist(const TwistData& a, const TwistData& b) {
  if (&a == &b) return true;
  return a.algebra()->same_as(*b.algebra()) && a.K() == b.K() &&
         max_abs(a.automorphism().matrix() - b.automorphism().matrix()) <= 1e-12;
}

namespace {

void require_same_twist(const TwistPtr& a, const TwistPtr& b) {
  if (!same_twist(*a, *b)) fail(ErrorKind::TwistMismatch, "loop elements live in different twisted loop algebras");
}

}  // namespace

// --- loop elements ----------------------------------------------------------

LoopElement::LoopElement(TwistPtr twist, ModeMap modes) : twist_(std::move(twist)), modes_(std::move(modes)) {
  for (auto it = modes_.begin(); it != modes_.end();) {
    it = (it->second.size() == 0 || norm_max(it->second) == 0.0) ? modes_.erase(it) : std::next(it);
  }
}

LoopElement LoopElement::trusted(TwistPtr twist, ModeMap modes) { return LoopElement(std::move(twist), std::move(modes)); }

LoopElement LoopElement::make(TwistPtr twist, ModeMap modes, double tol) {
  const int d = twist->algebra()->dim();
  for (const auto& [k, x] : modes) {
    if (x.size() != d) fail(ErrorKind::AlgebraMismatch, "mode " + std::to_string(k) + " has wrong length");
    const double res = norm_max(CVector(twist->automorphism().matrix() * x - twist->eps(k) * x));
    if (res > tol * std::max(1.0, norm_max(x))) {
      fail(ErrorKind::TwistViolation, "mode k = " + std::to_string(k) + " residual " + std::to_string(res));
    }
  }
  return LoopElement(std::move(twist), std::move(modes));
}

LoopElement LoopElement::zero(TwistPtr twist) { return LoopElement(std::move(twist), {}); }

LoopElement LoopElement::monomial(TwistPtr twist, int k, const CVector& x, double tol) {
  return make(std::move(twist), ModeMap{{k, x}}, tol);
}

int LoopElement::max_abs_mode() const {
  int m = 0;
  for (const auto& [k, x] : modes_) m = std::max(m, std::abs(k));
  return m;
}

CVector LoopElement::mode(int k) const {
  auto it = modes_.find(k);
  return it == modes_.end() ? CVector(CVector::Zero(algebra()->dim())) : it->second;
}

LoopElement LoopElement::operator+(const LoopElement& other) const {
  require_same_twist(twist_, other.twist_);
  ModeMap out = modes_;
  for (const auto& [k, x] : other.modes_) {
    auto [it, inserted] = out.try_emplace(k, x);
    if (!inserted) it->second += x;
  }
  return LoopElement(twist_, std::move(out));
}

LoopElement LoopElement::operator-(const LoopElement& other) const { return *this + other * Complex(-1.0); }

LoopElement LoopElement::operator*(Complex s) const {
  ModeMap out;
  for (const auto& [k, x] : modes_) out.emplace(k, x * s);
  return LoopElement(twist_, std::move(out));
}

LoopElement LoopElement::derivative() const {
  ModeMap out;
  for (const auto& [k, x] : modes_) out.emplace(k, x * Complex(0.0, k));
  return LoopElement(twist_, std::move(out));
}

LoopElement LoopElement::reflected(TwistPtr inverse_twist) const {
  ModeMap out;
  for (const auto& [k, x] : modes_) out.emplace(-k, x);
  return LoopElement(std::move(inverse_twist), std::move(out));
}

LoopElement LoopElement::retagged(TwistPtr twist) const {
  require_same_twist(twist_, twist);
  return LoopElement(std::move(twist), modes_);
}

double LoopElement::twist_residual() const {
  double worst = 0.0;
  for (const auto& [k, x] : modes_) {
    worst = std::max(worst, norm_max(CVector(twist_->automorphism().matrix() * x - twist_->eps(k) * x)));
  }
  return worst;
}

double mode_norm(const LoopElement& x) {
  double s = 0.0;
  for (const auto& [k, v] : x.modes()) s += norm_max(v);
  return s;
}

LoopElement loop_bracket(const LoopElement& xi, const LoopElement& eta) {
  require_same_twist(xi.twist(), eta.twist());
  const auto& alg = *xi.algebra();
  ModeMap out;
  for (const auto& [k1, x] : xi.modes()) {
    for (const auto& [k2, y] : eta.modes()) {
      CVector b = alg.bracket(x, y);
      auto [it, inserted] = out.try_emplace(k1 + k2, b);
      if (!inserted) it->second += b;
    }
  }
  return LoopElement::trusted(xi.twist(), std::move(out));
}

CVector evaluate_derivative(const LoopElement& xi, double sigma, int order) {
  CVector out = CVector::Zero(xi.algebra()->dim());
  for (const auto& [k, x] : xi.modes()) {
    Complex w = std::polar(1.0, k * sigma);
    if (order > 0) w *= std::pow(Complex(0.0, k), order);
    out += w * x;
  }
  return out;
}

CVector evaluate(const LoopElement& xi, double sigma) { return evaluate_derivative(xi, sigma, 0); }

AlgebraElement evaluate_element(const LoopElement& xi, double sigma) {
  return AlgebraElement(xi.algebra(), evaluate(xi, sigma));
}

std::vector<double> uniform_grid(int M) {
  std::vector<double> g(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) g[static_cast<std::size_t>(j)] = 2.0 * kPi * j / M;
  return g;
}

std::vector<CVector> sample(const LoopElement& xi, int M) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(M));
  for (double s : uniform_grid(M)) out.push_back(evaluate(xi, s));
  return out;
}

ProjectionResult fourier_project(std::span<const CVector> samples, TwistPtr twist, int window,
                                 std::optional<double> tol) {
  const int M = static_cast<int>(samples.size());
  if (window < 0 || M < 2 * window + 1) {
    fail(ErrorKind::NumericalFailure, "grid of " + std::to_string(M) + " points cannot resolve window " + std::to_string(window));
  }
  const int d = twist->algebra()->dim();
  double scale = 0.0;
  for (const auto& s : samples) scale = std::max(scale, norm_max(s));

  // spectrum(i, idx) = sum_j s_j(i) e^{-2 pi i j idx / M}
  Eigen::FFT<double> fft;
  CMatrix spectrum(d, M);
  std::vector<Complex> in(static_cast<std::size_t>(M));
  std::vector<Complex> out;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < M; ++j) in[static_cast<std::size_t>(j)] = samples[static_cast<std::size_t>(j)](i);
    fft.fwd(out, in);
    for (int j = 0; j < M; ++j) spectrum(i, j) = out[static_cast<std::size_t>(j)] / static_cast<double>(M);
  }

  auto index_of = [M](int k) { return ((k % M) + M) % M; };
  std::vector<bool> in_window(static_cast<std::size_t>(M), false);
  ModeMap modes;
  const double prune = 1e-14 * std::max(1.0, scale);
  for (int k = -window; k <= window; ++k) {
    in_window[static_cast<std::size_t>(index_of(k))] = true;
    CVector x = twist->projector(k) * spectrum.col(index_of(k));
    if (norm_max(x) > prune) modes.emplace(k, std::move(x));
  }
  double truncation = 0.0;
  if (M > 2 * window + 1) {
    for (int j = 0; j < M; ++j) {
      if (!in_window[static_cast<std::size_t>(j)]) truncation = std::max(truncation, norm_max(CVector(spectrum.col(j))));
    }
  } else if (window > 0) {
    truncation = std::max(norm_max(CVector(spectrum.col(index_of(window)))),
                          norm_max(CVector(spectrum.col(index_of(-window)))));
  }
  if (tol && truncation > *tol) {
    fail(ErrorKind::TruncationWarning, "energy outside window " + std::to_string(window) + " is " + std::to_string(truncation));
  }
  return {LoopElement::trusted(std::move(twist), std::move(modes)), truncation};
}

// --- seminorms --------------------------------------------------------------

namespace {

double derivative_norm(const LoopElement& xi, double sigma, int j) {
  return norm_max(evaluate_derivative(xi, sigma, j));
}

double golden_max(const LoopElement& xi, int j, double lo, double hi) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = derivative_norm(xi, c, j);
  double fd = derivative_norm(xi, d, j);
  for (int it = 0; it < 60 && b - a > 1e-13; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = derivative_norm(xi, c, j);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = derivative_norm(xi, d, j);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

SeminormEstimate seminorm_estimate(const LoopElement& xi, int m) {
  if (m < 1) fail(ErrorKind::NumericalFailure, "seminorm order must be >= 1");
  SeminormEstimate est;
  if (xi.is_zero()) return est;
  const int grid = std::max(256, 8 * std::max(1, xi.max_abs_mode()) * m);
  const double h = 2.0 * kPi / grid;
  const int n = static_cast<int>(xi.modes().size());
  CMatrix X(xi.algebra()->dim(), n);
  CMatrix P(n, grid);
  std::vector<int> ks;
  for (const auto& [k, x] : xi.modes()) {
    const int c = static_cast<int>(ks.size());
    X.col(c) = x;
    for (int i = 0; i < grid; ++i) P(c, i) = std::polar(1.0, k * i * h);
    ks.push_back(k);
  }
  CMatrix D = X;
  for (int j = 0; j < m; ++j) {
    if (j > 0) {
      for (int c = 0; c < n; ++c) D.col(c) *= Complex(0.0, ks[static_cast<std::size_t>(c)]);
    }
    const Eigen::RowVectorXd col_max = (D * P).cwiseAbs().colwise().maxCoeff();
    Eigen::Index at = 0;
    const double best = col_max.maxCoeff(&at);
    const double arg = static_cast<double>(at) * h;
    est.value = std::max({est.value, best, golden_max(xi, j, arg - h, arg + h)});
    double ub = 0.0;
    for (int c = 0; c < n; ++c) ub += std::pow(std::abs(static_cast<double>(ks[static_cast<std::size_t>(c)])), j) * norm_max(CVector(X.col(c)));
    est.upper_bound = std::max(est.upper_bound, ub);
  }
  return est;
}

double seminorm(const LoopElement& xi, int m) { return seminorm_estimate(xi, m).value; }

BracketBoundReport check_bracket_bound(const LoopElement& xi, const LoopElement& eta, int m) {
  const double C = xi.algebra()->bracket_constant();
  BracketBoundReport r;
  r.lhs = seminorm(loop_bracket(xi, eta), m);
  r.rhs = std::ldexp(1.0, m - 1) * C * seminorm(xi, m) * seminorm(eta, m);
  r.ok = r.lhs <= r.rhs * (1.0 + 1e-14);
  return r;
}

// --- absolute convergence ---------------------------------------------------

ConvergenceReport absolute_convergence_check(const ModeSequence& seq, int m_max, const ConvergenceOptions& opts) {
  if (m_max < 1) fail(ErrorKind::NumericalFailure, "m_max must be >= 1");
  ConvergenceReport rep;
  rep.sums.assign(static_cast<std::size_t>(m_max), 0.0);
  rep.last_ratio.assign(static_cast<std::size_t>(m_max), 0.0);

  auto term_norm = [&](int k, int j) {
    return std::pow(std::abs(static_cast<double>(k)), j) * norm_max(seq.mode(k));
  };

  int limit = 0;
  if (seq.support_radius) {
    limit = *seq.support_radius;
    for (int j = 0; j < m_max; ++j) {
      double s = 0.0;
      for (int k = -limit; k <= limit; ++k) s += term_norm(k, j);
      rep.sums[static_cast<std::size_t>(j)] = s;
    }
    rep.convergent = true;
  } else {
    // Block sums B_l = sum over N_l < |k| <= 2 N_l; a Cauchy net has B_l -> 0.
    std::vector<std::vector<double>> blocks(static_cast<std::size_t>(m_max));
    for (int j = 0; j < m_max; ++j) {
      double s = 0.0;
      for (int k = -opts.first_block; k <= opts.first_block; ++k) s += term_norm(k, j);
      rep.sums[static_cast<std::size_t>(j)] = s;
    }
    for (int n = opts.first_block; 2 * n <= opts.max_terms; n *= 2) {
      for (int j = 0; j < m_max; ++j) {
        double b = 0.0;
        for (int k = n + 1; k <= 2 * n; ++k) b += term_norm(k, j) + term_norm(-k, j);
        blocks[static_cast<std::size_t>(j)].push_back(b);
        rep.sums[static_cast<std::size_t>(j)] += b;
      }
      limit = 2 * n;
    }
    rep.convergent = true;
    for (int j = 0; j < m_max; ++j) {
      const auto& bl = blocks[static_cast<std::size_t>(j)];
      const double total = rep.sums[static_cast<std::size_t>(j)];
      const std::size_t L = bl.size();
      if (L < 3) fail(ErrorKind::NumericalFailure, "too few dyadic blocks for a convergence decision");
      const double last = bl[L - 1];
      const double r1 = bl[L - 2] > 0 ? last / bl[L - 2] : 0.0;
      const double r2 = bl[L - 3] > 0 ? bl[L - 2] / bl[L - 3] : 0.0;
      rep.last_ratio[static_cast<std::size_t>(j)] = r1;
      const bool negligible = last <= 1e-14 * std::max(1.0, total);
      const bool contracting = r1 <= opts.ratio_threshold && r2 <= opts.ratio_threshold;
      if (!negligible && !contracting) {
        rep.convergent = false;
        fail(ErrorKind::NotAbsolutelyConvergent,
             "derivative order " + std::to_string(j) + ": dyadic block ratio " + std::to_string(r1) +
                 " does not contract (block sum " + std::to_string(last) + ")");
      }
    }
  }
  rep.terms = limit;

  // Regrouping: ascending |k| versus residue classes mod 3.
  const double s = opts.sample_point;
  for (int j = 0; j < m_max; ++j) {
    auto weighted = [&](int k) -> CVector {
      Complex w = std::polar(1.0, k * s);
      if (j > 0) w *= std::pow(Complex(0.0, k), j);
      return w * seq.mode(k);
    };
    CVector ascending = weighted(0);
    for (int k = 1; k <= limit; ++k) ascending += weighted(k) + weighted(-k);
    CVector grouped = CVector::Zero(ascending.size());
    for (int r = 0; r < 3; ++r) {
      CVector part = CVector::Zero(ascending.size());
      for (int k = -limit; k <= limit; ++k) {
        if (((k % 3) + 3) % 3 == r) part += weighted(k);
      }
      grouped += part;
    }
    const double res = norm_max(CVector(ascending - grouped)) / std::max(1.0, norm_max(ascending));
    rep.regrouping_residual = std::max(rep.regrouping_residual, res);
  }
  if (rep.regrouping_residual > opts.regroup_tol) {
    fail(ErrorKind::NumericalFailure, "regrouped sums disagree by " + std::to_string(rep.regrouping_residual));
  }
  return rep;
}

// --- circle diffeomorphisms -------------------------------------------------

double CircleDiffeoLift::eval(const ElementaryLift& e, int K, double s) {
  double v = s + e.rotation;
  for (std::size_t n = 0; n < e.harmonics.size(); ++n) {
    const double w = static_cast<double>(n + 1) * K * s;
    v += e.harmonics[n].first * std::cos(w) + e.harmonics[n].second * std::sin(w);
  }
  return v;
}

double CircleDiffeoLift::eval_derivative(const ElementaryLift& e, int K, double s) {
  double v = 1.0;
  for (std::size_t n = 0; n < e.harmonics.size(); ++n) {
    const double nk = static_cast<double>(n + 1) * K;
    v += nk * (-e.harmonics[n].first * std::sin(nk * s) + e.harmonics[n].second * std::cos(nk * s));
  }
  return v;
}

double CircleDiffeoLift::solve(const ElementaryLift& e, int K, double y) {
  double bound = 0.0;
  for (const auto& [a, b] : e.harmonics) bound += std::abs(a) + std::abs(b);
  double lo = y - e.rotation - bound - 1e-12;
  double hi = y - e.rotation + bound + 1e-12;
  double s = y - e.rotation;
  for (int it = 0; it < 200; ++it) {
    const double F = eval(e, K, s) - y;
    if (std::abs(F) <= 1e-15 * std::max(1.0, std::abs(y))) break;
    if (F > 0) hi = s; else lo = s;
    double next = s - F / eval_derivative(e, K, s);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == s) break;
    s = next;
  }
  return s;
}

CircleDiffeoLift CircleDiffeoLift::identity(int K) { return CircleDiffeoLift(K); }

CircleDiffeoLift CircleDiffeoLift::rotation(int K, double c) {
  CircleDiffeoLift f(K);
  f.pieces_.push_back({ElementaryLift{c, {}}, false});
  return f;
}

CircleDiffeoLift CircleDiffeoLift::from_series(int K, ElementaryLift lift) {
  if (K < 1) fail(ErrorKind::NonMonotone, "K must be positive");
  CircleDiffeoLift f(K);
  f.pieces_.push_back({std::move(lift), false});
  const double m = f.min_derivative();
  if (!(m > 0.0)) fail(ErrorKind::NonMonotone, "f' reaches " + std::to_string(m));
  return f;
}

double CircleDiffeoLift::operator()(double sigma) const {
  double s = sigma;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    s = it->inverted ? solve(it->lift, K_, s) : eval(it->lift, K_, s);
  }
  return s;
}

double CircleDiffeoLift::derivative(double sigma) const {
  double s = sigma;
  double d = 1.0;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    if (it->inverted) {
      const double t = solve(it->lift, K_, s);
      d /= eval_derivative(it->lift, K_, t);
      s = t;
    } else {
      d *= eval_derivative(it->lift, K_, s);
      s = eval(it->lift, K_, s);
    }
  }
  return d;
}

double CircleDiffeoLift::inverse_at(double y) const {
  double s = y;
  for (const auto& p : pieces_) s = p.inverted ? eval(p.lift, K_, s) : solve(p.lift, K_, s);
  return s;
}

CircleDiffeoLift CircleDiffeoLift::inverse() const {
  CircleDiffeoLift f(K_);
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) f.pieces_.push_back({it->lift, !it->inverted});
  return f;
}

CircleDiffeoLift CircleDiffeoLift::compose(const CircleDiffeoLift& other) const {
  if (other.K_ != K_) fail(ErrorKind::TwistMismatch, "diffeomorphisms with different K");
  CircleDiffeoLift f(K_);
  f.pieces_ = pieces_;
  f.pieces_.insert(f.pieces_.end(), other.pieces_.begin(), other.pieces_.end());
  return f;
}

bool CircleDiffeoLift::is_rotation() const {
  return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.lift.harmonics.empty(); });
}

double CircleDiffeoLift::net_rotation() const {
  double c = 0.0;
  for (const auto& p : pieces_) c += p.inverted ? -p.lift.rotation : p.lift.rotation;
  return c;
}

double CircleDiffeoLift::min_derivative(int samples) const {
  double m = std::numeric_limits<double>::infinity();
  const double T = 2.0 * kPi / K_;
  for (int i = 0; i < samples; ++i) m = std::min(m, derivative(T * i / samples));
  return m;
}

std::optional<ElementaryLift> CircleDiffeoLift::elementary() const {
  if (pieces_.empty()) return ElementaryLift{};
  if (pieces_.size() == 1 && !pieces_[0].inverted) return pieces_[0].lift;
  return std::nullopt;
}

// --- pointwise automorphism loops -------------------------------------------

LoopAutomorphismElement LoopAutomorphismElement::identity(TwistPtr twist) { return LoopAutomorphismElement(std::move(twist)); }

LoopAutomorphismElement LoopAutomorphismElement::constant(TwistPtr twist, const AlgebraAutomorphism& b, double tol) {
  const CMatrix& a = twist->automorphism().matrix();
  const double res = max_abs(b.matrix() * a - a * b.matrix());
  if (res > tol * std::max(1.0, max_abs(b.matrix()))) {
    fail(ErrorKind::TwistViolation, "constant factor does not commute with the twist (residual " + std::to_string(res) + ")");
  }
  LoopAutomorphismElement out(std::move(twist));
  Factor f;
  f.constant = b.matrix();
  out.factors_.push_back(std::move(f));
  return out;
}

LoopAutomorphismElement LoopAutomorphismElement::exp_ad(const LoopElement& zeta) {
  LoopAutomorphismElement out(zeta.twist());
  Factor f;
  f.zeta = zeta;
  out.factors_.push_back(std::move(f));
  return out;
}

CMatrix LoopAutomorphismElement::evaluate(double sigma) const {
  const auto& alg = *twist_->algebra();
  CMatrix out = CMatrix::Identity(alg.dim(), alg.dim());
  for (const auto& f : factors_) {
    if (f.constant) {
      out = out * *f.constant;
      continue;
    }
    double s = sigma;
    for (auto it = f.reparam.rbegin(); it != f.reparam.rend(); ++it) s = (*it)(s);
    const CMatrix ad = alg.ad_matrix(loopgrad::evaluate(*f.zeta, s));
    out = out * matrix_exp(f.inverted ? CMatrix(-ad) : ad);
  }
  return out;
}

bool LoopAutomorphismElement::is_constant() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const Factor& f) { return f.constant.has_value(); });
}

LoopAutomorphismElement LoopAutomorphismElement::operator*(const LoopAutomorphismElement& other) const {
  require_same_twist(twist_, other.twist_);
  LoopAutomorphismElement out(twist_);
  out.factors_ = factors_;
  out.factors_.insert(out.factors_.end(), other.factors_.begin(), other.factors_.end());
  return out;
}

LoopAutomorphismElement LoopAutomorphismElement::inverse() const {
  LoopAutomorphismElement out(twist_);
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    Factor f = *it;
    if (f.constant) f.constant = CMatrix(f.constant->inverse());
    else f.inverted = !f.inverted;
    out.factors_.push_back(std::move(f));
  }
  return out;
}

LoopAutomorphismElement LoopAutomorphismElement::precompose(const CircleDiffeoLift& h) const {
  LoopAutomorphismElement out(twist_);
  out.factors_ = factors_;
  for (auto& f : out.factors_) {
    if (!f.constant) f.reparam.push_back(h);
  }
  return out;
}

double LoopAutomorphismElement::validation_residual(int samples) const {
  const auto& alg = *twist_->algebra();
  const int d = alg.dim();
  const CMatrix& a = twist_->automorphism().matrix();
  const CMatrix ainv = a.inverse();
  double worst = 0.0;
  for (int n = 0; n < samples; ++n) {
    const double s = 2.0 * kPi * (n + 0.5) / samples;
    const CMatrix m = evaluate(s);
    const double scale = std::max(1.0, max_abs(m) * max_abs(m));
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        const CVector lhs = m * alg.bracket(CVector::Unit(d, i), CVector::Unit(d, j));
        const CVector rhs = alg.bracket(m.col(i), m.col(j));
        worst = std::max(worst, norm_max(CVector(lhs - rhs)) / scale);
      }
    }
    const CMatrix shifted = evaluate(s + twist_->period());
    worst = std::max(worst, max_abs(shifted - a * m * ainv) / std::max(1.0, max_abs(m)));
  }
  return worst;
}

// --- the semidirect product -------------------------------------------------

LoopAutomorphism identity_automorphism(TwistPtr twist) {
  const int K = twist->K();
  return {CircleDiffeoLift::identity(K), LoopAutomorphismElement::identity(std::move(twist))};
}

LoopAutomorphism compose_loop_automorphisms(const LoopAutomorphism& first, const LoopAutomorphism& second) {
  return {first.f.compose(second.f), first.alpha * second.alpha.precompose(first.f.inverse())};
}

LoopAutomorphism inverse_loop_automorphism(const LoopAutomorphism& g) {
  return {g.f.inverse(), g.alpha.inverse().precompose(g.f)};
}

ProjectionResult apply_loop_automorphism(const CircleDiffeoLift& f, const LoopAutomorphismElement& alpha,
                                         const LoopElement& xi, int window, std::optional<double> tol) {
  require_same_twist(alpha.twist(), xi.twist());
  if (f.K() != xi.twist()->K()) fail(ErrorKind::TwistMismatch, "diffeomorphism K differs from twist K");

  if (f.is_rotation() && alpha.is_constant()) {
    const double c = f.net_rotation();
    const CMatrix b = alpha.evaluate(0.0);
    ModeMap out;
    double truncation = 0.0;
    for (const auto& [k, x] : xi.modes()) {
      CVector y = std::polar(1.0, -k * c) * (b * x);
      if (std::abs(k) > window) truncation = std::max(truncation, norm_max(y));
      else out.emplace(k, std::move(y));
    }
    if (tol && truncation > *tol) fail(ErrorKind::TruncationWarning, "modes outside window " + std::to_string(window));
    return {LoopElement::trusted(xi.twist(), std::move(out)), truncation};
  }

  if (!(f.min_derivative() > 0.0)) fail(ErrorKind::NonMonotone, "diffeomorphism is not orientation preserving");
  int M = 64;
  while (M < 4 * (window + xi.max_abs_mode() + 8)) M *= 2;
  std::vector<CVector> values;
  values.reserve(static_cast<std::size_t>(M));
  for (double s : uniform_grid(M)) values.push_back(alpha.evaluate(s) * evaluate(xi, f.inverse_at(s)));
  return fourier_project(values, xi.twist(), window, tol);
}

ProjectionResult apply_loop_automorphism(const LoopAutomorphism& g, const LoopElement& xi, int window,
                                         std::optional<double> tol) {
  return apply_loop_automorphism(g.f, g.alpha, xi, window, tol);
}

}  // namespace loopgrad
