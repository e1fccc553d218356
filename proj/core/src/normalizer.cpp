#include "loopgrad/normalizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/FFT>

#include "loopgrad/classify.hpp"
#include "loopgrad/error.hpp"

namespace loopgrad {

namespace {

std::vector<Complex> fft_coefficients(const std::vector<Complex>& samples) {
  Eigen::FFT<double> fft;
  std::vector<Complex> out;
  fft.fwd(out, samples);
  const double M = static_cast<double>(samples.size());
  for (auto& c : out) c /= M;
  return out;
}

Complex coefficient_at(const std::vector<Complex>& spec, int n) {
  const int M = static_cast<int>(spec.size());
  return spec[static_cast<std::size_t>(((n % M) + M) % M)];
}

}  // namespace

// --- rectification ----------------------------------------------------------

RectificationResult rectify_vector_field(const VectorFieldK& X, double target) {
  validate_vector_field(X);
  const int K = X.K();
  const double T = 2.0 * kPi / K;
  std::vector<Complex> spec;
  double c0_prev = std::numeric_limits<double>::quiet_NaN();
  double error = std::numeric_limits<double>::infinity();
  int M = 64;
  for (;; M *= 2) {
    if (M > (1 << 20)) fail(ErrorKind::QuadratureFailure, "1/v Fourier series did not converge to " + std::to_string(target));
    std::vector<Complex> w(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) w[static_cast<std::size_t>(j)] = 1.0 / X(T * j / M);
    spec = fft_coefficients(w);
    const double c0 = spec[0].real();
    double tail = 0.0;
    for (int n = M / 4 + 1; n <= M / 2; ++n) tail = std::max({tail, std::abs(coefficient_at(spec, n)), std::abs(coefficient_at(spec, -n))});
    error = std::isnan(c0_prev) ? tail : std::max(tail, std::abs(c0 - c0_prev));
    c0_prev = c0;
    if (error <= target * std::abs(c0) && M >= 128) break;
  }
  const double c0 = spec[0].real();
  const double kappa = 1.0 / c0;

  // 1/v = c0 + sum_n (alpha_n cos(nKs) + beta_n sin(nKs)); integrate termwise.
  ElementaryLift lift;
  int last = 0;
  std::vector<std::pair<double, double>> harmonics;
  for (int n = 1; n <= M / 4; ++n) {
    const Complex c = coefficient_at(spec, n);
    const double alpha = 2.0 * c.real();
    const double beta = -2.0 * c.imag();
    const double nk = static_cast<double>(n) * K;
    lift.rotation += kappa * beta / nk;
    harmonics.emplace_back(-kappa * beta / nk, kappa * alpha / nk);
    if (std::abs(c) > 1e-17 * std::abs(c0)) last = n;
  }
  harmonics.resize(static_cast<std::size_t>(last));
  if (last == 0) lift.rotation = 0.0;
  lift.harmonics = std::move(harmonics);

  RectificationResult r;
  r.f = last == 0 ? CircleDiffeoLift::identity(K) : CircleDiffeoLift::from_series(K, lift);
  r.kappa = kappa;
  r.quadrature_error = error;
  r.samples = M;
  const int check = 4096;
  for (int j = 0; j < check; ++j) {
    const double s = T * (j + 0.5) / check;
    r.pushforward_residual = std::max(r.pushforward_residual, std::abs(X(s) * r.f.derivative(s) - kappa) / std::max(1.0, std::abs(kappa)));
  }
  r.period_residual = std::abs(r.f(T) - r.f(0.0) - T);
  return r;
}

OrientedProblem orientation_fix(const GradingOperator& Q) {
  const VectorFieldReport rep = validate_vector_field(Q.X());
  if (rep.sign > 0) return {Q, Q.twist(), false};
  const TwistPtr& tw = Q.twist();
  TwistPtr inv = make_twist(tw->automorphism().inverse(), tw->K());
  return {GradingOperator(Q.X().reflected(), Q.eta().reflected(inv)), inv, true};
}

// --- transport --------------------------------------------------------------

TransportResult transport(const LoopElement& eta, const CircleDiffeoLift& f, double tol, int max_window) {
  const auto alpha = LoopAutomorphismElement::identity(eta.twist());
  if (f.is_rotation()) {
    const int W = eta.max_abs_mode();
    auto p = apply_loop_automorphism(f, alpha, eta, W);
    return {p.element, W, p.truncation};
  }
  const double scale = std::max(1.0, mode_norm(eta));
  for (int W = std::max(16, 2 * eta.max_abs_mode()); W <= max_window; W *= 2) {
    auto p = apply_loop_automorphism(f, alpha, eta, W);
    if (p.truncation <= tol * scale) return {p.element, W, p.truncation};
  }
  fail(ErrorKind::TruncationWarning, "transported eta needs more than " + std::to_string(max_window) + " modes");
}

// --- conjugation ODE --------------------------------------------------------

namespace {

class EtaMatrix {
 public:
  explicit EtaMatrix(const LoopElement& eta) {
    const auto& alg = *eta.algebra();
    N_ = alg.defining_dim();
    const int n = static_cast<int>(eta.modes().size());
    modes_.resize(N_ * N_, n);
    int c = 0;
    for (const auto& [k, x] : eta.modes()) {
      ks_.push_back(k);
      modes_.col(c++) = alg.to_matrix(x).reshaped();
    }
    if (n > 0) {
      k_min_ = ks_.front();
      powers_.resize(ks_.back() - k_min_ + 1);
    }
    phases_.resize(n);
  }
  void eval(double s, CMatrix& out) const {
    for (const auto& [t, m] : cache_) {
      if (t == s && m.size() > 0) {
        out = m;
        return;
      }
    }
    compute(s, out);
    cache_[next_] = {s, out};
    next_ = (next_ + 1) % cache_.size();
  }

 private:
  void compute(double s, CMatrix& out) const {
    out.setZero(N_, N_);
    if (ks_.empty()) return;
    const Complex z = std::polar(1.0, s);
    powers_(0) = std::polar(1.0, k_min_ * s);
    for (Eigen::Index i = 1; i < powers_.size(); ++i) powers_(i) = powers_(i - 1) * z;
    for (std::size_t c = 0; c < ks_.size(); ++c) phases_(static_cast<Eigen::Index>(c)) = powers_(ks_[c] - k_min_);
    out.reshaped().noalias() = modes_ * phases_;
  }

  CMatrix modes_;
  mutable std::array<std::pair<double, CMatrix>, 8> cache_;
  mutable std::size_t next_ = 0;
  std::vector<int> ks_;
  int k_min_ = 0;
  mutable CVector powers_;
  mutable CVector phases_;
  int N_ = 0;
};

class Rk4 {
 public:
  Rk4(const EtaMatrix& eta, double kappa, int N) : eta_(eta), scale_(-1.0 / kappa) {
    for (auto* m : {&e_, &k1_, &k2_, &k3_, &k4_, &tmp_}) m->resize(N, N);
  }
  // gamma' = -gamma eta(s) / kappa
  void rhs(double s, const CMatrix& g, CMatrix& out) {
    eta_.eval(s, e_);
    out.noalias() = scale_ * (g * e_);
  }
  CMatrix step(double s, const CMatrix& g, double h) {
    rhs(s, g, k1_);
    return step_from(s, g, h, k1_);
  }
  // k1 = rhs(s, g) already known
  CMatrix step_from(double s, const CMatrix& g, double h, const CMatrix& k1) {
    tmp_ = g + (0.5 * h) * k1;
    rhs(s + 0.5 * h, tmp_, k2_);
    tmp_ = g + (0.5 * h) * k2_;
    rhs(s + 0.5 * h, tmp_, k3_);
    tmp_ = g + h * k3_;
    rhs(s + h, tmp_, k4_);
    return g + (h / 6.0) * (k1 + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  const EtaMatrix& eta_;
  Complex scale_;
  CMatrix e_, k1_, k2_, k3_, k4_, tmp_;
};

struct Stepper {
  Rk4& rk;
  const OdeOptions& opts;
  int substeps = 0;
  CMatrix k1;

  // One Richardson-extrapolated step, recursively subdivided when adaptive.
  CMatrix advance(double s, const CMatrix& g, double h, int depth) {
    rk.rhs(s, g, k1);
    const CMatrix full = rk.step_from(s, g, h, k1);
    const CMatrix mid = rk.step_from(s, g, 0.5 * h, k1);
    const CMatrix half = rk.step(s + 0.5 * h, mid, 0.5 * h);
    const double err = max_abs(half - full) / 15.0;
    if (opts.adaptive && err > opts.local_tol * std::max(1.0, max_abs(g))) {
      if (depth >= opts.max_depth) {
        fail(ErrorKind::StepSizeUnderflow, "local error " + std::to_string(err) + " at s = " + std::to_string(s));
      }
      ++substeps;
      const CMatrix left = advance(s, g, 0.5 * h, depth + 1);
      return advance(s + 0.5 * h, left, 0.5 * h, depth + 1);
    }
    return half + (half - full) / 15.0;
  }
};

}  // namespace

ConjugationPath solve_conjugation_ode(const LoopElement& eta, double kappa, const OdeOptions& opts) {
  if (!(kappa > 0.0)) fail(ErrorKind::NumericalFailure, "conjugation ODE needs kappa > 0");
  if (opts.steps < 8 || opts.periods < 1) fail(ErrorKind::NumericalFailure, "need at least 8 steps per period");
  const int N = eta.algebra()->defining_dim();
  const double T = eta.twist()->period();
  const EtaMatrix E(eta);
  Rk4 rk(E, kappa, N);
  Stepper stepper{rk, opts, 0, CMatrix(N, N)};

  ConjugationPath path;
  path.kappa = kappa;
  path.steps_per_period = opts.steps;
  path.h = T / opts.steps;
  const int total = opts.steps * opts.periods;
  path.nodes.reserve(static_cast<std::size_t>(total + 1));
  path.nodes.push_back(CMatrix::Identity(N, N));
  const double inv_n = 1.0 / N;
  for (int j = 0; j < total; ++j) {
    CMatrix g = stepper.advance(j * path.h, path.nodes.back(), path.h, 0);
    const Complex det = g.determinant();
    path.determinant_drift = std::max(path.determinant_drift, std::abs(det - 1.0));
    g /= std::pow(det, inv_n);
    path.nodes.push_back(std::move(g));
  }
  path.substeps = stepper.substeps;

  path.derivatives.reserve(path.nodes.size());
  CMatrix d(N, N);
  for (int j = 0; j <= total; ++j) {
    rk.rhs(j * path.h, path.nodes[static_cast<std::size_t>(j)], d);
    path.derivatives.push_back(d);
  }
  // ODE residual with fourth-order central differences at interior nodes.
  CMatrix e(N, N);
  for (int j = 2; j + 2 <= total; ++j) {
    const auto& n = path.nodes;
    const CMatrix fd = (n[j - 2] - 8.0 * n[j - 1] + 8.0 * n[j + 1] - n[j + 2]) / (12.0 * path.h);
    E.eval(j * path.h, e);
    path.ode_residual = std::max(path.ode_residual, max_abs(kappa * fd + n[j] * e));
  }
  return path;
}

CMatrix ConjugationPath::at(double s) const {
  const int last = static_cast<int>(nodes.size()) - 1;
  int j = std::clamp(static_cast<int>(std::floor(s / h)), 0, last - 1);
  const double t = s / h - j;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const double h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t);
  const double h11 = t * t * (t - 1);
  return h00 * nodes[j] + (h10 * h) * derivatives[j] + h01 * nodes[j + 1] + (h11 * h) * derivatives[j + 1];
}

CMatrix ConjugationPath::derivative_at(double s) const {
  const int last = static_cast<int>(nodes.size()) - 1;
  int j = std::clamp(static_cast<int>(std::floor(s / h)), 0, last - 1);
  const double t = s / h - j;
  const double d00 = 6 * t * t - 6 * t;
  const double d10 = 3 * t * t - 4 * t + 1;
  const double d01 = -6 * t * t + 6 * t;
  const double d11 = 3 * t * t - 2 * t;
  return (d00 / h) * nodes[j] + d10 * derivatives[j] + (d01 / h) * nodes[j + 1] + d11 * derivatives[j + 1];
}

MonodromyResult monodromy(const ConjugationPath& path, const TwistData& twist, double tol) {
  const int n = path.steps_per_period;
  if (static_cast<int>(path.nodes.size()) < n + 1) fail(ErrorKind::NumericalFailure, "path does not cover one period");
  const GroupLift& lift = twist.group_lift();
  MonodromyResult r;
  r.g = apply_group_inverse(lift, path.nodes[static_cast<std::size_t>(n)]);
  if (static_cast<int>(path.nodes.size()) >= 2 * n + 1) {
    for (int i = 0; i < 32; ++i) {
      const int j = static_cast<int>((static_cast<long>(n) * (2 * i + 1)) / 64);
      const CMatrix& gs = path.nodes[static_cast<std::size_t>(j)];
      const CMatrix expected = apply_group(lift, r.g * gs);
      const CMatrix& actual = path.nodes[static_cast<std::size_t>(j + n)];
      r.residual = std::max(r.residual, max_abs(actual - expected) / std::max(1.0, max_abs(actual)));
      ++r.checks;
    }
  }
  if (r.residual > tol) {
    fail(ErrorKind::InconsistentMonodromy, "gamma(s + T) != a(g gamma(s)) by " + std::to_string(r.residual));
  }
  return r;
}

// --- the pipeline -----------------------------------------------------------

NormalizationResult normalize(const GradingOperator& Q, const NormalizeOptions& opts) {
  OrientedProblem op = orientation_fix(Q);
  const TwistPtr& tw = op.twist;
  const auto& alg = tw->algebra();
  RectificationResult rect = rectify_vector_field(op.Q.X());
  TransportResult tr = transport(op.Q.eta(), rect.f, opts.transport_tol, opts.max_window);
  ConjugationPath path = solve_conjugation_ode(tr.eta, rect.kappa, opts.ode);
  MonodromyResult mono = monodromy(path, *tw, opts.monodromy_tol);

  AlgebraAutomorphism a_prime = tw->automorphism().compose(inner_automorphism(alg, GroupElement(mono.g)));
  const double kK = rect.kappa * tw->K();
  const long Kp = std::lround(kK);
  const double integrality = std::abs(kK - static_cast<double>(Kp));
  if (integrality > opts.integrality_tol || Kp < 1) {
    fail(ErrorKind::NonIntegerKPrime, "kappa K = " + std::to_string(kK) + " is not a positive integer");
  }
  const int K_prime = static_cast<int>(Kp);
  const double ores = order_residual(a_prime, K_prime);
  if (ores > opts.order_tol) {
    fail(ErrorKind::NonIntegerSpectrum, "a'^K' != id (residual " + std::to_string(ores) + ", K' = " + std::to_string(K_prime) +
                                            "): the gradation has non-integer degrees");
  }
  TwistPtr tw_prime = make_twist(a_prime, K_prime, opts.order_tol);

  std::vector<int> dims;
  const int d = alg->dim();
  CMatrix sum = CMatrix::Zero(d, d);
  double semis = 0.0;
  for (const auto& e : tw_prime->eigenspaces()) {
    dims.push_back(static_cast<int>(e.basis.cols()));
    sum += e.projector;
    semis = std::max(semis, max_abs(a_prime.matrix() * e.projector - tw_prime->eps(e.m) * e.projector));
  }
  semis = std::max(semis, max_abs(sum - CMatrix::Identity(d, d)));

  // gamma eta gamma^{-1} + kappa gamma' gamma^{-1} over one period
  double shift = 0.0;
  {
    const EtaMatrix E(tr.eta);
    const int N = alg->defining_dim();
    CMatrix e(N, N);
    const int n = path.steps_per_period;
    const auto& nd = path.nodes;
    for (int j = 2; j <= n && j + 2 < static_cast<int>(nd.size()); ++j) {
      const CMatrix fd = (nd[j - 2] - 8.0 * nd[j - 1] + 8.0 * nd[j + 1] - nd[j + 2]) / (12.0 * path.h);
      E.eval(j * path.h, e);
      const CMatrix inv = nd[j].inverse();
      shift = std::max(shift, norm_max(alg->from_matrix(nd[j] * e * inv + rect.kappa * fd * inv)));
    }
  }

  return NormalizationResult{std::move(a_prime), K_prime, std::move(tw_prime), std::move(dims), rect.kappa, integrality, ores,
                             semis, shift, op.flipped, tw, std::move(rect), std::move(tr), std::move(path), std::move(mono),
                             opts};
}

ComparisonResult compare_automorphisms(const AlgebraAutomorphism& a1, int K1, const AlgebraAutomorphism& a2, int K2) {
  if (!a1.algebra()->same_as(*a2.algebra())) fail(ErrorKind::AlgebraMismatch, "automorphisms of different algebras");
  if (K1 != K2) return {false, "K' = " + std::to_string(K1) + " differs from K'' = " + std::to_string(K2)};
  const ConjugacyInvariant i1 = conjugacy_invariant(a1, K1);
  const ConjugacyInvariant i2 = conjugacy_invariant(a2, K2);
  if (i1 == i2) return {true, "conjugacy invariants agree: " + i1.describe()};
  return {false, "conjugacy invariants differ: " + i1.describe() + " vs " + i2.describe()};
}

ComparisonResult compare_normalizations(const NormalizationResult& r1, const NormalizationResult& r2) {
  return compare_automorphisms(r1.a_prime, r1.K_prime, r2.a_prime, r2.K_prime);
}

// --- conjugated operators ---------------------------------------------------

GradingOperator conjugate_grading_operator(const GradingOperator& Q, const CircleDiffeoLift& f, const LoopElement& zeta,
                                           double tol, int max_window) {
  const TwistPtr& tw = Q.twist();
  if (!same_twist(*tw, *zeta.twist())) fail(ErrorKind::TwistMismatch, "zeta lives in another loop algebra");
  if (f.K() != tw->K()) fail(ErrorKind::TwistMismatch, "diffeomorphism K differs from the twist order");
  const auto& alg = *tw->algebra();
  const int K = tw->K();
  const int N = alg.defining_dim();
  const VectorFieldK& X = Q.X();

  // v_new = (v f') o f^{-1}
  VectorFieldK v_new = X;
  if (!f.is_rotation() || !X.is_constant()) {
    std::vector<Complex> spec;
    bool done = false;
    for (int M = 64 * K; M <= (1 << 20) && !done; M *= 2) {
      std::vector<Complex> w(static_cast<std::size_t>(M));
      for (int j = 0; j < M; ++j) {
        const double y = f.inverse_at(2.0 * kPi * j / M);
        w[static_cast<std::size_t>(j)] = X(y) * f.derivative(y);
      }
      spec = fft_coefficients(w);
      double tail = 0.0;
      double top = 0.0;
      for (int idx = 0; idx < M; ++idx) {
        const int k = idx <= M / 2 ? idx : idx - M;
        const double a = std::abs(spec[static_cast<std::size_t>(idx)]);
        top = std::max(top, a);
        if (std::abs(k) > M / 4) tail = std::max(tail, a);
      }
      if (tail <= tol * std::max(1.0, top)) {
        std::map<int, Complex> harm;
        for (int n = -M / (4 * K); n <= M / (4 * K); ++n) {
          const Complex c = 0.5 * (coefficient_at(spec, n * K) + std::conj(coefficient_at(spec, -n * K)));
          if (std::abs(c) > 1e-15 * std::max(1.0, top)) harm.emplace(n, n == 0 ? Complex(c.real()) : c);
        }
        v_new = VectorFieldK(K, std::move(harm));
        done = true;
      }
    }
    if (!done) fail(ErrorKind::TruncationWarning, "transported vector field did not converge");
  }

  std::vector<std::pair<int, CMatrix>> zmodes;
  for (const auto& [k, x] : zeta.modes()) zmodes.emplace_back(k, alg.to_matrix(x));
  const double scale = std::max(1.0, mode_norm(Q.eta()) + mode_norm(zeta.derivative()) * std::max(1.0, std::abs(v_new.mean())));
  const int start = std::max(16, 2 * (Q.eta().max_abs_mode() + zeta.max_abs_mode() + v_new.max_harmonic() * K));
  for (int W = start; W <= max_window; W *= 2) {
    int M = 64;
    while (M < 4 * (W + 8)) M *= 2;
    std::vector<CVector> samples;
    samples.reserve(static_cast<std::size_t>(M));
    CMatrix big = CMatrix::Zero(2 * N, 2 * N);
    for (int j = 0; j < M; ++j) {
      const double s = 2.0 * kPi * j / M;
      CMatrix Z = CMatrix::Zero(N, N);
      CMatrix Zp = CMatrix::Zero(N, N);
      for (const auto& [k, m] : zmodes) {
        const Complex w = std::polar(1.0, k * s);
        Z += w * m;
        Zp += (Complex(0.0, k) * w) * m;
      }
      big.topLeftCorner(N, N) = Z;
      big.bottomRightCorner(N, N) = Z;
      big.topRightCorner(N, N) = Zp;
      const CMatrix E = matrix_exp(big);
      const CMatrix u = E.topLeftCorner(N, N);
      const CMatrix up = E.topRightCorner(N, N);
      const CMatrix uinv = u.inverse();
      const CMatrix eta_f = alg.to_matrix(evaluate(Q.eta(), f.inverse_at(s)));
      samples.push_back(alg.from_matrix(u * eta_f * uinv + v_new(s) * up * uinv));
    }
    auto p = fourier_project(samples, tw, W);
    if (p.truncation <= tol * scale) return GradingOperator(std::move(v_new), std::move(p.element));
  }
  fail(ErrorKind::TruncationWarning, "conjugated eta needs more than " + std::to_string(max_window) + " modes");
}

OrderEstimate estimate_convergence_order(const LoopElement& eta, double kappa, int production_steps) {
  OdeOptions o;
  o.adaptive = false;
  o.periods = 1;
  auto endpoint = [&](int steps) {
    o.steps = steps;
    return solve_conjugation_ode(eta, kappa, o).nodes.back();
  };
  OrderEstimate est;
  std::vector<CMatrix> ends;
  for (int n = 8; n <= 1024; n *= 2) {
    est.steps.push_back(n);
    ends.push_back(endpoint(n));
  }
  const double floor = 1e-10 * std::max(1.0, max_abs(ends.back()));
  for (std::size_t i = 0; i + 1 < ends.size(); ++i) est.differences.push_back(max_abs(ends[i] - ends[i + 1]));
  est.order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < est.differences.size(); ++i) {
    if (est.differences[i] > floor && est.differences[i + 1] > floor) {
      est.order = std::log2(est.differences[i] / est.differences[i + 1]);
    }
  }
  est.doubling_residual = max_abs(endpoint(production_steps) - endpoint(2 * production_steps));
  return est;
}

}  // namespace loopgrad
