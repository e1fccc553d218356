#include "loopgrad/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "loopgrad/error.hpp"

namespace loopgrad {

// --- diagrams ---------------------------------------------------------------

AffineDiagram affine_diagram(const SimpleLieAlgebra& alg, int r) {
  const int n = alg.rank();
  AffineDiagram d;
  d.algebra = alg.label();
  d.r = r;
  d.rank = n;
  if (r == 1) {
    d.marks.assign(static_cast<std::size_t>(n + 1), 1);
    d.cartan.assign(static_cast<std::size_t>(n + 1), std::vector<int>(static_cast<std::size_t>(n + 1), 0));
    if (n == 1) {
      d.cartan = {{2, -2}, {-2, 2}};
    } else {
      for (int i = 0; i <= n; ++i) {
        d.cartan[i][i] = 2;
        d.cartan[i][(i + 1) % (n + 1)] = -1;
        d.cartan[i][(i + n) % (n + 1)] = -1;
      }
    }
  } else if (r == 2 && n >= 2) {
    // Node 0 is the lowest weight of the -1 eigenspace of the base
    // automorphism; nodes 1..l are the simple roots of its fixed subalgebra.
    switch (n) {
      case 2:
        d.marks = {1, 2};
        d.cartan = {{2, -1}, {-4, 2}};
        break;
      case 3:
        d.marks = {1, 1, 1};
        d.cartan = {{2, 0, -2}, {0, 2, -2}, {-1, -1, 2}};
        break;
      case 4:
        d.marks = {1, 2, 2};
        d.cartan = {{2, -1, 0}, {-2, 2, -1}, {0, -2, 2}};
        break;
      default:
        fail(ErrorKind::UnsupportedTwist, "no twisted diagram table for " + alg.label());
    }
  } else {
    fail(ErrorKind::UnsupportedTwist, "twist order r = " + std::to_string(r) + " is not available for " + alg.label());
  }
  std::vector<int> p(d.marks.size());
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < p.size() && ok; ++i) {
      ok = d.marks[p[i]] == d.marks[i];
      for (std::size_t j = 0; j < p.size() && ok; ++j) ok = d.cartan[p[i]][p[j]] == d.cartan[i][j];
    }
    if (ok) d.symmetries.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return d;
}

bool validate_diagram(const AffineDiagram& d) {
  const std::size_t n = d.marks.size();
  if (d.cartan.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    long s = 0;
    for (std::size_t j = 0; j < n; ++j) s += static_cast<long>(d.cartan[i][j]) * d.marks[j];
    if (s != 0 || d.cartan[i][i] != 2) return false;
  }
  for (const auto& p : d.symmetries) {
    for (std::size_t i = 0; i < n; ++i) {
      if (d.marks[p[i]] != d.marks[i]) return false;
      for (std::size_t j = 0; j < n; ++j) {
        if (d.cartan[p[i]][p[j]] != d.cartan[i][j]) return false;
      }
    }
  }
  return true;
}

// --- labels -----------------------------------------------------------------

int KacLabel::order() const {
  int s0 = 0;
  for (std::size_t i = 0; i < s.size(); ++i) s0 += marks[i] * s[i];
  return r * s0;
}

std::string KacLabel::to_string() const {
  std::ostringstream os;
  os << "(" << r << ";";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : " ") << s[i];
  os << ")";
  return os.str();
}

std::vector<KacLabel> enumerate_kac_labels(const SimpleLieAlgebra& alg, int K, int r) {
  const AffineDiagram d = affine_diagram(alg, r);
  std::vector<KacLabel> out;
  if (K < 1 || K % r != 0) return out;
  const int target = K / r;
  const int n = d.nodes();
  std::vector<int> s(static_cast<std::size_t>(n), 0);

  auto emit = [&] {
    int g = 0;
    for (int x : s) g = std::gcd(g, x);
    if (g != 1) return;
    for (const auto& p : d.symmetries) {
      std::vector<int> image(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) image[p[i]] = s[i];
      if (image < s) return;
    }
    out.push_back(KacLabel{r, s, d.marks});
  };
  auto rec = [&](auto&& self, int i, int remaining) -> void {
    if (i == n) {
      if (remaining == 0) emit();
      return;
    }
    const int a = d.marks[static_cast<std::size_t>(i)];
    for (int v = 0; v * a <= remaining; ++v) {
      s[static_cast<std::size_t>(i)] = v;
      self(self, i + 1, remaining - v * a);
    }
    s[static_cast<std::size_t>(i)] = 0;
  };
  rec(rec, 0, target);
  std::sort(out.begin(), out.end(), [](const KacLabel& x, const KacLabel& y) { return x.s < y.s; });
  return out;
}

// --- realizations -----------------------------------------------------------

namespace {

CMatrix twisted_J(int N) {
  CMatrix J = CMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) J(i, N - 1 - i) = (i % 2 == 0) ? 1.0 : -1.0;
  return J;
}

CMatrix torus(const std::vector<double>& diag, int K) {
  const int N = static_cast<int>(diag.size());
  CMatrix t = CMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) t(i, i) = std::polar(1.0, 2.0 * kPi * diag[static_cast<std::size_t>(i)] / K);
  return t;
}

// H = diag(x_1..x_p, [0], -x_p..-x_1)
std::vector<double> fixed_cartan(const std::vector<double>& x, int N) {
  const int p = N / 2;
  std::vector<double> h(static_cast<std::size_t>(N), 0.0);
  for (int j = 0; j < p; ++j) {
    h[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
    h[static_cast<std::size_t>(N - 1 - j)] = -x[static_cast<std::size_t>(j)];
  }
  return h;
}

// Canonical form of an exponent multiset in Z_K under common shift and negation.
std::vector<int> canonical_exponents(const std::vector<int>& m, int K) {
  std::vector<int> best;
  for (int sign : {1, -1}) {
    for (int c = 0; c < K; ++c) {
      std::vector<int> v(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) v[i] = (((sign * m[i] + c) % K) + K) % K;
      std::sort(v.begin(), v.end());
      if (best.empty() || v < best) best = std::move(v);
    }
  }
  return best;
}

std::vector<int> eigen_dims(const AlgebraAutomorphism& a, int K) {
  std::vector<int> dims;
  for (const auto& e : eigenspace_gradation(a, K)) dims.push_back(static_cast<int>(e.basis.cols()));
  return dims;
}

}  // namespace

AlgebraAutomorphism twisted_base_automorphism(const AlgebraPtr& alg) {
  if (alg->rank() < 2) fail(ErrorKind::NoOuterAutomorphism, alg->label() + " has no diagram symmetry");
  const int N = alg->defining_dim();
  const CMatrix J = twisted_J(N);
  const CMatrix Jinv = J.inverse();
  const int d = alg->dim();
  CMatrix m(d, d);
  for (int j = 0; j < d; ++j) m.col(j) = alg->from_matrix(-J * alg->basis_matrix(j).transpose() * Jinv);
  return AlgebraAutomorphism(alg, m);
}

AlgebraAutomorphism realize_automorphism(const AlgebraPtr& alg, const KacLabel& label) {
  const int K = label.order();
  const int N = alg->defining_dim();
  const auto& s = label.s;
  if (K < 1) fail(ErrorKind::RealizationOrderMismatch, "label of order 0");
  CMatrix E0;
  std::optional<AlgebraAutomorphism> a;
  if (label.r == 1) {
    if (static_cast<int>(s.size()) != N) fail(ErrorKind::RealizationOrderMismatch, "label length differs from rank + 1");
    std::vector<double> h(static_cast<std::size_t>(N), 0.0);
    for (int i = 1; i < N; ++i) h[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(i - 1)] - s[static_cast<std::size_t>(i)];
    const double mean = std::accumulate(h.begin(), h.end(), 0.0) / N;
    for (auto& x : h) x -= mean;
    a = inner_automorphism(alg, GroupElement(torus(h, K)));
    E0 = CMatrix::Zero(N, N);
    E0(N - 1, 0) = 1.0;
  } else {
    const int p = N / 2;
    if (static_cast<int>(s.size()) != p + 1) fail(ErrorKind::RealizationOrderMismatch, "label length differs from l + 1");
    std::vector<double> x(static_cast<std::size_t>(p), 0.0);
    x[static_cast<std::size_t>(p - 1)] = (N % 2 == 0) ? 0.5 * s[static_cast<std::size_t>(p)] : s[static_cast<std::size_t>(p)];
    for (int j = p - 2; j >= 0; --j) x[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j + 1)] + s[static_cast<std::size_t>(j + 1)];
    const AlgebraAutomorphism inner = inner_automorphism(alg, GroupElement(torus(fixed_cartan(x, N), K)));
    a = twisted_base_automorphism(alg).compose(inner);
    E0 = CMatrix::Zero(N, N);
    if (N % 2 == 1) {
      E0(N - 1, 0) = 1.0;
    } else {
      E0(2, 0) = 1.0;
      E0(3, 1) = 1.0;
    }
  }
  const auto ord = automorphism_order(*a, K);
  if (!ord || *ord != K) {
    fail(ErrorKind::RealizationOrderMismatch, "label " + label.to_string() + " realized with order " +
                                                  (ord ? std::to_string(*ord) : std::string("> K")));
  }
  const CVector e0 = alg->from_matrix(E0);
  const Complex expected = std::polar(1.0, 2.0 * kPi * s[0] / K);
  if (norm_max(CVector(a->apply(e0) - expected * e0)) > 1e-9) {
    fail(ErrorKind::RealizationOrderMismatch, "affine node vector is not an eigenvector with exponent s_0 for " + label.to_string());
  }
  return *a;
}

// --- invariants -------------------------------------------------------------

std::string ConjugacyInvariant::describe() const {
  std::ostringstream os;
  os << (outer ? "outer" : "inner") << " Z_" << modulus << " exponents [";
  for (std::size_t i = 0; i < exponents.size(); ++i) os << (i ? "," : "") << exponents[i];
  os << "] dims [";
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  os << "]";
  return os.str();
}

ConjugacyInvariant conjugacy_invariant(const AlgebraAutomorphism& a, int K, double tol) {
  const double res = order_residual(a, K);
  if (res > 1e-8) fail(ErrorKind::NotFiniteOrder, "||a^K - id|| = " + std::to_string(res));
  const GroupLift lift = lift_to_group(a);
  const int N = a.algebra()->defining_dim();
  ConjugacyInvariant inv;
  inv.outer = lift.outer;
  inv.dims = eigen_dims(a, K);

  auto exponents = [&](const CVector& lam, const Complex& ref, int L) {
    std::vector<int> e;
    for (int i = 0; i < lam.size(); ++i) {
      const double t = L * std::arg(lam(i) / ref) / (2.0 * kPi);
      const double rt = std::round(t);
      if (std::abs(t - rt) > tol || std::abs(std::abs(lam(i) / ref) - 1.0) > tol) {
        fail(ErrorKind::Undecided, "eigenvalue ratio is not a root of unity of order " + std::to_string(L));
      }
      e.push_back(((static_cast<int>(rt) % L) + L) % L);
    }
    return e;
  };

  if (!lift.outer) {
    Eigen::ComplexEigenSolver<CMatrix> es(lift.h, false);
    const CVector lam = es.eigenvalues();
    inv.modulus = K;
    inv.exponents = canonical_exponents(exponents(lam, lam(0), K), K);
  } else {
    const CMatrix M = lift.h * lift.h.transpose().inverse();
    Eigen::ComplexEigenSolver<CMatrix> es(M, false);
    inv.modulus = K * N;
    inv.exponents = exponents(es.eigenvalues(), Complex(1.0), inv.modulus);
    std::sort(inv.exponents.begin(), inv.exponents.end());
  }
  return inv;
}

KacLabel kac_label_of(const AlgebraAutomorphism& a, int K) {
  const ConjugacyInvariant target = conjugacy_invariant(a, K);
  const int r = target.outer ? 2 : 1;
  std::vector<KacLabel> hits;
  for (const auto& label : enumerate_kac_labels(*a.algebra(), K, r)) {
    if (conjugacy_invariant(realize_automorphism(a.algebra(), label), K) == target) hits.push_back(label);
  }
  if (hits.empty()) fail(ErrorKind::NoMatch, "no Kac label of order " + std::to_string(K) + " matches " + target.describe());
  if (hits.size() > 1) fail(ErrorKind::Ambiguous, std::to_string(hits.size()) + " labels match " + target.describe());
  return hits.front();
}

// --- oracle -----------------------------------------------------------------

int brute_force_class_count(const SimpleLieAlgebra& alg, int K, int r, long cost_bound) {
  const int N = alg.defining_dim();
  if (r == 1) {
    long cost = 1;
    for (int i = 1; i < N; ++i) cost *= K;
    if (cost > cost_bound) fail(ErrorKind::Undecided, "oracle cost " + std::to_string(cost) + " exceeds the bound");
    std::set<std::vector<int>> classes;
    std::vector<int> m(static_cast<std::size_t>(N), 0);
    for (long idx = 0; idx < cost; ++idx) {
      long rest = idx;
      for (int i = 1; i < N; ++i) {
        m[static_cast<std::size_t>(i)] = static_cast<int>(rest % K);
        rest /= K;
      }
      // order of Ad(diag(eps^m)): smallest k with every ratio eps^{k(m_i - m_j)} = 1
      int order = 0;
      for (int k = 1; k <= K && order == 0; ++k) {
        bool trivial = true;
        for (int i = 0; i < N && trivial; ++i) {
          for (int j = 0; j < N && trivial; ++j) {
            trivial = std::abs(std::polar(1.0, 2.0 * kPi * k * (m[i] - m[j]) / K) - 1.0) <= 1e-9;
          }
        }
        if (trivial) order = k;
      }
      if (order == K) classes.insert(canonical_exponents(m, K));
    }
    return static_cast<int>(classes.size());
  }
  if (r != 2 || alg.rank() < 2) fail(ErrorKind::UnsupportedTwist, "oracle supports r = 1, or r = 2 for rank >= 2");
  if (K % 2 != 0) return 0;
  const int p = N / 2;
  long cost = 1;
  for (int i = 0; i < p; ++i) cost *= 2 * K;
  if (cost > cost_bound) fail(ErrorKind::Undecided, "oracle cost " + std::to_string(cost) + " exceeds the bound");
  const AlgebraPtr ap = build_algebra(alg.label());
  const AlgebraAutomorphism base = twisted_base_automorphism(ap);
  const CMatrix J = twisted_J(N);
  std::set<std::vector<int>> classes;
  std::vector<double> q(static_cast<std::size_t>(p), 0.0);
  for (long idx = 0; idx < cost; ++idx) {
    long rest = idx;
    for (int j = 0; j < p; ++j) {
      q[static_cast<std::size_t>(j)] = 0.5 * static_cast<double>(rest % (2 * K));
      rest /= 2 * K;
    }
    const CMatrix t = torus(fixed_cartan(q, N), K);
    const AlgebraAutomorphism a = base.compose(inner_automorphism(ap, GroupElement(t)));
    const auto ord = automorphism_order(a, K);
    if (!ord || *ord != K) continue;
    // a(x) = -h x^T h^{-1} with h = J t^{-1}; cosquare h h^{-T} = J t^{-1} J^{-T} t
    const CMatrix cosquare = J * t.inverse() * J.transpose().inverse() * t;
    Eigen::ComplexEigenSolver<CMatrix> es(cosquare, false);
    std::vector<int> signature;
    for (int i = 0; i < N; ++i) {
      const double e = K * N * std::arg(es.eigenvalues()(i)) / (2.0 * kPi);
      signature.push_back(((static_cast<int>(std::lround(e)) % (K * N)) + K * N) % (K * N));
    }
    std::sort(signature.begin(), signature.end());
    for (int d : eigen_dims(a, K)) signature.push_back(d);
    classes.insert(signature);
  }
  return static_cast<int>(classes.size());
}

ClassificationReport classify(const AlgebraPtr& alg, int K, int r) {
  ClassificationReport rep;
  rep.algebra = alg->label();
  rep.K = K;
  rep.r = r;
  bool all_identified = true;
  for (const auto& label : enumerate_kac_labels(*alg, K, r)) {
    AlgebraAutomorphism a = realize_automorphism(alg, label);
    const auto spaces = eigenspace_gradation(a, K);
    ClassEntry e{label, a, *automorphism_order(a, K), {}, gradation_bracket_residual(*alg, spaces), false};
    for (const auto& sp : spaces) e.dims.push_back(static_cast<int>(sp.basis.cols()));
    e.identified = kac_label_of(a, K) == label;
    all_identified = all_identified && e.identified;
    rep.entries.push_back(std::move(e));
  }
  try {
    rep.oracle_count = brute_force_class_count(*alg, K, r);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Undecided) throw;
  }
  rep.oracle_agreement = rep.oracle_count && *rep.oracle_count == static_cast<int>(rep.entries.size()) && all_identified;
  return rep;
}

}  // namespace loopgrad
