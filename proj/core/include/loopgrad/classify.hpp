#pragma once

// Finite-order automorphisms of A_n up to conjugacy: Kac labels on the
// affine diagrams A_n^(1) and A_n^(2), realizations, identification and a
// brute-force class-count oracle.

#include <optional>
#include <string>
#include <vector>

#include "loopgrad/lie_core.hpp"

namespace loopgrad {

struct AffineDiagram {
  std::string algebra;
  int r = 1;
  int rank = 0;                                 // rank of the finite algebra
  std::vector<int> marks;                       // a_0 .. a_l
  std::vector<std::vector<int>> cartan;         // generalized Cartan matrix
  std::vector<std::vector<int>> symmetries;     // node permutations preserving cartan and marks

  int nodes() const { return static_cast<int>(marks.size()); }
};

/// Throws UnsupportedTwist unless r = 1, or r = 2 with rank >= 2.
AffineDiagram affine_diagram(const SimpleLieAlgebra& alg, int r);

/// Cartan matrix times marks vanishes and every listed symmetry preserves both.
bool validate_diagram(const AffineDiagram& d);

struct KacLabel {
  int r = 1;
  std::vector<int> s;
  std::vector<int> marks;

  int order() const;
  std::string to_string() const;
  bool operator==(const KacLabel& o) const { return r == o.r && s == o.s; }
};

/// All canonical labels (s >= 0, r sum a_i s_i = K, gcd 1, lexicographically
/// minimal in the symmetry orbit), sorted lexicographically.
std::vector<KacLabel> enumerate_kac_labels(const SimpleLieAlgebra& alg, int K, int r);

/// x -> -J x^T J^{-1}, J antidiagonal with J_{i,N+1-i} = (-1)^{i+1}. Its fixed
/// subalgebra is so(N) for N odd and sp(N) for N even.
AlgebraAutomorphism twisted_base_automorphism(const AlgebraPtr& alg);

/// r = 1: Ad(exp(2 pi i H / K)) with alpha_i(H) = s_i; r = 2: the base
/// automorphism composed with Ad(exp(2 pi i H / K)), H in the fixed Cartan.
/// Throws RealizationOrderMismatch if the result does not have order exactly K.
AlgebraAutomorphism realize_automorphism(const AlgebraPtr& alg, const KacLabel& label);

/// Complete invariant of the Aut(g)-conjugacy class of a with a^K = id.
/// Inner: eigenvalue exponents of the group lift in Z_K, modulo common shift,
/// permutation and negation. Outer: exponents of the eigenvalues of the cosquare
/// h h^{-T} in Z_{KN}, sorted. dims are the eigenspace dimensions on g.
struct ConjugacyInvariant {
  bool outer = false;
  int modulus = 1;
  std::vector<int> exponents;
  std::vector<int> dims;

  bool operator==(const ConjugacyInvariant& o) const {
    return outer == o.outer && modulus == o.modulus && exponents == o.exponents && dims == o.dims;
  }
  std::string describe() const;
};

/// Throws NotFiniteOrder when a^K != id and Undecided when eigenvalues are not
/// within tolerance of roots of unity.
ConjugacyInvariant conjugacy_invariant(const AlgebraAutomorphism& a, int K, double tol = 1e-6);

/// Throws NoMatch or Ambiguous.
KacLabel kac_label_of(const AlgebraAutomorphism& a, int K);

/// Number of Aut(g)-classes of order exactly K found by enumerating torus
/// elements. r = 1: diag(eps_K^{m_i}) modulo permutation, centre and inversion.
/// r = 2: base automorphism times fixed-torus elements, classed by cosquare
/// spectrum and eigenspace dimensions. Throws Undecided beyond the cost bound.
int brute_force_class_count(const SimpleLieAlgebra& alg, int K, int r = 1, long cost_bound = 1 << 14);

struct ClassEntry {
  KacLabel label;
  AlgebraAutomorphism automorphism;
  int order = 0;
  std::vector<int> dims;
  double bracket_residual = 0.0;
  bool identified = false;  // kac_label_of(automorphism) == label
};

struct ClassificationReport {
  std::string algebra;
  int K = 1;
  int r = 1;
  std::vector<ClassEntry> entries;
  std::optional<int> oracle_count;
  bool oracle_agreement = false;
};

ClassificationReport classify(const AlgebraPtr& alg, int K, int r);

}  // namespace loopgrad
