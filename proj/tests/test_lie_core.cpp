#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

// Structure constants recomputed from defining-representation commutators by
// least squares on the basis matrices.
double commutator_constant_sum(const SimpleLieAlgebra& alg) {
  const int d = alg.dim();
  const int N = alg.defining_dim();
  CMatrix B(N * N, d);
  for (int i = 0; i < d; ++i) B.col(i) = alg.basis_matrix(i).reshaped();
  const auto qr = B.colPivHouseholderQr();
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const CMatrix c = commutator(alg.basis_matrix(i), alg.basis_matrix(j));
      const CVector coeffs = qr.solve(CVector(c.reshaped()));
      for (int k = 0; k < d; ++k) total += std::abs(coeffs(k));
    }
  }
  return total;
}

}  // namespace

TEST_CASE("build_algebra dimensions and basis") {
  const AlgebraPtr a1 = build_algebra("A1");
  CHECK(a1->dim() == 3);
  CHECK(a1->basis_labels().size() == 3);
  CHECK(a1->basis_labels()[kH] == "h1");
  CHECK(build_algebra("A2")->dim() == 8);
  CHECK(build_algebra("A3")->dim() == 15);
  CHECK(build_algebra("A4")->dim() == 24);
  try {
    build_algebra("E8");
    FAIL("E8 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedAlgebra);
  }
}

TEST_CASE("sl2 brackets agree with matrix commutators") {
  const AlgebraPtr alg = build_algebra("A1");
  const CVector e = CVector::Unit(3, kE);
  const CVector h = CVector::Unit(3, kH);
  const CVector f = CVector::Unit(3, kF);
  CHECK(norm_max(CVector(alg->bracket(e, f) - h)) < 1e-15);
  CHECK(norm_max(CVector(alg->bracket(h, e) - 2.0 * e)) < 1e-15);
  CHECK(norm_max(CVector(alg->bracket(h, f) + 2.0 * f)) < 1e-15);

  CMatrix E = CMatrix::Zero(2, 2);
  E(0, 1) = 1.0;
  CMatrix F = CMatrix::Zero(2, 2);
  F(1, 0) = 1.0;
  const CMatrix H = diag({1.0, -1.0});
  CHECK(max_abs(alg->to_matrix(e) - E) == 0.0);
  CHECK(max_abs(alg->to_matrix(h) - H) == 0.0);
  CHECK(max_abs(alg->to_matrix(f) - F) == 0.0);
  CHECK(max_abs(commutator(E, F) - H) == 0.0);
}

TEST_CASE("brackets match defining representation; Jacobi on random triples") {
  Rng rng(11);
  for (const char* label : {"A1", "A2", "A3", "A4"}) {
    CAPTURE(label);
    const AlgebraPtr alg = build_algebra(label);
    for (int t = 0; t < 50; ++t) {
      const CVector x = random_coeffs(alg->dim(), rng);
      const CVector y = random_coeffs(alg->dim(), rng);
      const CVector z = random_coeffs(alg->dim(), rng);
      const CMatrix X = alg->to_matrix(x);
      const CMatrix Y = alg->to_matrix(y);
      CHECK(max_abs(alg->to_matrix(alg->bracket(x, y)) - commutator(X, Y)) < 1e-12);
      CHECK(norm_max(CVector(alg->from_matrix(X) - x)) < 1e-13);
      const CVector jac = alg->bracket(x, alg->bracket(y, z)) + alg->bracket(y, alg->bracket(z, x)) +
                          alg->bracket(z, alg->bracket(x, y));
      CHECK(norm_max(jac) < 1e-12);
      CHECK(norm_max(alg->bracket(x, x)) < 1e-13);
      CHECK(norm_max(CVector(alg->bracket(x, y) + alg->bracket(y, x))) < 1e-13);
    }
    CHECK(alg->jacobi_residual() < 1e-12);
    CHECK(alg->realization_residual() < 1e-12);
  }
}

TEST_CASE("structure constant table is antisymmetric") {
  for (const char* label : {"A1", "A2", "A3", "A4"}) {
    const AlgebraPtr alg = build_algebra(label);
    for (const auto& c : alg->structure_constants()) {
      bool found = false;
      for (const auto& d : alg->structure_constants()) {
        if (d.i == c.j && d.j == c.i && d.k == c.k) found = found || d.value == -c.value;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("norm_max examples") {
  const AlgebraPtr alg = build_algebra("A1");
  CHECK(norm_max(AlgebraElement::zero(alg)) == 0.0);
  CHECK(norm_max(AlgebraElement(alg, sl2(1.0, 3.0, 0.0))) == 3.0);
}

TEST_CASE("bracket bound constant") {
  CHECK(bracket_bound_constant(*build_algebra("A1")) == 10.0);
  for (const char* label : {"A1", "A2", "A3", "A4"}) {
    const AlgebraPtr alg = build_algebra(label);
    CHECK(alg->bracket_constant() > 0.0);
    CHECK(alg->bracket_constant() == doctest::Approx(commutator_constant_sum(*alg)).epsilon(1e-12));
  }
}

TEST_CASE("bracket bound holds on 1000 random pairs per algebra") {
  Rng rng(12);
  for (const char* label : {"A1", "A2", "A3", "A4"}) {
    const AlgebraPtr alg = build_algebra(label);
    const double C = alg->bracket_constant();
    int violations = 0;
    for (int t = 0; t < 1000; ++t) {
      const AlgebraElement x = random_element(alg, rng);
      const AlgebraElement y = random_element(alg, rng);
      if (norm_max(bracket(x, y)) > C * norm_max(x) * norm_max(y)) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("inner automorphisms") {
  const AlgebraPtr alg = build_algebra("A1");
  CHECK(max_abs(inner_automorphism(alg, GroupElement::identity(2)).matrix() - CMatrix::Identity(3, 3)) < 1e-15);
  const AlgebraAutomorphism s = ad_diag(alg, {1.0, -1.0});
  CHECK(max_abs(s.matrix() - diag({-1.0, 1.0, -1.0})) < 1e-15);
  const AlgebraAutomorphism minus = ad_diag(alg, {-1.0, -1.0});
  CHECK(max_abs(minus.matrix() - CMatrix::Identity(3, 3)) < 1e-15);

  Rng rng(13);
  const AlgebraPtr a3 = build_algebra("A3");
  CMatrix g = CMatrix::Identity(4, 4) + 0.3 * CMatrix(random_coeffs(16, rng).reshaped(4, 4));
  g /= std::pow(g.determinant(), 0.25);
  const AlgebraAutomorphism ad = inner_automorphism(a3, GroupElement(g));
  CHECK(ad.bracket_preservation_residual() < 1e-12);
  for (int t = 0; t < 10; ++t) {
    const CVector x = random_coeffs(a3->dim(), rng);
    const CMatrix expect = g * a3->to_matrix(x) * g.inverse();
    CHECK(max_abs(a3->to_matrix(ad.apply(x)) - expect) < 1e-12);
  }
}

TEST_CASE("diagram automorphism") {
  const AlgebraAutomorphism d = diagram_automorphism(build_algebra("A2"));
  CHECK(automorphism_order(d, 10) == 2);
  CHECK(max_abs(d.compose(d).matrix() - CMatrix::Identity(8, 8)) < 1e-14);
  CHECK(d.bracket_preservation_residual() < 1e-12);
  try {
    diagram_automorphism(build_algebra("A1"));
    FAIL("A1 has no diagram automorphism");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoOuterAutomorphism);
  }
}

TEST_CASE("automorphism order") {
  const AlgebraPtr a1 = build_algebra("A1");
  const AlgebraPtr a2 = build_algebra("A2");
  CHECK(automorphism_order(AlgebraAutomorphism::identity(a1), 10) == 1);
  CHECK(automorphism_order(ad_diag(a1, {1.0, -1.0}), 10) == 2);
  CHECK(automorphism_order(ad_roots(a2, {0, 1, 2}, 3), 10) == 3);
  CHECK_FALSE(automorphism_order(ad_diag(a1, {std::exp(0.1i), std::exp(-0.1i)}), 20).has_value());
}

TEST_CASE("eigenspace gradation") {
  const AlgebraPtr a1 = build_algebra("A1");
  const auto id = eigenspace_gradation(AlgebraAutomorphism::identity(a1), 1);
  REQUIRE(id.size() == 1);
  CHECK(id[0].basis.cols() == 3);

  const auto s = eigenspace_gradation(ad_diag(a1, {1.0, -1.0}), 2);
  REQUIRE(s.size() == 2);
  CHECK(s[0].basis.cols() == 1);
  CHECK(s[1].basis.cols() == 2);
  CHECK(std::abs(s[0].basis(kH, 0)) == doctest::Approx(1.0));

  for (const char* label : {"A2", "A3", "A4"}) {
    const AlgebraPtr alg = build_algebra(label);
    const int N = alg->defining_dim();
    std::vector<int> m(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) m[static_cast<std::size_t>(i)] = (i * i) % 5;
    const auto spaces = eigenspace_gradation(ad_roots(alg, m, 5), 5);
    long total = 0;
    for (const auto& e : spaces) total += e.basis.cols();
    CHECK(total == alg->dim());
    CHECK(gradation_bracket_residual(*alg, spaces) < 1e-9);
  }
}
