#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

std::vector<TwistPtr> standard_twists() {
  const AlgebraPtr a1 = build_algebra("A1");
  const AlgebraPtr a2 = build_algebra("A2");
  return {untwisted(a1),
          twisted_sl2(),
          make_twist(ad_roots(a1, {0, 1}, 3), 3),
          untwisted(a2),
          make_twist(ad_roots(a2, {0, 0, 1}, 2), 2),
          make_twist(ad_roots(a2, {0, 1, 2}, 3), 3),
          make_twist(ad_roots(a2, {0, 0, 1}, 3), 3)};
}

// Pointwise multiplication by the coefficient function of X.
LoopElement multiply(const VectorFieldK& X, const LoopElement& xi) {
  ModeMap out;
  for (const auto& [n, c] : X.harmonics()) {
    for (const auto& [k, x] : xi.modes()) {
      auto [it, inserted] = out.try_emplace(k + n * X.K(), c * x);
      if (!inserted) it->second += c * x;
    }
  }
  return LoopElement::make(xi.twist(), out);
}

double max_mode_diff(const LoopElement& a, const LoopElement& b) { return mode_norm(a - b); }

}  // namespace

TEST_CASE("grading operator examples") {
  const TwistPtr tw = untwisted(build_algebra("A1"));
  const GradingOperator Q0 = GradingOperator::standard(tw);
  for (int k = -3; k <= 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      const LoopElement x = LoopElement::monomial(tw, k, CVector::Unit(3, i));
      CHECK(max_mode_diff(apply_grading_operator(Q0, x), x * Complex(k)) < 1e-15);
    }
  }
  CHECK(apply_grading_operator(Q0, LoopElement::zero(tw)).is_zero());

  const GradingOperator Q = shifted_sl2();
  for (int k = -3; k <= 3; ++k) {
    const LoopElement e = LoopElement::monomial(tw, k, sl2(1, 0, 0));
    const LoopElement h = LoopElement::monomial(tw, k, sl2(0, 1, 0));
    const LoopElement f = LoopElement::monomial(tw, k, sl2(0, 0, 1));
    CHECK(max_mode_diff(apply_grading_operator(Q, e), e * Complex(k + 1)) < 1e-15);
    CHECK(max_mode_diff(apply_grading_operator(Q, h), h * Complex(k)) < 1e-15);
    CHECK(max_mode_diff(apply_grading_operator(Q, f), f * Complex(k - 1)) < 1e-15);
  }
}

TEST_CASE("grading operator is linear and preserves the twist") {
  Rng rng(31);
  const std::vector<std::pair<double, double>> ab{{0.2, -0.1}, {0.05, 0.0}};
  for (const TwistPtr& tw : standard_twists()) {
    const GradingOperator Q(VectorFieldK::from_real_series(tw->K(), 1.0, ab), random_loop_element(tw, 2, rng));
    for (int t = 0; t < 5; ++t) {
      const LoopElement x = random_loop_element(tw, 3, rng);
      const LoopElement y = random_loop_element(tw, 3, rng);
      const Complex c(-0.4, 2.0);
      const LoopElement lhs = apply_grading_operator(Q, x * c + y);
      const LoopElement rhs = apply_grading_operator(Q, x) * c + apply_grading_operator(Q, y);
      CHECK(max_mode_diff(lhs, rhs) < 1e-12);
      CHECK(apply_grading_operator(Q, x).twist_residual() < 1e-9);
    }
  }
}

TEST_CASE("derivation check") {
  Rng rng(32);
  const TwistPtr tw = make_twist(ad_roots(build_algebra("A2"), {0, 1, 2}, 3), 3);
  std::vector<std::pair<LoopElement, LoopElement>> pairs;
  for (int t = 0; t < 10; ++t) pairs.emplace_back(random_loop_element(tw, 3, rng), random_loop_element(tw, 3, rng));

  const DerivationReport standard = check_derivation(GradingOperator::standard(tw), pairs);
  CHECK(standard.ok);
  CHECK(standard.max_residual < 1e-12);
  CHECK(standard.residuals.size() == pairs.size());

  const std::vector<std::pair<double, double>> ab{{0.3, 0.1}};
  const VectorFieldK X = VectorFieldK::from_real_series(3, 1.0, ab);
  const GradingOperator Q(X, random_loop_element(tw, 2, rng));
  const DerivationReport general = check_derivation(Q, pairs);
  CHECK(general.ok);
  CHECK(general.max_residual < 1e-9);

  const LoopElement eta = Q.eta();
  const LoopOperator corrupted = [&](const LoopElement& xi) {
    return apply_vector_field(X, xi) * Complex(0.0, -1.0) + multiply(X, loop_bracket(eta, xi) + xi) * kI;
  };
  CHECK_FALSE(check_derivation(corrupted, pairs).ok);
}

TEST_CASE("vector field validation") {
  const VectorFieldReport one = validate_vector_field(VectorFieldK::constant(2, 1.0));
  CHECK(one.min_abs == doctest::Approx(1.0));
  CHECK(one.sign == 1);
  CHECK(validate_vector_field(VectorFieldK::constant(1, -2.0)).sign == -1);
  try {
    validate_vector_field(VectorFieldK::constant(1, 0.0));
    FAIL("zero field accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroFieldInfiniteDimensional);
  }
  for (int K : {1, 2, 3}) {
    const std::vector<std::pair<double, double>> cosine{{1.0, 0.0}};
    try {
      validate_vector_field(VectorFieldK::from_real_series(K, 0.0, cosine));
      FAIL("cos(K s) accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::FieldHasZeros);
    }
  }
  try {
    VectorFieldK(1, {{1, Complex(1.0, 0.0)}});
    FAIL("complex-valued field accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
  }
}

TEST_CASE("grading subspaces of the standard twisted sl2 operator") {
  const TwistPtr tw = twisted_sl2();
  const int N = 4;
  const GradationTable t = grading_subspaces(GradingOperator::standard(tw), N);
  REQUIRE(t.entries.size() == 2 * N + 1);
  for (const auto& e : t.entries) {
    CAPTURE(e.degree);
    const bool even = e.degree % 2 == 0;
    REQUIRE(e.basis.size() == (even ? 1u : 2u));
    for (const LoopElement& b : e.basis) {
      REQUIRE(b.modes().size() == 1);
      CHECK(b.modes().begin()->first == e.degree);
      const CVector& x = b.modes().begin()->second;
      if (even) CHECK(std::abs(x(kE)) + std::abs(x(kF)) < 1e-12);
      else CHECK(std::abs(x(kH)) < 1e-12);
    }
  }
  CHECK(t.total_dim() == (N + 1) * 1 + N * 2);
  CHECK(t.max_eigenvalue_deviation < 1e-12);
}

TEST_CASE("grading subspaces of the shifted sl2 operator") {
  const int N = 4;
  const GradationTable t = grading_subspaces(shifted_sl2(), N);
  CHECK(t.total_dim() == 3 * (2 * N + 1));
  for (int k = -(N - 1); k <= N - 1; ++k) {
    CAPTURE(k);
    const GradationEntry* e = t.find(k);
    REQUIRE(e != nullptr);
    CHECK(e->basis.size() == 3);
    for (const LoopElement& b : e->basis) {
      for (const auto& [m, x] : b.modes()) {
        CHECK(std::abs(m - k) <= 1);
        if (m == k - 1) CHECK(std::abs(x(kH)) + std::abs(x(kF)) < 1e-12);
        if (m == k) CHECK(std::abs(x(kE)) + std::abs(x(kF)) < 1e-12);
        if (m == k + 1) CHECK(std::abs(x(kE)) + std::abs(x(kH)) < 1e-12);
      }
    }
  }
}

TEST_CASE("half-integer spectrum is rejected") {
  try {
    grading_subspaces(shifted_sl2(0.25), 3);
    FAIL("quarter shift accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonIntegerSpectrum);
  }
}

TEST_CASE("window leakage and non-constant fields are reported") {
  const TwistPtr tw = untwisted(build_algebra("A1"));
  const std::vector<std::pair<double, double>> ab{{0.3, 0.0}};
  try {
    grading_subspaces(GradingOperator(VectorFieldK::from_real_series(1, 1.0, ab), LoopElement::zero(tw)), 3);
    FAIL("non-constant field accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WindowLeakage);
  }
}

TEST_CASE("subspaces of standard operators: dimension count and bracket closure") {
  const int N = 4;
  for (const TwistPtr& tw : standard_twists()) {
    const GradationTable t = grading_subspaces(GradingOperator::standard(tw), N);
    int expected = 0;
    for (int k = -N; k <= N; ++k) {
      const GradationEntry* e = t.find(k);
      REQUIRE(e != nullptr);
      const int d = static_cast<int>(tw->eigenbasis(k).cols());
      CHECK(static_cast<int>(e->basis.size()) == d);
      expected += d;
    }
    CHECK(t.total_dim() == expected);
    CHECK(gradation_bracket_residual(t, GradingOperator::standard(tw)) < 1e-9);
    const auto dims = standard_dimensions(*tw, N);
    for (const auto& [k, d] : dims) CHECK(t.find(k)->basis.size() == static_cast<std::size_t>(d));
  }
}

TEST_CASE("phase flow") {
  Rng rng(33);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  const int N = 8;
  for (const TwistPtr& tw : standard_twists()) {
    const GradationTable t = grading_subspaces(GradingOperator::standard(tw), N);
    const LoopElement x0 = random_loop_element(tw, 3, rng);
    CHECK(max_mode_diff(flow(0.0, x0, t), x0) < 1e-13);
    for (int i = 0; i < 15; ++i) {
      const double t1 = U(rng);
      const double t2 = U(rng);
      const LoopElement x = random_loop_element(tw, 3, rng);
      const LoopElement y = random_loop_element(tw, 3, rng);
      CHECK(max_mode_diff(flow(t1, flow(t2, x, t), t), flow(t1 + t2, x, t)) < 1e-10);
      CHECK(max_mode_diff(flow(t1, loop_bracket(x, y), t), loop_bracket(flow(t1, x, t), flow(t1, y, t))) < 1e-9);
      const LoopElement fx = flow(t1, x, t);
      for (const auto& [k, v] : x.modes()) {
        CHECK(norm_max(CVector(fx.mode(k) - v * std::polar(1.0, -k * t1))) < 1e-12);
      }
    }
  }

  const GradationTable s = grading_subspaces(shifted_sl2(), N);
  const TwistPtr tw = untwisted(build_algebra("A1"));
  for (int i = 0; i < 10; ++i) {
    const double t1 = U(rng);
    const LoopElement x = random_loop_element(tw, 2, rng);
    const LoopElement y = random_loop_element(tw, 2, rng);
    CHECK(max_mode_diff(flow(t1, loop_bracket(x, y), s), loop_bracket(flow(t1, x, s), flow(t1, y, s))) < 1e-9);
    const auto parts = decompose(x, s);
    LoopElement sum = LoopElement::zero(tw);
    for (const auto& [k, part] : parts) sum = sum + part;
    CHECK(max_mode_diff(sum, x) < 1e-12);
  }
}

TEST_CASE("derivations") {
  const TwistPtr tw = twisted_sl2();
  Rng rng(34);
  const Derivation zero(VectorFieldK(2, {}), LoopElement::zero(tw));
  CHECK(zero(random_loop_element(tw, 3, rng)).is_zero());

  const Derivation D = derivation_from_pair(VectorFieldK::constant(2, 1.0), LoopElement::zero(tw));
  const GradingOperator Q0 = GradingOperator::standard(tw);
  for (int i = 0; i < 5; ++i) {
    const LoopElement x = random_loop_element(tw, 3, rng);
    CHECK(max_mode_diff(D(x) * kI, apply_grading_operator(Q0, x)) < 1e-14);
  }

  const std::vector<std::pair<double, double>> ab{{0.1, 0.2}};
  const Derivation D2(VectorFieldK::from_real_series(2, 1.0, ab), random_loop_element(tw, 2, rng));
  std::vector<std::pair<LoopElement, LoopElement>> pairs;
  for (int i = 0; i < 5; ++i) pairs.emplace_back(random_loop_element(tw, 2, rng), random_loop_element(tw, 2, rng));
  CHECK(check_derivation(LoopOperator(D2), pairs).ok);
  const GradingOperator Q2 = D2.grading_operator();
  for (const auto& [x, y] : pairs) CHECK(max_mode_diff(D2(x) * kI, apply_grading_operator(Q2, x)) < 1e-14);
}

TEST_CASE("window vectors") {
  Rng rng(35);
  const TwistPtr tw = twisted_sl2();
  const LoopElement x = random_loop_element(tw, 3, rng);
  CHECK(max_mode_diff(from_window_vector(tw, to_window_vector(x, 3), 3), x) == 0.0);
  try {
    to_window_vector(x, 2);
    FAIL("out-of-window modes accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::WindowLeakage);
  }
}
