#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

// Substituting u = K s in the integral of du / (1 + a cos u).
double closed_form_lift(double a, int K, double s) {
  return 2.0 / K * std::atan(std::sqrt((1.0 - a) / (1.0 + a)) * std::tan(K * s / 2.0));
}

double conjugation_mismatch(const GradingOperator& Q, const CircleDiffeoLift& f, const LoopElement& zeta,
                            const LoopElement& xi, int W) {
  const GradingOperator Qh = conjugate_grading_operator(Q, f, zeta);
  const LoopAutomorphism g{f, LoopAutomorphismElement::exp_ad(zeta)};
  const LoopElement y = apply_loop_automorphism(inverse_loop_automorphism(g), xi, W).element;
  const LoopElement lhs = apply_loop_automorphism(g, apply_grading_operator(Q, y), W).element;
  const LoopElement rhs = apply_grading_operator(Qh, xi);
  double r = 0.0;
  for (int k = -W / 4; k <= W / 4; ++k) r = std::max(r, norm_max(CVector(lhs.mode(k) - rhs.mode(k))));
  return r;
}

}  // namespace

TEST_CASE("rectification of constant fields") {
  const RectificationResult one = rectify_vector_field(VectorFieldK::constant(1, 1.0));
  CHECK(one.kappa == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(one.f.is_rotation());
  CHECK(std::abs(one.f.net_rotation()) < 1e-15);

  const RectificationResult two = rectify_vector_field(VectorFieldK::constant(3, 2.0));
  CHECK(two.kappa == doctest::Approx(2.0).epsilon(1e-15));
  for (double s : {0.3, 1.0, 2.0}) CHECK(two.f(s) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("rectification of 1 + a cos(K s)") {
  for (int K : {1, 2, 3}) {
    for (double a : {0.3, 0.6}) {
      CAPTURE(K);
      CAPTURE(a);
      const std::vector<std::pair<double, double>> ab{{a, 0.0}};
      const RectificationResult r = rectify_vector_field(VectorFieldK::from_real_series(K, 1.0, ab));
      CHECK(std::abs(r.kappa - std::sqrt(1.0 - a * a)) < 1e-12);
      CHECK(r.pushforward_residual < 1e-8);
      CHECK(r.period_residual < 1e-12);
      for (double u : {-2.5, -1.0, 0.2, 1.7, 3.0}) {
        const double s = u / K;
        CHECK(std::abs(r.f(s) - closed_form_lift(a, K, s)) < 1e-10);
      }
    }
  }
}

TEST_CASE("orientation fix") {
  const TwistPtr tw = make_twist(ad_roots(build_algebra("A2"), {0, 1, 2}, 3), 3);
  Rng rng(41);
  const LoopElement eta = random_loop_element(tw, 2, rng);

  const GradingOperator pos(VectorFieldK::constant(3, 1.0), eta);
  const OrientedProblem same = orientation_fix(pos);
  CHECK_FALSE(same.flipped);
  CHECK(mode_norm(same.Q.eta() - eta) == 0.0);

  const GradingOperator neg(VectorFieldK::constant(3, -1.0), eta);
  const OrientedProblem flipped = orientation_fix(neg);
  CHECK(flipped.flipped);
  CHECK(flipped.Q.X().mean() == doctest::Approx(1.0));
  CHECK(rectify_vector_field(flipped.Q.X()).kappa == doctest::Approx(1.0));
  CHECK(max_abs(flipped.twist->automorphism().matrix() - tw->automorphism().inverse().matrix()) < 1e-12);
  for (const auto& [k, x] : eta.modes()) CHECK(norm_max(CVector(flipped.Q.eta().mode(-k) - x)) == 0.0);

  const std::vector<std::pair<double, double>> ab{{0.2, 0.4}};
  const VectorFieldK X = VectorFieldK::from_real_series(3, -1.0, ab);
  for (double s : {0.1, 0.9}) CHECK(X.reflected()(s) == doctest::Approx(-X(-s)));
  for (const auto& [n, c] : X.harmonics()) CHECK(std::abs(X.reflected().reflected().coefficient(n) - c) == 0.0);
  CHECK(mode_norm(eta.reflected(flipped.twist).reflected(tw) - eta) == 0.0);
}

TEST_CASE("conjugation ODE") {
  const TwistPtr tw = untwisted(build_algebra("A1"));
  const ConjugationPath trivial = solve_conjugation_ode(LoopElement::zero(tw), 1.0);
  for (const CMatrix& g : trivial.nodes) CHECK(max_abs(g - CMatrix::Identity(2, 2)) < 1e-15);

  const ConjugationPath p = solve_conjugation_ode(shifted_sl2().eta(), 1.0);
  for (double s : {0.0, 0.4, 1.9, 3.3, 6.0, 9.1}) {
    const CMatrix expect = diag({std::exp(0.5i * s), std::exp(-0.5i * s)});
    CHECK(max_abs(p.at(s) - expect) < 1e-9);
  }
  CHECK(p.ode_residual < 1e-9);

  Rng rng(42);
  const AlgebraPtr a3 = build_algebra("A2");
  const TwistPtr t3 = untwisted(a3);
  for (double kappa : {0.7, 1.3}) {
    const CVector c = random_coeffs(8, rng, 0.5);
    const ConjugationPath q = solve_conjugation_ode(LoopElement::monomial(t3, 0, c), kappa);
    const CMatrix X = a3->to_matrix(c);
    for (double s : {0.5, 2.0, 5.5}) CHECK(max_abs(q.at(s) - eig_exp(-s / kappa * X)) < 1e-9);
  }
}

TEST_CASE("monodromy") {
  const TwistPtr tw = untwisted(build_algebra("A1"));
  const MonodromyResult id = monodromy(solve_conjugation_ode(LoopElement::zero(tw), 1.0), *tw);
  CHECK(max_abs(id.g - CMatrix::Identity(2, 2)) < 1e-14);

  const MonodromyResult m = monodromy(solve_conjugation_ode(shifted_sl2().eta(), 1.0), *tw);
  CHECK(max_abs(m.g + CMatrix::Identity(2, 2)) < 1e-10);
  CHECK(m.residual < 1e-8);
  CHECK(m.checks == 32);

  Rng rng(43);
  const TwistPtr t2 = twisted_sl2();
  const LoopElement eta = random_loop_element(t2, 2, rng, 0.3);
  const ConjugationPath path = solve_conjugation_ode(eta, 1.0);
  const MonodromyResult r = monodromy(path, *t2);
  CHECK(r.residual < 1e-8);
}

TEST_CASE("normalization closed forms") {
  const TwistPtr tw = untwisted(build_algebra("A1"));
  const NormalizationResult standard = normalize(GradingOperator::standard(tw));
  CHECK(standard.K_prime == 1);
  CHECK(max_abs(standard.a_prime.matrix() - CMatrix::Identity(3, 3)) < 1e-12);
  CHECK(standard.dims == std::vector<int>{3});

  const NormalizationResult shifted = normalize(shifted_sl2());
  CHECK(shifted.K_prime == 1);
  CHECK(max_abs(shifted.monodromy.g + CMatrix::Identity(2, 2)) < 1e-10);
  CHECK(max_abs(shifted.a_prime.matrix() - CMatrix::Identity(3, 3)) < 1e-10);
  CHECK(shifted.integrality_residual < 1e-10);
  CHECK(shifted.shift_residual < 1e-7);
  CHECK(shifted.dims == std::vector<int>{3});

  try {
    normalize(shifted_sl2(0.25));
    FAIL("quarter shift accepted");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::NonIntegerSpectrum || e.kind() == ErrorKind::NonIntegerKPrime));
  }

  const NormalizationResult doubled = normalize(GradingOperator(VectorFieldK::constant(1, 2.0), LoopElement::zero(tw)));
  CHECK(doubled.K_prime == 2);
  CHECK(doubled.dims == std::vector<int>{3, 0});

  const std::vector<std::pair<double, double>> ab{{0.3, 0.0}};
  try {
    normalize(GradingOperator(VectorFieldK::from_real_series(1, 1.0, ab), LoopElement::zero(tw)));
    FAIL("kappa K = sqrt(0.91) accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonIntegerKPrime);
  }

  const double c = 1.0 / std::sqrt(0.91);
  const std::vector<std::pair<double, double>> scaled{{0.3 * c, 0.0}};
  const NormalizationResult wobbly =
      normalize(GradingOperator(VectorFieldK::from_real_series(1, c, scaled), shifted_sl2().eta()));
  CHECK(wobbly.kappa == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wobbly.K_prime == 1);
  CHECK(max_abs(wobbly.monodromy.g + CMatrix::Identity(2, 2)) < 1e-9);
  CHECK(wobbly.shift_residual < 1e-7);

  const NormalizationResult reversed = normalize(GradingOperator(VectorFieldK::constant(1, -1.0), shifted_sl2().eta()));
  CHECK(reversed.flipped);
  CHECK(reversed.K_prime == 1);
  CHECK(max_abs(reversed.a_prime.matrix() - CMatrix::Identity(3, 3)) < 1e-10);
}

TEST_CASE("comparison of normal forms") {
  const AlgebraPtr a1 = build_algebra("A1");
  const NormalizationResult r = normalize(shifted_sl2());
  CHECK(compare_normalizations(r, r).equivalent);
  CHECK(compare_automorphisms(ad_diag(a1, {1.0, -1.0}), 2, ad_diag(a1, {-1.0, 1.0}), 2).equivalent);
  const ComparisonResult k = compare_automorphisms(AlgebraAutomorphism::identity(a1), 1, ad_diag(a1, {1.0, -1.0}), 2);
  CHECK_FALSE(k.equivalent);
  CHECK_FALSE(k.reason.empty());

  const AlgebraPtr a2 = build_algebra("A2");
  CHECK(compare_automorphisms(ad_roots(a2, {0, 0, 1}, 3), 3, ad_roots(a2, {0, 0, 2}, 3), 3).equivalent);
  CHECK_FALSE(compare_automorphisms(ad_roots(a2, {0, 0, 1}, 3), 3, ad_roots(a2, {0, 1, 2}, 3), 3).equivalent);
}

TEST_CASE("conjugated operator equals A Q A^{-1}") {
  Rng rng(44);
  const TwistPtr tw = twisted_sl2();
  const GradingOperator Q(VectorFieldK::constant(2, 1.0), random_loop_element(tw, 1, rng, 0.3));
  const LoopElement xi = random_loop_element(tw, 2, rng);
  const LoopElement zeta = random_loop_element(tw, 1, rng, 0.2);
  CHECK(conjugation_mismatch(Q, CircleDiffeoLift::rotation(2, 0.4), zeta, xi, 64) < 1e-8);
  CHECK(conjugation_mismatch(Q, random_circle_lift(2, rng, 0.2), zeta, xi, 96) < 1e-7);

  const GradingOperator Q0 = GradingOperator::standard(tw);
  const GradingOperator same =
      conjugate_grading_operator(Q0, CircleDiffeoLift::rotation(2, 1.1), LoopElement::monomial(tw, 0, sl2(0, 0.3, 0)));
  CHECK(same.X().is_constant());
  CHECK(mode_norm(same.eta()) < 1e-14);
}

TEST_CASE("round trip through a random conjugation") {
  Rng rng(45);
  const AlgebraPtr a1 = build_algebra("A1");
  const AlgebraPtr a2 = build_algebra("A2");
  const std::vector<TwistPtr> twists{untwisted(a1), twisted_sl2(), make_twist(ad_roots(a2, {0, 1, 2}, 3), 3),
                                     make_twist(ad_roots(a2, {0, 0, 1}, 3), 3)};
  for (const TwistPtr& tw : twists) {
    const GradingOperator Q0 = GradingOperator::standard(tw);
    const NormalizationResult base = normalize(Q0);
    for (int t = 0; t < 2; ++t) {
      const RandomConjugation rc = random_conjugation(Q0, rng);
      const NormalizationResult r = normalize(rc.conjugated);
      CHECK(r.K_prime == tw->K());
      CHECK(compare_normalizations(r, base).equivalent);
      CHECK(r.shift_residual < 1e-7);
      CHECK(r.monodromy.residual < 1e-8);
    }
    const GradingOperator Qf = conjugate_grading_operator(Q0, random_circle_lift(tw->K(), rng, 0.2),
                                                          random_loop_element(tw, 1, rng, 0.2));
    const NormalizationResult rf = normalize(Qf);
    CHECK(rf.K_prime == tw->K());
    CHECK(compare_normalizations(rf, base).equivalent);
  }
}

TEST_CASE("integrator convergence order") {
  Rng rng(46);
  const TwistPtr tw = make_twist(ad_roots(build_algebra("A2"), {0, 1, 2}, 3), 3);
  const LoopElement eta = random_loop_element(tw, 2, rng, 0.5);
  const OrderEstimate est = estimate_convergence_order(eta, 1.0);
  CHECK(est.order >= 4.0);
  CHECK(est.doubling_residual < 1e-9);
  CHECK(est.steps.size() == est.differences.size() + 1);

  const ConjugationPath fine = solve_conjugation_ode(eta, 1.0, OdeOptions{8192, false, 1e-13, 24, 1});
  const ConjugationPath coarse = solve_conjugation_ode(eta, 1.0);
  CHECK(max_abs(fine.nodes.back() - coarse.at(fine.length())) < 1e-10);
}
