#include <algorithm>
#include <cmath>

#include "cli.hpp"
#include "loopgrad/sampling.hpp"

namespace loopgrad::cli {

using io::json;

namespace {

struct Suite {
  json checks = json::array();
  bool pass = true;

  void below(const std::string& name, double value, double threshold) {
    const bool ok = value < threshold;
    pass = pass && ok;
    checks.push_back(json{{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", ok}});
  }
  void expect(const std::string& name, bool ok, const std::string& detail = {}) {
    pass = pass && ok;
    json c{{"name", name}, {"pass", ok}};
    if (!detail.empty()) c["detail"] = detail;
    checks.push_back(c);
  }
  template <typename F>
  void rejects(const std::string& name, ErrorKind kind, F&& f) {
    try {
      f();
      expect(name, false, "no error raised");
    } catch (const Error& e) {
      expect(name, e.kind() == kind, std::string(to_string(e.kind())));
    }
  }
};

TwistPtr inner_twist(const AlgebraPtr& alg, const std::vector<double>& exponents, int K) {
  const int N = alg->defining_dim();
  CMatrix t = CMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) t(i, i) = std::polar(1.0, 2.0 * kPi * exponents[static_cast<std::size_t>(i)] / K);
  return make_twist(inner_automorphism(alg, GroupElement(t)), K);
}

}  // namespace

json selfcheck_report(std::uint64_t seed) {
  Rng rng(seed);
  Suite s;

  double jac = 0.0;
  double real = 0.0;
  double algebra_ratio = 0.0;
  for (const char* label : {"A1", "A2", "A3", "A4"}) {
    const AlgebraPtr alg = build_algebra(label);
    jac = std::max(jac, alg->jacobi_residual());
    real = std::max(real, alg->realization_residual());
    for (int i = 0; i < 200; ++i) {
      const AlgebraElement x = random_element(alg, rng);
      const AlgebraElement y = random_element(alg, rng);
      algebra_ratio = std::max(algebra_ratio, norm_max(bracket(x, y)) / (alg->bracket_constant() * norm_max(x) * norm_max(y)));
    }
  }
  s.below("algebra.jacobi_residual", jac, 1e-12);
  s.below("algebra.realization_residual", real, 1e-12);
  s.below("algebra.bracket_bound_ratio", algebra_ratio, 1.0 + 1e-12);

  const AlgebraPtr sl2 = build_algebra("A1");
  const AlgebraPtr sl3 = build_algebra("A2");
  const TwistPtr u2 = untwisted(sl2);
  const TwistPtr tw2 = inner_twist(sl2, {0.0, 1.0}, 2);
  const TwistPtr tw3 = inner_twist(sl3, {0.0, 1.0, 2.0}, 3);

  double loop_ratio = 0.0;
  for (int i = 0; i < 50; ++i) {
    const LoopElement x = random_loop_element(u2, 3, rng);
    const LoopElement y = random_loop_element(u2, 3, rng);
    for (int m = 1; m <= 4; ++m) {
      const auto r = check_bracket_bound(x, y, m);
      loop_ratio = std::max(loop_ratio, r.lhs / r.rhs);
    }
  }
  s.below("loop.seminorm_bracket_bound_ratio", loop_ratio, 1.0 + 1e-12);

  double conv = 0.0;
  double twist_res = 0.0;
  for (int i = 0; i < 20; ++i) {
    const LoopElement x = random_loop_element(tw3, 3, rng);
    const LoopElement y = random_loop_element(tw3, 3, rng);
    const LoopElement b = loop_bracket(x, y);
    const auto xs = sample(x, 64);
    const auto ys = sample(y, 64);
    std::vector<CVector> pw;
    for (std::size_t j = 0; j < xs.size(); ++j) pw.push_back(sl3->bracket(xs[j], ys[j]));
    conv = std::max(conv, mode_norm(fourier_project(pw, tw3, 6).element - b));
    twist_res = std::max(twist_res, b.twist_residual());
  }
  s.below("loop.convolution_vs_pointwise", conv, 1e-10);
  s.below("loop.bracket_twist_residual", twist_res, 1e-9);

  {
    const GradingOperator Q = GradingOperator::standard(tw2);
    const GradationTable t = grading_subspaces(Q, 4);
    bool dims_ok = t.entries.size() == 9;
    for (const auto& e : t.entries) dims_ok = dims_ok && static_cast<int>(e.basis.size()) == (e.degree % 2 == 0 ? 1 : 2);
    s.expect("gradation.standard_twisted_sl2_dims", dims_ok);
    s.below("gradation.standard_bracket_residual", gradation_bracket_residual(t, Q), 1e-9);
    double law = 0.0;
    for (int i = 0; i < 10; ++i) {
      const LoopElement x = random_loop_element(tw2, 2, rng);
      law = std::max(law, mode_norm(flow(0.3, flow(0.5, x, t), t) - flow(0.8, x, t)));
    }
    s.below("gradation.flow_group_law", law, 1e-10);
  }

  const LoopElement half = LoopElement::monomial(u2, 0, CVector::Unit(3, 1) * Complex(0.0, -0.5));
  const GradingOperator shifted(VectorFieldK::constant(1, 1.0), half);
  {
    const GradationTable t = grading_subspaces(shifted, 3);
    bool ok = true;
    for (const auto& e : t.entries) ok = ok && (std::abs(e.degree) > 2 || e.basis.size() == 3);
    s.expect("gradation.shifted_sl2_dims", ok);
    const NormalizationResult r = normalize(shifted);
    s.below("normalize.shifted_monodromy_minus_identity", max_abs(r.monodromy.g + CMatrix::Identity(2, 2)), 1e-10);
    s.expect("normalize.shifted_K_prime", r.K_prime == 1);
    s.below("normalize.shifted_a_prime_minus_identity", max_abs(r.a_prime.matrix() - CMatrix::Identity(3, 3)), 1e-10);
    s.below("normalize.shifted_integrality_residual", r.integrality_residual, 1e-10);
    s.below("normalize.shifted_shift_residual", r.shift_residual, 1e-7);
  }
  const GradingOperator quarter(VectorFieldK::constant(1, 1.0), half * Complex(0.5));
  s.rejects("gradation.quarter_rejected", ErrorKind::NonIntegerSpectrum, [&] { grading_subspaces(quarter, 3); });
  s.rejects("normalize.quarter_rejected", ErrorKind::NonIntegerSpectrum, [&] { normalize(quarter); });
  s.rejects("gradation.zero_field_rejected", ErrorKind::ZeroFieldInfiniteDimensional,
            [&] { validate_vector_field(VectorFieldK(1, {})); });

  {
    const std::vector<std::pair<double, double>> ab{{0.3, 0.0}};
    const RectificationResult r = rectify_vector_field(VectorFieldK::from_real_series(2, 1.0, ab));
    s.below("normalize.rectification_kappa_error", std::abs(r.kappa - std::sqrt(0.91)), 1e-9);
    s.below("normalize.rectification_pushforward", r.pushforward_residual, 1e-8);
  }

  {
    bool agree = true;
    for (int K = 1; K <= 6; ++K) agree = agree && classify(sl2, K, 1).oracle_agreement;
    for (int K = 1; K <= 4; ++K) agree = agree && classify(sl3, K, 1).oracle_agreement;
    s.expect("classify.oracle_agreement", agree);
  }

  {
    double integrality = 0.0;
    bool same = true;
    for (const TwistPtr& tw : {tw2, tw3}) {
      const auto rc = random_conjugation(GradingOperator::standard(tw), rng);
      const NormalizationResult r = normalize(rc.conjugated);
      integrality = std::max(integrality, r.integrality_residual);
      same = same && r.K_prime == tw->K() && compare_automorphisms(r.a_prime, r.K_prime, tw->automorphism(), tw->K()).equivalent;
    }
    s.expect("normalize.round_trip_class", same);
    s.below("normalize.round_trip_integrality", integrality, 1e-6);
  }

  return json{{"schema", io::kSchema}, {"status", s.pass ? "ok" : "failed"}, {"seed", seed}, {"pass", s.pass}, {"checks", s.checks}};
}

}  // namespace loopgrad::cli
