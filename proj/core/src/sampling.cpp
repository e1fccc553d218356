#include "loopgrad/sampling.hpp"

#include <cmath>

namespace loopgrad {

CVector random_coeffs(int dim, Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CVector x(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = u(rng);
    const double im = u(rng);
    x(i) = Complex(re, im);
  }
  return x;
}

AlgebraElement random_element(const AlgebraPtr& alg, Rng& rng, double scale) {
  return AlgebraElement(alg, random_coeffs(alg->dim(), rng, scale));
}

LoopElement random_loop_element(const TwistPtr& twist, int radius, Rng& rng, double scale) {
  ModeMap modes;
  const int d = twist->algebra()->dim();
  for (int k = -radius; k <= radius; ++k) {
    CVector x = twist->projector(k) * random_coeffs(d, rng, scale);
    if (norm_max(x) > 0.0) modes.emplace(k, std::move(x));
  }
  return LoopElement::trusted(twist, std::move(modes));
}

CircleDiffeoLift random_circle_lift(int K, Rng& rng, double max_slope) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = 2.0 * kPi * u(rng);
  const double amp = max_slope * u(rng) / K;
  const double phase = 2.0 * kPi * u(rng);
  ElementaryLift e;
  e.rotation = c;
  e.harmonics = {{amp * std::cos(phase), amp * std::sin(phase)}};
  return CircleDiffeoLift::from_series(K, e);
}

RandomConjugation random_conjugation(const GradingOperator& Q, Rng& rng, int radius, double scale) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  const int K = Q.twist()->K();
  CircleDiffeoLift f = CircleDiffeoLift::rotation(K, u(rng));
  LoopElement zeta = random_loop_element(Q.twist(), radius, rng, scale);
  GradingOperator conj = conjugate_grading_operator(Q, f, zeta);
  return {std::move(f), std::move(zeta), std::move(conj)};
}

}  // namespace loopgrad
