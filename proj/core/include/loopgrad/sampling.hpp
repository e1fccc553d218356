#pragma once

// Seeded random test data: algebra elements, twisted loop elements, lifts.

#include <random>

#include "loopgrad/normalizer.hpp"

namespace loopgrad {

using Rng = std::mt19937_64;

/// Coordinates with independent real and imaginary parts uniform in [-scale, scale].
CVector random_coeffs(int dim, Rng& rng, double scale = 1.0);
AlgebraElement random_element(const AlgebraPtr& alg, Rng& rng, double scale = 1.0);

/// Random element with modes |k| <= radius, each projected onto its twist eigenspace.
LoopElement random_loop_element(const TwistPtr& twist, int radius, Rng& rng, double scale = 1.0);

/// Lift sigma + c + a cos(K sigma) + b sin(K sigma) with K sqrt(a^2 + b^2) <= max_slope < 1.
CircleDiffeoLift random_circle_lift(int K, Rng& rng, double max_slope = 0.5);

struct RandomConjugation {
  CircleDiffeoLift f;
  LoopElement zeta;
  GradingOperator conjugated;
};

/// A Q A^{-1} for A = (random rotation, Ad(exp zeta)) with zeta of modes |k| <= radius.
RandomConjugation random_conjugation(const GradingOperator& Q, Rng& rng, int radius = 2, double scale = 0.3);

}  // namespace loopgrad
