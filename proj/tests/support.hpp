#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "loopgrad/classify.hpp"
#include "loopgrad/sampling.hpp"

namespace testing {

using namespace loopgrad;
using namespace std::complex_literals;

inline constexpr int kE = 0;
inline constexpr int kH = 1;
inline constexpr int kF = 2;

inline CVector sl2(Complex e, Complex h, Complex f) {
  CVector v(3);
  v << e, h, f;
  return v;
}

inline CMatrix diag(std::vector<Complex> d) {
  CMatrix m = CMatrix::Zero(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

inline AlgebraAutomorphism ad_diag(const AlgebraPtr& alg, std::vector<Complex> d) {
  return inner_automorphism(alg, GroupElement(diag(std::move(d))));
}

// Ad(diag(eps_K^{m_0}, ..., eps_K^{m_{N-1}}))
inline AlgebraAutomorphism ad_roots(const AlgebraPtr& alg, const std::vector<int>& m, int K) {
  std::vector<Complex> d;
  for (int e : m) d.push_back(std::polar(1.0, 2.0 * kPi * e / K));
  return ad_diag(alg, d);
}

inline TwistPtr twisted_sl2() {
  const AlgebraPtr alg = build_algebra("A1");
  return make_twist(ad_diag(alg, {1.0, -1.0}), 2);
}

inline GradingOperator shifted_sl2(double c = 0.5) {
  const TwistPtr tw = untwisted(build_algebra("A1"));
  return GradingOperator(VectorFieldK::constant(1, 1.0), LoopElement::monomial(tw, 0, sl2(0, Complex(0, -c), 0)));
}

// Independent exponential for diagonalizable matrices.
inline CMatrix eig_exp(const CMatrix& m) {
  Eigen::ComplexEigenSolver<CMatrix> es(m);
  const CMatrix& V = es.eigenvectors();
  CVector d = es.eigenvalues();
  for (int i = 0; i < d.size(); ++i) d(i) = std::exp(d(i));
  return V * d.asDiagonal() * V.inverse();
}

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

}  // namespace testing
