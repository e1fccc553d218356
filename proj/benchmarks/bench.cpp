#include <benchmark/benchmark.h>

#include "loopgrad/classify.hpp"
#include "loopgrad/sampling.hpp"

using namespace loopgrad;

static void BM_AlgebraBracket(benchmark::State& state) {
  const AlgebraPtr alg = build_algebra("A" + std::to_string(state.range(0)));
  Rng rng(1);
  const CVector x = random_coeffs(alg->dim(), rng);
  const CVector y = random_coeffs(alg->dim(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(alg->bracket(x, y));
}
BENCHMARK(BM_AlgebraBracket)->DenseRange(1, 4);

static void BM_LoopBracket(benchmark::State& state) {
  const TwistPtr tw = untwisted(build_algebra("A2"));
  Rng rng(2);
  const int radius = static_cast<int>(state.range(0));
  const LoopElement x = random_loop_element(tw, radius, rng);
  const LoopElement y = random_loop_element(tw, radius, rng);
  for (auto _ : state) benchmark::DoNotOptimize(loop_bracket(x, y));
}
BENCHMARK(BM_LoopBracket)->RangeMultiplier(4)->Range(2, 32);

static void BM_FourierProject(benchmark::State& state) {
  const TwistPtr tw = untwisted(build_algebra("A2"));
  Rng rng(3);
  const int M = static_cast<int>(state.range(0));
  const auto samples = sample(random_loop_element(tw, 8, rng), M);
  for (auto _ : state) benchmark::DoNotOptimize(fourier_project(samples, tw, 8));
}
BENCHMARK(BM_FourierProject)->RangeMultiplier(4)->Range(64, 4096);

static void BM_NormalizeShifted(benchmark::State& state) {
  const TwistPtr tw = untwisted(build_algebra("A1"));
  const LoopElement eta = LoopElement::monomial(tw, 0, CVector::Unit(3, 1) * Complex(0.0, -0.5));
  const GradingOperator Q(VectorFieldK::constant(1, 1.0), eta);
  NormalizeOptions opts;
  opts.ode.steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(normalize(Q, opts));
}
BENCHMARK(BM_NormalizeShifted)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_Classify(benchmark::State& state) {
  const AlgebraPtr alg = build_algebra("A2");
  const int K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(classify(alg, K, 1));
}
BENCHMARK(BM_Classify)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
