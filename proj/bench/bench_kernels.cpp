// Serial reference kernels against their OpenMP counterparts. Thread count
// follows OMP_NUM_THREADS / MIXREG_THREADS.

#include <benchmark/benchmark.h>

#include "mixreg/estimators.hpp"
#include "mixreg/experiment.hpp"

using namespace mixreg;

namespace {

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

ProcessSpec ar_spec() {
  Vector theta(2);
  theta << 0.5, 0.2;
  return ProcessSpec::gaussian_ar(theta, 1.0, 1);
}

void BM_RunTrials(benchmark::State& state) {
  const auto spec = ar_spec();
  const RegressionProblem prob = population_optimum(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trials(spec, prob, 10000, 256, 1, exec_of(state)));
  }
}
BENCHMARK(BM_RunTrials)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_NoiseSpectrum(benchmark::State& state) {
  const auto spec = ProcessSpec::iid_gaussian(Matrix::Identity(5, 5), Matrix::Ones(1, 5), 1.0);
  const RegressionProblem prob = population_optimum(spec);
  const auto partition = BlockPartition::uniform(2000, 100);
  SpectrumOptions opt;
  opt.exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(noise_spectrum(spec, prob, partition, 1000, 2, opt));
  }
}
BENCHMARK(BM_NoiseSpectrum)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_CltVariance(benchmark::State& state) {
  Vector theta(1);
  theta << 0.5;
  const auto spec = ProcessSpec::gaussian_ar(theta, 1.0, 1, 2);
  const RegressionProblem prob = population_optimum(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(clt_variance(spec, prob, {1, 4, 16, 64, 128}, 4000, 3, exec_of(state)));
  }
}
BENCHMARK(BM_CltVariance)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_EstimateR(benchmark::State& state) {
  const auto spec = ar_spec();
  const RegressionProblem prob = population_optimum(spec);
  const auto partition = BlockPartition::uniform(4000, 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_r(spec, prob, partition, 1000, 4, 4.0, exec_of(state)));
  }
}
BENCHMARK(BM_EstimateR)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
