#include <benchmark/benchmark.h>

#include <vector>

#include "bchlab/criterion.hpp"
#include "bchlab/evolution.hpp"
#include "bchlab/spectral.hpp"
#include "bchlab/wave.hpp"

using namespace bchlab;

namespace {

const WaveParams kRef{1.0, 2.0, 0.4};

void BM_BuildProfile(benchmark::State& state) {
  const ProfileOptions opt{static_cast<std::size_t>(state.range(0)), 1e-10, 40.0};
  for (auto _ : state) benchmark::DoNotOptimize(build_profile(kRef, opt));
}
BENCHMARK(BM_BuildProfile)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_SpectrumCollocation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto prof = build_profile(kRef, ProfileOptions{n, 1e-10, 30.0});
  const auto opt = spectral_collocation();
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(prof, opt));
}
BENCHMARK(BM_SpectrumCollocation)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SpectrumBanded(benchmark::State& state) {
  const auto prof = build_profile(kRef, ProfileOptions{2048, 1e-10, 30.0});
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(prof));
}
BENCHMARK(BM_SpectrumBanded)->Unit(benchmark::kMillisecond);

void BM_Rhs(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = wave_field(embedded_profile(kRef, n, 80.0));
  for (auto _ : state) benchmark::DoNotOptimize(rhs(f, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Rhs)->RangeMultiplier(4)->Range(1024, 16384)->Complexity(benchmark::oNLogN);

void BM_EvolveSteps(benchmark::State& state) {
  EvolutionConfig cfg;
  cfg.n = 4096;
  cfg.domain_length = 80.0;
  cfg.dt = 0.0025;
  cfg.t_final = 0.025;  // ten steps
  const auto f = wave_field(embedded_profile(kRef, cfg.n, cfg.domain_length));
  for (auto _ : state) benchmark::DoNotOptimize(evolve(f, cfg));
}
BENCHMARK(BM_EvolveSteps)->Unit(benchmark::kMillisecond);

void BM_CriterionSweep(benchmark::State& state) {
  std::vector<double> hs;
  for (int i = 1; i <= 19; ++i) hs.push_back(2.0 * i / 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(criterion_sweep(hs));
}
BENCHMARK(BM_CriterionSweep)->Unit(benchmark::kMillisecond);

void BM_ChargeDerivative(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dq_dc(kRef));
}
BENCHMARK(BM_ChargeDerivative)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
