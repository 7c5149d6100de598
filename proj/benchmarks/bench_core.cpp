#include "freelight/electron.hpp"
#include "freelight/emission.hpp"
#include "freelight/fock.hpp"
#include "freelight/synthesis.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace freelight;

static void BM_CoherenceFactor(benchmark::State& state) {
  const ElectronPulse p{ielsModulate({static_cast<double>(state.range(0)), 0.0, 1, 0.17}), kInf, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(coherenceFactor(p, 1));
}
BENCHMARK(BM_CoherenceFactor)->Arg(2)->Arg(8)->Arg(20);

static void BM_CoherenceFactorClosed(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(coherenceFactorClosedDrift(8.0, 0.17, 1));
}
BENCHMARK(BM_CoherenceFactorClosed);

static void BM_EmitNoFilter(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const std::vector<ElectronPulse> ps(N, ElectronPulse{ielsModulate({1.0, 0.0, 1, 0.2}), kInf, 0.0});
  for (auto _ : state) benchmark::DoNotOptimize(emitNoFilter(ps, 0.7));
}
BENCHMARK(BM_EmitNoFilter)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_EmitExact(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const std::vector<ModulationSpectrum> sp(N, ielsModulate({1.0, 0.0, 1, 0.2}));
  const std::vector<int> s(N, -1);
  for (auto _ : state) benchmark::DoNotOptimize(emitExact(sp, 0.7, s));
}
BENCHMARK(BM_EmitExact)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_SingleWindow(benchmark::State& state) {
  const ElectronPulse p{ielsModulate({1.0, 0.0, 1, 0.0}), 3.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(emitSingleWindow(p, 1.0, {0, 0.5}));
}
BENCHMARK(BM_SingleWindow)->Unit(benchmark::kMillisecond);

static void BM_FidelityKernel(benchmark::State& state) {
  SynthesisProblem pr;
  pr.target = Cat{1.0, std::numbers::pi / 2.0};
  pr.beta0 = 1.5;
  const FidelityKernel k(pr, -3);
  RingProfile prof;
  for (int i = 0; i < state.range(0); ++i) prof.betas.push_back({1.0 + i, 0.3 * i});
  prof.drift = 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(k(prof));
}
BENCHMARK(BM_FidelityKernel)->Arg(1)->Arg(6);

static void BM_Wigner(benchmark::State& state) {
  const auto cat = targetFactory(Cat{2.0, 0.0}, 40);
  std::vector<double> ax;
  for (int i = 0; i <= 100; ++i) ax.push_back(-5.0 + 0.1 * i);
  for (auto _ : state) benchmark::DoNotOptimize(wigner(cat, ax, ax));
}
BENCHMARK(BM_Wigner)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
