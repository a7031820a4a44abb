// Serial reference versus OpenMP kernels on the heavy paths.
#include <benchmark/benchmark.h>

#include "semitoric/catalog.hpp"
#include "semitoric/halton.hpp"
#include "semitoric/planar.hpp"
#include "semitoric/polygon.hpp"
#include "semitoric/quantum.hpp"
#include "semitoric/singularity.hpp"

using namespace semitoric;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial() : Execution::threads();
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

void BM_JointSpectrum(benchmark::State& state) {
  const OperatorPair pair = build_coupled_spins_for(static_cast<double>(state.range(1)), 1.0, 2.5, 0.5);
  SpectrumOptions opts;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(joint_spectrum(pair, opts));
  label(state);
}
BENCHMARK(BM_JointSpectrum)->ArgsProduct({{0, 1}, {20, 40}})->Unit(benchmark::kMillisecond);

void BM_JointSpectrumDenseReference(benchmark::State& state) {
  const OperatorPair pair = build_coupled_spins_for(8.0, 1.0, 2.5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(joint_spectrum_reference(pair));
}
BENCHMARK(BM_JointSpectrumDenseReference)->Unit(benchmark::kMillisecond);

void BM_Hausdorff(benchmark::State& state) {
  const Halton seq(2, 0);
  PointSet A, B;
  for (std::uint64_t i = 0; i < 40000; ++i) {
    const auto u = seq.point(i);
    (i % 2 ? A : B).push_back(Vec2(u[0], u[1]));
  }
  const Execution exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff(A, B, exec));
  label(state);
}
BENCHMARK(BM_Hausdorff)->Args({0})->Args({1})->Unit(benchmark::kMillisecond);

void BM_HausdorffBruteForce(benchmark::State& state) {
  const Halton seq(2, 0);
  PointSet A, B;
  for (std::uint64_t i = 0; i < 4000; ++i) {
    const auto u = seq.point(i);
    (i % 2 ? A : B).push_back(Vec2(u[0], u[1]));
  }
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_reference(A, B));
}
BENCHMARK(BM_HausdorffBruteForce)->Unit(benchmark::kMillisecond);

void BM_CriticalSearch(benchmark::State& state) {
  const auto jc = instantiate("jaynes_cummings");
  CriticalSearchOptions opts;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(find_critical_points(*jc, opts));
  label(state);
}
BENCHMARK(BM_CriticalSearch)->Args({0})->Args({1})->Unit(benchmark::kMillisecond);

void BM_ActionChart(benchmark::State& state) {
  const auto jc = instantiate("jaynes_cummings");
  ActionOptions opts;
  opts.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(action_chart(*jc, {}, 8, opts));
  label(state);
}
BENCHMARK(BM_ActionChart)->Args({0})->Args({1})->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
