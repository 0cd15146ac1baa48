#include <benchmark/benchmark.h>

#include "sausage/asymptotics.hpp"
#include "sausage/obstacles.hpp"
#include "sausage/spectral.hpp"
#include "sausage/walker.hpp"

using namespace sausage;

static void BM_SimulatePath(benchmark::State& state) {
  const MetricMeasureGraph g = lattice_box(2, 101);
  const WalkSampler sampler(g);
  const double horizon = static_cast<double>(state.range(0));
  std::uint64_t k = 0;
  std::size_t events = 0;
  for (auto _ : state) {
    auto rng = seed_stream(1, StreamLabel::kPath, k++);
    const PathSample p = simulate_path(sampler, 5050, horizon, rng);
    events += p.events.size();
    benchmark::DoNotOptimize(p.events.data());
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulatePath)->Arg(10)->Arg(100)->Arg(1000);

static void BM_NegativeMoment(benchmark::State& state) {
  const MetricMeasureGraph g = lattice_box(2, 41);
  for (auto _ : state) {
    benchmark::DoNotOptimize(negative_moment(g, 840, 20.0, 0.05, 0.5, 1000, 3));
  }
}
BENCHMARK(BM_NegativeMoment)->Unit(benchmark::kMillisecond);

static void BM_KernelRow(benchmark::State& state) {
  const MetricMeasureGraph g = lattice_box(2, static_cast<int>(state.range(0)));
  const auto mode = state.range(1) == 0 ? KernelMode::kDense : KernelMode::kKrylov;
  const HeatKernel kernel(g, mode);
  for (auto _ : state) benchmark::DoNotOptimize(kernel.row(8.0, 0));
  state.SetLabel(mode == KernelMode::kDense ? "dense" : "krylov");
}
BENCHMARK(BM_KernelRow)->Args({21, 0})->Args({21, 1})->Args({31, 0})->Args({31, 1})->Unit(benchmark::kMicrosecond);

static void BM_KernelSetup(benchmark::State& state) {
  const MetricMeasureGraph g = lattice_box(2, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const HeatKernel kernel(g, KernelMode::kDense);
    benchmark::DoNotOptimize(&kernel);
  }
}
BENCHMARK(BM_KernelSetup)->Arg(21)->Arg(31)->Unit(benchmark::kMillisecond);

static void BM_DirichletEigenvalue(benchmark::State& state) {
  const MetricMeasureGraph g = lattice_box(2, static_cast<int>(state.range(0)));
  const VertexSet ball = g.ball(static_cast<Vertex>(g.size() / 2), static_cast<double>(state.range(0)) / 3);
  for (auto _ : state) benchmark::DoNotOptimize(dirichlet_eigenvalue(g, ball).value);
  state.counters["vertices"] = static_cast<double>(ball.size());
}
BENCHMARK(BM_DirichletEigenvalue)->Arg(31)->Arg(61)->Arg(121)->Unit(benchmark::kMillisecond);

static void BM_IntervalDp(benchmark::State& state) {
  const MetricMeasureGraph g = path_graph(4001);
  const double t = static_cast<double>(state.range(0));
  const double s = t * t * g.volume(2000, t);
  for (auto _ : state) benchmark::DoNotOptimize(interval_dp(g, 2000, s, 1.0, 0.5).value);
}
BENCHMARK(BM_IntervalDp)->Arg(3)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
