#include <benchmark/benchmark.h>

#include <random>

#include "covertime/covertime.hpp"

using namespace covertime;

static void BM_CoverGrid2d(benchmark::State& state, PolicySpec policy) {
  const auto env = make_grid2d(state.range(0), state.range(0));
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    const auto rec = run_cover(env.graph, policy, 0, rng);
    steps += rec.steps;
    benchmark::DoNotOptimize(rec.t_cover);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_CoverGrid2d, rw, PolicySpec::random_walk())->Arg(10)->Arg(30);
BENCHMARK_CAPTURE(BM_CoverGrid2d, nf, PolicySpec::negative_feedback())->Arg(10)->Arg(30);

static void BM_CoverBtreeNf(benchmark::State& state) {
  const auto env = make_btree(2, state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(run_cover(env.graph, PolicySpec::negative_feedback(), 0, rng).t_cover);
  }
}
BENCHMARK(BM_CoverBtreeNf)->DenseRange(6, 12, 3);

static void BM_HittingTimesRw(benchmark::State& state) {
  const auto env = make_grid2d(state.range(0), state.range(0));
  const auto target = static_cast<NodeId>(env.graph.node_count() - 1);
  for (auto _ : state) benchmark::DoNotOptimize(hitting_times_rw(env.graph, target));
}
BENCHMARK(BM_HittingTimesRw)->Arg(8)->Arg(16)->Arg(24);

static void BM_ExactCoverRw(benchmark::State& state) {
  const auto env = make_circle(state.range(0) - 1);
  for (auto _ : state) benchmark::DoNotOptimize(exact_cover_time_rw(env.graph, 0));
}
BENCHMARK(BM_ExactCoverRw)->Arg(8)->Arg(12)->Arg(14);

static void BM_SymmetricMeans(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = u(gen);
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_means(x));
}
BENCHMARK(BM_SymmetricMeans)->RangeMultiplier(4)->Range(4, 256);

static void BM_ContinuousCover(benchmark::State& state, continuous::ContinuousPolicy policy) {
  continuous::ContinuousConfig cfg;
  cfg.cells = static_cast<std::size_t>(state.range(0));
  cfg.policy = policy;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  for (auto _ : state) {
    Rng rng(seed++);
    const auto rec = continuous::run_cover_continuous(cfg, rng);
    steps += rec.steps;
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_ContinuousCover, uniform, continuous::ContinuousPolicy::uniform)->Arg(5)->Arg(10);
BENCHMARK_CAPTURE(BM_ContinuousCover, approx_nf, continuous::ContinuousPolicy::approx_nf)->Arg(5)->Arg(10);
BENCHMARK_MAIN();
