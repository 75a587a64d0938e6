#include <benchmark/benchmark.h>

#include <cstddef>
#include <vector>

#include "rbcd/pair_sampler.hpp"
#include "rbcd/problem.hpp"
#include "rbcd/solver.hpp"
#include "rbcd/theory.hpp"
#include "rbcd/verify.hpp"

namespace {

using namespace rbcd;

std::vector<double> geometric(std::size_t N) {
  std::vector<double> L(N);
  for (std::size_t i = 0; i < N; ++i) L[i] = 1.0 + static_cast<double>(i % 16);
  return L;
}

void BM_SamplePair(benchmark::State& state) {
  const auto dist = build_distribution(geometric(static_cast<std::size_t>(state.range(0))));
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(sample_pair(dist, rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SamplePair)->Arg(10)->Arg(100)->Arg(1000);

// Solver iterations per second on a random quadratic.
void BM_SolverSteps(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  Rng setup(2);
  const auto problem = make_problem(random_family(FamilyKind::quadratic, N, n, setup));
  const auto dist = build_distribution(problem.lipschitz());
  const auto x0 = random_feasible_point(N, n, setup);
  const std::size_t iters = 10000;
  Rng rng(3);
  for (auto _ : state) {
    auto traj = run(problem, x0, dist, rng, StoppingRule{iters}, RecordPolicy{0});
    benchmark::DoNotOptimize(traj.final_point);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(iters));
}
BENCHMARK(BM_SolverSteps)->Args({10, 2})->Args({100, 2})->Args({100, 50})->Args({1000, 2});

void BM_Lemma2Apply(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const auto L = geometric(N);
  const auto x = random_feasible_point(N, 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(lemma2_apply(L, x.vec()));
}
BENCHMARK(BM_Lemma2Apply)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
