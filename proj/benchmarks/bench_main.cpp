#include <benchmark/benchmark.h>

#include "prefgame/nash.hpp"
#include "prefgame/regression.hpp"
#include "prefgame/sampling.hpp"
#include "prefgame/solvers.hpp"

using namespace prefgame;

namespace {

PreferenceModel cyclic_game() {
  return PreferenceModel::from_matrix(
      {{0.5, 0.1, 0.8}, {0.9, 0.5, 0.1}, {0.2, 0.9, 0.5}});
}

PreferenceModel random_game(std::size_t n, RngState& rng) {
  std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.5));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      p[i][j] = 0.05 + 0.9 * rng.next_double();
      p[j][i] = 1.0 - p[i][j];
    }
  return PreferenceModel::from_matrix(p);
}

void BM_Prox(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  Policy p = Policy::uniform(n);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = 0.01 * static_cast<double>(i);
  GradientVector gv(g);
  for (auto _ : state) {
    Policy out = prox(p, gv);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_Prox)->Arg(3)->Arg(10)->Arg(100);

void BM_WinGradient(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  RngState rng(1, 0);
  auto model = random_game(n, rng);
  Policy p = Policy::uniform(n);
  for (auto _ : state) {
    GradientVector g = unreg_gradient(p, model);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_WinGradient)->Arg(3)->Arg(10)->Arg(100);

void BM_SamplePairs(benchmark::State& state) {
  auto model = cyclic_game();
  Policy mu({0.2, 0.5, 0.3});
  RngState rng(7, 0);
  for (auto _ : state) {
    auto s = sample_pairs(mu, model, 1000, rng);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SamplePairs);

void BM_SolveNash(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  RngState rng(2, 0);
  auto model = random_game(n, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_nash(model, 1e-9));
  }
}
BENCHMARK(BM_SolveNash)->Arg(3)->Arg(5)->Arg(8);

void BM_RegularizedNash(benchmark::State& state) {
  RegularizedGame game{cyclic_game(), 0.1, Policy::uniform(3)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_regularized_nash(game, 1e-10));
  }
}
BENCHMARK(BM_RegularizedNash);

void BM_IpoMinimize(benchmark::State& state) {
  auto model = cyclic_game();
  Policy mu({0.2, 0.5, 0.3});
  PairWeights pop = PairWeights::population(mu, model);
  LogitParams init = LogitParams::from_policy(mu);
  for (auto _ : state) {
    RegressionSpec spec{LossKind::kIpo, 0.3,          0.0, mu, std::nullopt,
                        pop,            std::nullopt, OptimizerOptions{}};
    benchmark::DoNotOptimize(minimize(spec, init));
  }
}
BENCHMARK(BM_IpoMinimize);

void BM_ComalOuterIteration(benchmark::State& state) {
  auto model = cyclic_game();
  SolverConfig c;
  c.algorithm = Algorithm::kComal;
  c.eta = 0.3;
  c.tau = 0.1;
  c.outer_iterations = 2;  // one inner solve
  c.inner_iterations = 25;
  c.initial = {0.2, 0.5, 0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_comal(model, c));
  }
}
BENCHMARK(BM_ComalOuterIteration);

}  // namespace

BENCHMARK_MAIN();
