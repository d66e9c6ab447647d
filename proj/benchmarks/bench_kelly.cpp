#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kelly/asymptotics.hpp"
#include "kelly/backtest.hpp"
#include "kelly/elg.hpp"
#include "kelly/solver.hpp"

namespace {

using namespace kelly;

JointReturnDistribution model(std::size_t assets, std::size_t scenarios, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ret(-0.4, 0.6);
  std::vector<Vector> rows(scenarios, Vector(assets));
  for (auto& row : rows) {
    for (double& x : row) x = ret(rng);
  }
  return JointReturnDistribution(std::move(rows), Vector(scenarios, 1.0 / static_cast<double>(scenarios)));
}

void BM_CompoundExact(benchmark::State& state) {
  const auto dist = model(3, 4, 1);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compound_exact(dist, n));
}
BENCHMARK(BM_CompoundExact)->DenseRange(1, 8, 1);

void BM_Solve(benchmark::State& state) {
  const auto dist = model(static_cast<std::size_t>(state.range(0)), 4, 2);
  const auto c = compound_exact(dist, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(c));
}
BENCHMARK(BM_Solve)->ArgsProduct({{2, 3, 5, 8}, {1, 3}});

void BM_ElgGradient(benchmark::State& state) {
  const auto dist = model(8, 6, 3);
  const auto c = compound_exact(dist, static_cast<int>(state.range(0)));
  const auto k = PortfolioWeights::uniform(8);
  for (auto _ : state) benchmark::DoNotOptimize(elg_gradient(c, k));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.outcome_count()));
}
BENCHMARK(BM_ElgGradient)->Arg(1)->Arg(3)->Arg(5);

void BM_ProjectToSimplex(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  Vector v(static_cast<std::size_t>(state.range(0)));
  for (double& x : v) x = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(project_to_simplex(v));
}
BENCHMARK(BM_ProjectToSimplex)->RangeMultiplier(4)->Range(2, 1024);

void BM_SimulateRelativePaths(benchmark::State& state) {
  const auto dist = JointReturnDistribution({{0.5, 0.0}, {-0.3, 0.0}}, {0.5, 0.5});
  const PortfolioWeights k({0.0, 1.0});
  const PortfolioWeights ks({2.0 / 3.0, 1.0 / 3.0});
  const auto horizon = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_relative_paths(dist, k, ks, horizon, 100, 7));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(horizon) * 100);
}
BENCHMARK(BM_SimulateRelativePaths)->Arg(1000)->Arg(10'000);

void BM_Backtest(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> step(0.0003, 0.01);
  PriceSeries s;
  s.assets = {"A", "B", "C"};
  Vector price{100.0, 100.0, 100.0};
  for (std::int64_t k = 0; k < state.range(0); ++k) {
    s.dates.push_back(std::to_string(1'000'000 + k));
    s.prices.push_back(price);
    for (double& p : price) p *= 1.0 + step(rng);
  }
  BacktestConfig config;
  config.window = 20;
  for (auto _ : state) benchmark::DoNotOptimize(run_backtest(s, config));
}
BENCHMARK(BM_Backtest)->Arg(253)->Arg(2520);

}  // namespace

BENCHMARK_MAIN();
