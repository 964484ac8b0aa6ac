#include <benchmark/benchmark.h>

#include <random>

#include "gptd/envs/gridworld.hpp"
#include "gptd/gptd.hpp"
#include "gptd/model_selection.hpp"
#include "gptd/sparse.hpp"

namespace {

using namespace gptd;

Trajectory random_walk(Index n, int dim) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  Trajectory t;
  t.states.resize(n, dim);
  t.rewards.resize(n - 1);
  t.discounts.resize(n - 1);
  Vector x = Vector::Zero(dim);
  for (Index i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) x[d] += 0.3 * normal(rng);
    t.states.row(i) = x.transpose();
    if (i + 1 < n) {
      t.rewards[i] = normal(rng);
      t.discounts[i] = 0.95;
    }
  }
  return t;
}

CovarianceSpec spec_for(int variant, int dim) {
  switch (variant) {
    case 0:
      return CovarianceSpec::isotropic(dim);
    case 1:
      return CovarianceSpec::ard(dim);
    default:
      return CovarianceSpec::factor_analysis(dim, 1);
  }
}

void BM_Gram(benchmark::State& state) {
  const Index n = state.range(0);
  const auto spec = spec_for(static_cast<int>(state.range(1)), 4);
  const Trajectory t = random_walk(n, 4);
  const HyperParams th = default_initial_params(spec, t, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gram(spec, th, t.states).matrix.data());
  state.SetComplexityN(n);
}
BENCHMARK(BM_Gram)->ArgsProduct({{250, 500, 1000}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

void BM_FitExact(benchmark::State& state) {
  const Index n = state.range(0);
  const auto spec = CovarianceSpec::ard(2);
  const Trajectory t = random_walk(n, 2);
  const HyperParams th = default_initial_params(spec, t, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_exact(t, spec, th).weights().data());
  state.SetComplexityN(n);
}
BENCHMARK(BM_FitExact)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_LikelihoodGradient(benchmark::State& state) {
  const Index n = state.range(0);
  const auto spec = spec_for(static_cast<int>(state.range(1)), 3);
  const Trajectory t = random_walk(n, 3);
  const HyperParams th = default_initial_params(spec, t, 1);
  for (auto _ : state) benchmark::DoNotOptimize(likelihood_with_gradient(t, spec, th).gradient.data());
}
BENCHMARK(BM_LikelihoodGradient)->ArgsProduct({{250, 500, 1000}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

void BM_IcdSelect(benchmark::State& state) {
  const Index n = state.range(0);
  const auto spec = CovarianceSpec::ard(2);
  const Trajectory t = random_walk(n, 2);
  const HyperParams th = default_initial_params(spec, t, 1);
  Index m = 0;
  for (auto _ : state) {
    const SubsetSelection s = icd_select(spec, th, t.states, 1e-2, n);
    m = static_cast<Index>(s.indices.size());
    benchmark::DoNotOptimize(s.factor.data());
  }
  state.counters["m"] = static_cast<double>(m);
}
BENCHMARK(BM_IcdSelect)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond);

void BM_SparseFit(benchmark::State& state) {
  const Index n = state.range(0);
  const auto spec = CovarianceSpec::ard(2);
  const Trajectory t = random_walk(n, 2);
  const HyperParams th = default_initial_params(spec, t, 1);
  const SubsetSelection s = icd_select(spec, th, t.states, 1e-2, n);
  for (auto _ : state) benchmark::DoNotOptimize(fit_sr(t, spec, th, s).sr_weights().data());
  state.counters["m"] = static_cast<double>(s.indices.size());
}
BENCHMARK(BM_SparseFit)->RangeMultiplier(2)->Range(500, 4000)->Unit(benchmark::kMillisecond);

void BM_GridworldOptimize(benchmark::State& state) {
  const Trajectory t = gridworld_rollout(GridworldSpec{}, 500, 1);
  const auto spec = spec_for(static_cast<int>(state.range(0)), 2);
  OptimizerOptions o;
  o.restarts = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(optimize(t, spec, default_initial_params(spec, t, 1), o).best.total);
}
BENCHMARK(BM_GridworldOptimize)->Arg(0)->Arg(1)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
