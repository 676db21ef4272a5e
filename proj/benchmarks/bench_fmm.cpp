#include <benchmark/benchmark.h>

#include <random>

#include "helmfmm/fmm.hpp"

using namespace helmfmm;

namespace {

struct Instance {
  std::vector<Vec2> points;
  CVector charges;
};

Instance makeInstance(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance in{std::vector<Vec2>(n), CVector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    in.points[i] = {u(rng), u(rng)};
    in.charges[i] = {u(rng) - 0.5, u(rng) - 0.5};
  }
  return in;
}

fmm::FmmConfig config(int p, fmm::Backend backend = fmm::Backend::Fmm) {
  fmm::FmmConfig c;
  c.kernel = special::KernelId::helmholtz2d(10.0);
  c.p = p;
  c.backend = backend;
  return c;
}

// Plan construction plus one evaluation, as a one-shot call would pay.
void BM_Evaluate(benchmark::State& state) {
  const auto in = makeInstance(static_cast<std::size_t>(state.range(0)));
  const auto c = config(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(fmm::evaluate(in.points, in.charges, in.points, c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Evaluate)
    ->ArgsProduct({{1 << 12, 1 << 14, 1 << 16}, {2, 6}})
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNLogN);

// Repeated evaluation on a fixed plan, the pattern inside a Krylov solve.
void BM_PlanReuse(benchmark::State& state) {
  const auto in = makeInstance(static_cast<std::size_t>(state.range(0)));
  const fmm::FmmPlan plan(in.points, in.points, config(6));
  for (auto _ : state) benchmark::DoNotOptimize(plan.evaluate(in.charges));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PlanReuse)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Direct(benchmark::State& state) {
  const auto in = makeInstance(static_cast<std::size_t>(state.range(0)));
  const auto c = config(6, fmm::Backend::Direct);
  for (auto _ : state) benchmark::DoNotOptimize(fmm::evaluate(in.points, in.charges, in.points, c));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Direct)->RangeMultiplier(2)->Range(1 << 10, 1 << 13)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

}  // namespace
