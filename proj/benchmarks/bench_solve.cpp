#include <benchmark/benchmark.h>

#include "helmfmm/harness/experiments.hpp"

using namespace helmfmm;

namespace {

// One table cell end to end: assembly, preconditioner setup and GMRES.
void BM_PreconditionedSolve(benchmark::State& state) {
  harness::Cell cell;
  cell.experiment = "bench";
  cell.problem = discretize::ProblemId::P1;
  cell.h = 1.0 / static_cast<double>(state.range(0));
  cell.parameter = 0.3125 * static_cast<double>(state.range(0));
  cell.preconditioner = static_cast<harness::PreconditionerId>(state.range(1));
  if (cell.preconditioner == harness::PreconditionerId::Fmm) cell.epsilon = 1e-6;
  int iterations = 0;
  for (auto _ : state) iterations = harness::runCell(cell, false).iterations;
  state.counters["iterations"] = iterations;
  state.SetLabel(harness::toString(cell.preconditioner));
}
BENCHMARK(BM_PreconditionedSolve)
    ->ArgsProduct({{16, 32, 64},
                   {static_cast<int>(harness::PreconditionerId::Fmm), static_cast<int>(harness::PreconditionerId::Gmg),
                    static_cast<int>(harness::PreconditionerId::Ic)}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
