#include <benchmark/benchmark.h>
#include <map>

#include "gpwpc/batch_solve.hpp"
#include "gpwpc/gpc_analysis.hpp"

using namespace gpwpc;

namespace {

const ParametricProblem& desk_problem() {
  static const ParametricProblem problem(FieldSpec{}, Mesh{});
  return problem;
}

const std::vector<ParamPoint>& points(std::size_t n) {
  static std::map<std::size_t, std::vector<ParamPoint>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, sample_points(4, 1.0, RandomStream{7, 0}, n)).first;
  return it->second;
}

void BM_SolveSerial(benchmark::State& state) {
  const auto& pts = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_batch_serial(desk_problem(), pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SolveOpenMP(benchmark::State& state) {
  const auto& pts = points(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_batch(desk_problem(), pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_SolveSerial)->Arg(64)->Arg(1024)->Arg(8192);
BENCHMARK(BM_SolveOpenMP)->Arg(64)->Arg(1024)->Arg(8192);

BENCHMARK_MAIN();
