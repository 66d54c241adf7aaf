#include <benchmark/benchmark.h>

#include "emeasure/multiplicity.hpp"
#include "emeasure/process.hpp"
#include "emeasure/table1.hpp"

using namespace emeasure;

namespace {

void BM_ToyTable(benchmark::State& state) {
  const auto inst = toy_instance();
  for (auto _ : state) benchmark::DoNotOptimize(compute_toy_table(inst, Rational(1, 20)));
}
BENCHMARK(BM_ToyTable)->Unit(benchmark::kMillisecond);

void BM_ClosedEbh(benchmark::State& state) {
  const auto inst = toy_instance();
  for (auto _ : state) benchmark::DoNotOptimize(closed_ebh(inst.e, inst.space, inst.family, Rational(1, 20)));
}
BENCHMARK(BM_ClosedEbh)->Unit(benchmark::kMillisecond);

void BM_StoppingTimes(benchmark::State& state) {
  const auto tree = FiltrationTree::uniform(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  std::size_t count = 0;
  for (auto _ : state) {
    auto taus = tree.stopping_times();
    count = taus.size();
    benchmark::DoNotOptimize(taus);
  }
  state.counters["stopping_times"] = static_cast<double>(count);
}
BENCHMARK(BM_StoppingTimes)->Args({2, 2})->Args({3, 2})->Args({2, 3})->Args({4, 2})->Args({3, 3});

void BM_AnytimeCheck(benchmark::State& state) {
  const auto depth = static_cast<std::size_t>(state.range(0));
  const auto tree = FiltrationTree::uniform(depth, 2);
  const auto cls = HypothesisClass::power_set(2);
  std::vector<EKernel> steps(depth + 1, constant_kernel(cls, tree.outcomes(), 1));
  const EProcess proc(tree, steps);
  const ProbabilityAssignment pa({Pmf::uniform(tree.outcomes()), Pmf::uniform(tree.outcomes())});
  for (auto _ : state) benchmark::DoNotOptimize(check_anytime_validity(proc, pa, cls));
}
BENCHMARK(BM_AnytimeCheck)->DenseRange(1, 3, 1);

}  // namespace

BENCHMARK_MAIN();
