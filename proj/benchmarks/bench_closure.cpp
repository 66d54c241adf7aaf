#include <benchmark/benchmark.h>

#include "emeasure/evidence.hpp"
#include "emeasure/integration.hpp"

using namespace emeasure;

namespace {

/// Capacity on 2^n: e(H) = n + 1 - |H|, then pinched on the full model so
/// closure has work to do.
EFunction pinched_capacity(const HypothesisClass& cls) {
  std::vector<XValue> v;
  for (const auto& m : cls.members()) {
    v.push_back(m.is_empty() ? XValue::infinity() : XValue(static_cast<std::int64_t>(cls.width() + 1 - m.count())));
  }
  v.back() = XValue(1, 2);
  return classify(std::move(v), cls);
}

void BM_ClosureFast(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  HypothesisSpace s(Model::indexed(n), HypothesisClass::power_set(n));
  const auto e = pinched_capacity(s.cls());
  for (auto _ : state) benchmark::DoNotOptimize(closure_fast(e, s));
  state.counters["members"] = static_cast<double>(s.cls().size());
}
BENCHMARK(BM_ClosureFast)->DenseRange(2, 8, 2);

void BM_ClosureBruteForce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cls = HypothesisClass::power_set(n);
  const auto e = pinched_capacity(cls);
  for (auto _ : state) benchmark::DoNotOptimize(closure_bruteforce(e, cls));
  state.counters["members"] = static_cast<double>(cls.size());
}
BENCHMARK(BM_ClosureBruteForce)->DenseRange(2, 4, 1);

void BM_Shilkret(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  HypothesisSpace s(Model::indexed(n), HypothesisClass::power_set(n));
  const auto e = closure_fast(pinched_capacity(s.cls()), s);
  std::vector<XValue> v;
  for (std::size_t p = 0; p < n; ++p) v.push_back(XValue(static_cast<std::int64_t>(p + 1)));
  const OrderMeasurableFn f(v, s.cls());
  for (auto _ : state) benchmark::DoNotOptimize(shilkret_integral(f, e, s.cls()));
}
BENCHMARK(BM_Shilkret)->DenseRange(2, 8, 2);

}  // namespace
