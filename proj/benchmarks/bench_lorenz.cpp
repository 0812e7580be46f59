#include <benchmark/benchmark.h>

#include "lorenz/estimation.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/montecarlo.hpp"
#include "lorenz/numerics.hpp"

using namespace lorenz;

namespace {

GroupedDataset deciles(const LorenzModel& model) {
  GroupedDataset d;
  for (int j = 1; j < 10; ++j) {
    d.u.push_back(j / 10.0);
    d.s.push_back(evaluate(model, j / 10.0));
  }
  return d;
}

const LorenzModel kModels[] = {KakwaniBeta{0.6, 1.0, 0.7}, KakwaniSpecial{0.8, 0.6}, Ortega{1.2, 0.6},
                               SarabiaL2{1.1, 0.7, 1.8},   L3{0.5, 0.8, 1.5, 0.7},   GeneralQuadratic{0.8, -1.2, 0.4}};

void BM_Hyp2f1(benchmark::State& state) {
  const double z = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(numerics::hyp2f1(-0.8, 1.75, 2.75, z));
}
BENCHMARK(BM_Hyp2f1)->Arg(30)->Arg(70)->Arg(90)->Arg(100);

void BM_GiniClosed(benchmark::State& state) {
  const LorenzModel m = L3{0.5, 0.8, 1.5, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(gini_closed(m));
}
BENCHMARK(BM_GiniClosed);

void BM_GiniNumeric(benchmark::State& state) {
  const LorenzModel m = L3{0.5, 0.8, 1.5, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(gini_numeric(m));
}
BENCHMARK(BM_GiniNumeric);

void BM_MeasureSet(benchmark::State& state) {
  const auto& m = kModels[state.range(0)];
  state.SetLabel(std::string(family_name(family_of(m))));
  for (auto _ : state) benchmark::DoNotOptimize(measure_set(m, {2.0, 1.2}));
}
BENCHMARK(BM_MeasureSet)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);

void BM_ValidityNumeric(benchmark::State& state) {
  const LorenzModel m = L3{0.5, 0.8, 1.5, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(check_validity_numeric(m));
}
BENCHMARK(BM_ValidityNumeric)->Unit(benchmark::kMicrosecond);

void BM_EwmdFit(benchmark::State& state) {
  const auto& m = kModels[state.range(0)];
  const Family f = family_of(m);
  state.SetLabel(std::string(family_name(f)));
  const auto data = deciles(m);
  for (auto _ : state) benchmark::DoNotOptimize(ewmd_fit(data, f));
}
BENCHMARK(BM_EwmdFit)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_FitAll(benchmark::State& state) {
  const auto data = deciles(L3{0.5, 0.8, 1.5, 0.7});
  for (auto _ : state) benchmark::DoNotOptimize(fit_all(data));
}
BENCHMARK(BM_FitAll)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  SimConfig c;
  c.sample_size = static_cast<int>(state.range(0));
  c.replications = 20;
  c.fit.multistart = 4;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(Ortega{1.2, 0.6}, {1.0, 0.8}, c));
}
BENCHMARK(BM_Simulate)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
