#include <benchmark/benchmark.h>

#include "cropdt/climate.hpp"
#include "cropdt/dataset.hpp"
#include "cropdt/evaluation.hpp"
#include "cropdt/model_io.hpp"
#include "cropdt/synthetic.hpp"
#include "cropdt/tree.hpp"

using namespace cropdt;

namespace {

const Dataset& stations(std::size_t n) {
  static std::vector<std::pair<std::size_t, Dataset>> cache;
  for (const auto& [size, d] : cache) {
    if (size == n) return d;
  }
  SyntheticOptions opts;
  opts.stations = n;
  opts.missing_rate = 0.05;
  cache.emplace_back(n, label_dataset(synthetic_stations(opts), MissingPolicy::ZeroFill));
  return cache.back().second;
}

TrainParams params_for(int alg) {
  TrainParams p;
  p.algorithm = static_cast<Algorithm>(alg);
  return p;
}

void BM_ClassifyOldeman(benchmark::State& state) {
  const auto records = synthetic_stations({});
  for (auto _ : state) {
    for (const auto& r : records) {
      benchmark::DoNotOptimize(classify_oldeman(r.rainfall, MissingPolicy::ZeroFill));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(records.size()));
}
BENCHMARK(BM_ClassifyOldeman);

void BM_Train(benchmark::State& state) {
  const Dataset& d = stations(static_cast<std::size_t>(state.range(1)));
  const TrainParams p = params_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train(d, p));
  state.SetLabel(std::string(to_string(p.algorithm)));
}
BENCHMARK(BM_Train)->ArgsProduct({{0, 1, 2}, {75, 1000, 10000}})->Unit(benchmark::kMicrosecond);

void BM_Predict(benchmark::State& state) {
  const Dataset& d = stations(1000);
  const DecisionTree tree = train(d, params_for(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    for (const auto& inst : d.instances) benchmark::DoNotOptimize(tree.predict(inst.features));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(d.size()));
}
BENCHMARK(BM_Predict)->DenseRange(0, 2);

void BM_CrossValidate(benchmark::State& state) {
  const Dataset& d = stations(75);
  const TrainParams p = params_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(cross_validate(d, p, 10, 1));
}
BENCHMARK(BM_CrossValidate)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_ModelRoundTrip(benchmark::State& state) {
  const Model m = fit_model(stations(1000), params_for(1));
  for (auto _ : state) benchmark::DoNotOptimize(load_model(save_model(m)));
}
BENCHMARK(BM_ModelRoundTrip)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
