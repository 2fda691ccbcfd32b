#include <benchmark/benchmark.h>

#include <vector>

#include <netshift/belief_propagation.hpp>
#include <netshift/changepoint.hpp>
#include <netshift/fit.hpp>
#include <netshift/random.hpp>
#include <netshift/sampling.hpp>
#include <netshift/synthetic.hpp>

namespace {

using namespace netshift;

MultiGraph planted_sparse(std::size_t n, std::size_t k, double mean_degree) {
  const double within = 3.0 * mean_degree / static_cast<double>(n);
  const double across = within / 3.0;
  BlockModel model{Family::bernoulli, std::vector<double>(k, 1.0 / static_cast<double>(k)), BlockMatrix(k, across),
                   std::nullopt};
  for (std::size_t r = 0; r < k; ++r) model.Q(r, r) = within;
  std::vector<std::size_t> sizes(k, n / k);
  sizes.back() += n % k;
  auto rng = make_rng({17, n, k});
  return MultiGraph(sample_graph(model, Partition::contiguous(sizes), rng));
}

BlockModel sweep_model(const MultiGraph& graph, std::size_t k) {
  BlockModel model{Family::bernoulli, std::vector<double>(k, 1.0 / static_cast<double>(k)),
                   BlockMatrix(k, graph.total_multiplicity() / graph.pair_capacity()), std::nullopt};
  for (std::size_t r = 0; r < k; ++r) model.Q(r, r) *= 2.0;
  return model;
}

void BM_BpSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto graph = planted_sparse(n, k, 4.0);
  const auto model = sweep_model(graph, k);
  auto rng = make_rng({1});
  auto messages = random_messages(graph, k, rng);
  for (auto _ : state) benchmark::DoNotOptimize(bp_sweep(graph, model, messages));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
  state.counters["links"] = static_cast<double>(graph.pair_count());
}
BENCHMARK(BM_BpSweep)->ArgsProduct({{100, 200, 400, 800, 1600}, {2, 4}})->Complexity(benchmark::oN);

void BM_EstimateParameters(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto graph = planted_sparse(n, 2, 4.0);
  const auto model = sweep_model(graph, 2);
  auto rng = make_rng({2});
  const auto messages = random_messages(graph, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_parameters(graph, model, messages));
}
BENCHMARK(BM_EstimateParameters)->RangeMultiplier(2)->Range(100, 1600);

void BM_FitTwoBlocks(benchmark::State& state) {
  const auto graph = planted_sparse(static_cast<std::size_t>(state.range(0)), 2, 6.0);
  const FitOptions options{.restarts = 2, .seed = 3};
  for (auto _ : state) benchmark::DoNotOptimize(fit(graph, 2, Family::bernoulli, false, options));
}
BENCHMARK(BM_FitTwoBlocks)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ScanWindow(benchmark::State& state) {
  auto spec = builtin_spec("ER->2C");
  spec.seed = 5;
  const auto series = generate_series(spec).network;
  const auto width = static_cast<std::size_t>(state.range(0));
  std::vector<MultiGraph> window(series.snapshots().begin() + 8, series.snapshots().begin() + 8 + width);
  EngineOptions options;
  options.fit = {.restarts = 2, .max_sweeps = 3, .max_iterations = 10, .tolerance = 1e-4};
  options.k_range = k_range_up_to(3);
  options.segment_restarts = 0;
  for (auto _ : state) benchmark::DoNotOptimize(scan_window(window, options, 11));
}
BENCHMARK(BM_ScanWindow)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
