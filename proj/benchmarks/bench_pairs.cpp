#include <benchmark/benchmark.h>

#include <vector>

#include "geocausal/corrdim.hpp"
#include "geocausal/dynamics.hpp"
#include "geocausal/geoc.hpp"
#include "geocausal/kd_tree.hpp"
#include "geocausal/random.hpp"

using namespace geocausal;

namespace {

PointCloud uniform_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> coords(n * dim);
  for (auto& c : coords) c = rng.uniform();
  return PointCloud(n, dim, std::move(coords));
}

const RadiusTable& paper_table() {
  static const RadiusTable table = RadiusGrid{}.table();
  return table;
}

void BM_DualTreeHistogram(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const auto cloud = uniform_cloud(n, dim, 7);
  const KdTree tree(cloud);
  for (auto _ : state) benchmark::DoNotOptimize(tree.pair_histogram(paper_table(), Norm::max));
  state.counters["pairs/s"] = benchmark::Counter(
      static_cast<double>(n) * static_cast<double>(n - 1) / 2.0, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_DualTreeHistogram)
    ->ArgsProduct({{1000, 3000, 10000}, {1, 2, 3, 6}})
    ->Unit(benchmark::kMillisecond);

void BM_LeafSize(benchmark::State& state) {
  const auto leaf = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<std::size_t>(state.range(1));
  const auto cloud = uniform_cloud(10000, dim, 11);
  const KdTree tree(cloud, leaf);
  for (auto _ : state) benchmark::DoNotOptimize(tree.pair_histogram(paper_table(), Norm::max));
}
BENCHMARK(BM_LeafSize)
    ->ArgsProduct({{8, 16, 32, 64, 128, 256, 512}, {1, 2, 4}})
    ->Unit(benchmark::kMillisecond);

void BM_EuclideanHistogram(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto cloud = uniform_cloud(10000, dim, 13);
  const KdTree tree(cloud);
  for (auto _ : state)
    benchmark::DoNotOptimize(tree.pair_histogram(paper_table(), Norm::euclidean));
}
BENCHMARK(BM_EuclideanHistogram)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_TreeBuild(benchmark::State& state) {
  const auto cloud = uniform_cloud(static_cast<std::size_t>(state.range(0)), 3, 17);
  for (auto _ : state) benchmark::DoNotOptimize(KdTree(cloud));
}
BENCHMARK(BM_TreeBuild)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_NaiveCount(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto cloud = uniform_cloud(n, 2, 19);
  const auto& radii = paper_table().radii();
  for (auto _ : state) {
    std::vector<std::uint64_t> counts(radii.size(), 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = distance(cloud.point(i), cloud.point(j), Norm::max);
        for (std::size_t k = 0; k < radii.size(); ++k) counts[k] += d < radii[k];
      }
    benchmark::DoNotOptimize(counts);
  }
}
BENCHMARK(BM_NaiveCount)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_GeoCTerm(benchmark::State& state) {
  NetworkSpec spec;
  spec.adjacency = AdjacencyMatrix::from_edges(3, {{0, 1}, {1, 2}});
  SimulationOptions options;
  options.keep = static_cast<std::size_t>(state.range(0));
  options.seed = 3;
  const auto panel = simulate(spec, options);
  for (auto _ : state) {
    GeoCEstimator estimator(panel, EstimatorConfig{});
    benchmark::DoNotOptimize(estimator.geoc({0}, {2}, {1}));
  }
}
BENCHMARK(BM_GeoCTerm)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
