#include <benchmark/benchmark.h>

#include "dyner/graph_sim.hpp"
#include "dyner/spectral.hpp"

namespace {

const dyner::EdgeParams kParams(1.0, 1.0, 0.5, 2.0);

void BM_SampleGraph(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(dyner::sample_graph(n, kParams, 1, rep++));
  state.SetItemsProcessed(state.iterations() * n * (n + 1) / 2);
}
BENCHMARK(BM_SampleGraph)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_PrincipalEigCold(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = dyner::sample_graph(n, kParams, 2, 0).adjacency_at(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(dyner::principal_eig(a, dyner::SpectralConfig{}));
}
BENCHMARK(BM_PrincipalEigCold)->Arg(100)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_EigPathWarm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dyner::GraphTrajectory g = dyner::sample_graph(n, kParams, 3, 0);
  const dyner::TimeGrid grid({0.0, 0.5, 1.0, 1.5, 2.0}, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(dyner::eig_path(g, grid, dyner::SpectralConfig{}));
}
BENCHMARK(BM_EigPathWarm)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SpectralNorm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd h = dyner::sample_graph(n, kParams, 4, 0).centered_matrix_at(1.0).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(dyner::spectral_norm(h, dyner::SpectralConfig{1e-6, 100000, false}));
}
BENCHMARK(BM_SpectralNorm)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SeriesEig(benchmark::State& state) {
  const dyner::CenteredMatrix h = dyner::sample_graph(200, kParams, 5, 0).centered_matrix_at(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(dyner::series_eig(h, kParams, 8, dyner::SpectralConfig{}));
}
BENCHMARK(BM_SeriesEig)->Unit(benchmark::kMillisecond);

void BM_EdgeDoubleSums(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> times;
  for (int k = 0; k <= 60; ++k) times.push_back(k / 30.0);
  std::uint64_t rep = 0;
  for (auto _ : state) benchmark::DoNotOptimize(dyner::edge_double_sums(n, kParams, 6, rep++, times));
}
BENCHMARK(BM_EdgeDoubleSums)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
