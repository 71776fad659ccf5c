// Microbenchmarks for the evaluation and weight-solving hot paths.
// Run: ./benchmarks/richkde_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "richkde/error_analysis.hpp"
#include "richkde/extrapolation.hpp"
#include "richkde/kernel.hpp"
#include "richkde/reference.hpp"
#include "richkde/selection.hpp"

namespace {

void BM_kde_evaluate_grid(benchmark::State& state) {
  const auto n = state.range(0);
  const auto dist = richkde::ReferenceDistribution::standard_normal(1);
  const auto sample = dist.sample(n, 42);
  Eigen::MatrixXd pts(101, 1);
  for (int k = 0; k <= 100; ++k) pts(k, 0) = -3.0 + 0.06 * k;
  const richkde::EvaluationGrid grid(pts);
  const double h = richkde::optimal_bandwidth(n, 1, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(richkde::kde_evaluate_grid(sample, h, grid));
  }
  state.SetItemsProcessed(state.iterations() * n * grid.points().rows());
}
BENCHMARK(BM_kde_evaluate_grid)->Arg(1000)->Arg(8000);

void BM_lagrange_weights(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const auto bw = richkde::spread_bandwidths(0.3, r, 1.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(richkde::lagrange_weights(bw));
  }
}
BENCHMARK(BM_lagrange_weights)->Arg(2)->Arg(5)->Arg(8);

void BM_solve_weights_linear(benchmark::State& state) {
  const int r = static_cast<int>(state.range(0));
  const auto bw = richkde::spread_bandwidths(0.3, r, 1.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(richkde::solve_weights_linear(bw));
  }
}
BENCHMARK(BM_solve_weights_linear)->Arg(2)->Arg(5);

void BM_empirical_mse(benchmark::State& state) {
  const auto dist = richkde::ReferenceDistribution::standard_normal(1);
  const richkde::BandwidthSet bw({0.25, 0.35});
  const auto c = richkde::lagrange_weights(bw);
  Eigen::MatrixXd pt(1, 1);
  pt << 0.0;
  const richkde::EvaluationGrid grid(pt);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        richkde::empirical_mse(dist, 500, bw, c, grid, 50, 42));
  }
}
BENCHMARK(BM_empirical_mse);

}  // namespace

BENCHMARK_MAIN();
