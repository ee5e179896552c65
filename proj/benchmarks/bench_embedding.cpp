#include "qmcpde/embedding.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace qmcpde;

static void BM_MinimalEmbedding2D(benchmark::State& state) {
  const int m0 = static_cast<int>(state.range(0));
  const CovarianceModel model{0.25, 0.2, 2.0, 2};
  for (auto _ : state) {
    auto emb = minimal_embedding(GridSpec{m0, 2}, model, 64 * m0);
    benchmark::DoNotOptimize(emb.eigenvalues.data());
  }
  state.SetComplexityN(m0);
}
BENCHMARK(BM_MinimalEmbedding2D)->RangeMultiplier(2)->Range(8, 64)->Complexity();

static void BM_EigenvaluesFFT(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const GridSpec grid{m, 2};
  const CovarianceModel model{0.25, 0.2, 2.0, 2};
  const auto column = extended_first_column(grid, m, model);
  for (auto _ : state) {
    auto v = eigenvalues_via_fft(column, 2 * m, 2);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetComplexityN(4L * m * m);
}
BENCHMARK(BM_EigenvaluesFFT)->RangeMultiplier(2)->Range(8, 128)->Complexity();

static void BM_SampleField2D(benchmark::State& state) {
  const int m0 = static_cast<int>(state.range(0));
  const auto emb = minimal_embedding(GridSpec{m0, 2},
                                     CovarianceModel{0.25, 0.5, 4.0, 2}, 64 * m0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> y(emb.size());
  for (double& v : y) v = normal(rng);
  const std::vector<double> mean(emb.grid.num_points(), 0.0);
  for (auto _ : state) {
    auto f = sample_field(emb, y, mean);
    benchmark::DoNotOptimize(f.a.data());
  }
  state.SetComplexityN(emb.size());
}
BENCHMARK(BM_SampleField2D)->RangeMultiplier(2)->Range(8, 32)->Complexity();
