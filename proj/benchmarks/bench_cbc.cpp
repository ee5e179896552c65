#include "qmcpde/lattice.hpp"

#include "qmcpde/embedding.hpp"

#include <benchmark/benchmark.h>

using namespace qmcpde;

namespace {

WeightSetup reference_weights() {
  const auto emb = minimal_embedding(GridSpec{8, 2},
                                     CovarianceModel{0.25, 0.2, 2.0, 2}, 512);
  const auto bj = compute_bj(emb, BjMode::exact);
  std::vector<double> b(bj.order.size());
  for (std::size_t r = 0; r < b.size(); ++r) b[r] = bj.b[bj.order[r]];
  return make_weight_setup(std::move(b), 0.6);
}

}  // namespace

static void BM_CbcConstruct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  static const WeightSetup w = reference_weights();  // s = 256
  for (auto _ : state) {
    auto gv = cbc_construct(n, w.dim(), w, 1);
    benchmark::DoNotOptimize(gv.z.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_CbcConstruct)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_ThetaTable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ThetaEvaluator theta(0.4);
  for (auto _ : state) {
    double acc = 0.0;
    for (int t = 0; t <= n / 2; ++t)
      acc += theta(static_cast<double>(t) / n);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_ThetaTable)->RangeMultiplier(4)->Range(256, 4096);
