#include "qmcpde/estimators.hpp"

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

using namespace qmcpde;

namespace {

ProblemInstance reference_problem(int m0, int mesh_k) {
  ProblemInstance p;
  p.embedding = minimal_embedding(GridSpec{m0, 2},
                                  CovarianceModel{0.25, 0.2, 2.0, 2}, 64 * m0);
  p.mean.assign(p.embedding.grid.num_points(), 0.0);
  p.mesh = structured_mesh(Domain::unit_square, mesh_k);
  p.qoi_elements.resize(p.mesh.num_elements());
  std::iota(p.qoi_elements.begin(), p.qoi_elements.end(), 0);
  p.coord_order = compute_bj(p.embedding, BjMode::exact).order;
  return p;
}

}  // namespace

static void BM_Integrand(benchmark::State& state) {
  const int m0 = static_cast<int>(state.range(0));
  const ProblemInstance p = reference_problem(m0, m0 + m0 / 2);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<double> y(p.embedding.size());
  for (double& v : y) v = normal(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_integrand(p, y));
  }
}
BENCHMARK(BM_Integrand)->Arg(8)->Arg(16)->Arg(32);

static void BM_AssembleSolve(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Mesh mesh = structured_mesh(Domain::unit_square, k);
  std::vector<double> coeff(mesh.num_elements());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.5, 2.0);
  for (std::int64_t e = 0; e < mesh.num_elements(); ++e)
    coeff[e] = unif(rng) * element_volume(mesh, static_cast<int>(e));
  const SourceFn f = [](std::span<const double>) { return 1.0; };
  for (auto _ : state) {
    auto u = solve(assemble(mesh, coeff, f));
    benchmark::DoNotOptimize(u.data());
  }
  state.SetComplexityN(static_cast<long>(mesh.num_elements()));
}
BENCHMARK(BM_AssembleSolve)->RangeMultiplier(2)->Range(8, 64)->Complexity();
