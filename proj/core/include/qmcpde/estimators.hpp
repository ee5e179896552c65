#pragma once

#include "qmcpde/embedding.hpp"
#include "qmcpde/fem.hpp"
#include "qmcpde/lattice.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qmcpde {

/// Everything needed to evaluate the integrand F(y) = G(u_h(.,y)):
/// a factorised embedding for field sampling, the FE mesh on the same unit
/// cube, the averaging region, and the coordinate ordering (QMC coordinate
/// rank -> natural frequency index, nonincreasing sensitivity).
struct ProblemInstance {
  Embedding embedding;
  std::vector<double> mean;               // length M, default zeros
  Mesh mesh;
  std::vector<int> qoi_elements;
  std::vector<std::int64_t> coord_order;  // permutation of 0..s-1
  SourceFn source = [](std::span<const double>) { return 1.0; };

  void validate() const;
};

struct EstimatorResult {
  double estimate = 0.0;
  double std_error = 0.0;
  int shifts = 0;            // q (1 for plain MC)
  std::int64_t points = 0;   // n per shift (sample count for MC)
  std::int64_t total = 0;    // q * n, or N
  double seconds = 0.0;
  std::vector<double> per_shift;  // Q_1..Q_q for QMC, empty for MC

  /// std_error / |estimate|; returns the absolute error and sets the flag
  /// when the estimate is zero.
  double relative_std_error(bool* absolute_fallback = nullptr) const;
};

/// Map y from QMC coordinate order to frequency order, sample the field,
/// assemble, solve, average.
double evaluate_integrand(const ProblemInstance& p, std::span<const double> y);

/// Plain Monte Carlo with N i.i.d. uniform samples mapped through the
/// inverse normal CDF (the same map the lattice rule uses).  Every sample
/// draws from its own (seed, index) stream, so results do not depend on
/// the worker count.
EstimatorResult mc_estimate(const ProblemInstance& p, std::int64_t N,
                            std::uint64_t seed, int workers = 1);

/// Randomly shifted lattice rule: q independent shifts of an n-point rule,
/// estimate = mean of the per-shift averages, standard error from their
/// spread.
EstimatorResult qmc_estimate(const ProblemInstance& p,
                             const GeneratingVector& gv, int q,
                             std::uint64_t seed, int workers = 1);

enum class Method { mc, qmc };

struct StudyMeta {
  int d = 0;
  int m0 = 0;
  double lambda = 0.0;
  double nu = 0.0;
  std::int64_t s = 0;
  int mesh_k = 0;
};

struct StudyRow {
  Method method = Method::mc;
  StudyMeta meta;
  std::int64_t n = 0;
  int q = 0;
  std::int64_t N = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double rel_std_error = 0.0;
  double seconds = 0.0;
};

using GvProvider = std::function<const GeneratingVector&(std::int64_t n)>;

/// One estimator run per schedule entry (n per shift for QMC, total N for
/// MC).  QMC rules come from the provider so one generating vector is
/// reused per (s, n).
std::vector<StudyRow> convergence_study(const ProblemInstance& p, Method method,
                                        std::span<const std::int64_t> schedule,
                                        int q, std::uint64_t seed,
                                        const StudyMeta& meta,
                                        const GvProvider& gv_provider = {},
                                        int workers = 1);

/// CSV with the fixed header
/// method,d,m0,lambda,nu,s,mesh_k,n,q,N,estimate,stderr,rel_stderr,seconds
void write_csv(std::ostream& os, std::span<const StudyRow> rows);

}  // namespace qmcpde
