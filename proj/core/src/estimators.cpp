#include "qmcpde/estimators.hpp"

#include "qmcpde/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

namespace qmcpde {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Static chunking over [0, count); each index writes only its own output
// slot, so the result is independent of the worker count.
void parallel_for(std::int64_t count, int workers,
                  const std::function<void(std::int64_t)>& fn) {
  if (workers <= 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int nthreads = static_cast<int>(
      std::min<std::int64_t>(workers, count));
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::int64_t i = t; i < count; i += nthreads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double mean_of(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// sqrt( sum (x - mean)^2 / (n (n-1)) )
double standard_error(std::span<const double> xs, double mean) {
  const std::int64_t n = static_cast<std::int64_t>(xs.size());
  if (n < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    ss += d * d;
  }
  return std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

}  // namespace

void ProblemInstance::validate() const {
  const std::int64_t s = embedding.size();
  const std::int64_t M = embedding.grid.num_points();
  if (static_cast<std::int64_t>(mean.size()) != M)
    throw DimensionMismatch("problem: mean length != M");
  if (static_cast<std::int64_t>(coord_order.size()) != s)
    throw DimensionMismatch("problem: coordinate order length != s");
  if (embedding.grid.dim != mesh.dim)
    throw DimensionMismatch("problem: grid and mesh dimension differ");
  if (qoi_elements.empty())
    throw EmptyRegion("problem: empty QoI region");
  std::vector<char> seen(s, 0);
  for (std::int64_t j : coord_order) {
    if (j < 0 || j >= s || seen[j])
      throw std::invalid_argument("problem: coordinate order is not a permutation");
    seen[j] = 1;
  }
}

double evaluate_integrand(const ProblemInstance& p, std::span<const double> y) {
  const std::int64_t s = p.embedding.size();
  if (static_cast<std::int64_t>(y.size()) != s)
    throw DimensionMismatch("evaluate_integrand: y length != s");

  // QMC coordinates are ordered by nonincreasing sensitivity; the sampler
  // wants natural frequency order.
  std::vector<double> y_nat(s);
  for (std::int64_t r = 0; r < s; ++r) y_nat[p.coord_order[r]] = y[r];

  const FieldSample field = sample_field(p.embedding, y_nat, p.mean);
  const std::vector<double> coeff =
      element_coefficients(p.embedding.grid, field.a, p.mesh);
  const FESystem sys = assemble(p.mesh, coeff, p.source);
  const std::vector<double> u = solve(sys);
  return qoi_average(p.mesh, u, p.qoi_elements);
}

EstimatorResult mc_estimate(const ProblemInstance& p, std::int64_t N,
                            std::uint64_t seed, int workers) {
  if (N < 2) throw std::invalid_argument("mc_estimate: N must be >= 2");
  p.validate();
  const std::int64_t s = p.embedding.size();
  const auto start = Clock::now();

  std::vector<double> values(N);
  parallel_for(N, workers, [&](std::int64_t k) {
    std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(k));
    std::vector<double> y(s);
    for (std::int64_t j = 0; j < s; ++j)
      y[j] = inv_normal_cdf(uniform01(rng));
    values[k] = evaluate_integrand(p, y);
  });

  EstimatorResult res;
  res.estimate = mean_of(values);
  res.std_error = standard_error(values, res.estimate);
  res.shifts = 1;
  res.points = N;
  res.total = N;
  res.seconds = elapsed_seconds(start);
  return res;
}

EstimatorResult qmc_estimate(const ProblemInstance& p,
                             const GeneratingVector& gv, int q,
                             std::uint64_t seed, int workers) {
  if (q < 2) throw std::invalid_argument("qmc_estimate: q must be >= 2");
  p.validate();
  const std::int64_t s = p.embedding.size();
  if (gv.dim() != s)
    throw DimensionMismatch("qmc_estimate: generating vector dimension != s");
  const int n = gv.n;
  const auto start = Clock::now();

  // Shift i draws its own uniform stream; the same streams double as the
  // MC sample streams, so a one-point rule reduces to plain MC exactly.
  std::vector<std::vector<double>> shifts(q, std::vector<double>(s));
  for (int i = 0; i < q; ++i) {
    std::mt19937_64 rng = stream_rng(seed, static_cast<std::uint64_t>(i));
    for (std::int64_t j = 0; j < s; ++j) shifts[i][j] = uniform01(rng);
  }

  std::vector<double> values(static_cast<std::int64_t>(q) * n);
  parallel_for(static_cast<std::int64_t>(q) * n, workers, [&](std::int64_t idx) {
    const int i = static_cast<int>(idx / n);
    const int k = static_cast<int>(idx % n) + 1;
    std::vector<double> v(s), y(s);
    lattice_point(gv, shifts[i], k, v);
    for (std::int64_t j = 0; j < s; ++j) y[j] = inv_normal_cdf(v[j]);
    values[idx] = evaluate_integrand(p, y);
  });

  EstimatorResult res;
  res.per_shift.resize(q);
  for (int i = 0; i < q; ++i) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += values[static_cast<std::int64_t>(i) * n + k];
    res.per_shift[i] = sum / n;
  }
  res.estimate = mean_of(res.per_shift);
  res.std_error = standard_error(res.per_shift, res.estimate);
  res.shifts = q;
  res.points = n;
  res.total = static_cast<std::int64_t>(q) * n;
  res.seconds = elapsed_seconds(start);
  return res;
}

double EstimatorResult::relative_std_error(bool* absolute_fallback) const {
  if (absolute_fallback) *absolute_fallback = false;
  if (estimate == 0.0) {
    if (absolute_fallback) *absolute_fallback = true;
    return std_error;
  }
  return std_error / std::abs(estimate);
}

std::vector<StudyRow> convergence_study(const ProblemInstance& p, Method method,
                                        std::span<const std::int64_t> schedule,
                                        int q, std::uint64_t seed,
                                        const StudyMeta& meta,
                                        const GvProvider& gv_provider,
                                        int workers) {
  if (schedule.empty())
    throw std::invalid_argument("convergence_study: empty schedule");
  if (method == Method::qmc && !gv_provider)
    throw std::invalid_argument("convergence_study: qmc needs a gv provider");

  std::vector<StudyRow> rows;
  rows.reserve(schedule.size());
  for (std::int64_t entry : schedule) {
    EstimatorResult r;
    StudyRow row;
    row.method = method;
    row.meta = meta;
    if (method == Method::qmc) {
      const GeneratingVector& gv = gv_provider(entry);
      r = qmc_estimate(p, gv, q, seed, workers);
      row.n = entry;
      row.q = q;
    } else {
      r = mc_estimate(p, entry, seed, workers);
      row.n = entry;
      row.q = 1;
    }
    row.N = r.total;
    row.estimate = r.estimate;
    row.std_error = r.std_error;
    row.rel_std_error = r.relative_std_error();
    row.seconds = r.seconds;
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& os, std::span<const StudyRow> rows) {
  os << "method,d,m0,lambda,nu,s,mesh_k,n,q,N,estimate,stderr,rel_stderr,seconds\n";
  os.precision(12);
  for (const StudyRow& r : rows) {
    os << (r.method == Method::qmc ? "qmc" : "mc") << ',' << r.meta.d << ','
       << r.meta.m0 << ',' << r.meta.lambda << ',' << r.meta.nu << ','
       << r.meta.s << ',' << r.meta.mesh_k << ',' << r.n << ',' << r.q << ','
       << r.N << ',' << r.estimate << ',' << r.std_error << ','
       << r.rel_std_error << ',' << r.seconds << "\n";
  }
}

}  // namespace qmcpde
