// Test-only reference implementations, kept independent of the library
// code paths they check.
#pragma once

#include "qmcpde/covariance.hpp"
#include "qmcpde/embedding.hpp"
#include "qmcpde/lattice.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracles {

/// Covariance matrix R built entry by entry from the covariance function.
inline Eigen::MatrixXd dense_covariance(const qmcpde::GridSpec& grid,
                                        const qmcpde::CovarianceModel& model) {
  const std::int64_t M = grid.num_points();
  Eigen::MatrixXd R(M, M);
  std::vector<double> diff(grid.dim);
  for (std::int64_t i = 0; i < M; ++i) {
    const auto xi = grid.point(i);
    for (std::int64_t j = 0; j < M; ++j) {
      const auto xj = grid.point(j);
      for (int axis = 0; axis < grid.dim; ++axis)
        diff[axis] = xi[axis] - xj[axis];
      R(i, j) = qmcpde::matern_rho(model, diff);
    }
  }
  return R;
}

/// Dense M x s sampling factor from the spectral decomposition: row k,
/// column j entry sqrt(v_j/s) * (cos + sin)(2 pi k.j / (2m)).
inline Eigen::MatrixXd dense_factor(const qmcpde::Embedding& emb) {
  const int d = emb.grid.dim;
  const int n = 2 * emb.m;
  const std::int64_t s = emb.size();
  const std::int64_t M = emb.grid.num_points();
  const double two_pi = 2.0 * std::numbers::pi_v<double>;

  auto decode = [&](std::int64_t flat, std::array<int, 3>& k) {
    for (int axis = d - 1; axis >= 0; --axis) {
      k[axis] = static_cast<int>(flat % n);
      flat /= n;
    }
  };

  const std::vector<std::int64_t> sel = qmcpde::selected_indices(emb);
  Eigen::MatrixXd B(M, s);
  std::array<int, 3> ki{}, kj{};
  for (std::int64_t i = 0; i < M; ++i) {
    decode(sel[i], ki);
    for (std::int64_t j = 0; j < s; ++j) {
      decode(j, kj);
      std::int64_t dot = 0;
      for (int axis = 0; axis < d; ++axis)
        dot += static_cast<std::int64_t>(ki[axis]) * kj[axis];
      const double ang = two_pi * static_cast<double>(dot % n) / n;
      B(i, j) = std::sqrt(emb.eigenvalues[j] / static_cast<double>(s)) *
                (std::cos(ang) + std::sin(ang));
    }
  }
  return B;
}

/// Standard normal CDF through the Maclaurin series of erf (plus the exact
/// symmetry), independent of std::erfc.  Adequate for |x| <= 6.
inline double normal_cdf_series(double x) {
  const double z = x / std::numbers::sqrt2_v<double>;
  // erf(z) = 2/sqrt(pi) sum_k (-1)^k z^(2k+1) / (k! (2k+1))
  double term = z, sum = z;
  for (int k = 1; k < 200; ++k) {
    term *= -z * z / k;
    const double add = term / (2 * k + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  const double erf_z = 2.0 / std::sqrt(std::numbers::pi_v<double>) * sum;
  return 0.5 * (1.0 + erf_z);
}

/// Inverse normal CDF by bisection on the series CDF.
inline double inv_normal_bisect(double p) {
  double lo = -10.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf_series(mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// gamma_u from the closed form, bypassing the POD factorisation.
inline double gamma_closed_form(const qmcpde::WeightSetup& w,
                                const std::vector<int>& subset) {
  const double ell = static_cast<double>(subset.size());
  double log_order = std::lgamma(ell + 1.0) -
                     ell * std::log(std::numbers::ln2_v<double>);
  double prod = 1.0;
  for (int j : subset) {
    const double bt = w.btilde[j];
    prod *= bt * bt / ((w.alpha[j] - w.b[j]) * w.varrho_j[j]);
  }
  return std::pow(std::exp(2.0 * log_order) * prod, 1.0 / (1.0 + w.kappa));
}

/// E^2_{s,n,k} by the literal double sum over nonempty subsets and rule
/// points; exponential in k, fine for k <= ~10.
inline double e2_direct(const std::vector<std::uint32_t>& z, int n,
                        const qmcpde::WeightSetup& w) {
  const int k = static_cast<int>(z.size());
  std::vector<qmcpde::ThetaEvaluator> theta;
  theta.reserve(k);
  for (int j = 0; j < k; ++j) theta.emplace_back(w.alpha[j]);

  double total = 0.0;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> subset;
    for (int j = 0; j < k; ++j)
      if (mask & (1u << j)) subset.push_back(j);
    double inner = 0.0;
    for (int i = 1; i <= n; ++i) {
      double prod = 1.0;
      for (int j : subset) {
        const std::int64_t t = (static_cast<std::int64_t>(i) * z[j]) % n;
        prod *= theta[j](static_cast<double>(t) / n);
      }
      inner += prod;
    }
    total += gamma_closed_form(w, subset) * inner / n;
  }
  return total;
}

/// Greedy CBC by exhaustive candidate search against e2_direct; the
/// returned flag reports whether a repeated minimiser stopped the search.
inline std::vector<std::uint32_t> cbc_brute_force(int n, int s,
                                                  const qmcpde::WeightSetup& w,
                                                  bool* repeated = nullptr) {
  std::vector<std::uint32_t> z{1};
  if (repeated) *repeated = false;
  for (int k = 2; k <= s; ++k) {
    double best = 0.0;
    int best_z = -1;
    for (int cand = 1; cand < n; cand += 2) {
      std::vector<std::uint32_t> trial = z;
      trial.push_back(static_cast<std::uint32_t>(cand));
      const double e2 = e2_direct(trial, n, w);
      if (best_z < 0 || e2 < best) {
        best = e2;
        best_z = cand;
      }
    }
    for (std::uint32_t prev : z)
      if (prev == static_cast<std::uint32_t>(best_z)) {
        if (repeated) *repeated = true;
        return z;
      }
    z.push_back(static_cast<std::uint32_t>(best_z));
  }
  return z;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
