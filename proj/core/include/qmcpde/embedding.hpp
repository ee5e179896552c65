#pragma once

#include "qmcpde/covariance.hpp"
#include "qmcpde/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmcpde {

struct EmbeddingNotPositive : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ImaginaryResidue : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Factorised circulant extension of the grid covariance matrix.
///
/// The (m0+1)^d-point grid covariance matrix R is embedded into a nested
/// block circulant matrix R_ext of order s = (2m)^d living on the enlarged
/// cube of edge ell = m*h0 (wrapped evenly to make it periodic).  Only the
/// eigenvalues of R_ext are stored; the orthogonal factor is applied
/// implicitly by FFT when sampling.
struct Embedding {
  GridSpec grid;
  CovarianceModel model;
  int m = 0;                       // padded half-period in grid cells, >= m0
  std::vector<double> eigenvalues; // s = (2m)^d entries, all >= 0

  std::int64_t size() const { return static_cast<std::int64_t>(eigenvalues.size()); }
  double edge_length() const { return m * grid.spacing(); }
};

/// One realisation of the field on the sampling grid.
struct FieldSample {
  std::vector<double> z;  // Gaussian values at the M grid points
  std::vector<double> a;  // exp(z), the lognormal coefficient
};

/// First column of R_ext: r[k] = rho(phi(h0*k_1),...,phi(h0*k_d)) for
/// k in {0,...,2m-1}^d in lexicographic layout, where phi folds [0,2*ell)
/// evenly about ell.
std::vector<double> extended_first_column(const GridSpec& grid, int m,
                                          const CovarianceModel& model);

/// Eigenvalues of the circulant with given first column: sqrt(s) times the
/// unitary DFT of r, which is real because r is even.  Throws
/// ImaginaryResidue if max |Im| > 1e-10 * max |Re| (broken folding or FFT
/// convention).
std::vector<double> eigenvalues_via_fft(const std::vector<double>& first_column,
                                        int points_per_dim, int dim);

enum class GrowthMode { increment, doubling };

/// Smallest m >= m0 whose circulant extension has eigenvalues
/// >= -1e-13 * max eigenvalue; tiny negatives from FFT round-off are
/// clipped to zero.  Throws EmbeddingNotPositive if no m <= m_cap works.
Embedding minimal_embedding(const GridSpec& grid, const CovarianceModel& model,
                            int m_cap, GrowthMode growth = GrowthMode::increment);

/// Flat indices (into the (2m)^d extended layout) of the M grid points
/// k in {0,...,m0}^d, in lexicographic order.
std::vector<std::int64_t> selected_indices(const Embedding& emb);

/// Draw the field from s i.i.d. standard normals: scale by the square roots
/// of the eigenvalues, apply the unitary DFT, add real and imaginary parts,
/// restrict to the grid points and add the mean.  Equivalent to Z = B*y + mean
/// with B the selected rows of the orthogonal-times-sqrt-eigenvalue factor.
FieldSample sample_field(const Embedding& emb, std::span<const double> y,
                         std::span<const double> mean);

enum class BjMode { exact, bound };

struct BjResult {
  std::vector<double> b;           // per-frequency sensitivity, natural order
  std::vector<std::int64_t> order; // order[r] = frequency of coordinate rank r,
                                   // b[order[0]] >= b[order[1]] >= ...
};

/// Per-dimension sensitivity coefficients: the max-norm of each column of
/// the sampling matrix B (mode exact, cost O(M*s)), or the closed-form
/// upper bound sqrt(2*v_j/s) (mode bound).  Exact mode falls back to the
/// bound when M*s > 1e9.
BjResult compute_bj(const Embedding& emb, BjMode mode);

/// sum_j (v_j/s)^(p/2) for p in (0,2]; diagnostic for dimension-independent
/// QMC convergence.  Equals sigma2 at p = 2 (the trace identity).
double qmc_criterion(const Embedding& emb, double p);

// Lossless structured-text round-trip (doubles written as hexfloats).
void save_embedding(const Embedding& emb, std::ostream& os);
void save_embedding(const Embedding& emb, const std::string& path);
Embedding load_embedding(std::istream& is);
Embedding load_embedding(const std::string& path);

}  // namespace qmcpde
