#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmcpde {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF, ALGORITHM AS241 (PPND16); accurate to
/// about 1 part in 1e16.  Throws DomainError outside (0,1).
double inv_normal_cdf(double v);

/// Per-dimension ingredients of the product-and-order-dependent (POD)
/// cubature weights derived from the sensitivity coefficients b_j:
///
///   alpha_j = (b_j + sqrt(b_j^2 + 1 - 1/(2 kappa))) / 2
///   btilde_j = b_j / (2 exp(b_j^2/2) Phi(b_j))
///   varrho_j = varrho(alpha_j, kappa)
///   gamma_u = [ (|u|!/(log 2)^|u|)^2 prod_{j in u}
///               btilde_j^2 / ((alpha_j - b_j) varrho_j) ]^(1/(1+kappa))
///           = order_factor(|u|) * prod_{j in u} beta[j].
struct WeightSetup {
  double kappa = 0.6;          // in (1/2, 1); decay exponent p = 2k/(1+k)
  std::vector<double> b;       // nonincreasing, nonnegative
  std::vector<double> alpha;
  std::vector<double> btilde;
  std::vector<double> varrho_j;
  std::vector<double> beta;    // product part of gamma_u

  int dim() const { return static_cast<int>(b.size()); }

  /// Order part of gamma_u for |u| = ell (ell >= 0; order_factor(0) = 1).
  double order_factor(int ell) const;
  /// order_factor(ell) / order_factor(ell-1), safe for large ell.
  double order_factor_ratio(int ell) const;
  /// gamma_u via the POD factorisation (subset of 0-based dimensions).
  double pod_weight(std::span<const int> subset) const;
};

/// varrho(alpha, kappa) = 2 (sqrt(2 pi) exp(alpha^2/eta) /
/// (pi^(2-2 eta) (1-eta) eta))^kappa * zeta(kappa + 1/2),
/// with eta = (2 kappa - 1)/(4 kappa).
double varrho(double alpha, double kappa);

WeightSetup make_weight_setup(std::vector<double> b_sorted, double kappa);

/// Kernel weight function theta for the shift-averaged worst-case error,
/// for the exponential weight psi^2(t) = exp(-2 alpha |t|).  Symmetric
/// about x = 1/2; the improper integral constant is computed once per
/// alpha at construction.
class ThetaEvaluator {
 public:
  explicit ThetaEvaluator(double alpha);
  double operator()(double x) const;
  double alpha() const { return alpha_; }
  /// int_{-inf}^0 Phi(t)^2 exp(2 alpha |t|) dt, absolute accuracy ~1e-12.
  double integral_constant() const { return c0_; }

 private:
  double alpha_;
  double c0_;
  double exp_2a2_;   // exp(2 alpha^2)
  double cdf_2a_;    // Phi(2 alpha)
};

/// Convenience wrapper; prefer ThetaEvaluator when evaluating many x.
double theta(double x, double alpha);

/// Rank-1 lattice rule data.  Components z_1..z_cbc_prefix come from the
/// CBC minimisation and are pairwise distinct; any further components are
/// uniform random odd values drawn from tail_seed.
struct GeneratingVector {
  int n = 0;                        // points, a power of 2
  std::vector<std::uint32_t> z;     // s components, odd, z[0] = 1
  int cbc_prefix = 0;               // s* in 1..s
  std::uint64_t tail_seed = 0;
  double kappa = 0.0;               // weight setup used for construction
  std::uint64_t b_hash = 0;         // hash of the b vector used

  int dim() const { return static_cast<int>(z.size()); }
};

/// Component-by-component construction under POD weights.  Each step picks
/// the odd z minimising the squared shift-averaged worst-case error of the
/// prefix (ties: smallest z).  If the minimiser repeats an existing
/// component the construction switches to seeded random odd tails from
/// that point on.  Cost O(s n log n + s^2 n) via the order recursion with
/// FFT-accelerated candidate sweeps.
GeneratingVector cbc_construct(int n, int s, const WeightSetup& w,
                               std::uint64_t tail_seed);

/// Squared shift-averaged worst-case error E^2 of the full rule.
double shift_averaged_wce_sq(const GeneratingVector& gv, const WeightSetup& w);

/// Point k (1-based, k in 1..n) of the shifted rule: frac(k z / n + shift).
void lattice_point(const GeneratingVector& gv, std::span<const double> shift,
                   int k, std::span<double> out);

/// FNV-1a over the byte representation, for tagging gv files with the b
/// vector they were built from.
std::uint64_t hash_doubles(std::span<const double> values);

void save_generating_vector(const GeneratingVector& gv, std::ostream& os);
void save_generating_vector(const GeneratingVector& gv, const std::string& path);
GeneratingVector load_generating_vector(std::istream& is);
GeneratingVector load_generating_vector(const std::string& path);

}  // namespace qmcpde
