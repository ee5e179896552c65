#pragma once

#include <span>
#include <stdexcept>

namespace qmcpde {

struct InvalidModel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Stationary isotropic Matern covariance model on the unit cube.
///
/// rho(x) = sigma2 * 2^(1-nu)/Gamma(nu) * (sqrt(2 nu) |x| / lambda)^nu
///          * K_nu(sqrt(2 nu) |x| / lambda),
/// with rho(0) = sigma2.  nu = 1/2 is the exponential kernel
/// sigma2 * exp(-|x|/lambda); increasing nu gives smoother realisations.
struct CovarianceModel {
  double sigma2 = 1.0;   // variance, rho(0)
  double lambda = 1.0;   // correlation length relative to the unit cube
  double nu = 0.5;       // smoothness, >= 1/2
  int dim = 1;           // spatial dimension, 1..3

  void validate() const;
};

/// Covariance at Euclidean distance r >= 0.  Underflow in the Bessel tail
/// returns 0, which only affects far-field entries.
double matern_rho(const CovarianceModel& model, double r);

/// Covariance at displacement x (length model.dim).  Rejects non-finite input.
double matern_rho(const CovarianceModel& model, std::span<const double> x);

}  // namespace qmcpde
