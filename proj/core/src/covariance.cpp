#include "qmcpde/covariance.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <numbers>

namespace qmcpde {

void CovarianceModel::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
    throw InvalidModel("covariance: sigma2 must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidModel("covariance: lambda must be positive");
  if (!(nu >= 0.5) || !std::isfinite(nu))
    throw InvalidModel("covariance: nu must be >= 1/2");
  if (dim < 1 || dim > 3)
    throw InvalidModel("covariance: dim must be 1, 2 or 3");
}

double matern_rho(const CovarianceModel& model, double r) {
  if (!std::isfinite(r) || r < 0.0)
    throw InvalidModel("matern_rho: distance must be finite and nonnegative");
  if (r == 0.0) return model.sigma2;  // analytic limit of z^nu K_nu(z)

  const double nu = model.nu;
  const double z = std::sqrt(2.0 * nu) * r / model.lambda;

  // K_nu(z) ~ sqrt(pi/(2z)) exp(-z); for large z the product z^nu K_nu(z)
  // underflows and the covariance is indistinguishable from 0.
  if (z > 705.0 + nu) return 0.0;

  const double knu = boost::math::cyl_bessel_k(nu, z);
  if (knu == 0.0) return 0.0;

  const double scale =
      std::exp((1.0 - nu) * std::numbers::ln2_v<double> - std::lgamma(nu));
  return model.sigma2 * scale * std::pow(z, nu) * knu;
}

double matern_rho(const CovarianceModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.dim)
    throw InvalidModel("matern_rho: displacement dimension mismatch");
  double r2 = 0.0;
  for (double xi : x) {
    if (!std::isfinite(xi))
      throw InvalidModel("matern_rho: non-finite displacement");
    r2 += xi * xi;
  }
  return matern_rho(model, std::sqrt(r2));
}

}  // namespace qmcpde
