#include "qmcpde/covariance.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using qmcpde::CovarianceModel;
using qmcpde::matern_rho;

TEST_SUITE_BEGIN("covariance");

TEST_CASE("rho(0) equals the variance") {
  const double zero2[] = {0.0, 0.0};
  CHECK(matern_rho(CovarianceModel{0.25, 0.2, 0.5, 2}, zero2) == 0.25);
  CHECK(matern_rho(CovarianceModel{0.25, 0.5, 4.0, 2}, zero2) == 0.25);
  const double zero3[] = {0.0, 0.0, 0.0};
  CHECK(matern_rho(CovarianceModel{2.0, 0.3, 1.5, 3}, zero3) == 2.0);
}

TEST_CASE("nu = 1/2 is the exponential kernel") {
  const CovarianceModel unit{1.0, 1.0, 0.5, 2};
  const double e1[] = {1.0, 0.0};
  CHECK(matern_rho(unit, e1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  std::mt19937_64 rng(314159);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_real_distribution<double> par(0.1, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    CovarianceModel model{par(rng), par(rng), 0.5, d};
    std::vector<double> x(d);
    double r = 0.0;
    for (double& xi : x) {
      xi = coord(rng);
      r += xi * xi;
    }
    r = std::sqrt(r);
    const double expected = model.sigma2 * std::exp(-r / model.lambda);
    CHECK(matern_rho(model, x) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("monotone decay along rays") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double nu : {0.5, 1.0, 1.5, 2.5, 4.0}) {
    CovarianceModel model{0.25, 0.3, nu, 1};
    double prev = matern_rho(model, 0.0);
    for (int i = 1; i <= 64; ++i) {
      const double cur = matern_rho(model, 0.05 * i + 0.01 * unif(rng));
      CHECK(cur <= prev + 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("even and bounded by rho(0)") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    CovarianceModel model{0.7, 0.4, 1.0 + 0.05 * (trial % 50), 3};
    double x[3], mx[3];
    for (int axis = 0; axis < 3; ++axis) {
      x[axis] = coord(rng);
      mx[axis] = -x[axis];
    }
    const double rho = matern_rho(model, x);
    CHECK(rho == matern_rho(model, mx));
    CHECK(std::abs(rho) <= model.sigma2);
  }
}

TEST_CASE("far field underflows to zero") {
  CHECK(matern_rho(CovarianceModel{1.0, 0.01, 0.5, 1}, 50.0) == 0.0);
  CHECK(matern_rho(CovarianceModel{1.0, 0.005, 4.0, 1}, 10.0) == 0.0);
}

TEST_CASE("input validation") {
  CovarianceModel model{0.25, 0.2, 0.5, 2};
  const double nan2[] = {std::nan(""), 0.0};
  CHECK_THROWS_AS(matern_rho(model, nan2), qmcpde::InvalidModel);
  const double one1[] = {1.0};
  CHECK_THROWS_AS(matern_rho(model, one1), qmcpde::InvalidModel);  // wrong dim
  CHECK_THROWS_AS((CovarianceModel{-1.0, 0.2, 0.5, 2}.validate()),
                  qmcpde::InvalidModel);
  CHECK_THROWS_AS((CovarianceModel{0.25, 0.2, 0.3, 2}.validate()),
                  qmcpde::InvalidModel);
  CHECK_THROWS_AS((CovarianceModel{0.25, 0.2, 0.5, 4}.validate()),
                  qmcpde::InvalidModel);
}

TEST_SUITE_END();
