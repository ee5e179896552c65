#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace qmcpde {

/// Uniform sampling grid on the unit cube: points x_k = h0 * k for
/// k in {0,...,m0}^d, with h0 = 1/m0 and M = (m0+1)^d points in
/// lexicographic (row-major, first axis slowest) order.
struct GridSpec {
  int m0 = 1;   // intervals per axis
  int dim = 1;  // 1..3

  double spacing() const { return 1.0 / m0; }

  std::int64_t num_points() const {
    std::int64_t n = 1;
    for (int i = 0; i < dim; ++i) n *= m0 + 1;
    return n;
  }

  void validate() const {
    if (m0 < 1) throw std::invalid_argument("grid: m0 must be >= 1");
    if (dim < 1 || dim > 3) throw std::invalid_argument("grid: dim must be 1..3");
  }

  /// Coordinates of the grid point with flat lexicographic index.
  std::array<double, 3> point(std::int64_t flat) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    const double h0 = spacing();
    for (int axis = dim - 1; axis >= 0; --axis) {
      x[axis] = h0 * static_cast<double>(flat % (m0 + 1));
      flat /= m0 + 1;
    }
    return x;
  }
};

}  // namespace qmcpde
