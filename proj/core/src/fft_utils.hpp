#pragma once

#include <complex>
#include <vector>

namespace qmcpde::detail {

/// In-place unnormalised d-dimensional complex DFT on row-major data.
/// sign = -1 is the forward transform exp(-2*pi*i*...), sign = +1 the
/// conjugate one.  Plans are cached per (dims, sign); execution is
/// thread-safe, planning is serialised internally.
void dft(const std::vector<int>& dims, std::complex<double>* data, int sign);

/// Cyclic convolution c[t] = sum_j a[j] b[(t - j) mod n] of real vectors.
std::vector<double> cyclic_convolution(const std::vector<double>& a,
                                       const std::vector<double>& b);

}  // namespace qmcpde::detail
