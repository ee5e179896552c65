#include "fft_utils.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace qmcpde::detail {

namespace {

// fftw planning mutates global state; execution via the new-array interface
// does not.  Plans are created once per shape with FFTW_UNALIGNED so they
// stay valid for any caller buffer.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(const std::vector<int>& dims, int sign) {
  static std::map<std::pair<std::vector<int>, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(dims, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::size_t n = 1;
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("dft: nonpositive dimension");
    n *= static_cast<std::size_t>(d);
  }
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                                 buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!plan) throw std::runtime_error("dft: fftw planning failed");
  cache.emplace(std::move(key), plan);
  return plan;
}

}  // namespace

void dft(const std::vector<int>& dims, std::complex<double>* data, int sign) {
  fftw_plan plan = plan_for(dims, sign);
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, raw, raw);
}

std::vector<double> cyclic_convolution(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  const int n = static_cast<int>(a.size());
  if (b.size() != a.size())
    throw std::invalid_argument("cyclic_convolution: length mismatch");
  if (n == 1) return {a[0] * b[0]};

  std::vector<std::complex<double>> fa(a.begin(), a.end());
  std::vector<std::complex<double>> fb(b.begin(), b.end());
  const std::vector<int> dims{n};
  dft(dims, fa.data(), -1);
  dft(dims, fb.data(), -1);
  for (int i = 0; i < n; ++i) fa[i] *= fb[i];
  dft(dims, fa.data(), +1);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = fa[i].real() / n;
  return out;
}

}  // namespace qmcpde::detail
