#include "qmcpde/embedding.hpp"

#include "fft_utils.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qmcpde {

namespace {

constexpr double kEigTolRel = 1e-13;  // relative clip for FFT round-off

std::int64_t pow_int(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

std::vector<double> extended_first_column(const GridSpec& grid, int m,
                                          const CovarianceModel& model) {
  grid.validate();
  model.validate();
  if (m < grid.m0)
    throw std::invalid_argument("extended_first_column: m < m0");

  const int d = grid.dim;
  const int n = 2 * m;
  const double h0 = grid.spacing();
  const std::int64_t s = pow_int(n, d);

  std::vector<double> r(s);
  std::vector<double> x(d);
  std::array<int, 3> k{0, 0, 0};
  for (std::int64_t flat = 0; flat < s; ++flat) {
    // phi(h0*k) for k in [0, 2m): distance h0*k folded about ell = m*h0
    for (int axis = 0; axis < d; ++axis)
      x[axis] = h0 * static_cast<double>(std::min(k[axis], n - k[axis]));
    r[flat] = matern_rho(model, x);
    for (int axis = d - 1; axis >= 0; --axis) {
      if (++k[axis] < n) break;
      k[axis] = 0;
    }
  }
  return r;
}

std::vector<double> eigenvalues_via_fft(const std::vector<double>& first_column,
                                        int points_per_dim, int dim) {
  const std::int64_t s = pow_int(points_per_dim, dim);
  if (static_cast<std::int64_t>(first_column.size()) != s)
    throw DimensionMismatch("eigenvalues_via_fft: column length != (2m)^d");

  std::vector<std::complex<double>> buf(first_column.begin(), first_column.end());
  std::vector<int> dims(dim, points_per_dim);
  detail::dft(dims, buf.data(), -1);  // sqrt(s) * unitary DFT = plain DFT

  double max_re = 0.0, max_im = 0.0;
  for (const auto& c : buf) {
    max_re = std::max(max_re, std::abs(c.real()));
    max_im = std::max(max_im, std::abs(c.imag()));
  }
  if (max_im > 1e-10 * max_re)
    throw ImaginaryResidue("eigenvalues_via_fft: imaginary residue " +
                           std::to_string(max_im) + " vs max " +
                           std::to_string(max_re));

  std::vector<double> v(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) v[i] = buf[i].real();
  return v;
}

Embedding minimal_embedding(const GridSpec& grid, const CovarianceModel& model,
                            int m_cap, GrowthMode growth) {
  grid.validate();
  model.validate();
  if (m_cap < grid.m0)
    throw std::invalid_argument("minimal_embedding: m_cap < m0");

  for (int m = grid.m0; m <= m_cap;
       m = (growth == GrowthMode::doubling) ? 2 * m : m + 1) {
    std::vector<double> r = extended_first_column(grid, m, model);
    std::vector<double> v = eigenvalues_via_fft(r, 2 * m, grid.dim);
    const double vmax = *std::max_element(v.begin(), v.end());
    const double tol = kEigTolRel * vmax;
    const double vmin = *std::min_element(v.begin(), v.end());
    if (vmin >= -tol) {
      for (double& x : v)
        if (x < 0.0) x = 0.0;
      return Embedding{grid, model, m, std::move(v)};
    }
  }
  throw EmbeddingNotPositive(
      "minimal_embedding: no positive definite extension with m <= " +
      std::to_string(m_cap));
}

std::vector<std::int64_t> selected_indices(const Embedding& emb) {
  const int d = emb.grid.dim;
  const int n = 2 * emb.m;
  const std::int64_t M = emb.grid.num_points();

  std::vector<std::int64_t> sel(M);
  std::array<int, 3> k{0, 0, 0};
  for (std::int64_t i = 0; i < M; ++i) {
    std::int64_t flat = 0;
    for (int axis = 0; axis < d; ++axis) flat = flat * n + k[axis];
    sel[i] = flat;
    for (int axis = d - 1; axis >= 0; --axis) {
      if (++k[axis] <= emb.grid.m0) break;
      k[axis] = 0;
    }
  }
  return sel;
}

FieldSample sample_field(const Embedding& emb, std::span<const double> y,
                         std::span<const double> mean) {
  const std::int64_t s = emb.size();
  const std::int64_t M = emb.grid.num_points();
  if (static_cast<std::int64_t>(y.size()) != s)
    throw DimensionMismatch("sample_field: y length != s");
  if (static_cast<std::int64_t>(mean.size()) != M)
    throw DimensionMismatch("sample_field: mean length != M");

  std::vector<std::complex<double>> w(s);
  for (std::int64_t j = 0; j < s; ++j)
    w[j] = y[j] * std::sqrt(emb.eigenvalues[j]);

  // Unitary DFT with positive exponent, matching the factor Re(F) + Im(F).
  std::vector<int> dims(emb.grid.dim, 2 * emb.m);
  detail::dft(dims, w.data(), +1);
  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(s));

  FieldSample out;
  out.z.resize(M);
  out.a.resize(M);
  const std::vector<std::int64_t> sel = selected_indices(emb);
  for (std::int64_t i = 0; i < M; ++i) {
    const auto& c = w[sel[i]];
    out.z[i] = (c.real() + c.imag()) * inv_sqrt_s + mean[i];
    out.a[i] = std::exp(out.z[i]);
  }
  return out;
}

BjResult compute_bj(const Embedding& emb, BjMode mode) {
  const std::int64_t s = emb.size();
  const std::int64_t M = emb.grid.num_points();
  const double ds = static_cast<double>(s);

  if (mode == BjMode::exact && M * s > 1'000'000'000LL) mode = BjMode::bound;

  BjResult res;
  res.b.resize(s);

  if (mode == BjMode::bound) {
    for (std::int64_t j = 0; j < s; ++j)
      res.b[j] = std::sqrt(2.0 * emb.eigenvalues[j] / ds);
  } else {
    // Max-norm of column j of B: entries sqrt(v_j/s)*(cos+sin)(2*pi*k.j/(2m))
    // over the M selected multi-indices k.
    const int d = emb.grid.dim;
    const int n = 2 * emb.m;
    const double two_pi = 2.0 * std::numbers::pi_v<double>;
    const std::vector<std::int64_t> sel = selected_indices(emb);

    std::vector<std::array<int, 3>> kidx(M);
    {
      std::array<int, 3> k{0, 0, 0};
      for (std::int64_t i = 0; i < M; ++i) {
        kidx[i] = k;
        for (int axis = d - 1; axis >= 0; --axis) {
          if (++k[axis] <= emb.grid.m0) break;
          k[axis] = 0;
        }
      }
    }

    std::array<int, 3> j{0, 0, 0};
    for (std::int64_t flat = 0; flat < s; ++flat) {
      double colmax = 0.0;
      for (std::int64_t i = 0; i < M; ++i) {
        std::int64_t dot = 0;
        for (int axis = 0; axis < d; ++axis)
          dot += static_cast<std::int64_t>(kidx[i][axis]) * j[axis];
        const double ang = two_pi * static_cast<double>(dot % n) / n;
        colmax = std::max(colmax, std::abs(std::cos(ang) + std::sin(ang)));
      }
      res.b[flat] = std::sqrt(emb.eigenvalues[flat] / ds) * colmax;
      for (int axis = d - 1; axis >= 0; --axis) {
        if (++j[axis] < n) break;
        j[axis] = 0;
      }
    }
  }

  res.order.resize(s);
  std::iota(res.order.begin(), res.order.end(), 0);
  std::stable_sort(res.order.begin(), res.order.end(),
                   [&](std::int64_t a, std::int64_t c) {
                     if (res.b[a] != res.b[c]) return res.b[a] > res.b[c];
                     return a < c;  // ties by ascending frequency index
                   });
  return res;
}

double qmc_criterion(const Embedding& emb, double p) {
  if (!(p > 0.0) || !(p <= 2.0))
    throw std::invalid_argument("qmc_criterion: p must lie in (0,2]");
  const double ds = static_cast<double>(emb.size());
  double sum = 0.0;
  for (double v : emb.eigenvalues) sum += std::pow(v / ds, 0.5 * p);
  return sum;
}

void save_embedding(const Embedding& emb, std::ostream& os) {
  os << "qmcpde embedding v1\n";
  os << "d " << emb.grid.dim << "\n";
  os << "m0 " << emb.grid.m0 << "\n";
  os << "m " << emb.m << "\n";
  os << std::hexfloat;
  os << "sigma2 " << emb.model.sigma2 << "\n";
  os << "lambda " << emb.model.lambda << "\n";
  os << "nu " << emb.model.nu << "\n";
  os << std::defaultfloat;
  os << "s " << emb.size() << "\n";
  os << "v\n" << std::hexfloat;
  for (double x : emb.eigenvalues) os << x << "\n";
  os << std::defaultfloat;
}

void save_embedding(const Embedding& emb, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_embedding: cannot open " + path);
  save_embedding(emb, os);
}

namespace {

std::string expect_key(std::istream& is, const std::string& key) {
  std::string k, val;
  if (!(is >> k) || k != key)
    throw std::runtime_error("load_embedding: expected key '" + key + "'");
  if (!(is >> val))
    throw std::runtime_error("load_embedding: missing value for '" + key + "'");
  return val;
}

double parse_double(const std::string& tok) {
  return std::strtod(tok.c_str(), nullptr);
}

}  // namespace

Embedding load_embedding(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line != "qmcpde embedding v1")
    throw std::runtime_error("load_embedding: bad header '" + line + "'");

  Embedding emb;
  emb.grid.dim = std::stoi(expect_key(is, "d"));
  emb.grid.m0 = std::stoi(expect_key(is, "m0"));
  emb.m = std::stoi(expect_key(is, "m"));
  emb.model.sigma2 = parse_double(expect_key(is, "sigma2"));
  emb.model.lambda = parse_double(expect_key(is, "lambda"));
  emb.model.nu = parse_double(expect_key(is, "nu"));
  emb.model.dim = emb.grid.dim;
  const std::int64_t s = std::stoll(expect_key(is, "s"));

  std::string tag;
  if (!(is >> tag) || tag != "v")
    throw std::runtime_error("load_embedding: expected eigenvalue block");
  emb.eigenvalues.resize(s);
  std::string tok;
  for (std::int64_t i = 0; i < s; ++i) {
    if (!(is >> tok))
      throw std::runtime_error("load_embedding: truncated eigenvalue block");
    emb.eigenvalues[i] = parse_double(tok);
  }
  if (static_cast<std::int64_t>(emb.eigenvalues.size()) !=
      pow_int(2 * emb.m, emb.grid.dim))
    throw std::runtime_error("load_embedding: s != (2m)^d");
  emb.grid.validate();
  emb.model.validate();
  return emb;
}

Embedding load_embedding(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_embedding: cannot open " + path);
  return load_embedding(is);
}

}  // namespace qmcpde
