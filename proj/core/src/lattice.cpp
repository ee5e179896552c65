#include "qmcpde/lattice.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace qmcpde {

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2_v<double>);
}

double inv_normal_cdf(double v) {
  // ALGORITHM AS241, APPL. STATIST. (1988) VOL. 37, NO. 3 (PPND16).
  // Accurate to about 1 part in 1e16 over (0,1).
  if (!(v > 0.0 && v < 1.0))
    throw DomainError("inv_normal_cdf: argument must lie in (0,1)");

  const double q = v - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }

  double r = (q < 0.0) ? v : 1.0 - v;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -z : z;
}

double varrho(double alpha, double kappa) {
  const double eta = (2.0 * kappa - 1.0) / (4.0 * kappa);
  const double pi = std::numbers::pi_v<double>;
  const double core = std::sqrt(2.0 * pi) * std::exp(alpha * alpha / eta) /
                      (std::pow(pi, 2.0 - 2.0 * eta) * (1.0 - eta) * eta);
  return 2.0 * std::pow(core, kappa) * std::riemann_zeta(kappa + 0.5);
}

double WeightSetup::order_factor(int ell) const {
  if (ell < 0) throw std::invalid_argument("order_factor: negative order");
  // ((ell! / (log 2)^ell)^2)^(1/(1+kappa)), via logs
  const double log_val =
      std::lgamma(ell + 1.0) - ell * std::log(std::numbers::ln2_v<double>);
  return std::exp(2.0 / (1.0 + kappa) * log_val);
}

double WeightSetup::order_factor_ratio(int ell) const {
  if (ell < 1) throw std::invalid_argument("order_factor_ratio: order < 1");
  return std::pow(ell / std::numbers::ln2_v<double>, 2.0 / (1.0 + kappa));
}

double WeightSetup::pod_weight(std::span<const int> subset) const {
  double g = order_factor(static_cast<int>(subset.size()));
  for (int j : subset) g *= beta.at(j);
  return g;
}

WeightSetup make_weight_setup(std::vector<double> b_sorted, double kappa) {
  if (!(kappa > 0.5 && kappa < 1.0))
    throw std::invalid_argument("make_weight_setup: kappa must lie in (1/2,1)");
  for (std::size_t j = 0; j < b_sorted.size(); ++j) {
    if (!(b_sorted[j] >= 0.0))
      throw std::invalid_argument("make_weight_setup: b must be nonnegative");
    if (j > 0 && b_sorted[j] > b_sorted[j - 1])
      throw std::invalid_argument("make_weight_setup: b must be nonincreasing");
  }

  WeightSetup w;
  w.kappa = kappa;
  w.b = std::move(b_sorted);
  const int s = w.dim();
  w.alpha.resize(s);
  w.btilde.resize(s);
  w.varrho_j.resize(s);
  w.beta.resize(s);
  const double off = 1.0 - 1.0 / (2.0 * kappa);  // > 0 for kappa > 1/2
  for (int j = 0; j < s; ++j) {
    const double bj = w.b[j];
    w.alpha[j] = 0.5 * (bj + std::sqrt(bj * bj + off));
    w.btilde[j] = bj / (2.0 * std::exp(0.5 * bj * bj) * normal_cdf(bj));
    w.varrho_j[j] = varrho(w.alpha[j], kappa);
    const double num = w.btilde[j] * w.btilde[j];
    const double den = (w.alpha[j] - bj) * w.varrho_j[j];
    w.beta[j] = std::pow(num / den, 1.0 / (1.0 + kappa));
  }
  return w;
}

ThetaEvaluator::ThetaEvaluator(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("ThetaEvaluator: alpha must be positive");
  exp_2a2_ = std::exp(2.0 * alpha * alpha);
  cdf_2a_ = normal_cdf(2.0 * alpha);

  // c0 = int_0^inf Phi(-u)^2 exp(2 alpha u) du.  The integrand peaks near
  // u = alpha and then decays like exp(-(u - alpha)^2); extend the upper
  // limit until it is below 1e-22, where the remaining tail is negligible
  // against the 1e-12 target.
  auto integrand = [alpha](double u) {
    const double c = normal_cdf(-u);
    return c * c * std::exp(2.0 * alpha * u);
  };
  double upper = std::max(10.0, 2.0 * alpha + 10.0);
  while (integrand(upper) > 1e-22) upper *= 2.0;
  c0_ = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, upper, 12, 1e-13);
}

double ThetaEvaluator::operator()(double x) const {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("theta: x must lie in [0,1]");
  if (x > 0.5) x = 1.0 - x;  // theta(x) = theta(1-x)
  double cdf_term;
  if (x == 0.0) {
    cdf_term = 0.0;  // Phi(2 alpha + Phi^{-1}(0+)) -> Phi(-inf) = 0
  } else {
    cdf_term = normal_cdf(2.0 * alpha_ + inv_normal_cdf(x));
  }
  return (x - 0.5 + exp_2a2_ * (cdf_2a_ - cdf_term)) / alpha_ - 2.0 * c0_;
}

double theta(double x, double alpha) { return ThetaEvaluator(alpha)(x); }

void lattice_point(const GeneratingVector& gv, std::span<const double> shift,
                   int k, std::span<double> out) {
  const int s = gv.dim();
  if (static_cast<int>(shift.size()) != s || static_cast<int>(out.size()) != s)
    throw std::invalid_argument("lattice_point: dimension mismatch");
  if (k < 1 || k > gv.n)
    throw std::invalid_argument("lattice_point: k must lie in 1..n");
  for (int j = 0; j < s; ++j) {
    const std::int64_t kz =
        (static_cast<std::int64_t>(k) * gv.z[j]) % gv.n;
    double v = static_cast<double>(kz) / gv.n + shift[j];
    v -= std::floor(v);
    if (v >= 1.0) v = 0.0;  // guard against frac rounding up
    out[j] = v;
  }
}

std::uint64_t hash_doubles(std::span<const double> values) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffULL;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

void save_generating_vector(const GeneratingVector& gv, std::ostream& os) {
  os << "qmcpde lattice v1\n";
  os << "n " << gv.n << "\n";
  os << "s " << gv.dim() << "\n";
  os << "sstar " << gv.cbc_prefix << "\n";
  os << "kappa " << std::hexfloat << gv.kappa << std::defaultfloat << "\n";
  os << "tail_seed " << gv.tail_seed << "\n";
  os << "b_hash " << gv.b_hash << "\n";
  os << "z\n";
  for (std::uint32_t zj : gv.z) os << zj << "\n";
}

void save_generating_vector(const GeneratingVector& gv, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_generating_vector: cannot open " + path);
  save_generating_vector(gv, os);
}

namespace {

std::string expect_key(std::istream& is, const std::string& key) {
  std::string k, val;
  if (!(is >> k) || k != key)
    throw std::runtime_error("load_generating_vector: expected key '" + key + "'");
  if (!(is >> val))
    throw std::runtime_error("load_generating_vector: missing value for '" + key + "'");
  return val;
}

}  // namespace

GeneratingVector load_generating_vector(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line != "qmcpde lattice v1")
    throw std::runtime_error("load_generating_vector: bad header '" + line + "'");

  GeneratingVector gv;
  gv.n = std::stoi(expect_key(is, "n"));
  if (gv.n < 2 || (gv.n & (gv.n - 1)) != 0)
    throw std::runtime_error("load_generating_vector: n must be a power of 2");
  const int s = std::stoi(expect_key(is, "s"));
  gv.cbc_prefix = std::stoi(expect_key(is, "sstar"));
  if (s < 1 || gv.cbc_prefix < 1 || gv.cbc_prefix > s)
    throw std::runtime_error("load_generating_vector: bad s / sstar");
  gv.kappa = std::strtod(expect_key(is, "kappa").c_str(), nullptr);
  gv.tail_seed = std::stoull(expect_key(is, "tail_seed"));
  gv.b_hash = std::stoull(expect_key(is, "b_hash"));
  std::string tag;
  if (!(is >> tag) || tag != "z")
    throw std::runtime_error("load_generating_vector: expected z block");
  gv.z.resize(s);
  for (int j = 0; j < s; ++j) {
    if (!(is >> gv.z[j]))
      throw std::runtime_error("load_generating_vector: truncated z block");
    if (gv.z[j] % 2 == 0 || gv.z[j] >= static_cast<std::uint32_t>(gv.n))
      throw std::runtime_error("load_generating_vector: invalid component");
  }
  return gv;
}

GeneratingVector load_generating_vector(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_generating_vector: cannot open " + path);
  return load_generating_vector(is);
}

}  // namespace qmcpde
