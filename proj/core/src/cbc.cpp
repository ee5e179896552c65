#include "qmcpde/lattice.hpp"

#include "fft_utils.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <random>

namespace qmcpde {

namespace {

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// theta(t/n) for t = 0..n-1; the second half mirrors the first.
std::vector<double> theta_table(double alpha, int n) {
  ThetaEvaluator ev(alpha);
  std::vector<double> tab(n);
  for (int t = 0; t <= n / 2; ++t) tab[t] = ev(static_cast<double>(t) / n);
  for (int t = n / 2 + 1; t < n; ++t) tab[t] = tab[n - t];
  return tab;
}

// Shared theta tables; alpha values repeat heavily because tied b_j give
// tied alpha_j.
class ThetaTableCache {
 public:
  explicit ThetaTableCache(int n) : n_(n) {}
  const std::vector<double>& get(double alpha) {
    std::uint64_t key;
    std::memcpy(&key, &alpha, sizeof(key));
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, theta_table(alpha, n_)).first;
    return it->second;
  }

 private:
  int n_;
  std::map<std::uint64_t, std::vector<double>> cache_;
};

// Multiplicative structure of the odd residues mod n = 2^mu: for each
// subgroup modulus nc = n >> c with nc >= 8, the units are {+-3^t} and a
// discrete-log table maps an odd residue to t.  Rings with nc <= 4
// contribute candidate-independent terms only.
struct Ring {
  int shift;             // c: elements are i = 2^c * u
  int nc;                // n >> c
  int qc;                // nc / 4, order of 3 mod nc
  std::vector<int> pw;   // pw[t] = 3^t mod nc
  std::vector<int> dlog; // indexed by (odd residue - 1)/2
};

std::vector<Ring> build_rings(int n) {
  std::vector<Ring> rings;
  for (int c = 0; (n >> c) >= 8; ++c) {
    Ring r;
    r.shift = c;
    r.nc = n >> c;
    r.qc = r.nc / 4;
    r.pw.resize(r.qc);
    r.dlog.assign(r.nc / 2, -1);
    int p = 1;
    for (int t = 0; t < r.qc; ++t) {
      r.pw[t] = p;
      r.dlog[(p - 1) / 2] = t;
      r.dlog[(r.nc - p - 1) / 2] = t;
      p = static_cast<int>((static_cast<std::int64_t>(p) * 3) % r.nc);
    }
    rings.push_back(std::move(r));
  }
  return rings;
}

// Order recursion state for POD weights.  q[ell][i] holds
// order_factor(ell) * sum over |u| = ell subsets of accepted components of
// prod_{j in u} beta_j theta_j(frac(i z_j / n)); orders whose entries have
// all underflowed to zero are not extended further.
class PodAccumulator {
 public:
  PodAccumulator(const WeightSetup& w, int n) : w_(&w), n_(n) {
    q_.emplace_back(n, 1.0);  // ell = 0
  }

  // wv(i) = sum_ell order_factor_ratio(ell+1) * q[ell][i]; multiplying by
  // beta_k theta_k and averaging gives the E^2 increment of a candidate.
  std::vector<double> weight_vector() const {
    std::vector<double> wv(n_, 0.0);
    for (int ell = 0; ell <= top_; ++ell) {
      const double r = w_->order_factor_ratio(ell + 1);
      for (int i = 0; i < n_; ++i) wv[i] += r * q_[ell][i];
    }
    return wv;
  }

  // Fold in component j (0-based into the weight setup) with lattice
  // component z; candidate_sum = sum_i theta_j[(i z) % n] * wv(i).
  void accept(int j, std::uint32_t z, const std::vector<double>& theta_tab,
              double candidate_sum) {
    const double beta = w_->beta[j];
    e2_ += beta * candidate_sum / n_;
    if (beta == 0.0) return;

    std::vector<double> tz(n_);
    for (int i = 0; i < n_; ++i)
      tz[i] = theta_tab[(static_cast<std::int64_t>(i) * z) % n_];

    const int new_top = top_ + 1;
    if (static_cast<int>(q_.size()) <= new_top)
      q_.emplace_back(n_, 0.0);
    for (int ell = new_top; ell >= 1; --ell) {
      const double f = w_->order_factor_ratio(ell) * beta;
      auto& dst = q_[ell];
      const auto& src = q_[ell - 1];
      for (int i = 0; i < n_; ++i) dst[i] += f * tz[i] * src[i];
    }
    for (double v : q_[new_top])
      if (v != 0.0) {
        top_ = new_top;
        break;
      }
  }

  double e2() const { return e2_; }

 private:
  const WeightSetup* w_;
  int n_;
  std::vector<std::vector<double>> q_;
  int top_ = 0;
  double e2_ = 0.0;
};

// candidate_sums[(z-1)/2] = sum_i theta[(i z) % n] * wv(i) for odd z.
std::vector<double> candidate_sweep(const std::vector<double>& theta_tab,
                                    const std::vector<double>& wv,
                                    const std::vector<Ring>& rings, int n) {
  if (n < 8) {
    std::vector<double> sums(n / 2);
    for (int z = 1; z < n; z += 2) {
      double t = 0.0;
      for (int i = 0; i < n; ++i)
        t += theta_tab[(static_cast<std::int64_t>(i) * z) % n] * wv[i];
      sums[(z - 1) / 2] = t;
    }
    return sums;
  }

  // Candidate-independent part: i = 0 plus the nc = 2 and nc = 4 rings
  // (theta's evenness makes those terms equal for every odd z).
  const double base = theta_tab[0] * wv[0] + theta_tab[n / 2] * wv[n / 2] +
                      theta_tab[n / 4] * (wv[n / 4] + wv[3 * n / 4]);

  // Per ring: a cyclic correlation of the theta and weight sequences in
  // power-of-3 order, C[t'] = sum_t G[(t+t') mod qc] H[t].
  std::vector<std::vector<double>> corr(rings.size());
  for (std::size_t ri = 0; ri < rings.size(); ++ri) {
    const Ring& r = rings[ri];
    std::vector<double> g(r.qc), hrev(r.qc);
    for (int t = 0; t < r.qc; ++t) {
      const int u = r.pw[t];
      g[t] = theta_tab[u << r.shift];
      const double h =
          wv[u << r.shift] + wv[(r.nc - u) << r.shift];
      hrev[(r.qc - t) % r.qc] = h;
    }
    corr[ri] = detail::cyclic_convolution(g, hrev);
  }

  std::vector<double> sums(n / 2);
  for (int z = 1; z < n; z += 2) {
    double t = base;
    for (std::size_t ri = 0; ri < rings.size(); ++ri) {
      const Ring& r = rings[ri];
      t += corr[ri][r.dlog[((z & (r.nc - 1)) - 1) / 2]];
    }
    sums[(z - 1) / 2] = t;
  }
  return sums;
}

}  // namespace

GeneratingVector cbc_construct(int n, int s, const WeightSetup& w,
                               std::uint64_t tail_seed) {
  if (!is_power_of_two(n) || n < 2)
    throw std::invalid_argument("cbc_construct: n must be a power of 2, >= 2");
  if (s < 1) throw std::invalid_argument("cbc_construct: s must be >= 1");
  if (w.dim() < s)
    throw std::invalid_argument("cbc_construct: weight setup shorter than s");

  GeneratingVector gv;
  gv.n = n;
  gv.tail_seed = tail_seed;
  gv.kappa = w.kappa;
  gv.b_hash = hash_doubles(std::span<const double>(w.b.data(), w.dim()));
  gv.z.reserve(s);

  ThetaTableCache tables(n);
  const std::vector<Ring> rings = build_rings(n);
  PodAccumulator acc(w, n);

  // z_1 = 1.
  {
    const auto& tab = tables.get(w.alpha[0]);
    const std::vector<double> wv = acc.weight_vector();
    double t1 = 0.0;
    for (int i = 0; i < n; ++i) t1 += tab[i] * wv[i];
    acc.accept(0, 1, tab, t1);
    gv.z.push_back(1);
  }
  gv.cbc_prefix = 1;

  bool switched = false;
  for (int k = 2; k <= s && !switched; ++k) {
    const int j = k - 1;
    if (w.beta[j] == 0.0) {
      // Every candidate ties; the smallest odd value is 1 = z_1.
      switched = true;
      break;
    }
    const auto& tab = tables.get(w.alpha[j]);
    const std::vector<double> wv = acc.weight_vector();
    const std::vector<double> sums = candidate_sweep(tab, wv, rings, n);

    int best_z = 1;
    double best = sums[0];
    for (int z = 3; z < n; z += 2) {
      const double t = sums[(z - 1) / 2];
      if (t < best) {
        best = t;
        best_z = z;
      }
    }
    if (std::find(gv.z.begin(), gv.z.end(),
                  static_cast<std::uint32_t>(best_z)) != gv.z.end()) {
      switched = true;
      break;
    }
    acc.accept(j, static_cast<std::uint32_t>(best_z), tab, best);
    gv.z.push_back(static_cast<std::uint32_t>(best_z));
    gv.cbc_prefix = k;
  }

  // Remaining components: seeded uniform odd values.
  std::mt19937_64 rng(tail_seed);
  while (static_cast<int>(gv.z.size()) < s) {
    const std::uint64_t draw = rng() & static_cast<std::uint64_t>(n / 2 - 1);
    gv.z.push_back(static_cast<std::uint32_t>(2 * draw + 1));
  }
  return gv;
}

double shift_averaged_wce_sq(const GeneratingVector& gv, const WeightSetup& w) {
  const int s = gv.dim();
  if (w.dim() < s)
    throw std::invalid_argument("shift_averaged_wce_sq: weight setup too short");

  ThetaTableCache tables(gv.n);
  PodAccumulator acc(w, gv.n);
  for (int k = 0; k < s; ++k) {
    const auto& tab = tables.get(w.alpha[k]);
    const std::vector<double> wv = acc.weight_vector();
    double t = 0.0;
    for (int i = 0; i < gv.n; ++i)
      t += tab[(static_cast<std::int64_t>(i) * gv.z[k]) % gv.n] * wv[i];
    acc.accept(k, gv.z[k], tab, t);
  }
  return acc.e2();
}

}  // namespace qmcpde
