#pragma once

// Constrained Hessians of the Strichartz functional:
//  * at the Hermite mode e_m in 1d, a diagonal (a_k) plus anti-diagonal (b_k,
//    pairing k with 2m-k) matrix on the indices k != m;
//  * at the Gaussian in dimension d, M(k,l) - (2/q) G(0,0)^d delta_kl with
//    M(k,l) = prod_j G(k_j, l_j, q) for |k| = |l|, over multi-indices k != 0.
// Plus finite-difference Hessians of S in real coordinates for cross-checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "strichartz/flows.hpp"
#include "strichartz/integrals.hpp"
#include "strichartz/linalg.hpp"
#include "strichartz/parallel.hpp"

namespace strichartz {

inline constexpr int kDefaultTailCutoff = 400;

// ---------------------------------------------------------------- 1d modes

class BlockHessian1D {
 public:
  /// a_k = 18 I_1(k,k,m) - 6 I_1(m,m,m) for k in [0, K] \ {m},
  /// b_k = 12 I_2(k, 2m-k, m) for k in [0, 2m] \ {m}.
  static BlockHessian1D assemble(int m, int K) {
    check_order(m);
    if (K <= 2 * m)
      throw std::invalid_argument("assemble_hessian_1d: tail cutoff K=" + std::to_string(K) + " must exceed 2m=" +
                                  std::to_string(2 * m));
    check_order(K);
    BlockHessian1D h;
    h.m_ = m;
    h.K_ = K;
    const WeightedHermiteTable w(3.0, K, detail::minimal_rule_size(4 * m + 2 * K));
    const double half_pi = 0.5 * std::numbers::pi;
    auto i1 = [&](int k) { return half_pi * w.integrate({m, m, m, m, k, k}); };
    const double shift = 6.0 * i1(m);
    h.a_.resize(static_cast<std::size_t>(K) + 1, 0.0);
    h.b_.resize(static_cast<std::size_t>(2 * m) + 1, 0.0);
    for (int k = 0; k <= K; ++k)
      if (k != m) h.a_[static_cast<std::size_t>(k)] = 18.0 * i1(k) - shift;
    for (int k = 0; k <= 2 * m; ++k)
      if (k != m) h.b_[static_cast<std::size_t>(k)] = 12.0 * half_pi * w.integrate({m, m, m, m, k, 2 * m - k});
    return h;
  }

  int mode() const { return m_; }
  int tail_cutoff() const { return K_; }

  double a(int k) const {
    check_index(k, K_);
    return a_[static_cast<std::size_t>(k)];
  }
  double b(int k) const {
    check_index(k, 2 * m_);
    return b_[static_cast<std::size_t>(k)];
  }

  /// Matrix entry between directions k and l (both != m).
  double entry(int k, int l) const {
    check_index(k, K_);
    check_index(l, K_);
    if (k == l) return a(k);
    if (k + l == 2 * m_) return b(k);
    return 0.0;
  }

  /// Diagonal entries a_k for k = 2m+1 .. K.
  std::vector<double> tail() const { return {a_.begin() + 2 * m_ + 1, a_.end()}; }

  /// (lambda_-, lambda_+) for each pair (k, 2m-k), k < m.
  std::vector<std::pair<double, double>> block_pairs() const {
    std::vector<std::pair<double, double>> out;
    for (int k = 0; k < m_; ++k) {
      const int j = 2 * m_ - k;
      out.push_back(block2x2_eigenvalues(a(k), a(j), b(k), b(j)));
    }
    return out;
  }

  /// The 2m eigenvalues of the block, ascending.
  std::vector<double> block_eigenvalues() const {
    std::vector<double> ev;
    for (const auto& [lo, hi] : block_pairs()) {
      ev.push_back(lo);
      ev.push_back(hi);
    }
    std::sort(ev.begin(), ev.end());
    return ev;
  }

  /// v^T M v for v given on indices 0..K (component m ignored).
  double quadratic_form(const std::vector<double>& v) const {
    double s = 0.0;
    const int n = static_cast<int>(v.size());
    if (n > K_ + 1) throw std::out_of_range("quadratic_form: vector longer than K+1");
    for (int k = 0; k < n; ++k) {
      if (k == m_) continue;
      const double vk = v[static_cast<std::size_t>(k)];
      s += a(k) * vk * vk;
      const int j = 2 * m_ - k;
      if (j >= 0 && j < n && j != k) s += b(k) * vk * v[static_cast<std::size_t>(j)];
    }
    return s;
  }

  /// The same form on imaginary directions i v: the anti-diagonal changes sign.
  double imaginary_quadratic_form(const std::vector<double>& v) const {
    double diag = 0.0;
    for (int k = 0; k < static_cast<int>(v.size()); ++k)
      if (k != m_) diag += a(k) * v[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(k)];
    return 2.0 * diag - quadratic_form(v);
  }

  /// Dense matrix on the directions 0..N except m, in increasing order.
  DenseMatrix constrained_matrix(int N) const {
    if (N > K_) throw std::out_of_range("constrained_matrix: N exceeds tail cutoff");
    std::vector<int> idx;
    for (int k = 0; k <= N; ++k)
      if (k != m_) idx.push_back(k);
    DenseMatrix M(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) M(i, j) = entry(idx[i], idx[j]);
    return M;
  }

 private:
  void check_index(int k, int hi) const {
    if (k < 0 || k > hi || k == m_)
      throw std::out_of_range("BlockHessian1D: index " + std::to_string(k) + " not a constrained direction");
  }

  int m_ = 0;
  int K_ = 0;
  std::vector<double> a_;
  std::vector<double> b_;
};

inline BlockHessian1D assemble_hessian_1d(int m, int K = kDefaultTailCutoff) { return BlockHessian1D::assemble(m, K); }

struct Spectrum1D {
  Spectrum spectrum;                    // block eigenvalues and tail merged
  std::vector<double> block_eigenvalues;
  std::vector<double> tail;             // a_k, k = 2m+1 .. K
};

inline Spectrum1D spectrum_1d(const BlockHessian1D& h, double tolerance = kDefaultZeroTolerance) {
  Spectrum1D s;
  s.block_eigenvalues = h.block_eigenvalues();
  s.tail = h.tail();
  std::vector<double> all = s.block_eigenvalues;
  all.insert(all.end(), s.tail.begin(), s.tail.end());
  s.spectrum = Spectrum::from_values(std::move(all), tolerance);
  return s;
}

inline Spectrum1D spectrum_1d(int m, int K = kDefaultTailCutoff, double tolerance = kDefaultZeroTolerance) {
  return spectrum_1d(assemble_hessian_1d(m, K), tolerance);
}

/// a_k for the first `count` indices k > 2m.
inline std::vector<double> tail_values_1d(int m, int count) {
  if (count < 0) throw std::invalid_argument("tail_values_1d: negative count");
  const auto h = assemble_hessian_1d(m, 2 * m + std::max(count, 1));
  auto t = h.tail();
  t.resize(static_cast<std::size_t>(count));
  return t;
}

/// Last `window` tail entries negative and strictly decreasing.
inline bool tail_settled(const std::vector<double>& tail, std::size_t window = 10) {
  if (tail.size() < window + 1) return false;
  for (std::size_t i = tail.size() - window; i < tail.size(); ++i)
    if (!(tail[i] < 0.0) || !(tail[i] < tail[i - 1])) return false;
  return true;
}

struct PositiveRatio {
  double ratio = 0.0;  // total positive / 2m
  std::size_t block_positive = 0;
  std::size_t tail_positive = 0;
  std::size_t total_positive = 0;
};

inline PositiveRatio positive_ratio(int m, int K = kDefaultTailCutoff, double tolerance = kDefaultZeroTolerance) {
  if (m < 1) throw std::invalid_argument("positive_ratio: m must be >= 1");
  const auto s = spectrum_1d(m, K, tolerance);
  if (!tail_settled(s.tail))
    throw VerificationFailure("positive_ratio: tail not settled at K=" + std::to_string(K) + "; increase K");
  PositiveRatio r;
  for (double v : s.block_eigenvalues) r.block_positive += v > tolerance;
  for (double v : s.tail) r.tail_positive += v > tolerance;
  r.total_positive = r.block_positive + r.tail_positive;
  r.ratio = static_cast<double>(r.total_positive) / (2.0 * m);
  return r;
}

/// Unit vector on indices m-1, m+1 generated by translation of f_m.
inline std::vector<double> translation_direction(int m) {
  if (m < 1) throw std::invalid_argument("translation_direction: m must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(m) + 2, 0.0);
  v[static_cast<std::size_t>(m - 1)] = std::sqrt(m / (2.0 * m + 1.0));
  v[static_cast<std::size_t>(m + 1)] = -std::sqrt((m + 1.0) / (2.0 * m + 1.0));
  return v;
}

/// (4x^2 - 2(2m+1)) f_m = 2 sqrt(m(m-1)) f_{m-2} + 2 sqrt((m+1)(m+2)) f_{m+2}, normalized.
inline std::vector<double> phase_direction(int m) {
  if (m < 0) throw std::invalid_argument("phase_direction: m must be >= 0");
  std::vector<double> v(static_cast<std::size_t>(m) + 3, 0.0);
  const double lo = 2.0 * std::sqrt(static_cast<double>(m) * (m - 1));
  const double hi = 2.0 * std::sqrt((m + 1.0) * (m + 2.0));
  const double norm = std::hypot(lo, hi);
  if (m >= 2) v[static_cast<std::size_t>(m - 2)] = lo / norm;
  v[static_cast<std::size_t>(m + 2)] = hi / norm;
  return v;
}

/// (1/2 + x d/dx) f_m = (sqrt(m(m-1)) f_{m-2} - sqrt((m+1)(m+2)) f_{m+2}) / 2, normalized.
inline std::vector<double> dilation_direction(int m) {
  std::vector<double> v = phase_direction(m);
  v[static_cast<std::size_t>(m + 2)] = -v[static_cast<std::size_t>(m + 2)];
  return v;
}

/// Real direction f_m' (translation).
inline double zero_mode_check_translation(int m) {
  const auto h = assemble_hessian_1d(m, 2 * m + 2);
  return std::abs(h.quadratic_form(translation_direction(m)));
}

/// Imaginary direction i phi_m f_m (the chirp exp(i b x^2) f_m, up to the
/// trivial phase i f_m).
inline double zero_mode_check_phase(int m) {
  const auto h = assemble_hessian_1d(m, 2 * m + 3);
  return std::abs(h.imaginary_quadratic_form(phase_direction(m)));
}

/// Real direction (1/2 + x d/dx) f_m (dilation).
inline double zero_mode_check_dilation(int m) {
  const auto h = assemble_hessian_1d(m, 2 * m + 3);
  return std::abs(h.quadratic_form(dilation_direction(m)));
}

// ---------------------------------------------------------- Gaussian, dim d

enum class HessianConvention {
  second_variation,  // (q^2/2) I^-(k,l) - delta q I^-(0,0)
  gram_shift,        // M(k,l) - (2/q) G(0,0)^d delta
  iminus,            // I^-(k,l) - (2/q) I^-(0,0) delta
};

inline std::string to_string(HessianConvention c) {
  switch (c) {
    case HessianConvention::second_variation: return "second-variation";
    case HessianConvention::gram_shift: return "gram-shift";
    case HessianConvention::iminus: return "iminus";
  }
  return "?";
}

inline HessianConvention parse_convention(const std::string& s) {
  if (s == "second-variation") return HessianConvention::second_variation;
  if (s == "gram-shift") return HessianConvention::gram_shift;
  if (s == "iminus") return HessianConvention::iminus;
  throw std::invalid_argument("unknown convention '" + s + "' (expected second-variation, gram-shift or iminus)");
}

/// Factor multiplying M - (2/q) G(0,0)^d I in each convention.
inline double convention_factor(HessianConvention c, ExponentQ q) {
  switch (c) {
    case HessianConvention::second_variation: return 0.25 * q.value() * q.value();
    case HessianConvention::gram_shift: return 1.0;
    case HessianConvention::iminus: return 0.5;  // (pi/2) c_0^{(q-2)d} = 1/2 since (q-2)d = 4
  }
  return 1.0;
}

class GaussianHessianDD {
 public:
  static GaussianHessianDD assemble(int d, int N, HessianConvention convention = HessianConvention::gram_shift,
                                    unsigned threads = 0, std::size_t size_cap = kDefaultEigenSizeCap) {
    if (d < 1) throw std::invalid_argument("assemble_hessian_gaussian: d must be >= 1");
    if (N < 1) throw std::invalid_argument("assemble_hessian_gaussian: N must be >= 1");
    double full = 1.0;
    for (int j = 0; j < d; ++j) full *= (N + 1);
    if (full - 1.0 > static_cast<double>(size_cap))
      throw std::length_error("assemble_hessian_gaussian: (N+1)^d - 1 = " + std::to_string(full - 1.0) +
                              " exceeds cap " + std::to_string(size_cap));
    GaussianHessianDD h{d, N, ExponentQ::for_dimension(d), convention};
    const std::size_t size = static_cast<std::size_t>(full) - 1;
    h.G_.assign(static_cast<std::size_t>((N + 1) * (N + 1)), 0.0);
    const WeightedHermiteTable w(0.5 * h.q_.value(), N);
    for (int a = 0; a <= N; ++a)
      for (int b = a; b <= N; ++b) {
        const double g = w.integrate({a, b});
        h.G_[static_cast<std::size_t>(a * (N + 1) + b)] = g;
        h.G_[static_cast<std::size_t>(b * (N + 1) + a)] = g;
      }
    h.shift_ = 2.0 / h.q_.value() * std::pow(h.G(0, 0), d);
    // group rows by total degree; only |k| = |l| couples
    std::map<int, std::vector<std::size_t>> by_degree;
    for (std::size_t r = 0; r < size; ++r) by_degree[h.index(r).total()].push_back(r);
    std::vector<const std::vector<std::size_t>*> groups;
    for (const auto& [deg, rows] : by_degree) groups.push_back(&rows);
    std::vector<std::vector<std::pair<std::pair<std::size_t, std::size_t>, double>>> found(groups.size());
    parallel_for(groups.size(), threads, [&](std::size_t gi) {
      const auto& rows = *groups[gi];
      for (std::size_t x = 0; x < rows.size(); ++x) {
        const MultiIndex k = h.index(rows[x]);
        for (std::size_t y = x; y < rows.size(); ++y) {
          const MultiIndex l = h.index(rows[y]);
          double v = 1.0;
          for (int j = 0; j < d && v != 0.0; ++j) v *= h.G(k[j], l[j]);
          if (v != 0.0) found[gi].push_back({{rows[x], rows[y]}, v});
        }
      }
    });
    h.M_ = SparseSymMatrix(size);
    for (const auto& list : found)
      for (const auto& [ij, v] : list) h.M_.set(ij.first, ij.second, v);
    return h;
  }

  int dim() const { return d_; }
  int truncation() const { return N_; }
  ExponentQ q() const { return q_; }
  HessianConvention convention() const { return convention_; }
  std::size_t size() const { return M_.size(); }
  double shift() const { return shift_; }
  double factor() const { return convention_factor(convention_, q_); }

  double G(int a, int b) const { return G_[static_cast<std::size_t>(a * (N_ + 1) + b)]; }

  /// Row r <-> multi-index with encode(k) = r + 1.
  MultiIndex index(std::size_t r) const { return decode_multiindex(static_cast<std::int64_t>(r) + 1, d_, N_); }
  std::size_t row(const MultiIndex& k) const {
    if (k.dim() != d_ || k.is_zero()) throw std::invalid_argument("GaussianHessianDD: bad multi-index");
    return static_cast<std::size_t>(encode_multiindex(k, N_) - 1);
  }

  /// The unshifted product matrix M(k,l).
  const SparseSymMatrix& gram() const { return M_; }

  /// factor * (M - shift I), dense.
  DenseMatrix matrix() const {
    DenseMatrix A = M_.to_dense();
    const double f = factor();
    for (std::size_t i = 0; i < A.size(); ++i) {
      A(i, i) -= shift_;
      for (std::size_t j = 0; j < A.size(); ++j) A(i, j) *= f;
    }
    return A;
  }

  double entry(std::size_t i, std::size_t j) const { return factor() * (M_.get(i, j) - (i == j ? shift_ : 0.0)); }

  /// v^T A v for v indexed by rows.
  double quadratic_form(const std::map<std::size_t, double>& v) const {
    double s = 0.0;
    for (const auto& [i, vi] : v)
      for (const auto& [j, vj] : v) s += vi * vj * entry(i, j);
    return s;
  }

 private:
  GaussianHessianDD(int d, int N, ExponentQ q, HessianConvention c) : d_(d), N_(N), q_(q), convention_(c) {}

  int d_;
  int N_;
  ExponentQ q_;
  HessianConvention convention_;
  double shift_ = 0.0;
  std::vector<double> G_;
  SparseSymMatrix M_{0};
};

inline GaussianHessianDD assemble_hessian_gaussian(int d, int N,
                                                   HessianConvention convention = HessianConvention::gram_shift,
                                                   unsigned threads = 0) {
  return GaussianHessianDD::assemble(d, N, convention, threads);
}

struct GaussianSpectrum {
  Spectrum spectrum;
  double gap = std::numeric_limits<double>::quiet_NaN();  // -(largest eigenvalue below -tolerance)
  HessianConvention convention = HessianConvention::gram_shift;
};

inline double spectral_gap(const Spectrum& s) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double v : s.eigenvalues)
    if (v < -s.tolerance) best = v;
  return -best;
}

inline GaussianSpectrum spectrum_gaussian(const GaussianHessianDD& h, double tolerance = kDefaultZeroTolerance) {
  GaussianSpectrum g;
  g.convention = h.convention();
  g.spectrum = symmetric_eigenvalues(h.matrix(), tolerance);
  g.gap = spectral_gap(g.spectrum);
  return g;
}

inline GaussianSpectrum spectrum_gaussian(int d, int N, HessianConvention convention = HessianConvention::gram_shift,
                                          double tolerance = kDefaultZeroTolerance, unsigned threads = 0) {
  return spectrum_gaussian(assemble_hessian_gaussian(d, N, convention, threads), tolerance);
}

struct GaussianZeroModes {
  double translation = 0.0;  // max |v^T A v| over the d translations
  double phase = 0.0;        // |v^T A v| for sum_j f_2 in coordinate j
};

/// Quadratic forms of the Gaussian Hessian on its symmetry directions.
inline GaussianZeroModes gaussian_zero_mode_checks(const GaussianHessianDD& h) {
  if (h.truncation() < 2) throw std::invalid_argument("gaussian_zero_mode_checks: need N >= 2");
  GaussianZeroModes z;
  const double scale = 1.0 / std::sqrt(static_cast<double>(h.dim()));
  std::map<std::size_t, double> phase;
  for (int j = 0; j < h.dim(); ++j) {
    std::vector<int> e(static_cast<std::size_t>(h.dim()), 0);
    e[static_cast<std::size_t>(j)] = 1;
    z.translation = std::max(z.translation, std::abs(h.quadratic_form({{h.row(MultiIndex(e)), 1.0}})));
    e[static_cast<std::size_t>(j)] = 2;
    phase[h.row(MultiIndex(e))] = scale;
  }
  z.phase = std::abs(h.quadratic_form(phase));
  return z;
}

/// First variation of H at the Gaussian in direction f_k:
/// time_integral(|k|/2) (pi/2)^{-1} I^-(k, 0) up to a nonzero constant.
inline double first_variation_gaussian(const MultiIndex& k, ExponentQ q) {
  if (k.dim() < 1 || k.is_zero()) throw std::invalid_argument("first_variation_gaussian: k must be nonzero");
  double spatial = std::pow(std::numbers::pi, -0.25 * (q.value() - 2.0) * k.dim());
  for (int j = 0; j < k.dim(); ++j) spatial *= weighted_pair_integral(k[j], 0, q);
  return std::abs(time_integral(0.5 * k.total()) * spatial);
}

// ------------------------------------------- finite-difference Hessians of S

/// Real coordinates x = (Re alpha_0..Re alpha_N, Im alpha_0..Im alpha_N).
inline CoeffVector from_real_coordinates(const std::vector<double>& x) {
  const std::size_t n = x.size() / 2;
  CoeffVector a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = Complex(x[i], x[n + i]);
  return a;
}

inline std::vector<double> to_real_coordinates(const CoeffVector& a) {
  std::vector<double> x(2 * a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    x[i] = a[i].real();
    x[a.size() + i] = a[i].imag();
  }
  return x;
}

/// Hessian of S by central differences of the analytic gradient with one
/// Richardson step (h, h/2); symmetrized.
inline DenseMatrix fd_hessian_from_gradient(const StrichartzFunctional& f, const CoeffVector& alpha, double h = 1e-4) {
  const std::vector<double> x0 = to_real_coordinates(alpha);
  const std::size_t n = x0.size();
  const std::size_t half = alpha.size();
  auto grad = [&](const std::vector<double>& x) {
    const CoeffVector g = f.gradient(from_real_coordinates(x));
    std::vector<double> r(n);
    for (std::size_t i = 0; i < half; ++i) {
      r[i] = g[i].real();
      r[half + i] = g[i].imag();
    }
    return r;
  };
  auto column = [&](std::size_t j, double step) {
    std::vector<double> xp = x0, xm = x0;
    xp[j] += step;
    xm[j] -= step;
    const auto gp = grad(xp), gm = grad(xm);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = (gp[i] - gm[i]) / (2.0 * step);
    return c;
  };
  DenseMatrix H(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto c1 = column(j, h), c2 = column(j, 0.5 * h);
    for (std::size_t i = 0; i < n; ++i) H(i, j) = (4.0 * c2[i] - c1[i]) / 3.0;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) H(i, j) = H(j, i) = 0.5 * (H(i, j) + H(j, i));
  return H;
}

/// Hessian of S from values only: second central differences with one
/// Richardson step.
inline DenseMatrix fd_hessian_from_values(const StrichartzFunctional& f, const CoeffVector& alpha, double h = 1e-4) {
  const std::vector<double> x0 = to_real_coordinates(alpha);
  const std::size_t n = x0.size();
  auto S = [&](const std::vector<double>& x) { return f.value(from_real_coordinates(x)); };
  const double s0 = S(x0);
  auto second = [&](std::size_t i, std::size_t j, double step) {
    if (i == j) {
      std::vector<double> xp = x0, xm = x0;
      xp[i] += step;
      xm[i] -= step;
      return (S(xp) - 2.0 * s0 + S(xm)) / (step * step);
    }
    auto at = [&](double si, double sj) {
      std::vector<double> x = x0;
      x[i] += si * step;
      x[j] += sj * step;
      return S(x);
    };
    return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * step * step);
  };
  DenseMatrix H(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = (4.0 * second(i, j, 0.5 * h) - second(i, j, h)) / 3.0;
      H(i, j) = H(j, i) = v;
    }
  return H;
}

}  // namespace strichartz
