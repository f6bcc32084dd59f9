#pragma once

// Dense symmetric eigenvalues (Eigen's self-adjoint solver, with a cyclic
// Jacobi solver kept as an independent check), multi-index
// bookkeeping and the sparse symmetric container used for Hessian assembly.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "strichartz/errors.hpp"

namespace strichartz {

// ---------------------------------------------------------------- multi-index

/// Tensor Hermite mode k = (k_1, ..., k_d).
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : k_(std::move(entries)) {
    for (int v : k_)
      if (v < 0) throw std::invalid_argument("MultiIndex entries must be non-negative");
  }
  MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(d), 0)); }

  int dim() const { return static_cast<int>(k_.size()); }
  int total() const { return std::accumulate(k_.begin(), k_.end(), 0); }
  bool is_zero() const { return total() == 0; }
  int operator[](int j) const { return k_[static_cast<std::size_t>(j)]; }
  std::span<const int> entries() const { return k_; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> k_;
};

/// i = k_1 (N+1)^{d-1} + ... + k_d.
inline std::int64_t encode_multiindex(const MultiIndex& k, int N) {
  if (N < 0) throw std::invalid_argument("encode_multiindex: N must be non-negative");
  std::int64_t i = 0;
  for (int j = 0; j < k.dim(); ++j) {
    if (k[j] > N)
      throw std::out_of_range("encode_multiindex: coordinate " + std::to_string(k[j]) + " exceeds N=" +
                              std::to_string(N));
    i = i * (N + 1) + k[j];
  }
  return i;
}

inline MultiIndex decode_multiindex(std::int64_t i, int d, int N) {
  if (d < 1) throw std::invalid_argument("decode_multiindex: d must be positive");
  std::int64_t size = 1;
  for (int j = 0; j < d; ++j) size *= (N + 1);
  if (i < 0 || i >= size) throw std::out_of_range("decode_multiindex: index out of range");
  std::vector<int> k(static_cast<std::size_t>(d));
  for (int j = d - 1; j >= 0; --j) {
    k[static_cast<std::size_t>(j)] = static_cast<int>(i % (N + 1));
    i /= (N + 1);
  }
  return MultiIndex(std::move(k));
}

// ------------------------------------------------------------------ matrices

class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }
  double frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }
  double max_asymmetry() const {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Symmetric matrix storing only the upper triangle; explicit zeros are dropped.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  explicit SparseSymMatrix(std::size_t n) : n_(n) {}

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return entries_.size(); }

  void set(std::size_t i, std::size_t j, double v) {
    if (i >= n_ || j >= n_) throw std::out_of_range("SparseSymMatrix::set index out of range");
    if (i > j) std::swap(i, j);
    if (v == 0.0)
      entries_.erase({i, j});
    else
      entries_[{i, j}] = v;
  }

  double get(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    auto it = entries_.find({i, j});
    return it == entries_.end() ? 0.0 : it->second;
  }

  const std::map<std::pair<std::size_t, std::size_t>, double>& entries() const { return entries_; }

  DenseMatrix to_dense() const {
    DenseMatrix d(n_);
    for (const auto& [ij, v] : entries_) {
      d(ij.first, ij.second) = v;
      d(ij.second, ij.first) = v;
    }
    return d;
  }

 private:
  std::size_t n_ = 0;
  std::map<std::pair<std::size_t, std::size_t>, double> entries_;
};

// ---------------------------------------------------------------- eigensolver

inline constexpr std::size_t kDefaultEigenSizeCap = 4000;
inline constexpr double kDefaultZeroTolerance = 1e-8;

/// Sorted eigenvalues with a (negative, zero, positive) split under a tolerance.
struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  double tolerance = kDefaultZeroTolerance;
  std::size_t negative = 0;
  std::size_t zero = 0;
  std::size_t positive = 0;

  static Spectrum from_values(std::vector<double> values, double tolerance = kDefaultZeroTolerance) {
    Spectrum s;
    std::sort(values.begin(), values.end());
    s.eigenvalues = std::move(values);
    s.classify(tolerance);
    return s;
  }

  void classify(double tol) {
    tolerance = tol;
    negative = zero = positive = 0;
    for (double v : eigenvalues) {
      if (v < -tol)
        ++negative;
      else if (v > tol)
        ++positive;
      else
        ++zero;
    }
  }

  double max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }
  double min() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
  double sum() const { return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0); }
};

/// Eigenvalues of the symmetric tridiagonal matrix (diag, offdiag), ascending.
/// offdiag[i] couples rows i and i+1 (size n-1).
inline std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag,
                                                   const std::vector<double>& offdiag) {
  const std::size_t n = diag.size();
  if (n == 0) return {};
  if (offdiag.size() + 1 != n) throw std::invalid_argument("tridiagonal_eigenvalues: size mismatch");
  const auto len = static_cast<Eigen::Index>(n);
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), len);
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(offdiag.data(), len - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("tridiagonal eigenvalues did not converge");
  return {es.eigenvalues().data(), es.eigenvalues().data() + n};
}

inline void check_symmetric(const DenseMatrix& m, std::size_t size_cap) {
  if (m.size() > size_cap)
    throw std::length_error("symmetric_eigenvalues: size " + std::to_string(m.size()) + " exceeds cap " +
                            std::to_string(size_cap));
  const double scale = std::max(1.0, m.frobenius_norm());
  if (m.max_asymmetry() > 1e-12 * scale) throw std::invalid_argument("symmetric_eigenvalues: matrix not symmetric");
}

inline Spectrum symmetric_eigenvalues(const DenseMatrix& m, double zero_tolerance = kDefaultZeroTolerance,
                                      std::size_t size_cap = kDefaultEigenSizeCap) {
  check_symmetric(m, size_cap);
  const std::size_t n = m.size();
  if (n == 0) return Spectrum::from_values({}, zero_tolerance);
  const auto len = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a(len, len);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric_eigenvalues: solver did not converge");
  std::vector<double> values(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return Spectrum::from_values(std::move(values), zero_tolerance);
}

/// Cyclic Jacobi rotations. Slow (O(n^3) per sweep); used to validate the
/// main solver on small matrices.
inline Spectrum jacobi_eigenvalues(DenseMatrix a, double zero_tolerance = kDefaultZeroTolerance,
                                   int max_sweeps = 100) {
  check_symmetric(a, 400);
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * std::max(1.0, a.frobenius_norm() * a.frobenius_norm())) {
      std::vector<double> ev(n);
      for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
      return Spectrum::from_values(std::move(ev), zero_tolerance);
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(t, 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  throw ConvergenceError("jacobi_eigenvalues: no convergence");
}

/// Eigenvalues (lambda_-, lambda_+) of the symmetric 2x2 block
/// [[a_i, b_i], [b_j, a_j]] (b_i b_j plays the role of b^2).
inline std::pair<double, double> block2x2_eigenvalues(double a_i, double a_j, double b_i, double b_j) {
  const double tr = a_i + a_j;
  // tr^2 - 4(a_i a_j - b_i b_j), written to avoid cancellation
  double disc = (a_i - a_j) * (a_i - a_j) + 4.0 * b_i * b_j;
  if (disc < 0.0) {
    if (disc < -1e-12) throw std::domain_error("block2x2_eigenvalues: negative discriminant");
    disc = 0.0;
  }
  const double root = std::sqrt(disc);
  return {0.5 * (tr - root), 0.5 * (tr + root)};
}

}  // namespace strichartz
