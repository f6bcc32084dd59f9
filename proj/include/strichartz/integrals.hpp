#pragma once

// Gaussian-weighted integrals of products of Hermite polynomials.
//
// Every spatial integral here has the form
//   J_beta(n_1..n_r) = int exp(-beta x^2) prod_j c_{n_j} H_{n_j}(x) dx,
// which after x = y / sqrt(beta) is a Gauss-Hermite integral of a polynomial
// of degree sum n_j, hence exact for a rule of size > sum n_j / 2.
// Products are accumulated in log form so large orders do not overflow.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "strichartz/hermite.hpp"
#include "strichartz/linalg.hpp"
#include "strichartz/quadrature.hpp"

namespace strichartz {

/// Overall constant of the resonant-sum numerator: the time integral at r = 0.
inline constexpr double kNumeratorNormalization = std::numbers::pi / 2.0;

/// sin(pi r), exactly zero at integers.
inline double sin_pi(double r) {
  if (r == std::round(r)) return 0.0;
  // reduce to [-1, 1] so the argument of sin stays small
  const double red = r - 2.0 * std::round(0.5 * r);
  return std::sin(std::numbers::pi * red);
}

/// int dt / (1+4t^2) ((1-2it)/(1+2it))^r = sin(pi r) / (2r), pi/2 at r = 0.
inline double time_integral(double r) {
  if (std::abs(r) <= 1e-14) return std::numbers::pi / 2.0;
  return sin_pi(r) / (2.0 * r);
}

/// q = 2 + 4/d, the exponent of the space-time norm in dimension d.
class ExponentQ {
 public:
  explicit ExponentQ(double q) : q_(q) {
    if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("ExponentQ: q must be positive");
  }
  static ExponentQ for_dimension(int d) {
    if (d < 1) throw std::invalid_argument("ExponentQ: dimension must be positive");
    return ExponentQ(2.0 + 4.0 / d);
  }
  double value() const { return q_; }

 private:
  double q_;
};

namespace detail {

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline int minimal_rule_size(int total_degree) { return (total_degree + 2) / 2 + 1; }

}  // namespace detail

/// p_n(y_i / sqrt(beta)) in log form for every node of one rule and every
/// n <= max_order. Reused across many integrals with the same weight.
class WeightedHermiteTable {
 public:
  WeightedHermiteTable(double beta, int max_order, int rule_size = 0)
      : beta_(beta), max_order_(max_order) {
    if (!(beta > 0.0)) throw std::invalid_argument("WeightedHermiteTable: beta must be positive");
    check_order(max_order);
    if (rule_size <= 0) rule_size = detail::minimal_rule_size(2 * max_order);
    rule_ = &cached_gauss_hermite_rule(rule_size);
    const std::size_t s = static_cast<std::size_t>(rule_->order());
    log_abs_.assign(static_cast<std::size_t>(max_order + 1) * s, 0.0);
    sign_.assign(log_abs_.size(), 0);
    const double inv_sqrt_beta = 1.0 / std::sqrt(beta);
    for (std::size_t i = 0; i < s; ++i) {
      detail::orthonormal_recurrence(max_order, rule_->nodes[i] * inv_sqrt_beta, [&](int n, LogValue v) {
        log_abs_[static_cast<std::size_t>(n) * s + i] = v.log_abs;
        sign_[static_cast<std::size_t>(n) * s + i] = static_cast<signed char>(v.sign);
      });
    }
  }

  double beta() const { return beta_; }
  int max_order() const { return max_order_; }
  int rule_size() const { return rule_->order(); }
  int exact_degree() const { return 2 * rule_->order() - 1; }

  /// int exp(-beta x^2) prod_j p_{n_j}(x) dx.
  double integrate(std::span<const int> orders) const {
    int total = 0;
    for (int n : orders) {
      if (n < 0 || n > max_order_)
        throw std::out_of_range("WeightedHermiteTable: order " + std::to_string(n) + " outside table");
      total += n;
    }
    if (total % 2 != 0) return 0.0;
    if (total > exact_degree())
      throw std::out_of_range("WeightedHermiteTable: total degree " + std::to_string(total) +
                              " exceeds rule exactness " + std::to_string(exact_degree()));
    const std::size_t s = static_cast<std::size_t>(rule_->order());
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i < s; ++i) {
      double lg = rule_->log_weights[i];
      int sg = 1;
      for (int n : orders) {
        const std::size_t idx = static_cast<std::size_t>(n) * s + i;
        sg *= sign_[idx];
        lg += log_abs_[idx];
      }
      if (sg != 0) acc.add(sg * std::exp(lg));
    }
    return acc.value() / std::sqrt(beta_);
  }

  double integrate(std::initializer_list<int> orders) const {
    return integrate(std::span<const int>(orders.begin(), orders.size()));
  }

 private:
  double beta_;
  int max_order_;
  const QuadratureRule* rule_ = nullptr;
  std::vector<double> log_abs_;
  std::vector<signed char> sign_;
};

/// int exp(-beta x^2) prod_j c_{n_j} H_{n_j}(x) dx, with a rule exact for the
/// total degree (or `rule_size` if larger). Odd total degree gives exactly 0.
inline double hermite_product_integral(std::span<const int> orders, double beta, int rule_size = 0) {
  int total = 0, nmax = 0;
  for (int n : orders) {
    check_order(n);
    total += n;
    nmax = std::max(nmax, n);
  }
  if (total % 2 != 0) return 0.0;
  const int s = std::max(rule_size, detail::minimal_rule_size(total));
  if (!(beta > 0.0)) throw std::invalid_argument("hermite_product_integral: beta must be positive");
  const QuadratureRule& rule = cached_gauss_hermite_rule(s);
  const double inv_sqrt_beta = 1.0 / std::sqrt(beta);
  detail::CompensatedSum acc;
  for (int i = 0; i < rule.order(); ++i) {
    const auto p = orthonormal_poly_values(nmax, rule.nodes[static_cast<std::size_t>(i)] * inv_sqrt_beta);
    double lg = rule.log_weights[static_cast<std::size_t>(i)];
    int sg = 1;
    for (int n : orders) {
      sg *= p[static_cast<std::size_t>(n)].sign;
      lg += p[static_cast<std::size_t>(n)].log_abs;
    }
    if (sg != 0) acc.add(sg * std::exp(lg));
  }
  return acc.value() * inv_sqrt_beta;
}

inline double hermite_product_integral(std::initializer_list<int> orders, double beta, int rule_size = 0) {
  return hermite_product_integral(std::span<const int>(orders.begin(), orders.size()), beta, rule_size);
}

/// G(m, n, q) = c_m c_n int exp(-q x^2 / 2) H_m H_n dx.
inline double weighted_pair_integral(int m, int n, ExponentQ q) {
  return hermite_product_integral({m, n}, 0.5 * q.value());
}

/// Lambda(n1..n6): six normalized Hermite polynomials against exp(-3 xi^2).
inline double lambda6(int n1, int n2, int n3, int n4, int n5, int n6) {
  return hermite_product_integral({n1, n2, n3, n4, n5, n6}, 3.0);
}

/// I_1(k, l, m) = delta_kl (pi/2) c_m^4 c_k c_l int H_m^4 H_k H_l exp(-3 xi^2).
inline double hessian_integral_I1(int k, int l, int m) {
  check_order(k);
  check_order(l);
  check_order(m);
  if (k != l) return 0.0;
  return 0.5 * std::numbers::pi * hermite_product_integral({m, m, m, m, k, l}, 3.0);
}

/// I_2(k, l, m): the same integrand, nonzero only on the anti-diagonal k + l = 2m.
inline double hessian_integral_I2(int k, int l, int m) {
  check_order(k);
  check_order(l);
  check_order(m);
  if (k + l != 2 * m) return 0.0;
  return 0.5 * std::numbers::pi * hermite_product_integral({m, m, m, m, k, l}, 3.0);
}

/// I^-(k, l, q) = (pi/2) c_0^{qd} / c_0^{2d} prod_j G(k_j, l_j, q) when
/// |k| = |l| and every coordinate pair has matching parity, else 0.
inline double hessian_integral_Iminus(const MultiIndex& k, const MultiIndex& l, ExponentQ q) {
  if (k.dim() != l.dim()) throw std::invalid_argument("hessian_integral_Iminus: dimension mismatch");
  if (k.dim() < 1) throw std::invalid_argument("hessian_integral_Iminus: empty multi-index");
  if (k.total() != l.total()) return 0.0;
  for (int j = 0; j < k.dim(); ++j)
    if ((k[j] + l[j]) % 2 != 0) return 0.0;
  const int d = k.dim();
  // c_0^{(q-2)d} = pi^{-(q-2)d/4}
  double value = 0.5 * std::numbers::pi * std::pow(std::numbers::pi, -0.25 * (q.value() - 2.0) * d);
  for (int j = 0; j < d; ++j) value *= weighted_pair_integral(k[j], l[j], q);
  return value;
}

}  // namespace strichartz
