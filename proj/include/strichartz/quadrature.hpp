#pragma once

// Gauss-Hermite rules for the weight exp(-y^2): Golub-Welsch nodes from the
// Jacobi matrix, polished by Newton on the orthonormal polynomial p_s, weights
// from the Christoffel formula. Weights are also kept in the scaled form
// w_i exp(y_i^2), which stays O(1/sqrt(s)) where w_i itself underflows.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "strichartz/errors.hpp"
#include "strichartz/hermite.hpp"
#include "strichartz/linalg.hpp"

namespace strichartz {

inline constexpr int kMaxRuleSize = 4000;

struct QuadratureRule {
  std::vector<double> nodes;           // ascending, symmetric about 0
  std::vector<double> weights;         // w_i, may underflow to 0 at the ends
  std::vector<double> log_weights;     // log w_i
  std::vector<double> scaled_weights;  // w_i exp(y_i^2)

  int order() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// p_s(y), p_{s-1}(y) (orthonormal polynomials c_n H_n) sharing one scale:
// true value = mantissa * exp(log_scale).
struct PolyPair {
  double cur = 0.0;
  double prev = 0.0;
  double log_scale = 0.0;
};

inline PolyPair orthonormal_poly_pair(int s, double y) {
  PolyPair r;
  r.cur = std::pow(std::numbers::pi, -0.25);
  for (int n = 0; n < s; ++n) {
    const double next = std::sqrt(2.0 / (n + 1)) * y * r.cur - std::sqrt(static_cast<double>(n) / (n + 1)) * r.prev;
    r.prev = r.cur;
    r.cur = next;
    if (std::abs(r.cur) > kRescaleThreshold) {
      r.cur /= kRescaleThreshold;
      r.prev /= kRescaleThreshold;
      r.log_scale += std::log(kRescaleThreshold);
    }
  }
  return r;
}

}  // namespace detail

inline QuadratureRule gauss_hermite_rule(int size) {
  if (size < 1) throw std::invalid_argument("gauss_hermite_rule: size must be >= 1");
  if (size > kMaxRuleSize)
    throw std::out_of_range("gauss_hermite_rule: size " + std::to_string(size) + " exceeds " +
                            std::to_string(kMaxRuleSize));
  const int s = size;
  std::vector<double> diag(static_cast<std::size_t>(s), 0.0);
  std::vector<double> off(static_cast<std::size_t>(s - 1));
  for (int k = 1; k < s; ++k) off[static_cast<std::size_t>(k - 1)] = std::sqrt(0.5 * k);
  std::vector<double> guess = tridiagonal_eigenvalues(std::move(diag), std::move(off));

  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(s));
  rule.weights.resize(static_cast<std::size_t>(s));
  rule.log_weights.resize(static_cast<std::size_t>(s));
  rule.scaled_weights.resize(static_cast<std::size_t>(s));

  // Polish the non-negative half and mirror; the middle node of an odd rule is 0.
  const int half = s / 2;
  for (int i = 0; i < (s + 1) / 2; ++i) {
    const std::size_t hi = static_cast<std::size_t>(s - 1 - i);
    double y = (s % 2 == 1 && i == half) ? 0.0 : std::abs(guess[hi]);
    if (!(s % 2 == 1 && i == half)) {
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        const auto pp = detail::orthonormal_poly_pair(s, y);
        // p_s'(y) = sqrt(2s) p_{s-1}(y)
        const double dy = pp.cur / (std::sqrt(2.0 * s) * pp.prev);
        y -= dy;
        if (std::abs(dy) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(y))) {
          converged = true;
          break;
        }
      }
      if (!converged) throw ConvergenceError("gauss_hermite_rule: Newton failed for size " + std::to_string(s));
    }
    const auto pp = detail::orthonormal_poly_pair(s, y);
    if (pp.prev == 0.0 || !std::isfinite(pp.prev))
      throw ConvergenceError("gauss_hermite_rule: degenerate weight for size " + std::to_string(s));
    // w_i = 1 / (s p_{s-1}(y)^2)
    const double logw = -std::log(static_cast<double>(s)) - 2.0 * (std::log(std::abs(pp.prev)) + pp.log_scale);
    const double scaled = std::exp(logw + y * y);
    for (std::size_t idx : {hi, static_cast<std::size_t>(i)}) {
      rule.scaled_weights[idx] = scaled;
      rule.log_weights[idx] = logw;
      rule.weights[idx] = std::exp(logw);
    }
    rule.nodes[hi] = y;
    rule.nodes[static_cast<std::size_t>(i)] = -y;
  }
  return rule;
}

/// Process-wide cache of rules; returned references stay valid.
inline const QuadratureRule& cached_gauss_hermite_rule(int size) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[size];
  if (!slot) slot = std::make_unique<QuadratureRule>(gauss_hermite_rule(size));
  return *slot;
}

}  // namespace strichartz
