#pragma once

// sum_{i <= n/2} n! / ((n-2i)! i!^2) <= 3^{n-1} in exact integer arithmetic,
// and the column-sum inequality for the Gaussian Hessian in dimension d.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "strichartz/errors.hpp"
#include "strichartz/integrals.hpp"
#include "strichartz/linalg.hpp"
#include "strichartz/parallel.hpp"

namespace strichartz {

using BigInt = boost::multiprecision::cpp_int;

/// sum_i n! / ((n-2i)! (i!)^2) by term(i+1) = term(i) (n-2i)(n-2i-1) / (i+1)^2.
inline BigInt binomial_sum(int n) {
  if (n < 1) throw std::invalid_argument("binomial_sum: n must be >= 1");
  BigInt term = 1, sum = 0;
  for (int i = 0; 2 * i <= n; ++i) {
    sum += term;
    term *= BigInt(n - 2 * i) * (n - 2 * i - 1);
    term /= BigInt(i + 1) * (i + 1);
  }
  return sum;
}

inline BigInt power_of_three(int n) {
  if (n < 1) throw std::invalid_argument("power_of_three: n must be >= 1");
  return boost::multiprecision::pow(BigInt(3), static_cast<unsigned>(n - 1));
}

struct BinomialSumReport {
  int n_max = 0;
  std::vector<int> equalities;
  std::vector<int> violations;
  int key_steps_checked = 0;
  std::vector<int> key_step_failures;
  int cross_checks = 0;                            // n where the direct sum was compared
  std::vector<std::pair<int, std::string>> margins;  // 3^{n-1} - lhs, n <= detail_limit
  bool margin_increasing = true;                   // over 3 <= n <= min(200, n_max)

  bool passed() const { return violations.empty() && key_step_failures.empty(); }
};

/// Sweeps n = 1..n_max. The left side obeys the three-term recurrence
/// n T_n = (2n-1) T_{n-1} + 3(n-1) T_{n-2}; it is compared with the direct
/// sum for n <= cross_check_limit and at n_max. For n = 3m, m >= 2, the
/// inequality 2 n!/(m!)^3 <= 6 n!/((m+1)!(m-1)!m!) is verified as well.
inline BinomialSumReport binomial_sum_check(int n_max, int detail_limit = 200, int cross_check_limit = 500) {
  if (n_max < 1) throw std::invalid_argument("binomial_sum_check: n_max must be >= 1");
  BinomialSumReport r;
  r.n_max = n_max;
  BigInt t_prev2 = 1, t_prev = 1;  // T_0, T_1
  BigInt pow3 = 1;                 // 3^{n-1}
  BigInt central = 1;              // (3m)! / (m!)^3
  BigInt last_margin = 0;
  for (int n = 1; n <= n_max; ++n) {
    BigInt t;
    if (n == 1) {
      t = 1;
    } else {
      t = (BigInt(2 * n - 1) * t_prev + BigInt(3) * (n - 1) * t_prev2);
      if (t % n != 0) throw VerificationFailure("binomial_sum_check: recurrence lost integrality at n=" + std::to_string(n));
      t /= n;
      t_prev2 = t_prev;
      t_prev = t;
      pow3 *= 3;
    }
    if (n <= cross_check_limit || n == n_max) {
      if (binomial_sum(n) != t)
        throw VerificationFailure("binomial_sum_check: recurrence and direct sum disagree at n=" + std::to_string(n));
      ++r.cross_checks;
    }
    if (t > pow3)
      r.violations.push_back(n);
    else if (t == pow3)
      r.equalities.push_back(n);
    const BigInt margin = pow3 - t;
    if (n <= detail_limit) r.margins.emplace_back(n, margin.str());
    if (n >= 3 && n <= 200) {
      if (n > 3 && margin <= last_margin) r.margin_increasing = false;
      last_margin = margin;
    }
    if (n % 3 == 0) {
      const int m = n / 3;
      central *= BigInt(3 * m) * (3 * m - 1) * (3 * m - 2);
      central /= BigInt(m) * m * m;
      if (m >= 2) {
        // 2 A <= 6 A m / (m+1)  <=>  2 A (m+1) <= 6 A m
        ++r.key_steps_checked;
        if (2 * central * (m + 1) > 6 * central * m) r.key_step_failures.push_back(n);
      }
    }
  }
  return r;
}

struct ColumnSum {
  MultiIndex k;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

namespace detail {

template <class F>
void for_each_composition(int total, int parts, std::vector<int>& cur, F&& f) {
  if (parts == 1) {
    cur.push_back(total);
    f(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    for_each_composition(total - v, parts - 1, cur, f);
    cur.pop_back();
  }
}

}  // namespace detail

/// sum over l != 0 with |l| = |k| of prod_j G(k_j, l_j, q), against (2/q) G(0,0,q)^d.
inline ColumnSum column_sum_check(const MultiIndex& k, ExponentQ q, double slack = 1e-10) {
  if (k.dim() < 1 || k.is_zero()) throw std::invalid_argument("column_sum_check: k must be nonzero");
  const int d = k.dim();
  const int total = k.total();
  std::map<std::pair<int, int>, double> cache;
  auto G = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache[key] = weighted_pair_integral(key.first, key.second, q);
  };
  ColumnSum c;
  c.k = k;
  detail::CompensatedSum sum;
  std::vector<int> cur;
  detail::for_each_composition(total, d, cur, [&](const std::vector<int>& l) {
    double v = 1.0;
    for (int j = 0; j < d; ++j) {
      if ((k[j] + l[static_cast<std::size_t>(j)]) % 2 != 0) return;
    }
    for (int j = 0; j < d; ++j) v *= G(k[j], l[static_cast<std::size_t>(j)]);
    sum.add(v);
  });
  c.lhs = sum.value();
  c.rhs = 2.0 / q.value() * std::pow(G(0, 0), d);
  c.holds = c.lhs <= c.rhs + slack;
  return c;
}

/// column_sum_check for every nonzero k with |k| <= kmax in dimension d.
inline std::vector<ColumnSum> column_sum_sweep(int d, int kmax, ExponentQ q, unsigned threads = 0) {
  if (d < 1) throw std::invalid_argument("column_sum_sweep: d must be >= 1");
  if (kmax < 1) throw std::invalid_argument("column_sum_sweep: kmax must be >= 1");
  std::vector<MultiIndex> ks;
  for (int total = 1; total <= kmax; ++total) {
    std::vector<int> cur;
    detail::for_each_composition(total, d, cur, [&](const std::vector<int>& k) { ks.emplace_back(k); });
  }
  std::vector<ColumnSum> out(ks.size());
  parallel_for(ks.size(), threads, [&](std::size_t i) { out[i] = column_sum_check(ks[i], q); });
  return out;
}

}  // namespace strichartz
