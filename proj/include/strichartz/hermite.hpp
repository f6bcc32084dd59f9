#pragma once

// Hermite polynomials (physicists' convention), the orthonormal Hermite
// functions f_n(x) = c_n H_n(x) exp(-x^2/2), and the identities used by the
// integral and Hessian code.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace strichartz {

inline constexpr int kDefaultOrderCap = 4096;

inline void check_order(int n, int cap = kDefaultOrderCap) {
  if (n < 0) throw std::invalid_argument("Hermite order must be non-negative, got " + std::to_string(n));
  if (n > cap)
    throw std::out_of_range("Hermite order " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
}

/// H_n(x) by forward recurrence H_{n+1} = 2x H_n - 2n H_{n-1}.
inline double hermite_poly(int n, double x, int cap = kDefaultOrderCap) {
  check_order(n, cap);
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// log c_n with c_n^2 = 1 / (sqrt(pi) 2^n n!).
inline double log_normalization(int n, int cap = kDefaultOrderCap) {
  check_order(n, cap);
  return -0.5 * (0.5 * std::log(std::numbers::pi) + n * std::numbers::ln2 + std::lgamma(n + 1.0));
}

inline double normalization(int n, int cap = kDefaultOrderCap) {
  const double c = std::exp(log_normalization(n, cap));
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::range_error("normalization constant c_" + std::to_string(n) + " not representable");
  return c;
}

/// A real number stored as sign * exp(log_abs). Products of many Hermite
/// values at far quadrature nodes stay representable in this form.
struct LogValue {
  double log_abs = -INFINITY;
  int sign = 0;

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
};

namespace detail {

inline constexpr double kRescaleThreshold = 1e150;

// Runs the orthonormal recurrence for p_n(x) = c_n H_n(x) up to nmax and
// hands (n, LogValue of p_n(x)) to `sink`. Values are rescaled on the fly.
template <class Sink>
void orthonormal_recurrence(int nmax, double x, Sink&& sink) {
  double scale = 0.0;  // log of the common factor removed from (prev, cur)
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25);
  auto emit = [&](int n, double v) {
    if (v == 0.0)
      sink(n, LogValue{});
    else
      sink(n, LogValue{std::log(std::abs(v)) + scale, v > 0 ? 1 : -1});
  };
  emit(0, cur);
  for (int n = 0; n < nmax; ++n) {
    const double next = std::sqrt(2.0 / (n + 1)) * x * cur - std::sqrt(static_cast<double>(n) / (n + 1)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleThreshold) {
      cur /= kRescaleThreshold;
      prev /= kRescaleThreshold;
      scale += std::log(kRescaleThreshold);
    }
    emit(n + 1, cur);
  }
}

}  // namespace detail

/// p_n(x) = c_n H_n(x) for n = 0..nmax, in log form.
inline std::vector<LogValue> orthonormal_poly_values(int nmax, double x, int cap = kDefaultOrderCap) {
  check_order(nmax, cap);
  std::vector<LogValue> out(static_cast<std::size_t>(nmax) + 1);
  detail::orthonormal_recurrence(nmax, x, [&](int n, LogValue v) { out[static_cast<std::size_t>(n)] = v; });
  return out;
}

/// Orthonormal Hermite function f_n(x) = c_n H_n(x) exp(-x^2/2).
inline double hermite_function(int n, double x, int cap = kDefaultOrderCap) {
  check_order(n, cap);
  LogValue last;
  detail::orthonormal_recurrence(n, x, [&](int k, LogValue v) {
    if (k == n) last = v;
  });
  if (last.sign == 0) return 0.0;
  return last.sign * std::exp(last.log_abs - 0.5 * x * x);
}

/// All f_0(x) .. f_nmax(x).
inline std::vector<double> hermite_functions(int nmax, double x, int cap = kDefaultOrderCap) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(nmax) + 1);
  for (const LogValue& v : orthonormal_poly_values(nmax, x, cap))
    out.push_back(v.sign == 0 ? 0.0 : v.sign * std::exp(v.log_abs - 0.5 * x * x));
  return out;
}

/// Expansion of H_n(gamma x) in H_{n-2i}(x), i = 0..floor(n/2).
struct ScaleExpansion {
  int order = 0;
  std::vector<std::pair<int, double>> terms;  // (degree n-2i, coefficient), degrees descending

  double coefficient(int degree) const {
    for (const auto& [deg, c] : terms)
      if (deg == degree) return c;
    return 0.0;
  }
};

/// H_n(gamma x) = sum_i gamma^{n-2i} (gamma^2-1)^i C(n,2i) (2i)!/i! H_{n-2i}(x).
inline ScaleExpansion scale_expand(int n, double gamma, int cap = kDefaultOrderCap) {
  check_order(n, cap);
  if (gamma == 0.0) throw std::invalid_argument("scale_expand: gamma must be non-zero");
  ScaleExpansion e;
  e.order = n;
  const double g2m1 = gamma * gamma - 1.0;
  for (int i = 0; 2 * i <= n; ++i) {
    const int deg = n - 2 * i;
    if (i > 0 && g2m1 == 0.0) {
      e.terms.emplace_back(deg, 0.0);
      continue;
    }
    // C(n,2i) (2i)!/i! = n! / ((n-2i)! i!)
    double log_mag = std::lgamma(n + 1.0) - std::lgamma(deg + 1.0) - std::lgamma(i + 1.0);
    log_mag += deg * std::log(std::abs(gamma));
    if (i > 0) log_mag += i * std::log(std::abs(g2m1));
    int sign = 1;
    if (gamma < 0 && (deg % 2 == 1)) sign = -sign;
    if (g2m1 < 0 && (i % 2 == 1)) sign = -sign;
    e.terms.emplace_back(deg, sign * std::exp(log_mag));
  }
  return e;
}

/// Coefficients (u, v) of f_m' = u f_{m-1} + v f_{m+1}.
inline std::pair<double, double> derivative_coeffs(int m) {
  check_order(m);
  return {std::sqrt(m / 2.0), -std::sqrt((m + 1) / 2.0)};
}

/// Factor multiplying c_n H_n(x/sqrt(1+4t^2)) exp(-|x|^2/(2(1+2it))) in
/// e^{it Delta} f_n, i.e. (1+2it)^{-d/2} ((1-2it)/(1+2it))^{n/2}.
/// For a multi-index, pass n = |k|.
inline std::complex<double> free_evolution_coeff(int n, double t, int d = 1) {
  check_order(n);
  if (d < 1) throw std::invalid_argument("free_evolution_coeff: dimension must be positive");
  const double theta = std::atan(2.0 * t);  // arg(1 + 2it), in (-pi/2, pi/2)
  const double modulus = std::pow(1.0 + 4.0 * t * t, -0.25 * d);
  return std::polar(modulus, -(0.5 * d + n) * theta);
}

}  // namespace strichartz
