#pragma once

// The harmonic-oscillator Rayleigh quotient Q[alpha] = sum lambda_m alpha_m^2 /
// sum alpha_m^2 with lambda_m = 2m + 1, its gradient flow and its Hessian.
// Everything is known in closed form, which makes it a fixture for the flow code.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "strichartz/errors.hpp"

namespace strichartz {

inline double qmho_lambda(int m) { return 2.0 * m + 1.0; }

namespace detail {
inline double qmho_norm(const std::vector<double>& alpha) {
  double p = 0.0;
  for (double a : alpha) p += a * a;
  if (!(p > 0.0)) throw std::invalid_argument("QMHO functional undefined at the zero vector");
  return p;
}
}  // namespace detail

inline double qmho_functional(const std::vector<double>& alpha) {
  const double p = detail::qmho_norm(alpha);
  double num = 0.0;
  for (std::size_t m = 0; m < alpha.size(); ++m) num += qmho_lambda(static_cast<int>(m)) * alpha[m] * alpha[m];
  return num / p;
}

/// Component k: -2 (lambda_k - Q) alpha_k / P.
inline std::vector<double> qmho_gradient_rhs(const std::vector<double>& alpha) {
  const double p = detail::qmho_norm(alpha);
  const double q = qmho_functional(alpha);
  std::vector<double> r(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) r[k] = -2.0 * (qmho_lambda(static_cast<int>(k)) - q) * alpha[k] / p;
  return r;
}

struct QmhoTrajectory {
  std::vector<double> t;
  std::vector<double> Q;
  std::vector<double> norm;
  std::vector<std::vector<double>> alpha;
};

/// Explicit Euler for d alpha/dt = rhs(alpha). A step that raises Q means the
/// step size is beyond the stability bound and is reported as an error.
inline QmhoTrajectory qmho_flow(std::vector<double> alpha, double step, int n_steps) {
  if (!(step > 0.0)) throw std::invalid_argument("qmho_flow: step must be positive");
  if (n_steps < 0) throw std::invalid_argument("qmho_flow: negative step count");
  QmhoTrajectory tr;
  auto record = [&](double t) {
    tr.t.push_back(t);
    tr.Q.push_back(qmho_functional(alpha));
    tr.norm.push_back(std::sqrt(detail::qmho_norm(alpha)));
    tr.alpha.push_back(alpha);
  };
  record(0.0);
  for (int s = 1; s <= n_steps; ++s) {
    const auto r = qmho_gradient_rhs(alpha);
    for (std::size_t k = 0; k < alpha.size(); ++k) alpha[k] += step * r[k];
    const double q_new = qmho_functional(alpha);
    if (q_new > tr.Q.back() * (1.0 + 1e-15))
      throw VerificationFailure("qmho_flow: Q increased at step " + std::to_string(s) + "; step too large");
    record(s * step);
  }
  return tr;
}

/// Second variation of Q at h_m in direction h_k (k != m): 4(k - m).
inline double qmho_hessian_diag(int m, int k) {
  if (m < 0 || k < 0) throw std::invalid_argument("qmho_hessian_diag: negative mode");
  if (k == m) throw std::invalid_argument("qmho_hessian_diag: direction k = m is excluded");
  return 4.0 * (k - m);
}

}  // namespace strichartz
