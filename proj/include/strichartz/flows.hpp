#pragma once

// The Strichartz functional on truncated Hermite coefficient vectors,
//   H[alpha] = (pi/2) sum_{n1+n2+n3 = n4+n5+n6} Lambda alpha_n1 alpha_n2 alpha_n3
//              conj(alpha_n4 alpha_n5 alpha_n6),
//   S[alpha] = H[alpha] / P^3,  P = sum |alpha_n|^2,
// its gradient and Hamiltonian flows, and a direct space-time quadrature of
// int int |e^{it d_xx} f|^6 dx dt used to check the constant.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "strichartz/errors.hpp"
#include "strichartz/hermite.hpp"
#include "strichartz/integrals.hpp"
#include "strichartz/lambda_table.hpp"
#include "strichartz/quadrature.hpp"

namespace strichartz {

using Complex = std::complex<double>;
using CoeffVector = std::vector<Complex>;

inline double norm_squared(const CoeffVector& a) {
  double p = 0.0;
  for (const Complex& z : a) p += std::norm(z);
  return p;
}

/// Q = sum (n + 1/2) |alpha_n|^2, conserved by the Hamiltonian flow.
inline double oscillator_energy(const CoeffVector& a) {
  double q = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) q += (static_cast<double>(n) + 0.5) * std::norm(a[n]);
  return q;
}

inline CoeffVector normalized(CoeffVector a) {
  const double p = norm_squared(a);
  if (!(p > 0.0)) throw std::invalid_argument("cannot normalize the zero vector");
  const double s = 1.0 / std::sqrt(p);
  for (Complex& z : a) z *= s;
  return a;
}

inline CoeffVector unit_vector(std::size_t size, int m) {
  if (m < 0 || static_cast<std::size_t>(m) >= size) throw std::out_of_range("unit_vector: mode outside truncation");
  CoeffVector a(size);
  a[static_cast<std::size_t>(m)] = 1.0;
  return a;
}

/// alpha_n -> i^n alpha_n (the Fourier transform in the Hermite basis).
inline CoeffVector fourier_phase_map(CoeffVector a) {
  static const Complex powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (std::size_t n = 0; n < a.size(); ++n) a[n] *= powers[n % 4];
  return a;
}

class StrichartzFunctional {
 public:
  explicit StrichartzFunctional(const LambdaTable& table) : order_(table.order()), constant_(table.normalization()) {
    if (order_ < 0) throw std::invalid_argument("StrichartzFunctional: empty table");
    const int N = order_;
    for (int k = 0; k <= 3 * N; ++k) {
      Block b;
      for (int x = 0; x <= N; ++x)
        for (int y = x; y <= N; ++y) {
          const int z = k - x - y;
          if (z < y || z > N) continue;
          b.triples.push_back({x, y, z});
          b.mult.push_back(x == z ? 1.0 : (x == y || y == z) ? 3.0 : 6.0);
        }
      const std::size_t T = b.triples.size();
      b.lambda.resize(T * T);
      for (std::size_t i = 0; i < T; ++i)
        for (std::size_t j = 0; j < T; ++j) {
          const auto& s = b.triples[i];
          const auto& t = b.triples[j];
          b.lambda[i * T + j] = table.at(s[0], s[1], s[2], t[0], t[1], t[2]);
        }
      blocks_.push_back(std::move(b));
    }
  }

  int order() const { return order_; }
  double constant() const { return constant_; }

  /// H[alpha]; homogeneous of degree 6.
  double numerator(const CoeffVector& alpha) const {
    double h = 0.0;
    evaluate(alpha, &h, nullptr);
    return h;
  }

  double value(const CoeffVector& alpha) const {
    const double p = nonzero_norm(alpha);
    return numerator(alpha) / (p * p * p);
  }

  /// dH / d conj(alpha_l).
  CoeffVector numerator_conj_derivative(const CoeffVector& alpha) const {
    double h = 0.0;
    CoeffVector d;
    evaluate(alpha, &h, &d);
    return d;
  }

  /// Real gradient of S: component l is dS/dRe(alpha_l) + i dS/dIm(alpha_l),
  /// i.e. 2 dS/d conj(alpha_l).
  CoeffVector gradient(const CoeffVector& alpha) const {
    const double p = nonzero_norm(alpha);
    double h = 0.0;
    CoeffVector d;
    evaluate(alpha, &h, &d);
    const double p3 = p * p * p;
    for (std::size_t l = 0; l < d.size(); ++l) {
      const Complex a = l < alpha.size() ? alpha[l] : Complex{};
      d[l] = 2.0 * (d[l] / p3 - 3.0 * h * a / (p3 * p));
    }
    d.resize(alpha.size());
    return d;
  }

  /// ||grad S|| ||alpha||, invariant under alpha -> c alpha.
  double gradient_residual(const CoeffVector& alpha) const {
    return std::sqrt(norm_squared(gradient(alpha)) * norm_squared(alpha));
  }

 private:
  struct Block {
    std::vector<std::array<int, 3>> triples;  // sorted triples with the same sum
    std::vector<double> mult;                 // number of orderings
    std::vector<double> lambda;               // row-major T x T
  };

  static double nonzero_norm(const CoeffVector& alpha) {
    const double p = norm_squared(alpha);
    if (!(p > 0.0)) throw std::invalid_argument("Strichartz functional undefined at the zero vector");
    return p;
  }

  void evaluate(const CoeffVector& alpha_in, double* h, CoeffVector* dconj) const {
    if (alpha_in.size() > static_cast<std::size_t>(order_) + 1)
      throw std::out_of_range("Lambda table of order " + std::to_string(order_) + " too small for " +
                              std::to_string(alpha_in.size()) + " coefficients");
    CoeffVector alpha(alpha_in);
    alpha.resize(static_cast<std::size_t>(order_) + 1);
    if (dconj) dconj->assign(alpha.size(), Complex{});
    Complex total{};
    double magnitude = 0.0;
    std::vector<Complex> a, v;
    for (const Block& b : blocks_) {
      const std::size_t T = b.triples.size();
      a.resize(T);
      v.assign(T, Complex{});
      for (std::size_t i = 0; i < T; ++i) {
        const auto& t = b.triples[i];
        a[i] = b.mult[i] * alpha[static_cast<std::size_t>(t[0])] * alpha[static_cast<std::size_t>(t[1])] *
               alpha[static_cast<std::size_t>(t[2])];
      }
      for (std::size_t i = 0; i < T; ++i) {
        Complex s{};
        for (std::size_t j = 0; j < T; ++j) s += b.lambda[i * T + j] * a[j];
        v[i] = s;
      }
      for (std::size_t i = 0; i < T; ++i) {
        const Complex term = std::conj(a[i]) * v[i];
        total += term;
        magnitude += std::abs(term);
      }
      if (!dconj) continue;
      for (std::size_t i = 0; i < T; ++i) {
        const auto& t = b.triples[i];
        const Complex c0 = std::conj(alpha[static_cast<std::size_t>(t[0])]);
        const Complex c1 = std::conj(alpha[static_cast<std::size_t>(t[1])]);
        const Complex c2 = std::conj(alpha[static_cast<std::size_t>(t[2])]);
        const Complex w = b.mult[i] * v[i];
        (*dconj)[static_cast<std::size_t>(t[0])] += w * c1 * c2;
        (*dconj)[static_cast<std::size_t>(t[1])] += w * c0 * c2;
        (*dconj)[static_cast<std::size_t>(t[2])] += w * c0 * c1;
      }
    }
    if (std::abs(total.imag()) > 1e-9 * std::max(magnitude, std::numeric_limits<double>::min()))
      throw VerificationFailure("Strichartz numerator has a non-negligible imaginary part");
    *h = constant_ * total.real();
    if (dconj)
      for (Complex& z : *dconj) z *= constant_;
  }

  int order_;
  double constant_;
  std::vector<Block> blocks_;
};

// ------------------------------------------------------------------- flows

enum class FlowDirection { ascent, descent };

struct FlowReport {
  std::vector<double> t, S, P, H, Q, grad_residual;
  CoeffVector final_alpha;
  int steps = 0;
  bool converged = false;
  bool monotone = true;
  bool conserved = true;
  double drift_H = 0.0, drift_P = 0.0, drift_Q = 0.0;

  void record(double time, const StrichartzFunctional& f, const CoeffVector& alpha, double residual) {
    const double p = norm_squared(alpha);
    const double h = f.numerator(alpha);
    t.push_back(time);
    S.push_back(h / (p * p * p));
    P.push_back(p);
    H.push_back(h);
    Q.push_back(oscillator_energy(alpha));
    grad_residual.push_back(residual);
  }
  std::size_t rows() const { return t.size(); }
};

struct GradientFlowOptions {
  FlowDirection direction = FlowDirection::ascent;
  double initial_step = 1.0;
  double max_step = 1e3;
  double min_step = 1e-14;
  double tolerance = 1e-10;  // stop when the gradient residual drops below this
  int max_steps = 2000;
  double armijo = 1e-4;
};

/// Projected gradient flow on the unit sphere with backtracking: each step is
/// alpha <- normalize(alpha + sigma tau grad S), tau halved until S moves in
/// the requested direction by the Armijo amount, doubled after every accepted
/// step. Once the change in S is below rounding, a step is accepted when it
/// keeps S within rounding and lowers the gradient residual.
inline FlowReport gradient_flow(const StrichartzFunctional& f, CoeffVector alpha,
                                const GradientFlowOptions& opt = {}) {
  const double sigma = opt.direction == FlowDirection::ascent ? 1.0 : -1.0;
  alpha = normalized(std::move(alpha));
  FlowReport rep;
  double time = 0.0;
  double tau = opt.initial_step;
  double s_cur = f.value(alpha);
  CoeffVector g = f.gradient(alpha);
  double res = std::sqrt(norm_squared(g));
  rep.record(time, f, alpha, res);
  const double round_off = 64.0 * std::numeric_limits<double>::epsilon();
  while (res >= opt.tolerance && rep.steps < opt.max_steps) {
    const double g2 = res * res;
    bool accepted = false;
    CoeffVector trial(alpha.size()), g_new;
    double s_new = s_cur, res_new = res;
    while (tau >= opt.min_step) {
      for (std::size_t i = 0; i < alpha.size(); ++i) trial[i] = alpha[i] + sigma * tau * g[i];
      trial = normalized(std::move(trial));
      s_new = f.value(trial);
      const double gain = sigma * (s_new - s_cur);
      const double noise = round_off * std::abs(s_cur);
      if (gain >= opt.armijo * tau * g2 && gain > noise) {
        accepted = true;
      } else if (gain >= -noise) {
        g_new = f.gradient(trial);
        res_new = std::sqrt(norm_squared(g_new));
        accepted = res_new < res;
      }
      if (accepted) break;
      tau *= 0.5;
    }
    if (!accepted)
      throw ConvergenceError("gradient_flow: line search stalled at residual " + format_double(res));
    if (sigma * (s_new - s_cur) < -round_off * std::abs(s_cur)) rep.monotone = false;
    time += tau;
    alpha = std::move(trial);
    s_cur = s_new;
    g = g_new.empty() ? f.gradient(alpha) : std::move(g_new);
    res = std::sqrt(norm_squared(g));
    ++rep.steps;
    rep.record(time, f, alpha, res);
    tau = std::min(2.0 * tau, opt.max_step);
  }
  rep.converged = res < opt.tolerance;
  rep.final_alpha = std::move(alpha);
  return rep;
}

struct HamiltonianFlowOptions {
  double dt = 1e-4;
  double t_end = 1.0;
  int record_every = 100;
  double tolerance = 1e-8;  // relative drift of H, P, Q
};

/// dalpha_l/dt = i dH/d conj(alpha_l), classical RK4.
inline FlowReport hamiltonian_flow(const StrichartzFunctional& f, CoeffVector alpha,
                                   const HamiltonianFlowOptions& opt = {}) {
  if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0)) throw std::invalid_argument("hamiltonian_flow: bad time step");
  if (!(norm_squared(alpha) > 0.0)) throw std::invalid_argument("hamiltonian_flow: zero initial data");
  const long n_steps = std::lround(opt.t_end / opt.dt);
  const std::size_t size = alpha.size();
  auto rhs = [&](const CoeffVector& a) {
    CoeffVector d = f.numerator_conj_derivative(a);
    d.resize(size);
    for (Complex& z : d) z *= Complex(0.0, 1.0);
    return d;
  };
  auto axpy = [&](const CoeffVector& a, double c, const CoeffVector& k) {
    CoeffVector r(size);
    for (std::size_t i = 0; i < size; ++i) r[i] = a[i] + c * k[i];
    return r;
  };
  FlowReport rep;
  rep.record(0.0, f, alpha, 0.0);
  const double h0 = rep.H.front(), p0 = rep.P.front(), q0 = rep.Q.front();
  auto rel = [](double x, double x0) {
    const double r = std::abs(x - x0) / std::max(std::abs(x0), 1e-300);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  };
  for (long step = 1; step <= n_steps; ++step) {
    const CoeffVector k1 = rhs(alpha);
    const CoeffVector k2 = rhs(axpy(alpha, 0.5 * opt.dt, k1));
    const CoeffVector k3 = rhs(axpy(alpha, 0.5 * opt.dt, k2));
    const CoeffVector k4 = rhs(axpy(alpha, opt.dt, k3));
    for (std::size_t i = 0; i < size; ++i) alpha[i] += opt.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    ++rep.steps;
    if (step % std::max(1, opt.record_every) == 0 || step == n_steps) {
      rep.record(static_cast<double>(step) * opt.dt, f, alpha, 0.0);
      rep.drift_H = std::max(rep.drift_H, rel(rep.H.back(), h0));
      rep.drift_P = std::max(rep.drift_P, rel(rep.P.back(), p0));
      rep.drift_Q = std::max(rep.drift_Q, rel(rep.Q.back(), q0));
      const double worst = std::max({rep.drift_H, rep.drift_P, rep.drift_Q});
      if (worst > 10.0 * opt.tolerance)
        throw VerificationFailure("hamiltonian_flow: conservation drift " + format_double(worst) + " at t=" +
                                  format_double(rep.t.back()) + " exceeds 10x tolerance; reduce dt");
    }
  }
  rep.conserved = std::max({rep.drift_H, rep.drift_P, rep.drift_Q}) < opt.tolerance;
  rep.converged = true;
  rep.final_alpha = std::move(alpha);
  return rep;
}

// ------------------------------------------------------------------ oracle

struct OracleOptions {
  int spatial_rule = 0;  // 0: exact for the degree of |u|^6
  int time_points = 0;   // 0: enough midpoints for the trigonometric degree
};

/// int int |e^{it d_xx} f|^6 dx dt for f = sum alpha_n f_n, by quadrature.
/// With xi = x / sqrt(1+4t^2) and t = tan(s)/2 the integrand becomes
/// (1/2) int |sum alpha_n e^{-i n s} p_n(xi)|^6 exp(-3 xi^2) dxi over s in
/// (-pi/2, pi/2).
inline double direct_quadrature_oracle(const CoeffVector& alpha, const OracleOptions& opt = {}) {
  const int N = static_cast<int>(alpha.size()) - 1;
  if (N < 0) return 0.0;
  const int spatial = opt.spatial_rule > 0 ? opt.spatial_rule : 3 * N + 2;
  const int M = opt.time_points > 0 ? opt.time_points : 4 * N + 8;
  const QuadratureRule& rule = cached_gauss_hermite_rule(spatial);
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  std::vector<std::vector<double>> p(static_cast<std::size_t>(rule.order()));
  for (int i = 0; i < rule.order(); ++i) {
    const auto lv = orthonormal_poly_values(N, rule.nodes[static_cast<std::size_t>(i)] * inv_sqrt3);
    auto& row = p[static_cast<std::size_t>(i)];
    for (const LogValue& v : lv) row.push_back(v.value());
  }
  detail::CompensatedSum total;
  for (int j = 0; j < M; ++j) {
    const double s = -0.5 * std::numbers::pi + (j + 0.5) * std::numbers::pi / M;
    const double t = 0.5 * std::tan(s);
    // modulus of the evolution coefficients cancels against the Jacobians
    std::vector<Complex> e(alpha.size());
    for (int n = 0; n <= N; ++n) {
      const Complex c = free_evolution_coeff(n, t, 1);
      e[static_cast<std::size_t>(n)] = alpha[static_cast<std::size_t>(n)] * c / std::abs(c);
    }
    detail::CompensatedSum spatial_sum;
    for (int i = 0; i < rule.order(); ++i) {
      Complex u{};
      const auto& row = p[static_cast<std::size_t>(i)];
      for (int n = 0; n <= N; ++n) u += e[static_cast<std::size_t>(n)] * row[static_cast<std::size_t>(n)];
      const double a2 = std::norm(u);
      spatial_sum.add(rule.weights[static_cast<std::size_t>(i)] * a2 * a2 * a2);
    }
    total.add(spatial_sum.value());
  }
  return 0.5 * inv_sqrt3 * total.value() * std::numbers::pi / M;
}

// ------------------------------------------------------- initial conditions

namespace detail {

// Uniform double in [-1, 1) from the top 53 bits; identical on every platform.
inline double symmetric_uniform(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find(sep, start)) != std::string::npos; start = pos + 1)
    out.push_back(s.substr(start, pos - start));
  out.push_back(s.substr(start));
  return out;
}

}  // namespace detail

/// Random complex vector with entries uniform in the unit square, seeded.
inline CoeffVector random_coefficients(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CoeffVector a(size);
  for (Complex& z : a) {
    const double re = detail::symmetric_uniform(rng);
    z = Complex(re, detail::symmetric_uniform(rng));
  }
  return a;
}

/// Parses `gaussian`, `mode:m`, `gaussian+noise:eps:seed`, an inline JSON
/// array of [re, im] pairs, or the path of a file holding such an array.
inline CoeffVector parse_initial_condition(const std::string& spec, int order) {
  if (order < 0) throw std::invalid_argument("initial condition: negative truncation order");
  const std::size_t size = static_cast<std::size_t>(order) + 1;
  if (spec == "gaussian") return unit_vector(size, 0);
  const auto parts = detail::split(spec, ':');
  try {
    if (parts[0] == "mode" && parts.size() == 2) {
      std::size_t used = 0;
      const int m = std::stoi(parts[1], &used);
      if (used != parts[1].size()) throw std::invalid_argument("bad mode");
      return unit_vector(size, m);
    }
    if (parts[0] == "gaussian+noise" && parts.size() == 3) {
      const double eps = std::stod(parts[1]);
      const std::uint64_t seed = std::stoull(parts[2]);
      CoeffVector a = random_coefficients(size, seed);
      for (Complex& z : a) z *= eps;
      a[0] += 1.0;
      return a;
    }
  } catch (const std::out_of_range&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("initial condition: cannot parse '" + spec + "'");
  }
  nlohmann::json j;
  if (!spec.empty() && spec.front() == '[') {
    j = nlohmann::json::parse(spec, nullptr, false);
  } else if (std::filesystem::is_regular_file(spec)) {
    std::ifstream in(spec);
    j = nlohmann::json::parse(in, nullptr, false);
  } else {
    throw std::invalid_argument("initial condition: unknown preset '" + spec + "'");
  }
  if (j.is_discarded() || !j.is_array()) throw std::invalid_argument("initial condition: expected a JSON array");
  if (j.size() > size)
    throw std::out_of_range("initial condition: " + std::to_string(j.size()) + " coefficients exceed order " +
                            std::to_string(order));
  CoeffVector a(size);
  for (std::size_t n = 0; n < j.size(); ++n) {
    const auto& z = j[n];
    if (z.is_number())
      a[n] = z.get<double>();
    else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number())
      a[n] = Complex(z[0].get<double>(), z[1].get<double>());
    else
      throw std::invalid_argument("initial condition: entries must be [re, im] pairs");
  }
  if (!(norm_squared(a) > 0.0)) throw std::invalid_argument("initial condition: zero vector");
  return a;
}

}  // namespace strichartz
