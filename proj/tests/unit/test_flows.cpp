#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "strichartz/flows.hpp"
#include "test_util.hpp"

using namespace strichartz;
using testutil::rel_err;

namespace {

const LambdaTable& table(int N) {
  static std::map<int, LambdaTable> cache;
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, LambdaTable::build(N)).first;
  return it->second;
}

const double kGaussianValue = 1.0 / (2.0 * std::sqrt(3.0));

// Unsymmetrized resonant sum over all ordered 6-tuples.
double brute_numerator(const CoeffVector& a) {
  const int N = static_cast<int>(a.size()) - 1;
  std::complex<double> s = 0.0;
  for (int n1 = 0; n1 <= N; ++n1)
    for (int n2 = 0; n2 <= N; ++n2)
      for (int n3 = 0; n3 <= N; ++n3)
        for (int n4 = 0; n4 <= N; ++n4)
          for (int n5 = 0; n5 <= N; ++n5) {
            const int n6 = n1 + n2 + n3 - n4 - n5;
            if (n6 < 0 || n6 > N) continue;
            s += a[n1] * a[n2] * a[n3] * std::conj(a[n4] * a[n5] * a[static_cast<std::size_t>(n6)]) *
                 lambda6(n1, n2, n3, n4, n5, n6);
          }
  return std::numbers::pi / 2 * s.real();
}

CoeffVector random_unit(std::size_t size, std::uint64_t seed) { return normalized(random_coefficients(size, seed)); }

}  // namespace

TEST(Numerator, GaussianExamples) {
  const StrichartzFunctional f(table(4));
  const auto e0 = unit_vector(5, 0);
  EXPECT_NEAR(f.numerator(e0), std::numbers::pi / 2 * table(4).at(0, 0, 0, 0, 0, 0), 1e-16);
  EXPECT_NEAR(f.numerator(e0), kGaussianValue, 1e-15);
  const Complex c(0.7, -1.1);
  CoeffVector ce0 = e0;
  ce0[0] *= c;
  EXPECT_NEAR(f.numerator(ce0), std::pow(std::abs(c), 6) * kGaussianValue, 1e-14);
  for (double th : {0.3, 1.7, -2.4}) {
    CoeffVector p = e0;
    p[0] = std::polar(1.0, th);
    EXPECT_NEAR(f.numerator(p), kGaussianValue, 1e-15);
  }
}

TEST(Numerator, MatchesUnsymmetrizedSum) {
  const StrichartzFunctional f(table(3));
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto a = random_coefficients(4, seed);
    EXPECT_LE(rel_err(f.numerator(a), brute_numerator(a)), 1e-12);
  }
}

TEST(Numerator, ShortVectorsAndTableBounds) {
  const StrichartzFunctional f(table(3));
  EXPECT_NEAR(f.numerator({Complex(1.0)}), kGaussianValue, 1e-15);
  EXPECT_THROW(f.numerator(CoeffVector(6, 1.0)), std::out_of_range);
  EXPECT_THROW(f.value(CoeffVector(4)), std::invalid_argument);
}

TEST(Value, ScaleAndPhaseInvariance) {
  const StrichartzFunctional f(table(6));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = random_coefficients(7, seed);
    const double s = f.value(a);
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, kGaussianValue * (1 + 1e-12));
    Complex c(u(rng), u(rng));
    auto b = a;
    for (auto& z : b) z *= c;
    EXPECT_LE(rel_err(f.value(b), s), 1e-12);
    auto p = a;
    const Complex phase = std::polar(1.0, u(rng));
    for (auto& z : p) z *= phase;
    EXPECT_LE(rel_err(f.value(p), s), 1e-12);
  }
  auto e0 = unit_vector(7, 0);
  auto two = e0;
  two[0] = 2.0;
  EXPECT_NEAR(f.value(two), f.value(e0), 1e-15);
  EXPECT_NEAR(f.value(e0), kGaussianValue, 1e-15);
}

TEST(FourierPhaseMap, Examples) {
  const auto e0 = unit_vector(4, 0);
  EXPECT_EQ(fourier_phase_map(e0), e0);
  const auto e2 = unit_vector(4, 2);
  EXPECT_EQ(fourier_phase_map(e2)[2], Complex(-1.0));
  const auto a = random_coefficients(9, 3);
  auto b = a;
  for (int i = 0; i < 4; ++i) b = fourier_phase_map(b);
  EXPECT_EQ(a, b);
}

TEST(FourierPhaseMap, NumeratorInvariant) {
  const StrichartzFunctional f(table(6));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = random_coefficients(7, seed);
    EXPECT_LE(rel_err(f.numerator(fourier_phase_map(a)), f.numerator(a)), 1e-12);
  }
}

TEST(Gradient, VanishesAtHermiteModes) {
  const int N = 8;
  const StrichartzFunctional f(table(N));
  for (int m = 0; m <= N; ++m) {
    for (Complex A : {Complex(1.0), Complex(0.3, -2.0), Complex(0.0, 5.0)}) {
      auto a = unit_vector(N + 1, m);
      a[static_cast<std::size_t>(m)] = A;
      EXPECT_LT(f.gradient_residual(a), 1e-12) << m;
    }
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  const int N = 6;
  const StrichartzFunctional f(table(N));
  const double h = 1e-5;
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    const auto a = random_unit(N + 1, seed);
    const auto g = f.gradient(a);
    double worst = 0.0, scale = std::sqrt(norm_squared(g));
    for (std::size_t l = 0; l < a.size(); ++l) {
      for (Complex dir : {Complex(1.0), Complex(0.0, 1.0)}) {
        auto p = a, m = a;
        p[l] += h * dir;
        m[l] -= h * dir;
        const double fd = (f.value(p) - f.value(m)) / (2 * h);
        const double an = dir.real() != 0.0 ? g[l].real() : g[l].imag();
        worst = std::max(worst, std::abs(fd - an));
      }
    }
    EXPECT_LE(worst, 1e-5 * scale) << seed;
  }
}

TEST(Gradient, ConjugateDerivativeMatchesFiniteDifferences) {
  const StrichartzFunctional f(table(4));
  const auto a = random_coefficients(5, 77);
  const auto d = f.numerator_conj_derivative(a);
  const double h = 1e-6;
  for (std::size_t l = 0; l < a.size(); ++l) {
    auto pr = a, mr = a, pi = a, mi = a;
    pr[l] += h;
    mr[l] -= h;
    pi[l] += Complex(0, h);
    mi[l] -= Complex(0, h);
    const double dre = (f.numerator(pr) - f.numerator(mr)) / (2 * h);
    const double dim = (f.numerator(pi) - f.numerator(mi)) / (2 * h);
    // d/d conj(z) = (d/dx + i d/dy) / 2
    EXPECT_NEAR(d[l].real(), 0.5 * dre, 1e-7 * std::abs(f.numerator(a)));
    EXPECT_NEAR(d[l].imag(), 0.5 * dim, 1e-7 * std::abs(f.numerator(a)));
  }
}

TEST(Gradient, DescentStepLowersValue) {
  const StrichartzFunctional f(table(4));
  auto a = unit_vector(5, 0);
  a[2] = 0.01;
  const auto g = f.gradient(a);
  EXPECT_GT(std::sqrt(norm_squared(g)), 1e-5);
  auto b = a;
  for (std::size_t i = 0; i < a.size(); ++i) b[i] -= 1e-3 * g[i];
  EXPECT_LT(f.value(b), f.value(a));
  auto c = a;
  for (std::size_t i = 0; i < a.size(); ++i) c[i] += 1e-3 * g[i];
  EXPECT_GT(f.value(c), f.value(a));
}

TEST(GradientFlow, GaussianIsStationary) {
  const StrichartzFunctional f(table(8));
  const auto rep = gradient_flow(f, unit_vector(9, 0));
  EXPECT_EQ(rep.steps, 0);
  EXPECT_TRUE(rep.converged);
  EXPECT_NEAR(rep.S.front(), kGaussianValue, 1e-15);
}

TEST(GradientFlow, ReturnsToGaussian) {
  const StrichartzFunctional f(table(8));
  auto a = unit_vector(9, 0);
  a[4] = 0.05;
  const auto rep = gradient_flow(f, a);
  EXPECT_TRUE(rep.converged);
  EXPECT_TRUE(rep.monotone);
  EXPECT_LT(rep.grad_residual.back(), 1e-8);
  EXPECT_NEAR(rep.S.back(), kGaussianValue, 1e-6);
  for (std::size_t i = 1; i < rep.S.size(); ++i) EXPECT_GE(rep.S[i], rep.S[i - 1] * (1 - 1e-14));
  for (double p : rep.P) EXPECT_NEAR(p, 1.0, 1e-14);
  EXPECT_EQ(rep.rows(), static_cast<std::size_t>(rep.steps) + 1);
}

TEST(GradientFlow, LeavesFirstMode) {
  // e_3 has the wrong parity to couple to e_1 at first order; e_4 excites the
  // positive tail entry a_4 of the mode-1 Hessian.
  const StrichartzFunctional f(table(8));
  auto a = unit_vector(9, 1);
  a[4] = 0.05;
  GradientFlowOptions opt;
  opt.max_steps = 300;
  const auto rep = gradient_flow(f, a, opt);
  EXPECT_TRUE(rep.monotone);
  const auto fin = normalized(rep.final_alpha);
  EXPECT_LT(std::norm(fin[1]), 0.9);
  EXPECT_GT(rep.S.back(), rep.S.front() + 1e-3);
}

TEST(GradientFlow, DescentDirectionLowersValue) {
  const StrichartzFunctional f(table(6));
  auto a = unit_vector(7, 0);
  a[2] = 0.2;
  GradientFlowOptions opt;
  opt.direction = FlowDirection::descent;
  opt.max_steps = 20;
  const auto rep = gradient_flow(f, a, opt);
  EXPECT_TRUE(rep.monotone);
  EXPECT_LT(rep.S.back(), rep.S.front());
}

TEST(HamiltonianFlow, HermiteModeIsPeriodicOrbit) {
  const StrichartzFunctional f(table(6));
  for (int m : {0, 2, 5}) {
    HamiltonianFlowOptions opt;
    opt.t_end = 0.5;
    const auto rep = hamiltonian_flow(f, unit_vector(7, m), opt);
    for (std::size_t n = 0; n < 7; ++n) {
      if (static_cast<int>(n) == m)
        EXPECT_NEAR(std::abs(rep.final_alpha[n]), 1.0, 1e-12);
      else
        EXPECT_LT(std::abs(rep.final_alpha[n]), 1e-14);
    }
  }
}

TEST(HamiltonianFlow, GaussianPhaseRate) {
  // H = (pi/2) Lambda_0 |alpha_0|^6, so alpha_0(t) = exp(3 i (pi/2) Lambda_0 t) = exp(i sqrt(3)/2 t).
  const StrichartzFunctional f(table(2));
  HamiltonianFlowOptions opt;
  opt.t_end = 1.0;
  const auto rep = hamiltonian_flow(f, unit_vector(3, 0), opt);
  const double rate = std::arg(rep.final_alpha[0]) / opt.t_end;
  EXPECT_NEAR(rate, std::sqrt(3.0) / 2, 1e-12);
  EXPECT_NEAR(std::abs(f.numerator_conj_derivative(unit_vector(3, 0))[0]), std::sqrt(3.0) / 2, 1e-15);
}

TEST(HamiltonianFlow, ConservesInvariants) {
  const StrichartzFunctional f(table(6));
  const auto a = random_unit(7, 2024);
  const auto rep = hamiltonian_flow(f, a);
  EXPECT_TRUE(rep.conserved);
  EXPECT_LT(rep.drift_H, 1e-8);
  EXPECT_LT(rep.drift_P, 1e-8);
  EXPECT_LT(rep.drift_Q, 1e-8);
  EXPECT_EQ(rep.steps, 10000);
  EXPECT_EQ(rep.rows(), 101u);
  // the trajectory actually moves
  double moved = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) moved += std::norm(rep.final_alpha[n] - a[n]);
  EXPECT_GT(moved, 1e-3);
}

TEST(HamiltonianFlow, LargeStepIsDetected) {
  const StrichartzFunctional f(table(6));
  auto a = random_coefficients(7, 5);
  for (auto& z : a) z *= 3.0;
  HamiltonianFlowOptions opt;
  opt.dt = 0.05;
  opt.record_every = 1;
  EXPECT_THROW(hamiltonian_flow(f, a, opt), VerificationFailure);
}

TEST(Oracle, Examples) {
  const StrichartzFunctional f(table(4));
  EXPECT_NEAR(direct_quadrature_oracle({Complex(1.0)}), kGaussianValue, 1e-12);
  const auto e1 = unit_vector(2, 1);
  EXPECT_LE(rel_err(direct_quadrature_oracle(e1), f.numerator(e1)), 1e-10);
  CoeffVector mix{Complex(1 / std::sqrt(2.0)), Complex(1 / std::sqrt(2.0))};
  EXPECT_LE(rel_err(direct_quadrature_oracle(mix), f.numerator(mix)), 1e-10);
}

TEST(Oracle, AgreesOnLowModes) {
  const StrichartzFunctional f(table(4));
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto a = random_coefficients(5, seed);
    EXPECT_LE(rel_err(direct_quadrature_oracle(a), f.numerator(a)), 1e-10) << seed;
  }
}

TEST(Oracle, ConvergesWithRuleSize) {
  const auto a = random_coefficients(4, 9);
  const double ref = direct_quadrature_oracle(a);
  OracleOptions big{40, 64};
  EXPECT_LE(rel_err(direct_quadrature_oracle(a, big), ref), 1e-12);
  OracleOptions coarse{3, 4};
  EXPECT_GT(rel_err(direct_quadrature_oracle(a, coarse), ref), 1e-8);
}

TEST(InitialCondition, Presets) {
  EXPECT_EQ(parse_initial_condition("gaussian", 3), unit_vector(4, 0));
  EXPECT_EQ(parse_initial_condition("mode:2", 3), unit_vector(4, 2));
  const auto a = parse_initial_condition("gaussian+noise:0.01:7", 4);
  EXPECT_EQ(a, parse_initial_condition("gaussian+noise:0.01:7", 4));
  EXPECT_NE(a, parse_initial_condition("gaussian+noise:0.01:8", 4));
  EXPECT_NEAR(a[0].real(), 1.0, 0.011);
  for (std::size_t n = 1; n < a.size(); ++n) EXPECT_LE(std::abs(a[n]), 0.01 * std::sqrt(2.0));
  EXPECT_THROW(parse_initial_condition("mode:9", 3), std::out_of_range);
  EXPECT_THROW(parse_initial_condition("mode:x", 3), std::invalid_argument);
  EXPECT_THROW(parse_initial_condition("banana", 3), std::invalid_argument);
}

TEST(InitialCondition, JsonInlineAndFile) {
  const auto a = parse_initial_condition("[[1, 0], [0, 0.5], 0.25]", 4);
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a[1], Complex(0, 0.5));
  EXPECT_EQ(a[2], Complex(0.25));
  EXPECT_EQ(a[4], Complex(0));
  EXPECT_THROW(parse_initial_condition("[[1, 0], [0, 0]]", 0), std::out_of_range);
  EXPECT_THROW(parse_initial_condition("[[0, 0]]", 2), std::invalid_argument);
  EXPECT_THROW(parse_initial_condition("[[1, 2, 3]]", 2), std::invalid_argument);
  EXPECT_THROW(parse_initial_condition("[1, ", 2), std::invalid_argument);

  const auto path = std::filesystem::temp_directory_path() / "strichartz_init_test.json";
  {
    std::ofstream out(path);
    out << "[[0, 0], [1, 1]]";
  }
  const auto b = parse_initial_condition(path.string(), 2);
  EXPECT_EQ(b[1], Complex(1, 1));
  std::filesystem::remove(path);
}

TEST(HamiltonianFlow, BlowUpBetweenRecordsIsDetected) {
  const StrichartzFunctional f(table(6));
  auto a = random_coefficients(7, 1);
  for (auto& z : a) z *= 2.0;
  a[0] += 1.0;
  HamiltonianFlowOptions opt;
  opt.dt = 0.05;
  opt.record_every = 100;
  EXPECT_THROW(hamiltonian_flow(f, a, opt), VerificationFailure);
}
