#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "linearization_oracle.hpp"
#include "strichartz/hessian.hpp"
#include "strichartz/inequality.hpp"
#include "test_util.hpp"

using namespace strichartz;

namespace {

const std::vector<double> kMode10Block = {-0.0721553, -0.0607931, -0.0473447, -0.031091,  -0.0134169,
                                          -0.0107972, -0.00261104, 0.0,       0.0,        0.00340212,
                                          0.00942436, 0.01268,     0.0156644, 0.0378192,  0.0561792,
                                          0.0731271,  0.0838498,   0.149501,  0.330481,   0.654569};

// Spectrum of the symmetric matrix restricted to the given rows/columns.
std::vector<double> sub_spectrum(const DenseMatrix& H, const std::vector<std::size_t>& idx) {
  DenseMatrix S(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) S(i, j) = H(idx[i], idx[j]);
  return symmetric_eigenvalues(S).eigenvalues;
}

const LambdaTable& table8() {
  static const LambdaTable t = LambdaTable::build(8);
  return t;
}

}  // namespace

// ----------------------------------------------------------------- 1d modes

TEST(BlockHessian1D, Structure) {
  EXPECT_THROW(assemble_hessian_1d(2, 4), std::invalid_argument);
  const auto h0 = assemble_hessian_1d(0, 10);
  EXPECT_TRUE(h0.block_eigenvalues().empty());
  EXPECT_EQ(h0.tail().size(), 10u);
  EXPECT_THROW(h0.a(0), std::out_of_range);

  const auto h1 = assemble_hessian_1d(1, 10);
  EXPECT_EQ(h1.block_pairs().size(), 1u);
  EXPECT_DOUBLE_EQ(h1.entry(0, 2), h1.b(0));
  EXPECT_EQ(h1.entry(0, 3), 0.0);

  const auto h2 = assemble_hessian_1d(2, 10);
  EXPECT_EQ(h2.block_eigenvalues().size(), 4u);
  for (int k = 0; k <= 4; ++k)
    if (k != 2) {
        EXPECT_NEAR(h2.b(k), h2.b(4 - k), 1e-15);
      }
  EXPECT_EQ(h2.entry(0, 1), 0.0);
  EXPECT_NE(h2.entry(0, 4), 0.0);
  EXPECT_NE(h2.entry(1, 3), 0.0);
  EXPECT_EQ(h2.tail().size(), 6u);
}

TEST(BlockHessian1D, EntriesMatchOracleIntegrals) {
  const double hp = std::numbers::pi / 2;
  for (int m : {1, 3}) {
    const auto h = assemble_hessian_1d(m, 12);
    const double i1mm = hp * oracle::integral({m, m, m, m, m, m}, 3.0);
    for (int k = 0; k <= 12; ++k) {
      if (k == m) continue;
      EXPECT_NEAR(h.a(k), 18.0 * hp * oracle::integral({m, m, m, m, k, k}, 3.0) - 6.0 * i1mm, 1e-12);
      EXPECT_NEAR(h.a(k), 18.0 * hessian_integral_I1(k, k, m) - 6.0 * hessian_integral_I1(m, m, m), 1e-12);
    }
    for (int k = 0; k <= 2 * m; ++k)
      if (k != m) {
        EXPECT_NEAR(h.b(k), 12.0 * hessian_integral_I2(k, 2 * m - k, m), 1e-12);
      }
  }
}

TEST(Spectrum1D, FirstMode) {
  const auto s = spectrum_1d(1);
  ASSERT_EQ(s.block_eigenvalues.size(), 2u);
  EXPECT_NEAR(s.block_eigenvalues[0], 0.0, 1e-12);
  EXPECT_NEAR(s.block_eigenvalues[1], 1.1547, 1e-3);
  const std::vector<double> want{0, 0.1283, -0.171067, -0.142556, -0.251848, -0.277191};
  const auto tail = tail_values_1d(1, 6);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(tail[i], want[i], 1e-3) << i;
  EXPECT_EQ(s.spectrum.zero, 2);
  EXPECT_EQ(s.spectrum.positive, 2);
}

TEST(Spectrum1D, SecondMode) {
  const auto s = spectrum_1d(2);
  const std::vector<double> block{0, 0, 0.299367, 1.06917};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s.block_eigenvalues[i], block[i], 1e-4);
  const std::vector<double> want{0.114044, 0.0443506, -0.118796, -0.0533264, -0.174391, -0.153076, -0.209375};
  const auto tail = tail_values_1d(2, 7);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(tail[i], want[i], 1e-4) << i;
  EXPECT_EQ(s.spectrum.zero, 2);
  EXPECT_EQ(s.spectrum.positive, 4);
}

TEST(Spectrum1D, TenthMode) {
  const auto s = spectrum_1d(10);
  ASSERT_EQ(s.block_eigenvalues.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(s.block_eigenvalues[i], kMode10Block[i], 1e-4) << i;
  const auto b = Spectrum::from_values(s.block_eigenvalues);
  EXPECT_EQ(b.negative, 7);
  EXPECT_EQ(b.zero, 2);
  EXPECT_EQ(b.positive, 11);
  EXPECT_EQ(s.spectrum.eigenvalues.size(), 400u);
  EXPECT_EQ(s.spectrum.positive, 11);
  EXPECT_EQ(s.spectrum.zero, 2);
}

TEST(Spectrum1D, GaussianTailNegative) {
  const auto t = tail_values_1d(0, 200);
  EXPECT_NEAR(t[0], 0.0, 1e-12);  // k = 1, translation
  EXPECT_NEAR(t[1], 0.0, 1e-12);  // k = 2, phase / dilation
  for (std::size_t i = 2; i < t.size(); ++i) EXPECT_LT(t[i], 0.0) << i + 1;
}

TEST(Spectrum1D, DenseSolverAgreesWithBlockFormula) {
  for (int m : {1, 2, 5, 10}) {
    const int N = 2 * m + 15;
    const auto h = assemble_hessian_1d(m, N);
    const auto dense = symmetric_eigenvalues(h.constrained_matrix(N));
    const auto s = spectrum_1d(h);
    ASSERT_EQ(dense.eigenvalues.size(), s.spectrum.eigenvalues.size());
    for (std::size_t i = 0; i < dense.eigenvalues.size(); ++i)
      EXPECT_NEAR(dense.eigenvalues[i], s.spectrum.eigenvalues[i], 1e-10);
    EXPECT_NEAR(dense.sum(), h.constrained_matrix(N).trace(), 1e-9 * std::max(1.0, std::abs(dense.sum())));
  }
}

TEST(PositiveRatio, Examples) {
  const auto r1 = positive_ratio(1);
  EXPECT_EQ(r1.block_positive, 1u);
  EXPECT_EQ(r1.tail_positive, 1u);
  EXPECT_DOUBLE_EQ(r1.ratio, 1.0);
  const auto r2 = positive_ratio(2);
  EXPECT_EQ(r2.block_positive, 2u);
  EXPECT_EQ(r2.tail_positive, 2u);
  EXPECT_DOUBLE_EQ(r2.ratio, 1.0);
  EXPECT_NEAR(positive_ratio(10).ratio, 11.0 / 20.0, 1e-15);
  EXPECT_THROW(positive_ratio(0), std::invalid_argument);
  EXPECT_THROW(positive_ratio(3, 12), VerificationFailure);
}

TEST(PositiveRatio, AtLeastHalf) {
  for (int m = 1; m <= 12; ++m) EXPECT_GE(positive_ratio(m).ratio, 0.5) << m;
}

TEST(TailSettled, Rule) {
  std::vector<double> t;
  for (int i = 0; i < 12; ++i) t.push_back(-0.1 * i - 0.1);
  EXPECT_TRUE(tail_settled(t));
  t[6] = -0.05;
  EXPECT_FALSE(tail_settled(t));
  EXPECT_FALSE(tail_settled({-1, -2, -3}));
}

TEST(ZeroModes, Translation) {
  for (int m : {1, 2, 5, 8}) EXPECT_LT(zero_mode_check_translation(m), 1e-10) << m;
  EXPECT_THROW(zero_mode_check_translation(0), std::invalid_argument);
}

TEST(ZeroModes, PhaseAndDilation) {
  for (int m : {0, 1, 3, 6}) {
    EXPECT_LT(zero_mode_check_phase(m), 1e-10) << m;
    EXPECT_LT(zero_mode_check_dilation(m), 1e-10) << m;
  }
  const auto v = phase_direction(0);
  EXPECT_EQ(v[2], 1.0);
  EXPECT_EQ(v[0], 0.0);
  // the chirp is not a zero direction of the real block
  EXPECT_GT(std::abs(assemble_hessian_1d(3, 10).quadratic_form(phase_direction(3))), 1e-3);
}

TEST(FiniteDifferenceHessian, BlockStructureAtModes) {
  const StrichartzFunctional f(table8());
  const std::size_t n = 9;
  for (int m : {0, 1, 2, 3}) {
    const auto H = fd_hessian_from_gradient(f, unit_vector(n, m));
    const auto h = assemble_hessian_1d(m, 8 > 2 * m ? 8 : 2 * m + 1);
    const std::size_t mm = static_cast<std::size_t>(m);
    for (std::size_t i = 0; i < 2 * n; ++i) {
      EXPECT_LT(std::abs(H(i, mm)), 1e-6);
      // the imaginary e_m direction is the phase rotation
      EXPECT_LT(std::abs(H(i, n + mm)), 1e-6);
    }
    for (int k = 0; k <= 8; ++k)
      for (int l = 0; l <= 8; ++l) {
        if (k == m || l == m) continue;
        const std::size_t ks = static_cast<std::size_t>(k), ls = static_cast<std::size_t>(l);
        const double e = h.entry(k, l);
        EXPECT_NEAR(H(ks, ls), e, 1e-6) << m << " " << k << " " << l;
        EXPECT_NEAR(H(n + ks, n + ls), k == l ? e : -e, 1e-6) << m << " " << k << " " << l;
        EXPECT_LT(std::abs(H(ks, n + ls)), 1e-10);
      }
  }
}

TEST(FiniteDifferenceHessian, ValuesOnlyAgree) {
  const StrichartzFunctional f(LambdaTable::build(4));
  const auto a = unit_vector(5, 1);
  const auto A = fd_hessian_from_gradient(f, a);
  const auto B = fd_hessian_from_values(f, a, 1e-3);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < A.size(); ++j) EXPECT_NEAR(A(i, j), B(i, j), 1e-6);
}

TEST(FiniteDifferenceHessian, ImaginarySpectrumHasExtraZero) {
  const StrichartzFunctional f(table8());
  const std::size_t n = 9;
  for (int m : {1, 2}) {
    const auto H = fd_hessian_from_gradient(f, unit_vector(n, m));
    std::vector<std::size_t> re, im;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != static_cast<std::size_t>(m)) re.push_back(k);
      im.push_back(n + k);
    }
    auto sr = sub_spectrum(H, re);
    const auto si = sub_spectrum(H, im);
    sr.push_back(0.0);
    std::sort(sr.begin(), sr.end());
    ASSERT_EQ(sr.size(), si.size());
    for (std::size_t i = 0; i < si.size(); ++i) EXPECT_NEAR(sr[i], si[i], 1e-6) << m << " " << i;
    EXPECT_EQ(Spectrum::from_values(si, 1e-6).zero, Spectrum::from_values(sr, 1e-6).zero);
    EXPECT_EQ(Spectrum::from_values(si, 1e-6).zero, 3);
  }
}

// ------------------------------------------------------------ Gaussian, d

TEST(GaussianHessian, OneDimensionIsDiagonal) {
  const auto h = assemble_hessian_gaussian(1, 12);
  const double g00 = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(h.G(0, 0), g00, 1e-15);
  EXPECT_NEAR(h.shift(), g00 / 3.0, 1e-15);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const int k = h.index(i)[0];
    EXPECT_EQ(k, static_cast<int>(i) + 1);
    EXPECT_NEAR(h.entry(i, i), weighted_pair_integral(k, k, ExponentQ(6.0)) - g00 / 3.0, 1e-15);
    for (std::size_t j = 0; j < h.size(); ++j)
      if (j != i) {
        EXPECT_EQ(h.entry(i, j), 0.0);
      }
  }
}

TEST(GaussianHessian, TwoDimensionSmall) {
  const auto h = assemble_hessian_gaussian(2, 2);
  EXPECT_EQ(h.size(), 8u);
  EXPECT_EQ(h.row({0, 1}), 0u);
  EXPECT_EQ(h.entry(h.row({1, 0}), h.row({0, 1})), 0.0);
  EXPECT_NE(h.entry(h.row({2, 0}), h.row({0, 2})), 0.0);
  EXPECT_EQ(h.entry(h.row({2, 0}), h.row({1, 1})), 0.0);
  EXPECT_THROW(h.row({0, 0}), std::invalid_argument);
  EXPECT_THROW(assemble_hessian_gaussian(3, 20), std::length_error);
}

TEST(GaussianHessian, ConventionsMatchIminus) {
  for (int d : {1, 2, 3}) {
    const auto q = ExponentQ::for_dimension(d);
    const auto hp = assemble_hessian_gaussian(d, 3, HessianConvention::second_variation);
    const auto hi = assemble_hessian_gaussian(d, 3, HessianConvention::iminus);
    const MultiIndex zero = MultiIndex::zero(d);
    const double i00 = hessian_integral_Iminus(zero, zero, q);
    for (std::size_t i = 0; i < hp.size(); ++i)
      for (std::size_t j = 0; j < hp.size(); ++j) {
        const double im = hessian_integral_Iminus(hp.index(i), hp.index(j), q);
        const double delta = i == j ? 1.0 : 0.0;
        EXPECT_NEAR(hp.entry(i, j), 0.5 * q.value() * q.value() * im - delta * q.value() * i00, 1e-14);
        EXPECT_NEAR(hi.entry(i, j), im - delta * 2.0 / q.value() * i00, 1e-14);
      }
  }
  EXPECT_EQ(parse_convention("second-variation"), HessianConvention::second_variation);
  EXPECT_EQ(to_string(HessianConvention::gram_shift), "gram-shift");
  EXPECT_THROW(parse_convention("other"), std::invalid_argument);
}

TEST(GaussianHessian, NonPositiveSpectra) {
  struct Case {
    int d, N;
  };
  for (const Case c : {Case{1, 40}, Case{2, 10}, Case{3, 8}}) {
    const auto s = spectrum_gaussian(c.d, c.N);
    EXPECT_EQ(s.spectrum.positive, 0) << c.d;
    EXPECT_GE(Spectrum::from_values(s.spectrum.eigenvalues, 1e-6).zero, c.d + 1) << c.d;
    EXPECT_GT(s.gap, 0.0);
  }
  const auto s1 = spectrum_gaussian(1, 40);
  EXPECT_EQ(s1.spectrum.zero, 2);
}

TEST(GaussianHessian, GapScalesWithConvention) {
  const auto q = ExponentQ::for_dimension(3);
  const double gs = spectrum_gaussian(3, 6, HessianConvention::gram_shift).gap;
  const double gh = spectrum_gaussian(3, 6, HessianConvention::second_variation).gap;
  const double gi = spectrum_gaussian(3, 6, HessianConvention::iminus).gap;
  EXPECT_NEAR(gh, 0.25 * q.value() * q.value() * gs, 1e-12);
  EXPECT_NEAR(gi, 0.5 * gs, 1e-12);
}

TEST(GaussianHessian, GramMatrixPositiveSemidefinite) {
  struct Case {
    int d, N;
  };
  for (const Case c : {Case{1, 30}, Case{2, 8}, Case{3, 5}, Case{4, 3}}) {
    const auto h = assemble_hessian_gaussian(c.d, c.N);
    const auto s = symmetric_eigenvalues(h.gram().to_dense());
    EXPECT_GE(s.min(), -1e-10) << c.d;
    EXPECT_LE(s.max(), h.shift() + 1e-9) << c.d;
  }
}

TEST(GaussianHessian, ColumnSumsBoundSpectrum) {
  for (int d : {2, 3}) {
    const int N = 5;
    const auto q = ExponentQ::for_dimension(d);
    bool all = true;
    for (const auto& c : column_sum_sweep(d, N, q)) all = all && c.holds;
    ASSERT_TRUE(all);
    const auto h = assemble_hessian_gaussian(d, N);
    EXPECT_LE(symmetric_eigenvalues(h.gram().to_dense()).max(), h.shift() + 1e-9);
  }
}

TEST(GaussianHessian, SymmetryDirectionsAreZero) {
  for (int d : {1, 2, 3}) {
    const auto z = gaussian_zero_mode_checks(assemble_hessian_gaussian(d, 4));
    EXPECT_LT(z.translation, 1e-12) << d;
    EXPECT_LT(z.phase, 1e-12) << d;
  }
  EXPECT_THROW(gaussian_zero_mode_checks(assemble_hessian_gaussian(2, 1)), std::invalid_argument);
}

TEST(GaussianHessian, ParallelAssemblyIsIdentical) {
  const auto a = assemble_hessian_gaussian(3, 5, HessianConvention::gram_shift, 1);
  const auto b = assemble_hessian_gaussian(3, 5, HessianConvention::gram_shift, 4);
  EXPECT_EQ(a.gram().entries(), b.gram().entries());
}

TEST(FirstVariation, VanishesAtGaussian) {
  EXPECT_LT(first_variation_gaussian(MultiIndex{1}, ExponentQ(6.0)), 1e-12);
  EXPECT_LT(first_variation_gaussian(MultiIndex{2}, ExponentQ(6.0)), 1e-12);
  EXPECT_LT(first_variation_gaussian(MultiIndex{1, 1}, ExponentQ(4.0)), 1e-12);
  for (int d = 1; d <= 3; ++d) {
    const auto q = ExponentQ::for_dimension(d);
    std::vector<int> cur;
    for (int total = 1; total <= 8; ++total)
      detail::for_each_composition(total, d, cur, [&](const std::vector<int>& k) {
        EXPECT_LT(first_variation_gaussian(MultiIndex(k), q), 1e-12);
      });
  }
  EXPECT_THROW(first_variation_gaussian(MultiIndex{0, 0}, ExponentQ(4.0)), std::invalid_argument);
}
