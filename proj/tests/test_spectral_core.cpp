#include "qnls/multipliers.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qnls;
using qnls::testing::random_field;
using qnls::testing::rel_diff;

TEST(Grid, IntegerFrequenciesOnDefaultLength) {
  const Grid g = make_grid(16, 2 * pi);
  const auto xi = g.frequencies();
  ASSERT_EQ(xi.size(), 16u);
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(xi[static_cast<std::size_t>(j)], j - 8, 1e-14);
}

TEST(Grid, SpacingScalesWithLength) {
  const Grid g = make_grid(16, pi);
  EXPECT_NEAR(g.spacing(), 2.0, 1e-15);
}

TEST(Grid, GuardBandRule) {
  EXPECT_EQ(make_grid(1024).max_band(), 7);
  EXPECT_EQ(make_grid(16).max_band(), 1);
}

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(make_grid(24), std::invalid_argument);
  EXPECT_THROW(make_grid(8), std::invalid_argument);
  EXPECT_THROW(make_grid(64, 0.0), std::invalid_argument);
  EXPECT_THROW(make_grid(64, -1.0), std::invalid_argument);
}

TEST(Transforms, SingleModeIsPlaneWave) {
  const Grid g = make_grid(32);
  const auto samples = to_physical(SpectralField::single_mode(g, 1));
  for (int m = 0; m < 32; ++m) {
    const double x = 2 * pi * m / 32;
    EXPECT_NEAR(std::abs(samples[static_cast<std::size_t>(m)] - std::polar(1.0, x)), 0.0, 1e-14);
  }
}

TEST(Transforms, ZeroMapsToZero) {
  const Grid g = make_grid(64);
  for (auto s : to_physical(SpectralField(g))) EXPECT_EQ(s, cplx(0.0));
}

TEST(Transforms, RoundTripAndParseval) {
  const Grid g = make_grid(256);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const auto f = random_field(g, 127, seed);
    const auto x = to_physical(f);
    EXPECT_LT(rel_diff(to_spectral(x, g), f), 1e-13);
    EXPECT_NEAR(l2_norm_physical(x, g), l2_norm(f), 1e-12 * l2_norm(f));
  }
}

TEST(Transforms, SizeMismatch) {
  std::vector<cplx> v(10);
  EXPECT_THROW(to_spectral(v, make_grid(16)), std::invalid_argument);
}

TEST(Product, MatchesPointwiseMultiplication) {
  const Grid g = make_grid(128);
  const auto u = random_field(g, 20, 3), v = random_field(g, 20, 4);
  const auto xu = to_physical(u), xv = to_physical(v);
  std::vector<cplx> xw(xu.size());
  for (std::size_t i = 0; i < xw.size(); ++i) xw[i] = xu[i] * xv[i];
  EXPECT_LT(rel_diff(product(u, v), to_spectral(xw, g)), 1e-13);
}

TEST(BesselPotential, Examples) {
  const Grid g = make_grid(64);
  const auto f = random_field(g, 31, 7);
  EXPECT_EQ(rel_diff(bessel_potential(0.0, f), f), 0.0);
  const auto one = bessel_potential(2.0, SpectralField::single_mode(g, 1));
  EXPECT_NEAR(std::abs(one.at(1) - 2.0), 0.0, 1e-15);
  EXPECT_LT(rel_diff(bessel_potential(-0.7, bessel_potential(0.7, f)), f), 1e-13);
}

TEST(LittlewoodPaley, PartitionOfUnityOnEveryGridFrequency) {
  const Grid g = make_grid(1024);
  const int k_max = g.max_band();
  for (int j = -(1 << k_max); j <= (1 << k_max); ++j) {
    const double xi = j;
    double sum = lp::bump(xi);
    for (int k = 1; k <= k_max; ++k) sum += lp::annulus(std::ldexp(xi, -k));
    EXPECT_NEAR(sum, 1.0, 1e-12) << "xi = " << xi;
  }
}

TEST(LittlewoodPaley, ProjectionsSumToField) {
  const Grid g = make_grid(1024);
  const auto u = random_field(g, 127, 11);
  SpectralField sum = lp_low(u);
  for (int k = 1; k <= g.max_band(); ++k) sum += lp_project(k, u);
  EXPECT_LT(rel_diff(sum, u), 1e-14);
}

TEST(LittlewoodPaley, AnnulusSupport) {
  for (double xi = 0.0; xi < 4.0; xi += 1.0 / 64) {
    if (xi < 0.5 || xi > 2.0) {
      EXPECT_EQ(lp::annulus(xi), 0.0) << xi;
    }
  }
  EXPECT_DOUBLE_EQ(lp::annulus(1.0), 1.0);
}

TEST(LittlewoodPaley, SingleModeExamples) {
  const Grid g = make_grid(256);
  for (int k = 1; k <= 3; ++k) {
    const auto pass = lp_project(k, SpectralField::single_mode(g, 1 << k));
    EXPECT_DOUBLE_EQ(std::abs(pass.at(1 << k)), 1.0);
    const auto stop = lp_project(k, SpectralField::single_mode(g, 1 << (k + 2)));
    EXPECT_EQ(l2_norm(stop), 0.0);
  }
}

TEST(LittlewoodPaley, DistantBandsAreOrthogonal) {
  const Grid g = make_grid(1024);
  const auto u = random_field(g, 255, 5);
  for (int k = 1; k <= 7; ++k)
    for (int kk = 1; kk <= 7; ++kk)
      if (std::abs(k - kk) >= 2) {
        EXPECT_EQ(l2_norm(lp_project(k, lp_project(kk, u))), 0.0);
      }
}

TEST(LittlewoodPaley, UnresolvedBandThrows) {
  const auto u = SpectralField(make_grid(64));
  EXPECT_THROW(lp_project(4, u), std::invalid_argument);
  EXPECT_THROW(lp_project(0, u), std::invalid_argument);
}

TEST(LittlewoodPaley, SobolevScalingOfBands) {
  const Grid g = make_grid(1024);
  const auto u = random_field(g, 255, 9);
  for (double s : {-1.0, -0.5, 0.5, 1.0}) {
    double lo = 1e300, hi = 0.0;
    for (int k = 1; k <= 7; ++k) {
      const auto uk = lp_project(k, u);
      const double ratio = l2_norm(bessel_potential(s, uk)) / l2_norm(uk) / std::pow(2.0, k * s);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    EXPECT_LE(hi / lo, std::pow(4.0, std::abs(s) + 1.0)) << "s = " << s;
  }
}

TEST(LittlewoodPaley, CompositeRanges) {
  const Grid g = make_grid(1024);
  const auto u = random_field(g, 255, 13);
  EXPECT_LT(rel_diff(lp_high(u) + lp_low(u), u), 1e-14);
  // P_{<<k} keeps nothing above 2^{k-5}.
  const auto low = lp_far_below(8, u);
  for (int j = 9; j < 256; ++j) EXPECT_EQ(low.at(j), cplx(0.0));
}

TEST(SignProjection, Decomposition) {
  const Grid g = make_grid(64);
  const auto u = random_field(g, 20, 2);
  auto recomposed = sign_project(Sign::Plus, u) + sign_project(Sign::Minus, u);
  recomposed.at(0) += u.at(0);
  EXPECT_LT(rel_diff(recomposed, u), 1e-15);
  const auto p = sign_project(Sign::Plus, u);
  EXPECT_EQ(rel_diff(sign_project(Sign::Plus, p), p), 0.0);
}

TEST(SignProjection, RealFieldMirror) {
  const Grid g = make_grid(64);
  auto u = random_field(g, 20, 2);
  u = u + conj(u);  // real-valued
  const auto p = sign_project(Sign::Plus, u), m = sign_project(Sign::Minus, u);
  for (int j = 1; j < 32; ++j) EXPECT_NEAR(std::abs(m.at(-j) - std::conj(p.at(j))), 0.0, 1e-15);
}

TEST(FreePropagator, Examples) {
  const Grid g = make_grid(64);
  const auto f = random_field(g, 15, 21);
  EXPECT_EQ(rel_diff(free_propagate(0.0, f), f), 0.0);
  const auto w = free_propagate(0.1, SpectralField::single_mode(g, 2));
  EXPECT_NEAR(std::abs(w.at(2) - std::polar(1.0, 0.4)), 0.0, 1e-15);
  EXPECT_NEAR(l2_norm(free_propagate(1.7, f)), l2_norm(f), 1e-13 * l2_norm(f));
}

TEST(FreePropagator, GroupAndCommutation) {
  const Grid g = make_grid(256);
  const auto f = random_field(g, 60, 22);
  EXPECT_LT(rel_diff(free_propagate(0.3, free_propagate(0.2, f)), free_propagate(0.5, f)), 1e-13);
  EXPECT_LT(rel_diff(free_propagate(-0.4, free_propagate(0.4, f)), f), 1e-13);
  EXPECT_LT(rel_diff(free_propagate(0.3, bessel_potential(0.6, f)), bessel_potential(0.6, free_propagate(0.3, f))),
            1e-14);
  EXPECT_LT(rel_diff(free_propagate(0.3, lp_project(4, f)), lp_project(4, free_propagate(0.3, f))), 1e-14);
}
