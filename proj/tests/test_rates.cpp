#include "qnls/rates.hpp"
#include "qnls/spacetime.hpp"

#include <gtest/gtest.h>

using namespace qnls;

TEST(WindowFactor, BZeroIsTemporalL2) {
  // int Phi(t/T)^2 dt by fine midpoint quadrature.
  const double T = 1.3;
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double t = -2.0 * T + (i + 0.5) * 4.0 * T / n;
    acc += std::pow(lp::bump(t / T), 2);
  }
  acc *= 4.0 * T / n;
  EXPECT_NEAR(rates_detail::window_factor(0.0, 1.5, T), std::sqrt(acc), 1e-10);
}

TEST(WindowFactor, MatchesSpaceTimeNorm) {
  // Independent route: windowed free wave sampled on a (t, x) window and
  // measured with the discrete X^{0,b} norm.
  const Grid g = make_grid(32, 2.0 * pi);
  SpectralField f(g);
  f.at(1) = 0.7;
  f.at(-3) = cplx(0.2, -0.4);
  // The window is padded so the tau-lattice resolves the kink of (1 + |tau|)^{2b}.
  const double T = 0.5;
  const TimeGrid tg{128.0 * T, 8192};
  const double mid = 0.5 * tg.t_win;
  auto stf = sample_space_time(g, tg, [&](double t) { return lp::bump((t - mid) / T) * free_propagate(t - mid, f); });
  stf.cutoff = TimeCutoff::Smooth;
  for (double b : {0.0, 0.3, 0.55}) {
    const double expect = rates_detail::window_factor(b, 0.0, T) * l2_norm(f);
    EXPECT_NEAR(xsb_norm(0.0, b, stf) / expect, 1.0, 2e-3) << "b = " << b;
  }
}

TEST(WindowFactor, GrowsWithModulation) {
  EXPECT_GT(rates_detail::window_factor(0.55, 8.0, 1.0), 2.0 * rates_detail::window_factor(0.55, 0.0, 1.0));
}

TEST(RateKinds, NamesRoundTrip) {
  for (auto k : all_rate_kinds) EXPECT_EQ(parse_rate_kind(to_string(k)), k);
  EXPECT_THROW(parse_rate_kind("gain4"), std::invalid_argument);
  EXPECT_DOUBLE_EQ(predicted_slope(RateKind::Gain1, 0.05), -0.45);
  EXPECT_DOUBLE_EQ(predicted_slope(RateKind::Kkkk1, 0.05), -0.25);
}

TEST(RateExperiment, ZeroInputIsDegenerate) {
  RateOptions o;
  o.amplitude = 0.0;
  const auto r = product_rate_experiment(RateKind::Gain1, 3, 5, 0.05, 8, o);
  EXPECT_TRUE(r.degenerate);
  for (const auto& p : r.points) EXPECT_EQ(p.median, 0.0);
  EXPECT_EQ(r.slope, 0.0);
}

TEST(RateExperiment, RejectsBadArguments) {
  EXPECT_THROW(product_rate_experiment(RateKind::Gain1, 3, 5, 0.05, 4), std::invalid_argument);
  EXPECT_THROW(product_rate_experiment(RateKind::Gain1, 3, 4, 0.05, 8), std::invalid_argument);
  EXPECT_THROW(product_rate_experiment(RateKind::Gain1, 3, 5, 0.7, 8), std::invalid_argument);
  RateOptions o;
  o.max_points = 1 << 12;
  EXPECT_THROW(product_rate_experiment(RateKind::Gain1, 3, 9, 0.05, 8, o), std::invalid_argument);
}

TEST(RateExperiment, TransversalDecayOverLowBands) {
  const auto r = product_rate_experiment(RateKind::PlusMinus, 3, 5, 0.05, 8);
  EXPECT_FALSE(r.degenerate);
  EXPECT_NEAR(r.slope, -0.5, 0.05);
  for (const auto& p : r.points) {
    EXPECT_LT(p.tail, 1e-8);
    for (double x : p.ratios) EXPECT_GT(x, 0.0);
  }
}

TEST(RateExperiment, CoMovingHasNoGain) {
  const auto r = product_rate_experiment(RateKind::Gain3, 3, 5, 0.05, 8);
  EXPECT_GE(r.slope, -0.1);
}

TEST(RateExperiment, SlopeStableUnderEnsembleDoubling) {
  const auto a = product_rate_experiment(RateKind::Gain1, 3, 5, 0.05, 8);
  const auto b = product_rate_experiment(RateKind::Gain1, 3, 5, 0.05, 16);
  EXPECT_NEAR(a.slope, b.slope, 0.02);
}

TEST(RateExperiment, DeterministicAcrossThreadCounts) {
  RateOptions o;
  const auto a = product_rate_experiment(RateKind::Kkk2, 3, 5, 0.05, 8, o);
  o.threads = 3;
  const auto b = product_rate_experiment(RateKind::Kkk2, 3, 5, 0.05, 8, o);
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].ratios, b.points[i].ratios);
  // Transversal ratios barely depend on the packet shape; co-moving ones do.
  const auto c = product_rate_experiment(RateKind::Gain3, 3, 5, 0.05, 8, o);
  o.seed = 2;
  const auto d = product_rate_experiment(RateKind::Gain3, 3, 5, 0.05, 8, o);
  EXPECT_NE(c.points[0].ratios, d.points[0].ratios);
}
