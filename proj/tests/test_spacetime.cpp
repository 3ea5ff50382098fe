#include "qnls/spacetime.hpp"
#include "qnls/norms.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace qnls;
using qnls::testing::random_field;

namespace {

double space_time_sobolev(double s, const SpaceTimeField& stf) {
  double acc = 0.0;
  for (int i = 0; i < stf.n_t(); ++i) acc += std::pow(sobolev_norm(s, stf.slice(i)), 2);
  return std::sqrt(acc * stf.times.dt());
}

}  // namespace

TEST(SpaceTime, CutoffVanishesAtWindowEdges) {
  const Grid g = make_grid(64);
  const auto stf = windowed_free_wave(random_field(g, 10, 1), {1.0, 64});
  EXPECT_EQ(stf.cutoff, TimeCutoff::Smooth);
  double edge = 0.0;
  for (auto v : stf.row(0)) edge = std::max(edge, std::abs(v));
  EXPECT_LE(edge, 1e-10);
  EXPECT_LT(window_weight(stf.times, 1.0), 1e-10);
  EXPECT_THROW(apply_cutoff(stf), std::invalid_argument);
}

TEST(SpaceTime, TimeGridValidation) {
  EXPECT_THROW((TimeGrid{1.0, 48}.validate()), std::invalid_argument);
  EXPECT_THROW((TimeGrid{0.0, 64}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((TimeGrid{2.0, 128}.validate()));
}

TEST(XsbNorm, ZeroField) {
  SpaceTimeField stf(make_grid(32), {1.0, 16});
  stf.cutoff = TimeCutoff::Smooth;
  EXPECT_EQ(xsb_norm(0.5, 0.55, stf), 0.0);
}

TEST(XsbNorm, ZeroModulationIndexIsL2tHs) {
  const Grid g = make_grid(64);
  const auto stf = windowed_free_wave(random_field(g, 15, 2), {1.0, 32});
  for (double s : {0.0, 0.7, -0.4}) {
    const double ref = space_time_sobolev(s, stf);
    EXPECT_NEAR(xsb_norm(s, 0.0, stf), ref, 1e-12 * ref) << s;
  }
  SpaceTimeField raw(g, {1.0, 16});
  raw.values.assign(raw.values.size(), cplx(1.0, -1.0));
  EXPECT_NEAR(xsb_norm(0.0, 0.0, raw), mixed_norm(2, 2, raw), 1e-12);
}

TEST(XsbNorm, RequiresCutoffForPositiveB) {
  const Grid g = make_grid(32);
  const auto raw = sample_space_time(g, {1.0, 16}, [&](double t) { return free_propagate(t, random_field(g, 5, 1)); });
  EXPECT_THROW(xsb_norm(0.0, 0.5, raw), std::invalid_argument);
  EXPECT_NO_THROW(xsb_norm(0.0, 0.0, raw));
}

TEST(XsbNorm, ConjugationFlipsParabola) {
  const Grid g = make_grid(64);
  const auto u = windowed_free_wave(random_field(g, 20, 3), {2.0, 64});
  for (double b : {0.3, 0.55, -0.45}) {
    const double a = xsb_norm(0.4, b, conj(u), ParabolaSign::Plus);
    const double c = xsb_norm(0.4, b, u, ParabolaSign::Minus);
    EXPECT_NEAR(a, c, 1e-12 * c) << b;
  }
  const auto boxed = synth_boxed(4, 2, ParabolaSign::Plus, 5, g, {2 * pi, 64});
  EXPECT_NEAR(xsb_norm(0, 0.55, conj(boxed), ParabolaSign::Plus), xsb_norm(0, 0.55, boxed, ParabolaSign::Minus), 1e-12);
}

TEST(XsbNorm, WindowedFreeWaveStableUnderTimeRefinement) {
  // The free wave sits on the parabola; only the window spreads it in tau, so
  // the ratio to ||f|| is a window constant independent of the sampling.
  const Grid g = make_grid(64);
  for (unsigned seed : {4u, 5u}) {
    const auto f = random_field(g, 15, seed);
    const double r64 = xsb_norm(0.0, 0.55, windowed_free_wave(f, {1.0, 64})) / l2_norm(f);
    const double r128 = xsb_norm(0.0, 0.55, windowed_free_wave(f, {1.0, 128})) / l2_norm(f);
    EXPECT_TRUE(std::isfinite(r64));
    EXPECT_NEAR(r128 / r64, 1.0, 0.1);
    // Measured against the wrong parabola the same wave is far rougher.
    EXPECT_GT(xsb_norm(0.0, 0.55, windowed_free_wave(f, {1.0, 128}), ParabolaSign::Minus), 3.0 * r128 * l2_norm(f));
  }
}

TEST(MixedNorm, L2AndConstantMode) {
  const Grid g = make_grid(64);
  const auto stf = windowed_free_wave(random_field(g, 10, 6), {1.0, 32});
  EXPECT_NEAR(mixed_norm(2, 2, stf), space_time_sobolev(0.0, stf), 1e-12 * space_time_sobolev(0.0, stf));
  const auto e3 = SpectralField::single_mode(g, 3);
  const auto constant = sample_space_time(g, {1.0, 16}, [&](double) { return e3; });
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(mixed_norm(inf, 2, constant), std::sqrt(2 * pi), 1e-13);
  EXPECT_NEAR(mixed_norm(2, inf, constant), 1.0, 1e-13);
  EXPECT_THROW(mixed_norm(1.5, 2, constant), std::invalid_argument);
  EXPECT_THROW(mixed_norm(4, 1.0, constant), std::invalid_argument);
}

TEST(MixedNorm, StrichartzRatioBounded) {
  // (q, r) = (8, 4) is admissible: ||e^{-it d_xx} f||_{L^8 L^4} <~ ||f||_{L^2}.
  const Grid g = make_grid(128);
  std::vector<double> ratios;
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto f = random_field(g, 30, 100 + seed);
    ratios.push_back(mixed_norm(8, 4, windowed_free_wave(f, {1.0, 64})) / l2_norm(f));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LE(*hi / *lo, 3.0);
}

TEST(SynthBoxed, SupportAndNormalization) {
  const Grid g = make_grid(64);
  const TimeGrid tg{2 * pi, 64};
  const double N = 4, L = 2;
  const auto u = synth_boxed(N, L, ParabolaSign::Plus, 7, g, tg);
  EXPECT_NEAR(mixed_norm(2, 2, u), 1.0, 1e-12);
  auto spec = u.values;
  fft::transform_2d(spec, tg.n_t, g.size(), fft::Direction::Forward);
  double inside = 0.0, outside = 0.0;
  for (int m = 0; m < tg.n_t; ++m) {
    for (int j = 0; j < g.size(); ++j) {
      const double xi = g.frequency(j);
      const double mod = std::abs(tg.tau(m) - xi * xi - tg.tau_period() * std::round((tg.tau(m) - xi * xi) / tg.tau_period()));
      const double e = std::norm(spec[static_cast<std::size_t>(m) * g.size() + j]);
      const bool in = std::abs(xi) >= N && std::abs(xi) <= 2 * N && mod >= L && mod <= 2 * L;
      (in ? inside : outside) += e;
    }
  }
  EXPECT_LE(outside, 1e-10 * inside);
}

TEST(SynthBoxed, DeterministicAndSeedDependent) {
  const Grid g = make_grid(32);
  const TimeGrid tg{2 * pi, 32};
  const auto a = synth_boxed(2, 1, ParabolaSign::Minus, 3, g, tg);
  const auto b = synth_boxed(2, 1, ParabolaSign::Minus, 3, g, tg);
  const auto c = synth_boxed(2, 1, ParabolaSign::Minus, 4, g, tg);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(SynthBoxed, EmptyBoxRejected) {
  const Grid g = make_grid(32);
  // |xi| in [100, 200] is beyond the grid.
  EXPECT_THROW(synth_boxed(100, 1, ParabolaSign::Plus, 1, g, {2 * pi, 16}), std::invalid_argument);
  // tau spacing 2 pi / 0.1 ~ 63 leaves no cell with modulation in [1, 2].
  EXPECT_THROW(synth_boxed(2, 1, ParabolaSign::Plus, 1, g, {0.1, 16}), std::invalid_argument);
}

TEST(SynthBoxed, SumOfModulatedFreeWaves) {
  // Grouping the cells by modulation sigma = tau - xi^2 writes u as
  // sum_sigma e^{i sigma t} e^{-it d_xx} f_sigma, exactly at the sample times.
  const Grid g = make_grid(32);
  const TimeGrid tg{2 * pi, 32};
  const auto u = synth_boxed(4, 1, ParabolaSign::Plus, 9, g, tg);
  auto spec = u.values;
  fft::transform_2d(spec, tg.n_t, g.size(), fft::Direction::Forward);
  std::map<long, SpectralField> pieces;
  for (int m = 0; m < tg.n_t; ++m) {
    for (int j = 0; j < g.size(); ++j) {
      const cplx c = spec[static_cast<std::size_t>(m) * g.size() + j] / double(tg.n_t * g.size());
      if (std::abs(c) < 1e-14) continue;
      const double xi = g.frequency(j);
      const double d = tg.tau(m) - xi * xi;
      const long sigma = std::lround(d - tg.tau_period() * std::round(d / tg.tau_period()));
      pieces.try_emplace(sigma, g).first->second.at(g.mode(j)) += c;
    }
  }
  EXPECT_GE(pieces.size(), 2u);
  double err = 0.0;
  for (int i = 0; i < tg.n_t; ++i) {
    const double t = tg.time(i);
    SpectralField sum(g);
    for (const auto& [sigma, f] : pieces) sum += cplx(std::polar(1.0, sigma * t)) * free_propagate(t, f);
    err = std::max(err, l2_norm(sum - u.slice(i)));
  }
  EXPECT_LT(err, 1e-12);
}
