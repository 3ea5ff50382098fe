#include "qnls/experiments.hpp"
#include "qnls/rough_data.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qnls;
using qnls::testing::random_field;

namespace {

EvolutionConfig u_config(double t_final = 0.1, int n = 512) {
  EvolutionConfig cfg;
  cfg.grid = make_grid(n);
  cfg.form = Form::UForm;
  cfg.dt = 5e-4;
  cfg.t_final = t_final;
  return cfg;
}

SpectralField smooth(const Grid& g, int max_mode, unsigned seed, double l2) {
  auto f = random_field(g, max_mode, seed);
  for (int j = -max_mode; j <= max_mode; ++j) f.at(j) *= std::exp(-0.5 * j * j / (0.25 * max_mode * max_mode));
  return f * cplx(l2 / l2_norm(f));
}

// u-form data from an L^2-edge v0: u0 = <nabla>^alpha v0.
SpectralField rough_u(const EvolutionConfig& cfg, std::uint64_t seed) {
  RoughDataSpec s;
  s.seed = seed;
  s.fit_lo = 2;
  s.fit_hi = 6;
  s.top_band = 7;
  s.l2 = 1.0;
  return bessel_potential(cfg.alpha, gen_rough_data(s, cfg.grid));
}

}  // namespace

TEST(Lipschitz, RatioStableAcrossScales) {
  const auto cfg = u_config();
  const auto r = lipschitz_experiment(cfg, rough_u(cfg, 1), rough_u(cfg, 2), {1e-4, 1e-3, 1e-2, 1e-1});
  ASSERT_EQ(r.ratio.size(), 4u);
  for (double x : r.ratio) EXPECT_GT(x, 0.0);
  EXPECT_LE(r.spread(), 5.0);
}

TEST(Lipschitz, FreeFlowIsIsometric) {
  // Without nonlinearity the difference is a free wave: ratio exactly 1.
  auto cfg = u_config(0.05);
  cfg.coupling = 0.0;
  const auto r = lipschitz_experiment(cfg, rough_u(cfg, 1), rough_u(cfg, 3), {1e-4, 1e-2, 1e-1});
  for (double x : r.ratio) EXPECT_NEAR(x, 1.0, 1e-12);
}

TEST(Lipschitz, RejectsBadInput) {
  const auto cfg = u_config(0.01);
  const auto f = rough_u(cfg, 1);
  EXPECT_THROW(lipschitz_experiment(cfg, f, SpectralField(cfg.grid), {1e-4, 1e-1}), std::invalid_argument);
  EXPECT_THROW(lipschitz_experiment(cfg, f, f, {1e-2, 1e-1}), std::invalid_argument);
  auto v = cfg;
  v.form = Form::VForm;
  EXPECT_THROW(lipschitz_experiment(v, f, f, {1e-4, 1e-1}), std::invalid_argument);
}

TEST(Substitution, BetaZeroIsExact) {
  auto cfg = u_config();
  cfg.beta = 0.0;
  const auto r = substitution_check(smooth(cfg.grid, 12, 4, 1.0), cfg);
  EXPECT_LE(r.discrepancy, 1e-12);
  EXPECT_LE(r.discrepancy_half, 1e-12);
}

TEST(Substitution, SmoothDataAgreeAtBetaPointThree) {
  auto cfg = u_config();
  cfg.beta = 0.3;
  const auto r = substitution_check(smooth(cfg.grid, 12, 5, 1.0), cfg);
  EXPECT_LE(r.discrepancy, 1e-8);
  EXPECT_LE(r.discrepancy_half, 1e-8);
  EXPECT_LE(r.self_consistency, 1e-6);
}

TEST(Substitution, ZeroDataStayZero) {
  auto cfg = u_config();
  cfg.beta = 0.3;
  const auto r = substitution_check(SpectralField(cfg.grid), cfg);
  EXPECT_EQ(r.discrepancy, 0.0);
  EXPECT_EQ(r.self_consistency, 0.0);
}
