#pragma once

// Solution-map experiments: Lipschitz dependence in H^{-1/2} and the
// z -> u = <nabla>^beta z substitution.

#include "qnls/evolution.hpp"
#include "qnls/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qnls {

struct LipschitzResult {
  std::vector<double> eps;
  /// sup_t ||u - v||_{H^{-1/2}} / (eps ||g||_{H^{-1/2}}) per eps.
  std::vector<double> ratio;

  double spread() const {
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    return *hi / *lo;
  }
};

/// Runs u-form data f and f + eps g for every eps and compares the two
/// solutions in H^{-1/2} at every save time.
inline LipschitzResult lipschitz_experiment(EvolutionConfig cfg, const SpectralField& f, const SpectralField& g,
                                            const std::vector<double>& eps_list) {
  if (cfg.form != Form::UForm) throw std::invalid_argument("lipschitz: data are taken in u-form");
  if (eps_list.size() < 2) throw std::invalid_argument("lipschitz: need at least two scales");
  const auto [e_lo, e_hi] = std::minmax_element(eps_list.begin(), eps_list.end());
  if (!(*e_lo > 0.0) || *e_hi / *e_lo < 1e3 * (1 - 1e-12))
    throw std::invalid_argument("lipschitz: scales must be positive and span at least three decades");
  const double g_norm = sobolev_norm(-0.5, g);
  if (g_norm == 0.0) throw std::invalid_argument("lipschitz: zero direction g, ratio undefined");
  const SpectralField dir = cplx(1.0 / g_norm) * g;
  if (cfg.save_every == 0) cfg.save_every = std::max(1, cfg.steps() / 20);

  const Trajectory base = integrate(cfg, f);
  LipschitzResult out;
  for (double eps : eps_list) {
    const Trajectory pert = integrate(cfg, f + cplx(eps) * dir);
    double worst = 0.0;
    for (std::size_t i = 1; i < base.snapshots.size(); ++i)
      worst = std::max(worst, sobolev_norm(-0.5, pert.snapshots[i].field - base.snapshots[i].field));
    out.eps.push_back(eps);
    out.ratio.push_back(worst / eps);
  }
  return out;
}

struct SubstitutionReport {
  double beta = 0.0;
  /// sup_t ||u(t) - <nabla>^beta z(t)||_{L^2} at dt and at dt/2.
  double discrepancy = 0.0;
  double discrepancy_half = 0.0;
  /// sup_t ||u_dt - u_{dt/2}||_{L^2} / sup_t ||u||_{L^2}.
  double self_consistency = 0.0;
};

/// Solves the z-equation from z0 and the u-equation from <nabla>^beta z0 with
/// the same stepping, and compares u with <nabla>^beta z.
inline SubstitutionReport substitution_check(const SpectralField& z0, EvolutionConfig cfg) {
  if (cfg.save_every == 0) cfg.save_every = std::max(1, cfg.steps() / 10);
  auto run = [&](const EvolutionConfig& c, double& disc) {
    EvolutionConfig cz = c, cu = c;
    cz.form = Form::ZForm;
    cu.form = Form::UForm;
    const Trajectory tz = integrate(cz, z0);
    const Trajectory tu = integrate(cu, bessel_potential(c.beta, z0));
    disc = 0.0;
    for (std::size_t i = 0; i < tz.snapshots.size(); ++i)
      disc = std::max(disc, l2_norm(tu.snapshots[i].field - bessel_potential(c.beta, tz.snapshots[i].field)));
    return tu;
  };
  SubstitutionReport rep;
  rep.beta = cfg.beta;
  const Trajectory coarse = run(cfg, rep.discrepancy);
  EvolutionConfig half = cfg;
  half.dt = cfg.dt / 2;
  half.save_every = 2 * cfg.save_every;
  const Trajectory fine = run(half, rep.discrepancy_half);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < coarse.snapshots.size(); ++i) {
    diff = std::max(diff, l2_norm(coarse.snapshots[i].field - fine.snapshots[i].field));
    scale = std::max(scale, coarse.snapshots[i].l2);
  }
  rep.self_consistency = scale > 0.0 ? diff / scale : 0.0;
  return rep;
}

}  // namespace qnls
