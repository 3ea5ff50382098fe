#pragma once

#include "qnls/norms.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qnls {

/// Random field sitting at the logarithmic edge of H^sigma:
/// |c(xi)| = <xi>^{-sigma-1/2} on 0 <= |xi| < 2^top_band, uniform phases.
struct RoughDataSpec {
  double sigma = 0.0;
  std::uint64_t seed = 1;
  /// Fit window used for the generation-time check.
  int fit_lo = 2;
  int fit_hi = 6;
  /// Modes populated up to (excluding) 2^top_band, clipped at the alias guard.
  int top_band = 8;
  /// Target L^2 norm; <= 0 keeps the raw amplitude law.
  double l2 = 0.0;
  double tolerance = 0.05;
  /// Leave the xi = 0 mode empty. On the torus it is resonant with every
  /// other mode, a set of measure zero on the line.
  bool zero_mean = false;
};

inline SpectralField gen_rough_data(const RoughDataSpec& spec, const Grid& grid) {
  if (spec.fit_lo < 1 || spec.fit_hi - spec.fit_lo < 3 || spec.fit_hi > grid.max_band())
    throw std::invalid_argument("gen_rough_data: fit window must hold >= 4 resolved bands");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  const double xi_top = std::ldexp(1.0, spec.top_band);
  const int j_top = grid.guard_mode() - 1;
  SpectralField f(grid);
  for (int j = -j_top; j <= j_top; ++j) {
    const double xi = grid.spacing() * j;
    const double theta = phase(rng);  // drawn for every slot so the stream is layout-stable
    if (std::abs(xi) >= xi_top || (spec.zero_mean && j == 0)) continue;
    f.at(j) = std::polar(std::pow(japanese(xi), -spec.sigma - 0.5), theta);
  }
  if (spec.l2 > 0.0) f *= cplx(spec.l2 / l2_norm(f));

  DyadicProfile p = dyadic_profile(f, spec.fit_lo, spec.fit_hi);
  if (std::abs(p.regularity() - spec.sigma) > spec.tolerance)
    throw std::runtime_error("gen_rough_data: fitted regularity " + std::to_string(p.regularity()) +
                             " misses target " + std::to_string(spec.sigma) + "; widen the band range");
  return f;
}

}  // namespace qnls
