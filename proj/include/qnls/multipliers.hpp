#pragma once

// Fourier multipliers on the periodic grid: Bessel potentials, the
// Littlewood-Paley family, sign projections and the free propagator.

#include "qnls/grid.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace qnls {

/// <xi> = (1 + xi^2)^{1/2}
inline double japanese(double xi) { return std::sqrt(1.0 + xi * xi); }

/// Applies the real multiplier weight(xi) to every coefficient.
template <class Weight>
SpectralField apply_multiplier(const SpectralField& field, Weight&& weight) {
  const Grid& g = field.grid();
  SpectralField out(g);
  auto src = field.coeffs();
  auto dst = out.coeffs();
  for (int s = 0; s < g.size(); ++s) dst[static_cast<std::size_t>(s)] = weight(g.frequency(s)) * src[static_cast<std::size_t>(s)];
  out.zero_nyquist();
  return out;
}

/// <nabla>^s
inline SpectralField bessel_potential(double s, const SpectralField& field) {
  if (s == 0.0) return field;
  return apply_multiplier(field, [s](double xi) { return std::pow(1.0 + xi * xi, 0.5 * s); });
}

namespace lp {

/// Smooth even bump: 1 on |xi| <= 1, 0 on |xi| >= 2.
inline double bump(double xi) {
  const double a = std::abs(xi);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double r = a - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

/// Annulus bump Phi(xi) - Phi(2 xi), supported in 1/2 <= |xi| <= 2.
inline double annulus(double xi) { return bump(xi) - bump(2.0 * xi); }

/// Weight of dyadic band k at xi; band 0 is the low-frequency piece Phi.
inline double band_weight(int k, double xi) {
  return k == 0 ? bump(xi) : annulus(std::ldexp(xi, -k));
}

inline void require_band_resolved(int k, const Grid& g) {
  if (k < 0 || k > g.max_band())
    throw std::invalid_argument("lp: band " + std::to_string(k) + " is not resolved on a grid of " +
                                std::to_string(g.size()) + " points");
}

}  // namespace lp

/// P_k, k >= 1.
inline SpectralField lp_project(int k, const SpectralField& field) {
  if (k < 1) throw std::invalid_argument("lp_project: band index must be >= 1");
  lp::require_band_resolved(k, field.grid());
  return apply_multiplier(field, [k](double xi) { return lp::band_weight(k, xi); });
}

/// P_{<=0}.
inline SpectralField lp_low(const SpectralField& field) {
  return apply_multiplier(field, [](double xi) { return lp::bump(xi); });
}

/// Sum of P_k over bands k (0 = low piece) selected by the predicate. Bands are
/// enumerated up to the highest band that touches the grid.
inline SpectralField lp_range(const std::function<bool(int)>& select, const SpectralField& field) {
  const Grid& g = field.grid();
  const double xi_max = g.spacing() * (g.size() / 2);
  const int k_top = static_cast<int>(std::ceil(std::log2(std::max(xi_max, 1.0)))) + 1;
  std::vector<int> bands;
  for (int k = 0; k <= k_top; ++k)
    if (select(k)) bands.push_back(k);
  return apply_multiplier(field, [&bands](double xi) {
    double w = 0.0;
    for (int k : bands) w += lp::band_weight(k, xi);
    return w;
  });
}

/// P_{>0}
inline SpectralField lp_high(const SpectralField& field) {
  return lp_range([](int k) { return k >= 1; }, field);
}
/// P_{~k}: bands within distance 3 of k.
inline SpectralField lp_near(int k, const SpectralField& field) {
  return lp_range([k](int j) { return std::abs(j - k) <= 3; }, field);
}
/// P_{<<k}: bands j <= k - 6 together with the low piece, which is always kept.
inline SpectralField lp_far_below(int k, const SpectralField& field) {
  return lp_range([k](int j) { return j == 0 || j <= k - 6; }, field);
}

enum class Sign { Plus, Minus };

/// Hard cutoff to xi > 0 (Plus) or xi < 0 (Minus); the zero mode is in neither.
inline SpectralField sign_project(Sign sign, const SpectralField& field) {
  return apply_multiplier(field, [sign](double xi) {
    return sign == Sign::Plus ? (xi > 0.0 ? 1.0 : 0.0) : (xi < 0.0 ? 1.0 : 0.0);
  });
}

/// Galerkin truncation to the modes |j| < guard_mode().
inline SpectralField dealias(const SpectralField& field) {
  const Grid& g = field.grid();
  SpectralField out = field;
  for (int s = 0; s < g.size(); ++s)
    if (std::abs(g.mode(s)) >= g.guard_mode()) out.coeffs()[static_cast<std::size_t>(s)] = 0.0;
  return out;
}

/// Hard positive-frequency part (xi >= 1/2) used by the normal-form splitting;
/// its complement is field - positive_part(field).
inline SpectralField positive_part(const SpectralField& field) {
  return apply_multiplier(field, [](double xi) { return xi >= 0.5 ? 1.0 : 0.0; });
}

/// Solution operator of u_t + i u_xx = 0: coefficient phase e^{i xi^2 t}.
inline SpectralField free_propagate(double t, const SpectralField& field) {
  if (t == 0.0) return field;
  const Grid& g = field.grid();
  SpectralField out(g);
  auto src = field.coeffs();
  auto dst = out.coeffs();
  for (int s = 0; s < g.size(); ++s) {
    const double xi = g.frequency(s);
    dst[static_cast<std::size_t>(s)] = std::polar(1.0, xi * xi * t) * src[static_cast<std::size_t>(s)];
  }
  out.zero_nyquist();
  return out;
}

}  // namespace qnls
