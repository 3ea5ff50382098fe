#pragma once

#include "qnls/multipliers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnls {

/// ||<nabla>^s u||_{L^2(0, length)}.
inline double sobolev_norm(double s, const SpectralField& field) {
  const Grid& g = field.grid();
  double acc = 0.0;
  for (int slot = 0; slot < g.size(); ++slot) {
    const double xi = g.frequency(slot);
    acc += std::pow(1.0 + xi * xi, s) * std::norm(field.coeffs()[static_cast<std::size_t>(slot)]);
  }
  return std::sqrt(g.length() * acc);
}

/// Ordinary least-squares line y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root-mean-square of the residuals.
  double residual = 0.0;
  /// Standard error of the slope (0 with two points).
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  if (x.size() > 2) f.slope_stderr = std::sqrt(ss / (n - 2.0) / sxx);
  return f;
}

/// Band energies ||P_k u||_{L^2} over [k_lo, k_hi] plus the low piece, and the
/// log2-linear fit whose negated slope is the measured regularity.
struct DyadicProfile {
  int k_lo = 0;
  int k_hi = 0;
  double low_energy = 0.0;
  std::vector<double> energies;   // index k - k_lo
  std::vector<int> excluded;      // bands with zero energy
  LineFit fit;

  double energy(int k) const { return energies.at(static_cast<std::size_t>(k - k_lo)); }
  double regularity() const { return -fit.slope; }
};

/// Energies without a fit.
inline DyadicProfile band_energies(const SpectralField& field, int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("dyadic_profile: bad band range");
  DyadicProfile p;
  p.k_lo = k_lo;
  p.k_hi = k_hi;
  p.low_energy = l2_norm(lp_low(field));
  for (int k = k_lo; k <= k_hi; ++k) p.energies.push_back(l2_norm(lp_project(k, field)));
  return p;
}

/// Fits log2 e_k against k over the nonzero bands of the profile.
inline LineFit regularity_fit(DyadicProfile& profile) {
  std::vector<double> x, y;
  profile.excluded.clear();
  double peak = 0.0;
  for (double e : profile.energies) peak = std::max(peak, e);
  for (int k = profile.k_lo; k <= profile.k_hi; ++k) {
    const double e = profile.energy(k);
    if (e <= 1e-300 || e <= 1e-14 * peak) {
      profile.excluded.push_back(k);
      continue;
    }
    x.push_back(k);
    y.push_back(std::log2(e));
  }
  if (x.size() < 4)
    throw std::invalid_argument("regularity_fit: " + std::to_string(x.size()) + " nonzero bands, need at least 4");
  profile.fit = fit_line(x, y);
  return profile.fit;
}

inline DyadicProfile dyadic_profile(const SpectralField& field, int k_lo, int k_hi) {
  DyadicProfile p = band_energies(field, k_lo, k_hi);
  regularity_fit(p);
  return p;
}

}  // namespace qnls
