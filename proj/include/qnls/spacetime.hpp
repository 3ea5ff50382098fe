#pragma once

// Space-time fields on a periodic (t, x) window: X^{s,b} norms, mixed
// Lebesgue norms and box-localized random synthesis.

#include "qnls/multipliers.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnls {

enum class ParabolaSign { Plus, Minus };

inline double parabola_sign_value(ParabolaSign s) { return s == ParabolaSign::Plus ? 1.0 : -1.0; }

/// How the time dependence is made compatible with the periodic tau-grid.
///   None      raw samples, only b = 0 norms are meaningful
///   Smooth    multiplied by Phi((t - T_win/2) / T), T = T_win / 4
///   Periodic  synthesized as a trigonometric polynomial in t on [0, T_win)
enum class TimeCutoff { None, Smooth, Periodic };

inline std::string to_string(TimeCutoff c) {
  switch (c) {
    case TimeCutoff::None: return "none";
    case TimeCutoff::Smooth: return "smooth";
    case TimeCutoff::Periodic: return "periodic";
  }
  return "?";
}

struct TimeGrid {
  double t_win = 1.0;
  int n_t = 64;

  void validate() const {
    if (!(t_win > 0.0)) throw std::invalid_argument("TimeGrid: window length must be positive");
    if (n_t < 4 || (n_t & (n_t - 1)) != 0) throw std::invalid_argument("TimeGrid: n_t must be a power of two >= 4");
  }
  double dt() const { return t_win / n_t; }
  double time(int i) const { return i * dt(); }
  /// Discrete time frequency of slot m, spacing 2 pi / T_win.
  double tau(int m) const {
    const int mode = m < n_t / 2 ? m : m - n_t;
    return 2.0 * pi * mode / t_win;
  }
  double tau_period() const { return 2.0 * pi * n_t / t_win; }
};

/// u(t_i, x_m) stored row-major, one row per time sample.
struct SpaceTimeField {
  Grid grid;
  TimeGrid times;
  TimeCutoff cutoff = TimeCutoff::None;
  std::vector<cplx> values;

  SpaceTimeField(const Grid& g, const TimeGrid& tg)
      : grid(g), times(tg), values(static_cast<std::size_t>(g.size()) * static_cast<std::size_t>(tg.n_t)) {
    tg.validate();
  }

  int n_t() const { return times.n_t; }
  int n_x() const { return grid.size(); }
  std::span<cplx> row(int i) { return {values.data() + static_cast<std::size_t>(i) * n_x(), static_cast<std::size_t>(n_x())}; }
  std::span<const cplx> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * n_x(), static_cast<std::size_t>(n_x())};
  }
  SpectralField slice(int i) const { return to_spectral(row(i), grid); }
};

/// Samples t -> field(t) at the window's time nodes.
inline SpaceTimeField sample_space_time(const Grid& grid, const TimeGrid& tg,
                                        const std::function<SpectralField(double)>& field) {
  SpaceTimeField stf(grid, tg);
  for (int i = 0; i < tg.n_t; ++i) {
    const auto u = field(tg.time(i));
    if (!(u.grid() == grid)) throw std::invalid_argument("sample_space_time: field on a different grid");
    const auto phys = to_physical(u);
    std::copy(phys.begin(), phys.end(), stf.row(i).begin());
  }
  return stf;
}

/// Phi((t - T_win/2) / T) with T = T_win / 4; zero at both ends of the window.
inline double window_weight(const TimeGrid& tg, double t) {
  const double T = tg.t_win / 4.0;
  return lp::bump((t - 0.5 * tg.t_win) / T);
}

inline SpaceTimeField apply_cutoff(SpaceTimeField stf) {
  if (stf.cutoff != TimeCutoff::None) throw std::invalid_argument("apply_cutoff: field already carries a cutoff");
  for (int i = 0; i < stf.n_t(); ++i) {
    const double w = window_weight(stf.times, stf.times.time(i));
    for (auto& v : stf.row(i)) v *= w;
  }
  stf.cutoff = TimeCutoff::Smooth;
  return stf;
}

/// Phi-windowed free wave; the free evolution is centred on the middle of the window.
inline SpaceTimeField windowed_free_wave(const SpectralField& f, const TimeGrid& tg) {
  const double mid = 0.5 * tg.t_win;
  return apply_cutoff(sample_space_time(f.grid(), tg, [&](double t) { return free_propagate(t - mid, f); }));
}

inline SpaceTimeField conj(const SpaceTimeField& stf) {
  SpaceTimeField out = stf;
  for (auto& v : out.values) v = std::conj(v);
  return out;
}

namespace detail {

/// tau - sign xi^2 reduced to the aliased representative closest to zero.
inline double modulation(const TimeGrid& tg, double tau, double xi, double sign) {
  const double period = tg.tau_period();
  double d = tau - sign * xi * xi;
  d -= period * std::round(d / period);
  return d;
}

/// Space-time coefficients: forward transform in t and x, spatial part scaled by 1/n_x.
inline std::vector<cplx> space_time_spectrum(const SpaceTimeField& stf) {
  std::vector<cplx> spec = stf.values;
  fft::transform_2d(spec, stf.n_t(), stf.n_x(), fft::Direction::Forward);
  const double scale = 1.0 / stf.n_x();
  for (auto& c : spec) c *= scale;
  return spec;
}

}  // namespace detail

/// Discrete X^{s,b}_{tau = +-xi^2} norm:
///   sum_{m,j} <xi_j>^{2s} (1 + |tau_m -+ xi_j^2|)^{2b} |a_{m,j}|^2 * L * dt / n_t,
/// normalized so that b = 0 reproduces the L^2_t H^s_x quadrature norm.
inline double xsb_norm(double s, double b, const SpaceTimeField& stf, ParabolaSign sign = ParabolaSign::Plus) {
  if (b != 0.0 && stf.cutoff == TimeCutoff::None)
    throw std::invalid_argument("xsb_norm: b != 0 requires a temporal cutoff or periodic synthesis");
  const auto spec = detail::space_time_spectrum(stf);
  const double sg = parabola_sign_value(sign);
  double acc = 0.0;
  for (int m = 0; m < stf.n_t(); ++m) {
    const double tau = stf.times.tau(m);
    for (int j = 0; j < stf.n_x(); ++j) {
      const double xi = stf.grid.frequency(j);
      const double a2 = std::norm(spec[static_cast<std::size_t>(m) * stf.n_x() + j]);
      if (a2 == 0.0) continue;
      double w = s == 0.0 ? 1.0 : std::pow(1.0 + xi * xi, s);
      if (b != 0.0) w *= std::pow(1.0 + std::abs(detail::modulation(stf.times, tau, xi, sg)), 2.0 * b);
      acc += w * a2;
    }
  }
  return std::sqrt(acc * stf.grid.length() * stf.times.dt() / stf.n_t());
}

/// L^q_t L^r_x by rectangle quadrature; q or r = infinity uses max.
inline double mixed_norm(double q, double r, const SpaceTimeField& stf) {
  if (!(q >= 2.0) || !(r >= 2.0)) throw std::invalid_argument("mixed_norm: exponents must satisfy 2 <= q, r <= inf");
  const double dx = stf.grid.length() / stf.n_x();
  const double inf = std::numeric_limits<double>::infinity();
  double outer = 0.0;
  for (int i = 0; i < stf.n_t(); ++i) {
    double inner = 0.0;
    for (auto v : stf.row(i)) inner = r == inf ? std::max(inner, std::abs(v)) : inner + std::pow(std::abs(v), r);
    if (r != inf) inner = std::pow(inner * dx, 1.0 / r);
    outer = q == inf ? std::max(outer, inner) : outer + std::pow(inner, q);
  }
  return q == inf ? outer : std::pow(outer * stf.times.dt(), 1.0 / q);
}

/// Random Gaussian coefficients on the cells {N <= |xi| <= 2N, L <= |tau -+ xi^2| <= 2L}
/// of the periodic (tau, xi) lattice, unit L^2_{t,x} norm.
inline SpaceTimeField synth_boxed(double N, double L, ParabolaSign sign, std::uint64_t seed, const Grid& grid,
                                  const TimeGrid& tg) {
  if (!(N > 0.0) || !(L > 0.0)) throw std::invalid_argument("synth_boxed: N and L must be positive");
  SpaceTimeField stf(grid, tg);
  const double sg = parabola_sign_value(sign);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::size_t cells = 0;
  for (int m = 0; m < tg.n_t; ++m) {
    for (int j = 0; j < grid.size(); ++j) {
      const double xi = grid.frequency(j);
      if (j == grid.size() / 2 || std::abs(xi) < N || std::abs(xi) > 2.0 * N) continue;
      const double mod = std::abs(detail::modulation(tg, tg.tau(m), xi, sg));
      if (mod < L || mod > 2.0 * L) continue;
      const double re = nd(rng), im = nd(rng);
      stf.values[static_cast<std::size_t>(m) * grid.size() + j] = cplx(re, im);
      ++cells;
    }
  }
  if (cells == 0) throw std::invalid_argument("synth_boxed: no lattice cell falls inside the box");
  fft::transform_2d(stf.values, tg.n_t, grid.size(), fft::Direction::Backward);
  stf.cutoff = TimeCutoff::Periodic;
  const double norm = mixed_norm(2.0, 2.0, stf);
  for (auto& v : stf.values) v /= norm;
  return stf;
}

}  // namespace qnls
