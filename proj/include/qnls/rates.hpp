#pragma once

// Randomized dyadic-rate experiments for the bilinear L^2 product estimates.
//
// Inputs are windowed, modulated free waves Phi(t/T) e^{i lambda t} e^{-it d_xx} f
// with f a narrow-band random packet (Gaussian envelope times a random
// trigonometric polynomial).  The line is emulated by a long period: the
// product norm is integrated only over times before any periodic re-encounter,
// by which point the transversal packets have separated.  X^{0,b} norms follow
// from the exact factorization u~(tau, xi) = f^(xi) psi^(tau - xi^2).

#include "qnls/multipliers.hpp"
#include "qnls/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qnls {

enum class RateKind { Gain1, Gain2, Gain3, Kkk1, Kkk2, Kkk3, Kkkk1, Kkkk2, Kkkk3, PlusMinus };

inline constexpr std::array<RateKind, 10> all_rate_kinds{RateKind::Gain1, RateKind::Gain2, RateKind::Gain3,
                                                         RateKind::Kkk1,  RateKind::Kkk2,  RateKind::Kkk3,
                                                         RateKind::Kkkk1, RateKind::Kkkk2, RateKind::Kkkk3,
                                                         RateKind::PlusMinus};

inline std::string to_string(RateKind k) {
  switch (k) {
    case RateKind::Gain1: return "gain1";
    case RateKind::Gain2: return "gain2";
    case RateKind::Gain3: return "gain3";
    case RateKind::Kkk1: return "kkk1";
    case RateKind::Kkk2: return "kkk2";
    case RateKind::Kkk3: return "kkk3";
    case RateKind::Kkkk1: return "kkkk1";
    case RateKind::Kkkk2: return "kkkk2";
    case RateKind::Kkkk3: return "kkkk3";
    case RateKind::PlusMinus: return "plusminus";
  }
  return "?";
}

inline RateKind parse_rate_kind(const std::string& s) {
  for (auto k : all_rate_kinds)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown rate kind '" + s + "'");
}

/// Exponent of 2^k in the estimate's constant.
inline double predicted_slope(RateKind k, double delta) {
  switch (k) {
    case RateKind::Gain1:
    case RateKind::Gain2:
    case RateKind::Kkk1:
    case RateKind::Kkk2:
    case RateKind::PlusMinus: return -(0.5 - delta);
    case RateKind::Gain3:
    case RateKind::Kkk3: return 0.0;
    case RateKind::Kkkk1:
    case RateKind::Kkkk2: return -(0.5 - 5 * delta);
    case RateKind::Kkkk3: return 2 * delta;
  }
  return 0.0;
}

struct RateOptions {
  double domain_length = 64 * pi;
  /// Width s of the Gaussian envelope e^{-x^2 / 2 s^2}.
  double envelope = 6.0;
  /// Random frequencies c + j * mode_spacing, |j| <= half_width, around the packet centre c.
  int half_width = 1;
  double mode_spacing = 0.25;
  /// Temporal cutoff Phi(t/T).
  double window_T = 1.0;
  /// Modulation of both inputs (inside [L, 2L] with L = 1).
  double modulation = 1.5;
  int time_samples = 129;
  int threads = 1;
  std::uint64_t seed = 1;
  /// Scales every input; 0 gives the degenerate all-zero experiment.
  double amplitude = 1.0;
  /// Largest grid the experiment may allocate.
  int max_points = 1 << 18;
};

struct RatePoint {
  int k = 0;
  std::vector<double> ratios;
  double median = 0.0;
  /// Largest |integrand| at the ends of the time range relative to its peak.
  double tail = 0.0;
};

struct RateReport {
  RateKind kind = RateKind::Gain1;
  double delta = 0.05;
  int n_seeds = 0;
  std::vector<RatePoint> points;
  double slope = 0.0;
  /// 95% half-width of the slope.
  double ci = 0.0;
  bool degenerate = false;
};

namespace rates_detail {

/// Two-sided 95% Student t quantile.
inline double t_quantile(int dof) {
  static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                     2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086};
  if (dof < 1) return std::numeric_limits<double>::infinity();
  return dof <= 20 ? table[dof - 1] : 1.96 + 2.4 / dof;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

enum class Proj { Id, Band, Near, FarBelow, NearPlus, NearMinus };

inline SpectralField project(Proj p, int k, const SpectralField& f) {
  switch (p) {
    case Proj::Id: return f;
    case Proj::Band: return lp_project(k, f);
    case Proj::Near: return lp_near(k, f);
    case Proj::FarBelow: return lp_far_below(k, f);
    case Proj::NearPlus: return sign_project(Sign::Plus, lp_near(k, f));
    case Proj::NearMinus: return sign_project(Sign::Minus, lp_near(k, f));
  }
  return f;
}

/// Localization pattern of one estimate: packet centres in units of 2^k, the
/// projections applied to u, v and the product, and which X-norm v carries.
struct Pattern {
  double u_centre, v_centre;
  Proj pu, pv, pout;
  bool conj_v;
  bool v_below_half;  // v normalized in X^{0,1/2-delta}
};

inline Pattern pattern(RateKind kind) {
  using P = Proj;
  switch (kind) {
    case RateKind::Gain1: return {1.0, 0.0, P::Band, P::FarBelow, P::Near, false, false};
    case RateKind::Gain2: return {1.0, -1.0, P::Band, P::Near, P::FarBelow, false, false};
    case RateKind::Gain3: return {1.0, 1.0, P::Band, P::Id, P::Id, false, false};
    case RateKind::Kkk1: return {0.8, -0.8, P::Band, P::Band, P::Band, true, false};
    case RateKind::Kkk2: return {1.0, 0.0, P::Band, P::FarBelow, P::Band, true, false};
    case RateKind::Kkk3: return {1.0, 1.0, P::Band, P::Id, P::Id, true, false};
    case RateKind::Kkkk1: return {0.8, -0.8, P::Band, P::Band, P::Band, true, true};
    case RateKind::Kkkk2: return {1.0, 0.0, P::Band, P::FarBelow, P::Band, true, true};
    case RateKind::Kkkk3: return {1.0, 1.0, P::Band, P::Id, P::Id, true, true};
    case RateKind::PlusMinus: return {1.5, -0.75, P::NearPlus, P::NearMinus, P::Near, false, false};
  }
  throw std::invalid_argument("rate pattern: unknown kind");
}

/// ||Phi(t/T) e^{i lambda t}||_{H^b_t}, the X^{0,b} norm of a windowed
/// modulated free wave per unit L^2 data.
inline double window_factor(double b, double lambda, double T, int log2_points = 18, double pad = 256.0) {
  const int n = 1 << log2_points;
  const double len = pad * T;
  const double dt = len / n;
  std::vector<cplx> psi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = (i < n / 2 ? i : i - n) * dt;
    psi[static_cast<std::size_t>(i)] = lp::bump(t / T) * std::polar(1.0, lambda * t);
  }
  fft::transform(psi, fft::Direction::Forward);
  double acc = 0.0;
  for (int m = 0; m < n; ++m) {
    const double tau = 2.0 * pi * (m < n / 2 ? m : m - n) / len;
    acc += std::pow(1.0 + std::abs(tau), 2.0 * b) * std::norm(psi[static_cast<std::size_t>(m)] * dt);
  }
  return std::sqrt(acc / len);
}

/// Envelope times random trigonometric polynomial, built in Fourier space.
inline SpectralField packet(const Grid& g, int centre, int half_width, double spacing, double s,
                            double amplitude, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> c(static_cast<std::size_t>(2 * half_width + 1));
  for (auto& x : c) x = cplx(nd(rng), nd(rng));
  SpectralField f(g);
  const double h = g.spacing();
  const double reach = half_width * spacing + 9.0 / s;
  const int m_lo = static_cast<int>(std::floor((centre - reach) / h));
  const int m_hi = static_cast<int>(std::ceil((centre + reach) / h));
  for (int m = m_lo; m <= m_hi; ++m) {
    if (!g.has_mode(m) || m == -g.size() / 2) continue;
    const double xi = m * h;
    cplx acc = 0.0;
    for (int j = -half_width; j <= half_width; ++j) {
      const double d = xi - (centre + j * spacing);
      acc += c[static_cast<std::size_t>(j + half_width)] * std::exp(-0.5 * d * d * s * s);
    }
    f.at(m) = amplitude * acc;
  }
  return f;
}

inline SpectralField multiplier_weights(Proj p, int k, const Grid& g) {
  SpectralField ones(g);
  for (auto& c : ones.coeffs()) c = 1.0;
  ones.zero_nyquist();
  return project(p, k, ones);
}

inline std::uint64_t cell_seed(std::uint64_t base, int k, int replica) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(replica)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

struct Cell {
  double ratio = 0.0;
  double tail = 0.0;
};

/// Plan for one band: grid, time range, projection weights.
struct BandPlan {
  Grid grid;
  int k;
  int u_centre, v_centre;
  double t_max;
  SpectralField w_out;
};

inline BandPlan plan_band(const Pattern& pat, int k, const RateOptions& opt) {
  const double scale = std::ldexp(1.0, k);
  const int uc = static_cast<int>(std::lround(pat.u_centre * scale));
  const int vc = static_cast<int>(std::lround(pat.v_centre * scale));
  const double reach = opt.half_width * opt.mode_spacing + 9.0 / opt.envelope;
  // Product support bound decides the grid: no wrap-around of u v.
  const double xi_max = std::abs(uc) + std::abs(vc) + 2.0 * reach + 1.0;
  const double h = 2.0 * pi / opt.domain_length;
  int n = 64;
  while (0.5 * n * h <= xi_max) n *= 2;
  if (n > opt.max_points)
    throw std::invalid_argument("rate experiment: band " + std::to_string(k) + " needs more than " +
                                std::to_string(opt.max_points) + " points");
  const Grid g = make_grid(n, opt.domain_length);
  if (k > g.max_band()) throw std::invalid_argument("rate experiment: band " + std::to_string(k) + " unresolved");

  // Group velocity of mode xi is -2 xi.  Conjugation does not move a packet.
  const double core = opt.half_width * opt.mode_spacing + 3.0 / opt.envelope;
  const double gap = std::abs(uc - vc);
  const double v_rel_min = 2.0 * std::max(0.0, gap - 2.0 * core);
  const double v_rel_max = 2.0 * (gap + 2.0 * core);
  const double extent = 10.0 * opt.envelope;
  double t_max = 2.0 * opt.window_T;
  const double t_wrap = (opt.domain_length - extent) / v_rel_max;
  if (t_wrap < t_max) {
    if (v_rel_min <= 0.0) throw std::invalid_argument("rate experiment: period too short for the packet pair");
    const double t_end = extent / v_rel_min;
    if (t_end >= t_wrap) throw std::invalid_argument("rate experiment: packets re-encounter before separating");
    t_max = std::min(t_wrap, 2.0 * t_end);
  }
  return {g, k, uc, vc, t_max, multiplier_weights(pat.pout, k, g)};
}

/// c_u, c_v: window factors of the two inputs.
inline Cell run_cell(const Pattern& pat, const BandPlan& plan, std::uint64_t seed, double c_u, double c_v,
                     const RateOptions& opt) {
  std::mt19937_64 rng(seed);
  const Grid& g = plan.grid;
  const auto fu = project(pat.pu, plan.k, packet(g, plan.u_centre, opt.half_width, opt.mode_spacing, opt.envelope, opt.amplitude, rng));
  const auto fv = project(pat.pv, plan.k, packet(g, plan.v_centre, opt.half_width, opt.mode_spacing, opt.envelope, opt.amplitude, rng));
  const double xu = c_u * l2_norm(fu);
  const double xv = c_v * l2_norm(fv);
  if (xu == 0.0 || xv == 0.0) return {};

  const int ns = opt.time_samples;
  const double ds = 2.0 * plan.t_max / (ns - 1);
  std::vector<double> integrand(static_cast<std::size_t>(ns));
  for (int i = 0; i < ns; ++i) {
    const double s = -plan.t_max + i * ds;
    const double w = lp::bump(s / opt.window_T);
    if (w == 0.0) continue;
    auto a = to_physical(free_propagate(s, fu));
    const auto b = to_physical(free_propagate(s, fv));
    for (std::size_t m = 0; m < a.size(); ++m) a[m] *= pat.conj_v ? std::conj(b[m]) : b[m];
    auto prod = to_spectral(a, g);
    auto pc = prod.coeffs();
    auto wc = plan.w_out.coeffs();
    for (std::size_t m = 0; m < pc.size(); ++m) pc[m] *= wc[m];
    integrand[static_cast<std::size_t>(i)] = std::pow(w, 4) * std::pow(l2_norm(prod), 2);
  }
  double acc = 0.0;
  for (int i = 0; i < ns; ++i) acc += (i == 0 || i == ns - 1 ? 0.5 : 1.0) * integrand[static_cast<std::size_t>(i)];
  acc *= ds;
  const double peak = *std::max_element(integrand.begin(), integrand.end());
  const double tail = peak > 0 ? std::max(integrand.front(), integrand.back()) / peak : 0.0;
  return {std::sqrt(acc) / (xu * xv), tail};
}

}  // namespace rates_detail

/// Ensemble medians of ||localized product||_{L^2} / (||u||_X ||v||_X) per band,
/// and the regression slope of log2(median) against k.
inline RateReport product_rate_experiment(RateKind kind, int k_lo, int k_hi, double delta, int n_seeds,
                                          const RateOptions& opt = {}) {
  using namespace rates_detail;
  if (n_seeds < 8) throw std::invalid_argument("rate experiment: ensemble must hold >= 8 seeds");
  if (k_lo < 1 || k_hi - k_lo < 2) throw std::invalid_argument("rate experiment: need >= 3 bands, k >= 1");
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("rate experiment: delta must lie in (0, 1/2)");
  if (opt.time_samples < 9) throw std::invalid_argument("rate experiment: too few time samples");
  const Pattern pat = pattern(kind);
  const double b_u = 0.5 + delta;
  const double b_v = pat.v_below_half ? 0.5 - delta : 0.5 + delta;
  const double c_u = window_factor(b_u, opt.modulation, opt.window_T);
  const double c_v = window_factor(b_v, opt.modulation, opt.window_T);

  RateReport rep;
  rep.kind = kind;
  rep.delta = delta;
  rep.n_seeds = n_seeds;
  for (int k = k_lo; k <= k_hi; ++k) {
    const BandPlan plan = plan_band(pat, k, opt);
    std::vector<Cell> cells(static_cast<std::size_t>(n_seeds));
    const int workers = std::clamp(opt.threads, 1, n_seeds);
    auto work = [&](int w) {
      for (int r = w; r < n_seeds; r += workers)
        cells[static_cast<std::size_t>(r)] = run_cell(pat, plan, cell_seed(opt.seed, k, r), c_u, c_v, opt);
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    RatePoint pt;
    pt.k = k;
    for (const auto& c : cells) {
      pt.ratios.push_back(c.ratio);
      pt.tail = std::max(pt.tail, c.tail);
    }
    pt.median = median(pt.ratios);
    rep.points.push_back(std::move(pt));
  }

  std::vector<double> ks, logs;
  for (const auto& p : rep.points) {
    if (!(p.median > 0.0)) {
      rep.degenerate = true;
      break;
    }
    ks.push_back(p.k);
    logs.push_back(std::log2(p.median));
  }
  if (!rep.degenerate) {
    const LineFit fit = fit_line(ks, logs);
    rep.slope = fit.slope;
    rep.ci = t_quantile(static_cast<int>(ks.size()) - 2) * fit.slope_stderr;
  }
  return rep;
}

}  // namespace qnls
