#pragma once

// Quadratic Schrodinger flows u_t + i u_xx = N(u) on the periodic grid,
// integrated with the integrating-factor (Lawson) fourth-order Runge-Kutta
// scheme: the linear phase e^{i xi^2 t} is applied exactly and RK4 acts on the
// nonlinear term in the co-moving frame. Nonlinear terms are Galerkin-truncated
// to the alias guard, so states stay band-limited.

#include "qnls/bilinear.hpp"
#include "qnls/norms.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnls {

/// Which unknown the equation is written for.
///   UForm: u_t + i u_xx = <nabla>^beta [a(u) b(u)]
///   VForm: v = <nabla>^{-alpha} u, v_t + i v_xx = G(v, v) (conjugates per nonlinearity)
///   ZForm: z_t + i z_xx = <nabla>^beta z <nabla>^beta z (conjugates per nonlinearity)
enum class Form { UForm, VForm, ZForm };

inline std::string to_string(Form f) {
  switch (f) {
    case Form::UForm: return "u";
    case Form::VForm: return "v";
    case Form::ZForm: return "z";
  }
  return "?";
}

inline Form parse_form(const std::string& s) {
  if (s == "u") return Form::UForm;
  if (s == "v") return Form::VForm;
  if (s == "z") return Form::ZForm;
  throw std::invalid_argument("unknown form '" + s + "'");
}

class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvolutionConfig {
  double alpha = 0.6;
  double beta = 0.2;
  Nonlinearity nonlinearity = Nonlinearity::U2;
  Form form = Form::VForm;
  Grid grid = make_grid(1024);
  double dt = 1.25e-4;
  double t_final = 0.1;
  /// Snapshot cadence in steps; 0 saves only the endpoints.
  int save_every = 0;
  /// Multiplies the nonlinear term; 0 gives the free flow.
  double coupling = 1.0;
  /// Abort when the L^2 norm exceeds this multiple of its initial value.
  double blowup_factor = 1e6;
  /// Enforce beta in [0, 1/2) and alpha in (1/2, 1 - beta).
  bool strict_regime = false;

  int steps() const { return static_cast<int>(std::llround(t_final / dt)); }

  void validate() const {
    if (!(dt > 0.0) || !(t_final > 0.0)) throw std::invalid_argument("evolution: dt and t_final must be positive");
    if (std::abs(steps() * dt - t_final) > 1e-9 * t_final)
      throw std::invalid_argument("evolution: t_final must be a whole number of steps");
    const double xi_max = grid.spacing() * (grid.guard_mode() - 1);
    if (dt * xi_max * xi_max > 10.0)
      throw std::invalid_argument("evolution: dt * xi_max^2 = " + std::to_string(dt * xi_max * xi_max) +
                                  " exceeds the phase-resolution guard 10");
    if (save_every < 0) throw std::invalid_argument("evolution: save_every must be >= 0");
    if (strict_regime && !(beta >= 0.0 && beta < 0.5 && alpha > 0.5 && alpha < 1.0 - beta))
      throw std::invalid_argument("evolution: (alpha, beta) outside 1/2 < alpha < 1 - beta, 0 <= beta < 1/2");
  }
};

struct Snapshot {
  double t = 0.0;
  SpectralField field;
  double l2 = 0.0;
};

struct Trajectory {
  EvolutionConfig config;
  std::vector<Snapshot> snapshots;

  const Snapshot& back() const { return snapshots.back(); }
};

namespace detail {

/// (a, b) slot inputs for the nonlinearity, conjugated as required.
inline std::pair<SpectralField, SpectralField> slot_inputs(Nonlinearity n, const SpectralField& a,
                                                           const SpectralField& b) {
  switch (n) {
    case Nonlinearity::U2: return {a, b};
    case Nonlinearity::UUbar: return {a, conj(b)};
    case Nonlinearity::Ubar2: return {conj(a), conj(b)};
  }
  throw std::invalid_argument("bad nonlinearity");
}

}  // namespace detail

/// G(a, b) = <nabla>^{beta-alpha}[<nabla>^alpha a <nabla>^alpha b] by multiplier
/// composition with a zero-padded product, truncated to the guard. No
/// conjugation is applied here.
inline SpectralField g_apply(double alpha, double beta, const SpectralField& a, const SpectralField& b) {
  return dealias(
      bessel_potential(beta - alpha, product(bessel_potential(alpha, a), bessel_potential(alpha, b))));
}

/// Nonlinear term of the configured equation, Galerkin-truncated.
inline SpectralField rhs(const EvolutionConfig& cfg, const SpectralField& state) {
  if (!state.is_guarded()) throw std::invalid_argument("rhs: state violates the alias guard");
  auto [a, b] = detail::slot_inputs(cfg.nonlinearity, state, state);
  switch (cfg.form) {
    case Form::UForm: return dealias(bessel_potential(cfg.beta, product(a, b)));
    case Form::VForm: return g_apply(cfg.alpha, cfg.beta, a, b);
    case Form::ZForm: return dealias(product(bessel_potential(cfg.beta, a), bessel_potential(cfg.beta, b)));
  }
  throw std::invalid_argument("rhs: bad form");
}

using TimeDependentRhs = std::function<SpectralField(double t, const SpectralField& state)>;

/// One Lawson RK4 step for y_t + i y_xx = F(t, y).
inline SpectralField lawson_rk4_step(const TimeDependentRhs& F, double t, const SpectralField& y, double h) {
  const auto E = [](double s, const SpectralField& f) { return free_propagate(s, f); };
  const SpectralField k1 = F(t, y);
  const SpectralField y_half = E(h / 2, y);
  const SpectralField k1_half = E(h / 2, k1);
  const SpectralField k2 = F(t + h / 2, y_half + cplx(h / 2) * k1_half);
  const SpectralField k3 = F(t + h / 2, y_half + cplx(h / 2) * k2);
  const SpectralField k4 = F(t + h, E(h, y) + cplx(h) * E(h / 2, k3));
  SpectralField next = E(h, y);
  next += cplx(h / 6) * (E(h, k1) + cplx(2.0) * E(h / 2, k2 + k3) + k4);
  return next;
}

/// Integrates y_t + i y_xx = F(t, y) from y(0) = initial, recording snapshots.
inline Trajectory integrate_with(const EvolutionConfig& cfg, const SpectralField& initial, const TimeDependentRhs& F) {
  cfg.validate();
  if (!(initial.grid() == cfg.grid)) throw std::invalid_argument("integrate: initial data on a different grid");
  if (!initial.is_guarded()) throw std::invalid_argument("integrate: initial data violates the alias guard");
  Trajectory traj{cfg, {}};
  const double l2_0 = l2_norm(initial);
  const double limit = cfg.blowup_factor * std::max(l2_0, 1e-300);
  SpectralField y = dealias(initial);
  traj.snapshots.push_back({0.0, y, l2_0});
  const int n = cfg.steps();
  for (int step = 1; step <= n; ++step) {
    const double t0 = (step - 1) * cfg.dt;
    y = lawson_rk4_step(F, t0, y, cfg.dt);
    const double l2 = l2_norm(y);
    if (!std::isfinite(l2) || (l2_0 > 0.0 && l2 > limit))
      throw BlowUpError("integrate: L2 norm " + std::to_string(l2) + " at t = " + std::to_string(step * cfg.dt) +
                        " exceeds " + std::to_string(cfg.blowup_factor) + "x the initial norm " +
                        std::to_string(l2_0));
    if (step == n || (cfg.save_every > 0 && step % cfg.save_every == 0))
      traj.snapshots.push_back({step * cfg.dt, y, l2});
  }
  return traj;
}

inline Trajectory integrate(const EvolutionConfig& cfg, const SpectralField& initial) {
  if (cfg.coupling == 0.0) {
    return integrate_with(cfg, initial, [&](double, const SpectralField& y) { return SpectralField(y.grid()); });
  }
  return integrate_with(cfg, initial, [&](double, const SpectralField& y) {
    auto out = rhs(cfg, y);
    if (cfg.coupling != 1.0) out *= cplx(cfg.coupling);
    return out;
  });
}

/// h(t) = T(e^{-it d_xx} f, e^{-it d_xx} f) in closed form.
inline SpectralField normal_form_h(const SpectralField& f, double t, double alpha, double beta, Nonlinearity kind) {
  const SpectralField U = free_propagate(t, f);
  return apply_bilinear(t_symbol(kind, alpha, beta), U, U);
}

/// Closed-form normal form evaluated repeatedly on one grid; the output is
/// Galerkin-truncated so it lives in the same space as the evolved state.
class NormalForm {
 public:
  NormalForm(const SpectralField& f, double alpha, double beta, Nonlinearity kind)
      : f_(f), table_(t_symbol(kind, alpha, beta), f.grid()),
        forcing_(forcing_symbol(g_symbol(alpha, beta), table_.symbol()), f.grid()) {}

  SpectralField free(double t) const { return free_propagate(t, f_); }
  SpectralField h(double t) const {
    const auto U = free(t);
    return dealias(table_.apply(U, U));
  }
  /// The part of G(U, U) that h removes: (d_t + i d_xx) h.
  SpectralField forcing(double t) const {
    const auto U = free(t);
    return dealias(forcing_.apply(U, U));
  }
  const SpectralField& data() const { return f_; }

 private:
  SpectralField f_;
  BilinearTable table_;
  BilinearTable forcing_;
};

struct Decomposition {
  std::vector<double> times;
  std::vector<SpectralField> free, h, w;
  /// ||w(0) + T(f, f)|| / ||T(f, f)||
  double initial_defect = 0.0;
};

/// v = free + h + w along a v-form trajectory started from f.
inline Decomposition decompose(const Trajectory& traj, const SpectralField& f) {
  if (traj.config.form != Form::VForm) throw std::invalid_argument("decompose: trajectory must be in v-form");
  if (traj.snapshots.empty() || l2_norm(traj.snapshots.front().field - dealias(f)) > 1e-12 * (1.0 + l2_norm(f)))
    throw std::invalid_argument("decompose: trajectory was not started from f");
  const NormalForm nf(f, traj.config.alpha, traj.config.beta, traj.config.nonlinearity);
  Decomposition d;
  for (const auto& s : traj.snapshots) {
    d.times.push_back(s.t);
    d.free.push_back(nf.free(s.t));
    d.h.push_back(nf.h(s.t));
    d.w.push_back(s.field - d.free.back() - d.h.back());
  }
  const auto h0 = nf.h(0.0);
  const double n0 = l2_norm(h0);
  d.initial_defect = l2_norm(d.w.front() + h0) / (n0 > 0 ? n0 : 1.0);
  return d;
}

/// The eight groups of the w-equation for the u^2 nonlinearity (v-form),
/// split with the positive-frequency part P and its complement L = Id - P:
///   N1 = G(L[U + w], (Id + P)[U + h + w])   N2 = G(L h, (Id + P)[h + w])
///   N3 = G(L h, (Id + P) U)                 N4 = 2 G(P U, P h)
///   N5 = 2 G(P U, P w)                      N6 = G(P h, P h)
///   N7 = 2 G(P h, P w)                      N8 = G(P w, P w)
/// with U = e^{-it d_xx} f.
inline std::array<SpectralField, 8> rhs_groups(const SpectralField& f, const SpectralField& h, const SpectralField& w,
                                               double t, double alpha, double beta) {
  f.check_same_grid(h);
  f.check_same_grid(w);
  const SpectralField U = free_propagate(t, f);
  const auto P = [](const SpectralField& x) { return positive_part(x); };
  const auto L = [](const SpectralField& x) { return x - positive_part(x); };
  const auto IdP = [](const SpectralField& x) { return x + positive_part(x); };
  const auto G = [&](const SpectralField& a, const SpectralField& b) { return g_apply(alpha, beta, a, b); };
  const SpectralField Ph = P(h), Pw = P(w), PU = P(U), Lh = L(h);
  return {G(L(U + w), IdP(U + h + w)),
          G(Lh, IdP(h + w)),
          G(Lh, IdP(U)),
          cplx(2.0) * G(PU, Ph),
          cplx(2.0) * G(PU, Pw),
          G(Ph, Ph),
          cplx(2.0) * G(Ph, Pw),
          G(Pw, Pw)};
}

/// Full right-hand side of the w-equation, reassembled directly:
/// N(U + h + w) - (d_t + i d_xx) h.
inline SpectralField w_equation_rhs(const EvolutionConfig& cfg, const NormalForm& nf, double t,
                                    const SpectralField& w) {
  return rhs(cfg, nf.free(t) + nf.h(t) + w) - nf.forcing(t);
}

/// Integrates the w-equation directly from w(0) = -T(f, f). For u^2 in v-form
/// the right-hand side is the sum of the groups selected by `groups`
/// (bit j-1 for N_j); otherwise the reassembled form is used.
inline Trajectory direct_w_solve(const EvolutionConfig& cfg, const SpectralField& f, unsigned groups = 0xFFu) {
  if (cfg.form != Form::VForm) throw std::invalid_argument("direct_w_solve: requires v-form");
  if (cfg.coupling != 1.0) throw std::invalid_argument("direct_w_solve: requires unit coupling");
  const NormalForm nf(f, cfg.alpha, cfg.beta, cfg.nonlinearity);
  const SpectralField w0 = cplx(-1.0) * nf.h(0.0);
  if (cfg.nonlinearity == Nonlinearity::U2) {
    return integrate_with(cfg, w0, [&](double t, const SpectralField& w) {
      const auto parts = rhs_groups(nf.data(), nf.h(t), w, t, cfg.alpha, cfg.beta);
      SpectralField sum(w.grid());
      for (int j = 0; j < 8; ++j)
        if (groups & (1u << j)) sum += parts[static_cast<std::size_t>(j)];
      return sum;
    });
  }
  if (groups != 0xFFu) throw std::invalid_argument("direct_w_solve: group selection needs the u2 nonlinearity");
  return integrate_with(cfg, w0, [&](double t, const SpectralField& w) { return w_equation_rhs(cfg, nf, t, w); });
}

}  // namespace qnls
