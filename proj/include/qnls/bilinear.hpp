#pragma once

// Bilinear Fourier-symbol operators B(u, v) with output coefficient
//   B(u,v)^(zeta) = sum_{xi + eta = zeta} m(xi, eta) a(xi) b(eta),
// where a, b are the spectra of u, v or of their complex conjugates.

#include "qnls/multipliers.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace qnls {

struct BilinearSymbol {
  using Weight = std::function<cplx(double xi, double eta)>;
  using Region = std::function<bool(double xi, double eta)>;

  std::string name;
  Weight weight;
  bool conj_first = false;
  bool conj_second = false;
  /// Admissible (xi, eta) in effective frequencies; empty means everything.
  /// Input and output cutoffs are folded into this predicate.
  Region admissible;

  bool admits(double xi, double eta) const { return !admissible || admissible(xi, eta); }
  cplx operator()(double xi, double eta) const { return admits(xi, eta) ? weight(xi, eta) : cplx{0.0}; }
};

namespace detail {

/// Effective spectrum: v^ or, for a conjugated slot, conj(v^(-j)).
inline SpectralField effective_spectrum(const SpectralField& v, bool conjugated) {
  return conjugated ? conj(v) : v;
}

inline void require_guarded(const SpectralField& f, const char* who) {
  if (!f.is_guarded())
    throw std::invalid_argument(std::string(who) + ": input is not band-limited below the alias guard");
}

}  // namespace detail

/// Direct O(N^2) evaluation. Inputs must sit below the alias guard so every
/// output mode is representable.
inline SpectralField apply_bilinear(const BilinearSymbol& sym, const SpectralField& u, const SpectralField& v) {
  u.check_same_grid(v);
  detail::require_guarded(u, "apply_bilinear");
  detail::require_guarded(v, "apply_bilinear");
  const Grid& g = u.grid();
  const SpectralField a = detail::effective_spectrum(u, sym.conj_first);
  const SpectralField b = detail::effective_spectrum(v, sym.conj_second);
  const int top = g.guard_mode() - 1;
  const double dk = g.spacing();

  std::vector<int> active_b;
  for (int j = -top; j <= top; ++j)
    if (b.at(j) != cplx{0.0}) active_b.push_back(j);

  SpectralField out(g);
  for (int j1 = -top; j1 <= top; ++j1) {
    const cplx a1 = a.at(j1);
    if (a1 == cplx{0.0}) continue;
    const double xi = dk * j1;
    for (int j2 : active_b) {
      const double eta = dk * j2;
      if (!sym.admits(xi, eta)) continue;
      out.at(j1 + j2) += sym.weight(xi, eta) * a1 * b.at(j2);
    }
  }
  return out;
}

/// Symbol weights tabulated on one grid for repeated application; entries
/// outside the admissible set are stored as zero.
class BilinearTable {
 public:
  BilinearTable(BilinearSymbol sym, const Grid& grid)
      : sym_(std::move(sym)), grid_(grid), top_(grid.guard_mode() - 1), width_(2 * top_ + 1),
        weights_(static_cast<std::size_t>(width_) * static_cast<std::size_t>(width_)) {
    const double dk = grid.spacing();
    for (int j1 = -top_; j1 <= top_; ++j1)
      for (int j2 = -top_; j2 <= top_; ++j2) weights_[index(j1, j2)] = sym_(dk * j1, dk * j2);
  }

  const BilinearSymbol& symbol() const { return sym_; }
  const Grid& grid() const { return grid_; }

  SpectralField apply(const SpectralField& u, const SpectralField& v) const {
    u.check_same_grid(v);
    if (!(u.grid() == grid_)) throw std::invalid_argument("BilinearTable: grid mismatch");
    detail::require_guarded(u, "BilinearTable::apply");
    detail::require_guarded(v, "BilinearTable::apply");
    const SpectralField a = detail::effective_spectrum(u, sym_.conj_first);
    const SpectralField b = detail::effective_spectrum(v, sym_.conj_second);
    std::vector<cplx> bb(static_cast<std::size_t>(width_));
    for (int j = -top_; j <= top_; ++j) bb[static_cast<std::size_t>(j + top_)] = b.at(j);
    std::vector<cplx> acc(static_cast<std::size_t>(2 * width_ - 1));
    for (int j1 = -top_; j1 <= top_; ++j1) {
      const cplx a1 = a.at(j1);
      if (a1 == cplx{0.0}) continue;
      const cplx* row = &weights_[index(j1, -top_)];
      cplx* out = &acc[static_cast<std::size_t>(j1 + top_)];
      for (int i2 = 0; i2 < width_; ++i2) out[i2] += row[i2] * a1 * bb[static_cast<std::size_t>(i2)];
    }
    SpectralField result(grid_);
    for (int z = -2 * top_; z <= 2 * top_; ++z) {
      if (!grid_.has_mode(z)) continue;
      result.at(z) = acc[static_cast<std::size_t>(z + 2 * top_)];
    }
    result.zero_nyquist();
    return result;
  }

 private:
  std::size_t index(int j1, int j2) const {
    return static_cast<std::size_t>(j1 + top_) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(j2 + top_);
  }

  BilinearSymbol sym_;
  Grid grid_;
  int top_;
  int width_;
  std::vector<cplx> weights_;
};

/// G(u, v) = <nabla>^{beta-alpha}[<nabla>^alpha u <nabla>^alpha v].
inline BilinearSymbol g_symbol(double alpha, double beta) {
  return {"G",
          [alpha, beta](double xi, double eta) -> cplx {
            return std::pow(japanese(xi) * japanese(eta), alpha) * std::pow(japanese(xi + eta), beta - alpha);
          },
          false, false, {}};
}

/// G weight with the conjugation and admissible region of a normal-form
/// symbol: the forcing that the normal form removes.
inline BilinearSymbol forcing_symbol(const BilinearSymbol& g_sym, const BilinearSymbol& t_sym) {
  return {g_sym.name + "|" + t_sym.name, g_sym.weight, t_sym.conj_first, t_sym.conj_second, t_sym.admissible};
}

/// Positive-frequency indicator used by the normal forms.
inline bool positive_frequency(double xi) { return xi >= 0.5; }

/// Normal form for u^2: G weight over the resonance -2i xi eta, both inputs at
/// positive frequency.
inline BilinearSymbol t_symbol_u2(double alpha, double beta) {
  const auto g = g_symbol(alpha, beta);
  return {"T_u2",
          [g](double xi, double eta) { return g.weight(xi, eta) / cplx(0.0, -2.0 * xi * eta); },
          false, false,
          [](double xi, double eta) { return positive_frequency(xi) && positive_frequency(eta); }};
}

/// Normal form for u * conj(v): resonance -2i eta (xi + eta) in effective
/// frequencies. Slot one is at positive frequency, the output at |zeta| >= 1
/// and the resonant column eta = 0 is excluded.
inline BilinearSymbol t_symbol_uubar(double alpha, double beta) {
  const auto g = g_symbol(alpha, beta);
  return {"T_uubar",
          [g](double xi, double eta) { return g.weight(xi, eta) / cplx(0.0, -2.0 * eta * (xi + eta)); },
          false, true,
          [](double xi, double eta) {
            return positive_frequency(xi) && std::abs(eta) >= 0.5 && std::abs(xi + eta) >= 1.0;
          }};
}

/// Normal form for conj(u) * conj(v): resonance -2i (xi^2 + eta^2 + xi eta);
/// the removable cell (0, 0) is excluded.
inline BilinearSymbol t_symbol_ubar2(double alpha, double beta) {
  const auto g = g_symbol(alpha, beta);
  return {"T_ubar2",
          [g](double xi, double eta) {
            return g.weight(xi, eta) / cplx(0.0, -2.0 * (xi * xi + eta * eta + xi * eta));
          },
          true, true,
          [](double xi, double eta) { return xi != 0.0 || eta != 0.0; }};
}

enum class Nonlinearity { U2, UUbar, Ubar2 };

inline std::string to_string(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::U2: return "u2";
    case Nonlinearity::UUbar: return "uubar";
    case Nonlinearity::Ubar2: return "ubar2";
  }
  return "?";
}

inline Nonlinearity parse_nonlinearity(const std::string& s) {
  if (s == "u2") return Nonlinearity::U2;
  if (s == "uubar") return Nonlinearity::UUbar;
  if (s == "ubar2") return Nonlinearity::Ubar2;
  throw std::invalid_argument("unknown nonlinearity '" + s + "'");
}

inline BilinearSymbol t_symbol(Nonlinearity kind, double alpha, double beta) {
  switch (kind) {
    case Nonlinearity::U2: return t_symbol_u2(alpha, beta);
    case Nonlinearity::UUbar: return t_symbol_uubar(alpha, beta);
    case Nonlinearity::Ubar2: return t_symbol_ubar2(alpha, beta);
  }
  throw std::invalid_argument("t_symbol: bad kind");
}

/// Applies the linear Schrodinger operator's spatial part: i d_xx.
inline SpectralField apply_i_dxx(const SpectralField& f) {
  const Grid& g = f.grid();
  SpectralField out(g);
  for (int s = 0; s < g.size(); ++s) {
    const double z = g.frequency(s);
    out.coeffs()[static_cast<std::size_t>(s)] = cplx(0.0, -z * z) * f.coeffs()[static_cast<std::size_t>(s)];
  }
  return out;
}

struct ResonanceReport {
  std::string t_name;
  std::string g_name;
  double residual = 0.0;
  double dt = 0.0;
  double t = 0.0;
  int n_points = 0;
  double length = 0.0;
  /// Set when the forcing vanishes; residual is then the absolute norm.
  bool zero_forcing = false;
};

/// Relative defect of (d_t + i d_xx) T(U, V) = G(U, V) restricted to the
/// admissible set of T, for free waves U = e^{-it d_xx} f, V = e^{-it d_xx} g.
/// The time derivative is a central difference of T(U(s), V(s)) pulled back to
/// time t by the free flow, so the d_xx part is exact and only the resonance
/// phase is differenced.
inline ResonanceReport leibniz_residual(const BilinearSymbol& t_sym, const BilinearSymbol& g_sym,
                                        const SpectralField& f, const SpectralField& g, double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("leibniz_residual: dt must be positive");
  const auto pulled = [&](double s) {
    return free_propagate(t - s, apply_bilinear(t_sym, free_propagate(s, f), free_propagate(s, g)));
  };
  SpectralField lhs = pulled(t + dt) - pulled(t - dt);
  lhs *= cplx(1.0 / (2.0 * dt));
  const SpectralField rhs =
      apply_bilinear(forcing_symbol(g_sym, t_sym), free_propagate(t, f), free_propagate(t, g));

  ResonanceReport r{t_sym.name, g_sym.name, 0.0, dt, t, f.grid().size(), f.grid().length(), false};
  const double denom = l2_norm(rhs);
  const double defect = l2_norm(lhs - rhs);
  if (denom == 0.0) {
    r.zero_forcing = true;
    r.residual = defect;
  } else {
    r.residual = defect / denom;
  }
  return r;
}

}  // namespace qnls
