#pragma once

#include "qnls/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnls {

using cplx = std::complex<double>;
using std::numbers::pi;

/// Periodic grid on [0, length) with n_points samples. Coefficients are kept
/// in FFT storage order: slots 0..n/2-1 hold modes j = 0..n/2-1 and slots
/// n/2..n-1 hold j = -n/2..-1. Mode j has frequency 2*pi*j/length.
class Grid {
 public:
  Grid(int n_points, double length) : n_(n_points), length_(length) {
    if (n_points < 16 || !std::has_single_bit(static_cast<unsigned>(n_points)))
      throw std::invalid_argument("grid: n_points must be a power of two >= 16, got " +
                                  std::to_string(n_points));
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("grid: length must be positive");
  }

  int size() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return 2.0 * pi / length_; }

  /// Signed mode index stored at slot i.
  int mode(int slot) const { return slot < n_ / 2 ? slot : slot - n_; }
  /// Storage slot of signed mode j, j in [-n/2, n/2).
  int slot(int j) const { return j >= 0 ? j : j + n_; }
  bool has_mode(int j) const { return j >= -n_ / 2 && j < n_ / 2; }
  int nyquist_slot() const { return n_ / 2; }

  double frequency(int slot) const { return spacing() * mode(slot); }
  std::vector<double> frequencies() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int j = -n_ / 2; j < n_ / 2; ++j) out[static_cast<std::size_t>(j + n_ / 2)] = spacing() * j;
    return out;
  }

  /// Modes |j| < guard_mode() may enter a quadratic product without aliasing.
  int guard_mode() const { return n_ / 4; }

  /// Largest dyadic band k with n >= 2^(k+3).
  int max_band() const { return std::countr_zero(static_cast<unsigned>(n_)) - 3; }

  bool operator==(const Grid& o) const { return n_ == o.n_ && length_ == o.length_; }

 private:
  int n_;
  double length_;
};

inline Grid make_grid(int n_points, double length = 2.0 * pi) { return Grid(n_points, length); }

/// Fourier-coefficient representation u(x) = sum_j c_j exp(i xi_j x).
class SpectralField {
 public:
  explicit SpectralField(const Grid& grid)
      : grid_(grid), coeffs_(static_cast<std::size_t>(grid.size()), cplx{0.0, 0.0}) {}

  SpectralField(const Grid& grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != static_cast<std::size_t>(grid.size()))
      throw std::invalid_argument("field: coefficient count does not match grid");
    coeffs_[static_cast<std::size_t>(grid_.nyquist_slot())] = 0.0;
  }

  /// e^{i xi_j x} with unit coefficient.
  static SpectralField single_mode(const Grid& grid, int j, cplx amplitude = 1.0) {
    SpectralField f(grid);
    f.at(j) = amplitude;
    f.coeffs_[static_cast<std::size_t>(grid.nyquist_slot())] = 0.0;
    return f;
  }

  const Grid& grid() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() { return coeffs_; }

  cplx& at(int j) {
    if (!grid_.has_mode(j)) throw std::out_of_range("field: mode outside grid");
    return coeffs_[static_cast<std::size_t>(grid_.slot(j))];
  }
  cplx at(int j) const {
    if (!grid_.has_mode(j)) return 0.0;
    return coeffs_[static_cast<std::size_t>(grid_.slot(j))];
  }

  /// Drops the Nyquist mode.
  void zero_nyquist() { coeffs_[static_cast<std::size_t>(grid_.nyquist_slot())] = 0.0; }

  SpectralField& operator+=(const SpectralField& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(cplx s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(cplx s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, cplx s) { return a *= s; }

  /// Largest |j| carrying a coefficient above tol * max|c|.
  int max_active_mode(double rel_tol = 1e-13) const {
    double peak = 0.0;
    for (auto c : coeffs_) peak = std::max(peak, std::abs(c));
    if (peak == 0.0) return -1;
    int top = 0;
    for (int s = 0; s < grid_.size(); ++s)
      if (std::abs(coeffs_[static_cast<std::size_t>(s)]) > rel_tol * peak)
        top = std::max(top, std::abs(grid_.mode(s)));
    return top;
  }

  /// True when all content sits below the quadratic alias guard.
  bool is_guarded(double rel_tol = 1e-13) const { return max_active_mode(rel_tol) < grid_.guard_mode(); }

  void check_same_grid(const SpectralField& o) const {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("field: grid mismatch");
  }

 private:
  Grid grid_;
  std::vector<cplx> coeffs_;
};

/// Samples u(x_m), x_m = m * length / n.
inline std::vector<cplx> to_physical(const SpectralField& field) {
  std::vector<cplx> samples(field.coeffs().begin(), field.coeffs().end());
  fft::transform(samples, fft::Direction::Backward);
  return samples;
}

inline SpectralField to_spectral(std::span<const cplx> samples, const Grid& grid) {
  if (samples.size() != static_cast<std::size_t>(grid.size()))
    throw std::invalid_argument("to_spectral: sample count does not match grid");
  std::vector<cplx> coeffs(samples.begin(), samples.end());
  fft::transform(coeffs, fft::Direction::Forward);
  const double scale = 1.0 / grid.size();
  for (auto& c : coeffs) c *= scale;
  return SpectralField(grid, std::move(coeffs));
}

/// L^2(0, length) norm from the coefficients (Parseval).
inline double l2_norm(const SpectralField& field) {
  double acc = 0.0;
  for (auto c : field.coeffs()) acc += std::norm(c);
  return std::sqrt(field.grid().length() * acc);
}

/// L^2(0, length) norm by rectangle quadrature of physical samples.
inline double l2_norm_physical(std::span<const cplx> samples, const Grid& grid) {
  double acc = 0.0;
  for (auto s : samples) acc += std::norm(s);
  return std::sqrt(acc * grid.length() / grid.size());
}

inline SpectralField conj(const SpectralField& field) {
  const Grid& g = field.grid();
  SpectralField out(g);
  for (int j = -g.size() / 2 + 1; j < g.size() / 2; ++j) out.at(j) = std::conj(field.at(-j));
  return out;
}

/// Exact product u*v on the grid via a 2x zero-padded physical product.
/// Output modes beyond the grid are dropped.
inline SpectralField product(const SpectralField& u, const SpectralField& v) {
  u.check_same_grid(v);
  const Grid& g = u.grid();
  const int n = g.size();
  const int m = 2 * n;
  std::vector<cplx> a(static_cast<std::size_t>(m)), b(static_cast<std::size_t>(m));
  for (int j = -n / 2 + 1; j < n / 2; ++j) {
    const auto s = static_cast<std::size_t>(j >= 0 ? j : j + m);
    a[s] = u.at(j);
    b[s] = v.at(j);
  }
  fft::transform(a, fft::Direction::Backward);
  fft::transform(b, fft::Direction::Backward);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  fft::transform(a, fft::Direction::Forward);
  SpectralField out(g);
  const double scale = 1.0 / m;
  for (int j = -n / 2 + 1; j < n / 2; ++j) out.at(j) = a[static_cast<std::size_t>(j >= 0 ? j : j + m)] * scale;
  return out;
}

}  // namespace qnls
