#pragma once

// Lower bounds for the bilinear L^2 multiplier norm ||m||_M of box-localized
// indicators chi^{(e1,e2,e3)} on the hyperplane tau1+tau2+tau3 = 0,
// xi1+xi2+xi3 = 0.  Each factor is written in (xi, sigma = tau - e xi^2), where
// its box is a union of rectangles, and tested against functions constant on
// the cells of a rectangular partition.  For such functions the trilinear
// integral is sum K_abc u_a v_b w_c with K_abc the measure of the cell
// incidence set; sigma integrates exactly, xi by midpoint quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace qnls {

struct BoxSpec {
  std::array<double, 3> N{1, 1, 1};
  std::array<double, 3> L{1, 1, 1};
  std::array<int, 3> eps{1, 1, -1};

  void validate() const {
    for (int j = 0; j < 3; ++j) {
      if (!(N[j] >= 1.0) || !(L[j] >= 1.0)) throw std::invalid_argument("BoxSpec: N_j and L_j must be >= 1");
      if (eps[j] != 1 && eps[j] != -1) throw std::invalid_argument("BoxSpec: signs must be +1 or -1");
    }
  }
};

/// Sparse nonnegative trilinear form on three finite index sets,
/// T(u, v, w) = sum_t weight_t u_a v_b w_c (unit weights when none are stored).
struct TrilinearForm {
  std::array<int, 3> sizes{0, 0, 0};
  std::vector<std::array<int, 3>> triples;
  std::vector<double> weights;

  bool empty() const { return triples.empty(); }
  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
  double evaluate(const std::vector<double>& u, const std::vector<double>& v, const std::vector<double>& w) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const auto& t = triples[i];
      acc += weight(i) * u[t[0]] * v[t[1]] * w[t[2]];
    }
    return acc;
  }
};

namespace mnorm_detail {

/// Cell partition of one factor: sign of xi x n_xi cells across [N, 2N],
/// sign of sigma x n_tau cells across [L, 2L].
struct Cells {
  double N, L, dN, dL;
  int n_xi, n_tau;

  int count() const { return 4 * n_xi * n_tau; }
  double area() const { return dN * dL; }
  /// Signed xi cell (0..2 n_xi - 1) of a frequency, or -1 outside the box.
  int xi_cell(double xi) const {
    const double a = std::abs(xi);
    if (a < N || a >= 2.0 * N) return -1;
    const int i = std::min(static_cast<int>((a - N) / dN), n_xi - 1);
    return (xi < 0 ? n_xi : 0) + i;
  }
  double xi_mid(int cell, int sub, int q) const {
    const int i = cell % n_xi;
    const double a = N + (i + (sub + 0.5) / q) * dN;
    return cell < n_xi ? a : -a;
  }
  /// sigma interval of signed sigma cell j (0..2 n_tau - 1).
  std::array<double, 2> sigma(int j) const {
    const int i = j % n_tau;
    const double lo = L + i * dL, hi = lo + dL;
    return j < n_tau ? std::array<double, 2>{lo, hi} : std::array<double, 2>{-hi, -lo};
  }
  int index(int xi_cell, int sigma_cell) const { return xi_cell * 2 * n_tau + sigma_cell; }
};

/// Area of {(x, y) in [a1, b1] x [a2, b2] : s_lo <= x + y <= s_hi}.
inline double strip_area(double a1, double b1, double a2, double b2, double s_lo, double s_hi) {
  auto phi = [](double t) { return t > 0.0 ? 0.5 * t * t : 0.0; };
  auto G = [&](double s) { return phi(s - a1 - a2) - phi(s - b1 - a2) - phi(s - a1 - b2) + phi(s - b1 - b2); };
  return std::max(0.0, G(s_hi) - G(s_lo));
}

/// Largest eigenvalue of a small symmetric matrix by cyclic Jacobi rotations.
inline double max_eigenvalue(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (at(p, q) == 0.0) continue;
        const double theta = 0.5 * (at(q, q) - at(p, p)) / at(p, q);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) best = std::max(best, at(i, i));
  return best;
}

}  // namespace mnorm_detail

/// Cell discretization of chi^{(e1,e2,e3)} with optional H window on
/// |e1 xi1^2 + e2 xi2^2 + e3 xi3^2| (H <= 0 drops it).  Weights are
/// K_abc / sqrt(|a| |b| |c|), so unit l^2 vectors are unit L^2 functions and the
/// form's norm bounds ||m||_M from below (up to the xi quadrature with q points
/// per cell).
inline TrilinearForm build_box_form(const BoxSpec& box, double H, int n_tau, int n_xi, int q = 4) {
  using namespace mnorm_detail;
  box.validate();
  if (n_tau < 1 || n_xi < 1 || n_tau > 64 || n_xi > 64)
    throw std::invalid_argument("multiplier norm: n_tau and n_xi must lie in [1, 64]");
  if (q < 1) throw std::invalid_argument("multiplier norm: quadrature order must be >= 1");
  std::array<Cells, 3> c;
  for (int j = 0; j < 3; ++j) c[j] = {box.N[j], box.L[j], box.N[j] / n_xi, box.L[j] / n_tau, n_xi, n_tau};

  std::unordered_map<std::uint64_t, double> acc;
  auto key = [](int a, int b, int k) {
    return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) | static_cast<std::uint64_t>(k);
  };
  const double wq = (c[0].dN / q) * (c[1].dN / q);
  const int nx = 2 * n_xi, ns = 2 * n_tau;
  for (int a = 0; a < nx; ++a) {
    for (int sa = 0; sa < q; ++sa) {
      const double x1 = c[0].xi_mid(a, sa, q);
      for (int b = 0; b < nx; ++b) {
        for (int sb = 0; sb < q; ++sb) {
          const double x2 = c[1].xi_mid(b, sb, q);
          const double x3 = -x1 - x2;
          const int cc = c[2].xi_cell(x3);
          if (cc < 0) continue;
          const double h = box.eps[0] * x1 * x1 + box.eps[1] * x2 * x2 + box.eps[2] * x3 * x3;
          if (H > 0.0 && (std::abs(h) < H || std::abs(h) > 2.0 * H)) continue;
          // sigma1 + sigma2 = -h - sigma3.
          for (int i = 0; i < ns; ++i) {
            const auto s1 = c[0].sigma(i);
            for (int j = 0; j < ns; ++j) {
              const auto s2 = c[1].sigma(j);
              for (int k = 0; k < ns; ++k) {
                const auto s3 = c[2].sigma(k);
                const double area = strip_area(s1[0], s1[1], s2[0], s2[1], -h - s3[1], -h - s3[0]);
                if (area <= 0.0) continue;
                acc[key(c[0].index(a, i), c[1].index(b, j), c[2].index(cc, k))] += wq * area;
              }
            }
          }
        }
      }
    }
  }

  TrilinearForm form;
  form.sizes = {c[0].count(), c[1].count(), c[2].count()};
  const double norm = std::sqrt(c[0].area() * c[1].area() * c[2].area());
  std::vector<std::pair<std::uint64_t, double>> entries(acc.begin(), acc.end());
  std::sort(entries.begin(), entries.end());
  const std::uint64_t mask = (std::uint64_t{1} << 21) - 1;
  for (const auto& [k, v] : entries) {
    form.triples.push_back({static_cast<int>(k >> 42), static_cast<int>((k >> 21) & mask), static_cast<int>(k & mask)});
    form.weights.push_back(v / norm);
  }
  return form;
}

/// Value of the best start after `iters` rounds of alternating maximization.
/// Each half-step maximizes exactly over one factor, so the value never
/// decreases along a run; starts are fixed by the seed, so the result is
/// nondecreasing in iters.
inline double alternating_maximization(const TrilinearForm& form, int iters, std::uint64_t seed, int starts = 4) {
  if (form.empty()) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double best = 0.0;
  for (int s = 0; s < starts; ++s) {
    std::array<std::vector<double>, 3> x;
    for (int j = 0; j < 3; ++j) {
      x[j].assign(static_cast<std::size_t>(form.sizes[j]), 1.0);
      // First start is uniform, the rest random.
      if (s > 0)
        for (auto& e : x[j]) e = ud(rng) + 1e-3;
      double n2 = 0.0;
      for (double e : x[j]) n2 += e * e;
      for (auto& e : x[j]) e /= std::sqrt(n2);
    }
    best = std::max(best, form.evaluate(x[0], x[1], x[2]));
    for (int it = 0; it < iters; ++it) {
      for (int j = 0; j < 3; ++j) {
        std::vector<double> g(x[j].size(), 0.0);
        const int p = (j + 1) % 3, q = (j + 2) % 3;
        for (std::size_t i = 0; i < form.triples.size(); ++i) {
          const auto& t = form.triples[i];
          g[static_cast<std::size_t>(t[j])] += form.weight(i) * x[p][t[p]] * x[q][t[q]];
        }
        double n2 = 0.0;
        for (double e : g) n2 += e * e;
        const double val = std::sqrt(n2);
        if (val == 0.0) break;
        for (auto& e : g) e /= val;
        x[j] = std::move(g);
        best = std::max(best, val);
      }
    }
  }
  return best;
}

struct MultiplierEstimate {
  double value = 0.0;
  /// No admissible triple: the configuration is incompatible.
  bool empty = false;
  std::size_t triples = 0;
  std::array<int, 3> cells{0, 0, 0};
};

/// Lower bound on ||chi^{(e)}||_M from cell-constant test functions.
inline MultiplierEstimate multiplier_lower_bound(const BoxSpec& box, double H, int n_tau, int n_xi, int iters,
                                                 std::uint64_t seed) {
  if (iters < 10) throw std::invalid_argument("multiplier norm: iters must be >= 10");
  const auto form = build_box_form(box, H, n_tau, n_xi);
  MultiplierEstimate e;
  e.empty = form.empty();
  e.triples = form.triples.size();
  e.cells = form.sizes;
  e.value = alternating_maximization(form, iters, seed);
  return e;
}

/// Exhaustive bracket [lower, upper] of the discrete trilinear norm for forms
/// with at most 4 cells per factor.  A net of covering radius rho over the
/// nonnegative unit sphere of the first factor, with the other two optimized
/// exactly (top singular value); Lipschitz continuity gives
/// norm <= net_max / (1 - rho).
struct NormBracket {
  double lower = 0.0;
  double upper = 0.0;
};

inline NormBracket exhaustive_norm(const TrilinearForm& form, int net_steps = 40) {
  for (int s : form.sizes)
    if (s > 4) throw std::invalid_argument("exhaustive_norm: at most 4 cells per factor");
  if (form.empty()) return {};
  const int n1 = form.sizes[0], n2 = form.sizes[1], n3 = form.sizes[2];
  const double h = 1.0 / net_steps;
  const double rho = h * std::sqrt(std::max(n1 - 1, 0)) / 2.0;
  if (rho >= 1.0) throw std::invalid_argument("exhaustive_norm: net too coarse");
  double best = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(n1), 0);
  std::vector<double> u(static_cast<std::size_t>(n1));
  std::vector<double> m(static_cast<std::size_t>(n2 * n3));
  std::vector<double> mtm(static_cast<std::size_t>(n3 * n3));
  // Points of the cube face {max coordinate = 1} on the grid of step h.
  for (;;) {
    int top = 0;
    for (int v : idx) top = std::max(top, v);
    if (top == net_steps) {
      double n2sum = 0.0;
      for (int a = 0; a < n1; ++a) {
        u[a] = idx[a] * h;
        n2sum += u[a] * u[a];
      }
      const double nu = std::sqrt(n2sum);
      std::fill(m.begin(), m.end(), 0.0);
      for (std::size_t i = 0; i < form.triples.size(); ++i) {
        const auto& t = form.triples[i];
        m[static_cast<std::size_t>(t[1] * n3 + t[2])] += form.weight(i) * u[t[0]] / nu;
      }
      for (int i = 0; i < n3; ++i)
        for (int j = 0; j < n3; ++j) {
          double acc = 0.0;
          for (int k = 0; k < n2; ++k) acc += m[static_cast<std::size_t>(k * n3 + i)] * m[static_cast<std::size_t>(k * n3 + j)];
          mtm[static_cast<std::size_t>(i * n3 + j)] = acc;
        }
      best = std::max(best, std::sqrt(std::max(0.0, mnorm_detail::max_eigenvalue(mtm, n3))));
    }
    int a = 0;
    while (a < n1 && ++idx[static_cast<std::size_t>(a)] > net_steps) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == n1) break;
  }
  return {best, best / (1.0 - rho)};
}

// Bounds of the (+,+,-) and (+,+,+) propositions, up to their constants.

inline std::array<double, 3> sorted(std::array<double, 3> a) {
  std::sort(a.begin(), a.end());
  return a;
}

inline double bound_ppm1(const BoxSpec& b) { return std::sqrt(sorted(b.L)[0] * sorted(b.N)[0]); }

inline double bound_ppm2(const BoxSpec& b) {
  return std::sqrt(std::min(b.L[0] * b.L[2] / b.N[1], b.L[1] * b.L[2] / b.N[0]));
}

inline double bound_ppm4(const BoxSpec& b) {
  const auto l = sorted(b.L);
  return std::sqrt(l[0]) * std::pow(l[1], 0.25);
}

inline double bound_ppm3(const BoxSpec& b) {
  const auto l = sorted(b.L);
  return std::sqrt(l[0] * l[1] / sorted(b.N)[2]);
}

}  // namespace qnls
