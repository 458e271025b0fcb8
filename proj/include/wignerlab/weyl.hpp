#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "phase_space.hpp"

namespace wignerlab {

namespace detail {

// Symbol columns resampled onto the half-step x grid (2N rows).
inline CMat half_step_rows(const CMat& a) {
  const int n = a.rows();
  CMat out(2 * n, a.cols());
  std::vector<cplx> col(n);
  for (int l = 0; l < a.cols(); ++l) {
    for (int j = 0; j < n; ++j) col[j] = a(j, l);
    const auto h = upsample2(col);
    for (int i = 0; i < 2 * n; ++i) out(i, l) = h[i];
  }
  return out;
}

}  // namespace detail

// K(x, y) = (2 pi eta)^{-1} int exp(i p (x - y) / eta) a((x + y)/2, p) dp.
// Kernel entries with |x - y| >= L/2 of the window are set to zero (beyond the resolvable lag).
// With `eta` different from the symbol's own eta the p integral is done by direct quadrature.
inline OperatorMatrix weyl_quantize(const PhaseSpaceFunction& a, std::optional<double> eta = std::nullopt) {
  const Grid& g = a.grid;
  const int n = g.n();
  const double eta_a = a.eta;
  const double eq = eta ? Eta(*eta).value() : eta_a;
  const double dx = g.dx(), dp = a.dp();
  const CMat ah = detail::half_step_rows(a.values);
  CMat k = CMat::Zero(n, n);

  if (same_eta(eq, eta_a)) {
    const double scale = dp / (2.0 * kPi * eq);
    std::vector<std::vector<cplx>> lag(2 * n - 1);
    parallel_for(2 * n - 1, [&](int h) {
      std::vector<cplx> row(n);
      for (int l = 0; l < n; ++l) row[l] = ah(h, l);
      lag[h] = dft(row, +1);
    });
    for (int j = 0; j < n; ++j)
      for (int q = 0; q < n; ++q) {
        const int m = j - q;
        if (2 * std::abs(m) >= n) continue;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;  // exp(i p_min m dx / eta) = (-1)^m
        k(j, q) = sign * scale * lag[j + q][((m % n) + n) % n];
      }
    return OperatorMatrix(g, Eta(eq), k);
  }

  // Lags beyond pi*eq/dp alias under the p quadrature, so they are cut.
  const int cut = std::min(n / 2, static_cast<int>(std::floor((eq / eta_a) * n / 2.0)));
  const int lags = 2 * cut - 1;
  CMat phase(lags, n);
  for (int r = 0; r < lags; ++r) {
    const int m = r - (cut - 1);
    for (int l = 0; l < n; ++l) phase(r, l) = std::polar(1.0, g.p(l, eta_a) * m * dx / eq);
  }
  const CMat lagged = (phase * ah.transpose()) * (dp / (2.0 * kPi * eq));  // lags x (2N)
  for (int j = 0; j < n; ++j)
    for (int q = 0; q < n; ++q) {
      const int m = j - q;
      if (std::abs(m) >= cut) continue;
      k(j, q) = lagged(m + cut - 1, j + q);
    }
  return OperatorMatrix(g, Eta(eq), k);
}

// a(x, p) = int exp(-i p y / eta) K(x + y/2, x - y/2) dy on the kernel's grid.
// Odd lags sit at half-step centers and are shifted back along the center direction.
inline PhaseSpaceFunction weyl_symbol(const OperatorMatrix& op) {
  const Grid& g = op.grid;
  const int n = g.n();
  const double eta = op.eta;
  CMat lagged = CMat::Zero(n, n);  // (center j, lag d mod N)
  for (int d = -(n / 2 - 1); d <= n / 2 - 1; ++d) {
    const int col = ((d % n) + n) % n;
    if (d % 2 == 0) {
      for (int j = 0; j < n; ++j) {
        const int a = j + d / 2, b = j - d / 2;
        if (a >= 0 && a < n && b >= 0 && b < n) lagged(j, col) = op.kernel(a, b);
      }
    } else {
      std::vector<cplx> s(n, cplx(0.0));
      for (int i = 0; i < n; ++i) {
        const int a = i + (1 + d) / 2, b = i + (1 - d) / 2;
        if (a >= 0 && a < n && b >= 0 && b < n) s[i] = op.kernel(a, b);
      }
      const auto t = shift_samples(s, 0.5);
      for (int j = 0; j < n; ++j) lagged(j, col) = t[j];
    }
  }
  CMat out(n, n);
  parallel_for(n, [&](int j) {
    std::vector<cplx> row(n);
    for (int c = 0; c < n; ++c) {
      const int d = detail::signed_frequency(c, n);
      row[c] = (d % 2 == 0 ? 1.0 : -1.0) * lagged(j, c);
    }
    const auto t = dft(row, -1);
    for (int k = 0; k < n; ++k) out(j, k) = t[k] * g.dx();
  });
  return PhaseSpaceFunction(g, op.eta, out, PhaseKind::symbol);
}

// (pi eta)^{-1} sum a(z0) Pi(z0) over a half-step x0 grid. O(N^4); meant for small grids.
inline OperatorMatrix quantize_via_reflections(const PhaseSpaceFunction& a) {
  const Grid& g = a.grid;
  const int n = g.n();
  const double eta = a.eta;
  const CMat ah = detail::half_step_rows(a.values);
  CMat k = CMat::Zero(n, n);
  const double w = 0.5 * g.dx() * a.dp() / (kPi * eta);
  for (int h = 0; h < 2 * n; ++h) {
    const double x0 = g.x_min() + 0.5 * h * g.dx();
    for (int l = 0; l < n; ++l) {
      if (ah(h, l) == cplx(0.0)) continue;
      k += (w * ah(h, l)) * reflection_operator(g, eta, {x0, a.p(l)}).kernel;
    }
  }
  return OperatorMatrix(g, a.eta, k);
}

// (2 pi eta)^{-1} sum a_sigma(z0) D(z0) over the grid. O(N^4); meant for small centered grids.
inline OperatorMatrix quantize_via_displacements(const PhaseSpaceFunction& a) {
  const Grid& g = a.grid;
  if (!g.centered()) throw ParameterError("quantize_via_displacements: grid must be centered");
  const int n = g.n();
  const double eta = a.eta;
  const PhaseSpaceFunction as = symplectic_fourier(a);
  CMat k = CMat::Zero(n, n);
  const double w = a.cell() / (2.0 * kPi * eta);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      if (as.values(i, l) == cplx(0.0)) continue;
      k += (w * as.values(i, l)) * displacement_operator(g, eta, {g.x(i), a.p(l)}).kernel;
    }
  return OperatorMatrix(g, a.eta, k);
}

// Symbol of Op(a) Op(b).
inline PhaseSpaceFunction twisted_product(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  require_same_space(a, b);
  return weyl_symbol(compose(weyl_quantize(a), weyl_quantize(b)));
}

// (2 pi eta)^{-1} int exp(i sigma(z, z') / (2 eta)) a(z - z') b(z') dz' by direct quadrature.
// Differences z - z' must land on the grid, so the grid must be centered. O(N^4).
inline PhaseSpaceFunction twisted_convolution(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  require_same_space(a, b);
  const Grid& g = a.grid;
  if (!g.centered()) throw ParameterError("twisted_convolution: grid must be centered");
  const int n = g.n(), c = n / 2;
  const double eta = a.eta;
  CMat out = CMat::Zero(n, n);
  const double w = a.cell() / (2.0 * kPi * eta);
  parallel_for(n, [&](int j) {
    for (int k = 0; k < n; ++k) {
      cplx acc(0.0);
      for (int jj = 0; jj < n; ++jj) {
        const int dj = j - jj + c;
        if (dj < 0 || dj >= n) continue;
        for (int kk = 0; kk < n; ++kk) {
          const int dk = k - kk + c;
          if (dk < 0 || dk >= n) continue;
          const double s = sigma({a.x(j), a.p(k)}, {a.x(jj), a.p(kk)});
          acc += std::polar(1.0, s / (2.0 * eta)) * a.values(dj, dk) * b.values(jj, kk);
        }
      }
      out(j, k) = acc * w;
    }
  });
  return PhaseSpaceFunction(g, a.eta, out, PhaseKind::generic);
}

// <A>_rho = int a(z) W_rho(z) dz for a real symbol a.
inline double expectation(const PhaseSpaceFunction& a, const DensityMatrix& rho) {
  const double scale = std::max(a.values.cwiseAbs().maxCoeff(), 1e-300);
  if (a.values.imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ParameterError("expectation: observable symbol must be real");
  const PhaseSpaceFunction w = wigner(rho).function;
  require_same_space(a, w);
  return (a.values.real().cwiseProduct(w.values.real())).sum() * a.cell();
}

struct SymbolTrace {
  cplx trace;      // (2 pi eta)^{-1} int a
  double hs_norm2;  // (2 pi eta)^{-1} int |a|^2
};

inline SymbolTrace trace_from_symbol(const PhaseSpaceFunction& a) {
  const double f = a.cell() / (2.0 * kPi * static_cast<double>(a.eta));
  return {a.values.sum() * f, a.values.squaredNorm() * f};
}

// Phase-space function from an analytic symbol.
template <typename Fn>
PhaseSpaceFunction sample_symbol(const Grid& g, double eta, Fn&& fn, PhaseKind kind = PhaseKind::symbol) {
  PhaseSpaceFunction a(g, Eta(eta), kind);
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) a.values(j, k) = fn(g.x(j), g.p(k, eta));
  return a;
}

}  // namespace wignerlab
