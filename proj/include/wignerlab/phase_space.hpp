#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "operators.hpp"

namespace wignerlab {

inline constexpr double kLeakWarning = 1e-3;  // fraction of squared mass in the outer 5% of samples

struct WignerResult {
  PhaseSpaceFunction function;
  double leak = 0.0;
  bool leak_warning = false;
};

namespace detail {

// W(psi, phi)(x_j, p_k) from half-step samples; correlation lags folded modulo N before the DFT.
inline PhaseSpaceFunction cross_wigner_raw(const GridFunction& psi, const GridFunction& phi) {
  if (!(psi.grid == phi.grid) || !same_eta(psi.eta, phi.eta))
    throw ParameterError("cross_wigner: states live on different grids");
  const Grid& g = psi.grid;
  const int n = g.n();
  const double eta = psi.eta;
  const auto ph = upsample2(std::span<const cplx>(psi.values.data(), g.size()));
  const auto fh = upsample2(std::span<const cplx>(phi.values.data(), g.size()));
  CMat w(n, n);
  const double scale = g.dx() / (2.0 * kPi * eta);
  parallel_for(n, [&](int j) {
    std::vector<cplx> bins(n, cplx(0.0));
    for (int m = -n; m < n; ++m) {
      const int a = 2 * j + m, b = 2 * j - m;
      if (a < 0 || a >= 2 * n || b < 0 || b >= 2 * n) continue;
      // p_min m dx / eta = -pi m
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      bins[((m % n) + n) % n] += sign * ph[a] * std::conj(fh[b]);
    }
    auto d = dft(bins, -1);
    for (int k = 0; k < n; ++k) w(j, k) = d[k] * scale;
  });
  return PhaseSpaceFunction(g, psi.eta, w, PhaseKind::wigner);
}

}  // namespace detail

inline WignerResult wigner(const GridFunction& psi) {
  if (!psi.is_normalized()) throw NormalizationError("wigner: state is not normalized");
  PhaseSpaceFunction w = detail::cross_wigner_raw(psi, psi);
  w.values = w.values.real().cast<cplx>();
  const double leak = boundary_leak(psi);
  return {w, leak, leak > kLeakWarning};
}

// Mixed state: weighted sum of eigenstate Wigner functions.
inline WignerResult wigner(const DensityMatrix& rho) {
  const auto spec = spectral_decompose(rho);
  const Grid& g = rho.grid();
  PhaseSpaceFunction acc(g, Eta(rho.eta()), PhaseKind::wigner);
  const double top = std::abs(spec.eigenvalues.front());
  double leak = 0.0;
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    const double l = spec.eigenvalues[i];
    if (std::abs(l) <= 1e-14 * top) continue;
    acc.values += l * detail::cross_wigner_raw(spec.eigenvectors[i], spec.eigenvectors[i]).values.real().cast<cplx>();
    leak = std::max(leak, boundary_leak(spec.eigenvectors[i]));
  }
  return {acc, leak, leak > kLeakWarning};
}

// W(psi, phi)(z) = (2 pi eta)^{-1} int exp(-i p y / eta) psi(x + y/2) conj(phi(x - y/2)) dy.
inline PhaseSpaceFunction cross_wigner(const GridFunction& psi, const GridFunction& phi) {
  return detail::cross_wigner_raw(psi, phi);
}

// Amb(psi, phi)(x, p) = (2 pi eta)^{-1} int exp(-i p y / eta) psi(y + x/2) conj(phi(y - x/2)) dy.
inline PhaseSpaceFunction cross_ambiguity(const GridFunction& psi, const GridFunction& phi) {
  if (!(psi.grid == phi.grid) || !same_eta(psi.eta, phi.eta))
    throw ParameterError("ambiguity: states live on different grids");
  const Grid& g = psi.grid;
  const int n = g.n();
  const double eta = psi.eta;
  const double scale = 1.0 / (2.0 * kPi * eta);
  CMat out(n, n);
  std::span<const cplx> ps(psi.values.data(), g.size()), fs(phi.values.data(), g.size());
  parallel_for(n, [&](int j) {
    const double half = 0.5 * g.x(j) / g.dx();
    const auto fwd = shift_samples(ps, -half);
    const auto bwd = shift_samples(fs, half);
    std::vector<cplx> prod(n);
    for (int i = 0; i < n; ++i) prod[i] = fwd[i] * std::conj(bwd[i]);
    const auto t = continuous_ft(prod, g.x_min(), g.dx(), g.p_min(eta), g.dp(eta), eta, -1);
    for (int k = 0; k < n; ++k) out(j, k) = t[k] * scale;
  });
  return PhaseSpaceFunction(g, psi.eta, out, PhaseKind::ambiguity);
}

inline PhaseSpaceFunction ambiguity(const GridFunction& psi) { return cross_ambiguity(psi, psi); }

struct Marginals {
  Eigen::VectorXd position;  // on the x grid
  Eigen::VectorXd momentum;  // on the centered p grid
};

inline Marginals marginals(const PhaseSpaceFunction& w) {
  Marginals m;
  m.position = w.values.real().rowwise().sum() * w.dp();
  m.momentum = w.values.real().colwise().sum().transpose() * w.dx();
  return m;
}

// int W1 W2 dz
inline double moyal_overlap(const PhaseSpaceFunction& w1, const PhaseSpaceFunction& w2) {
  require_same_space(w1, w2);
  return (w1.values.cwiseProduct(w2.values)).sum().real() * w1.cell();
}

struct ReflectionCheck {
  cplx wigner_value;
  cplx reflection_value;  // (pi eta)^{-1} <psi | Pi(z0) psi>
  double residual = 0.0;
  bool interpolated = false;
};

// Compares W psi(z0) with the reflection expectation; off-grid z0 uses band-limited interpolation.
inline ReflectionCheck reflection_wigner_check(const GridFunction& psi, const PhaseSpaceFunction& w,
                                               const PhaseSpacePoint& z0) {
  ReflectionCheck c;
  const double u = (z0.x - w.grid.x_min()) / w.dx();
  const double v = (z0.p - w.grid.p_min(w.eta)) / w.dp();
  c.interpolated = std::abs(u - std::round(u)) > 1e-9 || std::abs(v - std::round(v)) > 1e-9;
  c.wigner_value = interpolate(w, z0.x, z0.p);
  c.reflection_value = psi.inner(reflect(psi, z0)) / (kPi * static_cast<double>(psi.eta));
  c.residual = std::abs(c.wigner_value - c.reflection_value);
  return c;
}

}  // namespace wignerlab
