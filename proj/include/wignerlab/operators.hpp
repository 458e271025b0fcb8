#pragma once

#include "states.hpp"

namespace wignerlab {

struct PhaseSpacePoint {
  double x = 0.0;
  double p = 0.0;
};

// sigma(z, z') = p x' - x p'
inline double sigma(const PhaseSpacePoint& z, const PhaseSpacePoint& w) { return z.p * w.x - z.x * w.p; }

// D(z0) psi(x) = exp(i (p0 x - p0 x0 / 2) / eta) psi(x - x0), band-limited shift.
inline GridFunction displace(const GridFunction& psi, const PhaseSpacePoint& z0) {
  const Grid& g = psi.grid;
  const double eta = psi.eta;
  auto shifted = shift_samples(std::span<const cplx>(psi.values.data(), g.size()), z0.x / g.dx());
  CVec out(g.n());
  for (int j = 0; j < g.n(); ++j)
    out(j) = shifted[j] * std::polar(1.0, (z0.p * g.x(j) - 0.5 * z0.p * z0.x) / eta);
  return GridFunction(g, psi.eta, out);
}

struct CheckedTransform {
  GridFunction psi;
  double leak = 0.0;
  bool warning = false;  // mass pushed toward or past the grid edge
};

inline CheckedTransform displace_checked(const GridFunction& psi, const PhaseSpacePoint& z0) {
  GridFunction out = displace(psi, z0);
  const double lost = std::abs(psi.norm() - out.norm());
  const double leak = std::max(boundary_leak(out), lost);
  return {out, leak, leak > 1e-8};
}

// Pi(z0) psi(x) = exp(2 i p0 (x - x0) / eta) psi(2 x0 - x).
inline GridFunction reflect(const GridFunction& psi, const PhaseSpacePoint& z0) {
  const Grid& g = psi.grid;
  const double eta = psi.eta;
  CVec out(g.n());
  for (int j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    out(j) = interpolate(psi, 2.0 * z0.x - x) * std::polar(1.0, 2.0 * z0.p * (x - z0.x) / eta);
  }
  return GridFunction(g, psi.eta, out);
}

inline OperatorMatrix displacement_operator(const Grid& g, double eta, const PhaseSpacePoint& z0) {
  CMat k(g.n(), g.n());
  for (int j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    const cplx ph = std::polar(1.0, (z0.p * x - 0.5 * z0.p * z0.x) / eta);
    k.row(j) = (ph / g.dx()) * interpolation_weights(g, x - z0.x).cast<cplx>().transpose();
  }
  return OperatorMatrix(g, Eta(eta), k);
}

inline OperatorMatrix reflection_operator(const Grid& g, double eta, const PhaseSpacePoint& z0) {
  CMat k(g.n(), g.n());
  for (int j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    const cplx ph = std::polar(1.0, 2.0 * z0.p * (x - z0.x) / eta);
    k.row(j) = (ph / g.dx()) * interpolation_weights(g, 2.0 * z0.x - x).cast<cplx>().transpose();
  }
  return OperatorMatrix(g, Eta(eta), k);
}

}  // namespace wignerlab
