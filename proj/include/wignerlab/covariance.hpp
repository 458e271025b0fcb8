#pragma once

#include <algorithm>
#include <cmath>

#include "symplectic.hpp"
#include "weyl.hpp"

namespace wignerlab {

// Residuals of the metaplectic covariance identities for one operator S and probe state psi.
// Wavefunction comparisons use samples with |x| <= L/4; phase-space comparisons use the
// points of a 9 x 9 lattice with spacing 0.5 sqrt(eta), evaluated by band-limited interpolation.
struct CovarianceResiduals {
  double displacement = 0.0;  // S D(z0) S^-1 psi vs D(S z0) psi
  double reflection = 0.0;    // S Pi(z0) S^-1 psi vs Pi(S z0) psi
  double wigner = 0.0;        // W(S^-1 psi)(z) vs W psi(S z)
  double ambiguity = 0.0;     // Amb(S^-1 psi)(z) vs Amb psi(S z)
  double weyl = 0.0;          // S Op(a) S^-1 psi vs Op(a o S^-1) psi
  double max() const { return std::max({displacement, reflection, wigner, ambiguity, weyl}); }
};

template <typename Symbol>
CovarianceResiduals covariance_residuals(const MetaplecticSpec& spec, const GridFunction& psi, const PhaseSpacePoint& z0,
                                         Symbol&& symbol) {
  const Grid& g = psi.grid;
  const double eta = psi.eta;
  const MetaplecticSpec inv = spec.inverse();
  const RMat s = spec.projection();
  const RMat si = SymplecticMatrix(s).inverse().matrix();
  auto apply_s = [&](const RVec& v) { return PhaseSpacePoint{v(0), v(1)}; };
  RVec zv(2);
  zv << z0.x, z0.p;
  const PhaseSpacePoint sz = apply_s(s * zv);

  auto interior = [&](const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (int j = 0; j < g.n(); ++j)
      if (std::abs(g.x(j)) <= 0.25 * g.length()) m = std::max(m, std::abs(a.values(j) - b.values(j)));
    return m;
  };

  CovarianceResiduals r;
  const GridFunction pulled = metaplectic_apply(inv, psi);
  r.displacement = interior(metaplectic_apply(spec, displace(pulled, z0)), displace(psi, sz));
  r.reflection = interior(metaplectic_apply(spec, reflect(pulled, z0)), reflect(psi, sz));

  const GridFunction pn = pulled.normalized();
  const PhaseSpaceFunction wi = wigner(pn).function, wp = wigner(psi).function;
  const PhaseSpaceFunction ai = ambiguity(pn), ap = ambiguity(psi);
  const double step = 0.5 * std::sqrt(eta);
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b) {
      RVec z(2);
      z << step * a, step * b;
      const RVec w = s * z;
      r.wigner = std::max(r.wigner, std::abs(interpolate(wi, z(0), z(1)) - interpolate(wp, w(0), w(1))));
      r.ambiguity = std::max(r.ambiguity, std::abs(interpolate(ai, z(0), z(1)) - interpolate(ap, w(0), w(1))));
    }

  const PhaseSpaceFunction a = sample_symbol(g, eta, symbol);
  const PhaseSpaceFunction as = sample_symbol(g, eta, [&](double x, double p) {
    RVec z(2);
    z << x, p;
    const RVec w = si * z;
    return symbol(w(0), w(1));
  });
  r.weyl = interior(metaplectic_apply(spec, weyl_quantize(a).apply(pulled)), weyl_quantize(as).apply(psi));
  return r;
}

}  // namespace wignerlab
