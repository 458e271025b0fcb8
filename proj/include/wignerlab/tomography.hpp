#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "weyl.hpp"

namespace wignerlab {

// Marginals R(X, theta) = int W(z) delta(X - x cos(theta) - p sin(theta)) dz, one row per angle.
struct TomogramSet {
  Grid xgrid;  // X samples
  double eta;
  std::vector<double> angles;
  Eigen::MatrixXd values;  // angles.size() x N

  TomogramSet(Grid g, double e, std::vector<double> th, Eigen::MatrixXd v)
      : xgrid(g), eta(Eta(e)), angles(std::move(th)), values(std::move(v)) {
    if (values.rows() != static_cast<int>(angles.size()) || values.cols() != xgrid.n())
      throw ConfigurationError("tomogram array shape does not match angles and grid");
  }
  double mass(int row) const { return values.row(row).sum() * xgrid.dx(); }
};

// M angles theta_k = k pi / M.
inline std::vector<double> uniform_angles(int m) {
  if (m < 1) throw ConfigurationError("need at least one angle");
  std::vector<double> a(m);
  for (int k = 0; k < m; ++k) a[k] = kPi * k / m;
  return a;
}

namespace detail {

inline Eigen::VectorXd interpolate_real(const Grid& g, const Eigen::VectorXd& f, const Grid& at, double scale) {
  Eigen::VectorXd out(at.n());
  for (int i = 0; i < at.n(); ++i) out(i) = interpolation_weights(g, at.x(i) * scale).dot(f);
  return out;
}

}  // namespace detail

// One band-limited shear per angle, then a sum along the sheared axis.
inline TomogramSet radon(const PhaseSpaceFunction& w, const std::vector<double>& angles) {
  if (angles.empty()) throw ParameterError("radon: empty angle list");
  const Grid& g = w.grid;
  const Grid pg = g.dual(w.eta);
  const int n = g.n();
  const Eigen::MatrixXd wr = w.values.real();
  Eigen::MatrixXd out(angles.size(), n);
  parallel_for(static_cast<int>(angles.size()), [&](int a) {
    const double c = std::cos(angles[a]), s = std::sin(angles[a]);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    std::vector<cplx> line(n);
    if (std::abs(c) >= std::abs(s)) {
      // W(r - (s/c) p, p) summed over p, read at r = X / c.
      for (int l = 0; l < n; ++l) {
        for (int j = 0; j < n; ++j) line[j] = wr(j, l);
        const auto sh = shift_samples(line, (s / c) * pg.x(l) / g.dx());
        for (int j = 0; j < n; ++j) h(j) += sh[j].real();
      }
      h *= pg.dx();
      out.row(a) = detail::interpolate_real(g, h, g, 1.0 / c).transpose() / std::abs(c);
    } else {
      // W(x, q - (c/s) x) summed over x, read at q = X / s.
      for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) line[l] = wr(j, l);
        const auto sh = shift_samples(line, (c / s) * g.x(j) / pg.dx());
        for (int l = 0; l < n; ++l) h(l) += sh[l].real();
      }
      h *= g.dx();
      out.row(a) = detail::interpolate_real(pg, h, g, 1.0 / s).transpose() / std::abs(s);
    }
  });
  return TomogramSet(g, w.eta, angles, out);
}

namespace detail {

inline void require_uniform_half_turn(const std::vector<double>& angles) {
  const int m = static_cast<int>(angles.size());
  if (m < 1) throw ParameterError("inverse_radon: empty angle list");
  const double step = kPi / m;
  for (int k = 0; k < m; ++k)
    if (std::abs(angles[k] - angles[0] - k * step) > 1e-9)
      throw ParameterError("inverse_radon: angles must be uniform over a half turn");
}

// Band-limited ramp filter with a cosine taper over the upper half of the band.
inline std::vector<cplx> ramp_response(int len, double dX) {
  std::vector<cplx> h(len, cplx(0.0));
  h[0] = 1.0 / (4.0 * dX * dX);
  for (int i = 1; i < len / 2; ++i) {
    if (i % 2 == 1) {
      const double v = -1.0 / (i * i * kPi * kPi * dX * dX);
      h[i] = v;
      h[len - i] = v;
    }
  }
  auto resp = dft(h, -1);
  for (int k = 0; k < len; ++k) {
    const double f = std::abs(static_cast<double>(signed_frequency(k, len))) / (len / 2.0);
    const double taper = f <= 0.5 ? 1.0 : std::cos(kPi * (f - 0.5));
    resp[k] *= taper * dX;
  }
  return resp;
}

}  // namespace detail

struct BackProjection {
  PhaseSpaceFunction function;
  // Set when the angular step pi/M exceeds 4/N (coarser than about N/4 angles per half turn).
  // The output is then smeared; no accuracy is claimed.
  bool underdetermined = false;
};

// Filtered backprojection onto the tomograms' phase-space grid.
inline BackProjection inverse_radon(const TomogramSet& t) {
  detail::require_uniform_half_turn(t.angles);
  for (int a = 0; a < static_cast<int>(t.angles.size()); ++a)
    if (std::abs(t.mass(a) - 1.0) > 1e-5)
      throw NormalizationError("inverse_radon: tomogram at angle " + std::to_string(t.angles[a]) + " has mass " +
                               std::to_string(t.mass(a)));
  const Grid& g = t.xgrid;
  const Grid pg = g.dual(t.eta);
  const int n = g.n();
  const int len = 2 * n, fine = 4;
  const double dX = g.dx();
  const auto resp = detail::ramp_response(len, dX);
  const int m = static_cast<int>(t.angles.size());

  // Filtered projections on a 4x finer grid spanning the padded window [x_min, x_min + 2 N dX).
  std::vector<std::vector<double>> q(m);
  parallel_for(m, [&](int a) {
    std::vector<cplx> buf(len, cplx(0.0));
    for (int i = 0; i < n; ++i) buf[i] = t.values(a, i);
    auto spec = dft(buf, -1);
    std::vector<cplx> big(fine * len, cplx(0.0));
    for (int k = 0; k < len; ++k) {
      const int f = detail::signed_frequency(k, len);
      big[f >= 0 ? f : fine * len + f] = spec[k] * resp[k];
    }
    const auto v = dft(big, +1);
    q[a].resize(fine * len);
    for (int i = 0; i < fine * len; ++i) q[a][i] = v[i].real() / len;
  });

  CMat out = CMat::Zero(n, n);
  const double h = dX / fine;
  const int period = fine * len;
  parallel_for(n, [&](int j) {
    const double x = g.x(j);
    for (int a = 0; a < m; ++a) {
      const double c = std::cos(t.angles[a]), s = std::sin(t.angles[a]);
      for (int l = 0; l < n; ++l) {
        const double u = (x * c + pg.x(l) * s - g.x_min()) / h;
        const double fl = std::floor(u);
        const double frac = u - fl;
        const int i0 = ((static_cast<long>(fl) % period) + period) % period;
        const int i1 = (i0 + 1) % period;
        out(j, l) += (1.0 - frac) * q[a][i0] + frac * q[a][i1];
      }
    }
  });
  out *= kPi / m;
  return {PhaseSpaceFunction(g, Eta(t.eta), out, PhaseKind::wigner), 4 * m < n};
}

inline constexpr double kReconstructionPsdTolerance = 1e-4;

struct Reconstruction {
  PhaseSpaceFunction wigner;
  bool underdetermined = false;
  OperatorMatrix op;  // (2 pi eta) Op(W), Hermitian part, trace-normalized
  DensityReport report;  // validated with a 1e-4 relative PSD tolerance for backprojection ringing
  double purity = 0.0;   // Tr rho^2 of op
  std::optional<DensityMatrix> density;
  std::optional<double> repair_distance;  // Frobenius distance moved by PSD projection, when repaired
};

// Nearest unit-trace PSD matrix: negative eigenvalues set to zero, then trace renormalized.
inline OperatorMatrix project_psd(const OperatorMatrix& op, double* distance = nullptr) {
  const auto es = detail::hermitian_eigen(op.matrix(), true);
  Eigen::VectorXd l = es.eigenvalues().cwiseMax(0.0);
  if (!(l.sum() > 0.0)) throw ValidationError("project_psd: no positive spectrum");
  l /= l.sum();
  const CMat m = es.eigenvectors() * l.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  if (distance) *distance = (m - op.matrix()).norm();
  return OperatorMatrix::from_matrix(op.grid, op.eta, m);
}

// With repair, a reconstruction failing positivity is projected onto the PSD cone and the
// projection distance is recorded; otherwise it is returned unrepaired with its violation report.
inline Reconstruction reconstruct_density(const TomogramSet& t, bool repair = false) {
  BackProjection bp = inverse_radon(t);
  OperatorMatrix op = cplx(2.0 * kPi * t.eta) * weyl_quantize(bp.function);
  op.kernel = detail::hermitian_part(op.kernel);
  const cplx tr = op.trace();
  if (std::abs(tr) < 1e-12) throw ValidationError("reconstruct_density: vanishing trace");
  op.kernel /= tr.real();
  auto v = validate_density(op, kReconstructionPsdTolerance);
  Reconstruction r{bp.function, bp.underdetermined, op, v.report, 0.0, v.density, std::nullopt};
  if (repair && !v.density) {
    double d = 0.0;
    r.op = project_psd(op, &d);
    r.repair_distance = d;
    auto fixed = validate_density(r.op, kReconstructionPsdTolerance);
    r.report = fixed.report;
    r.density = fixed.density;
  }
  r.purity = r.op.matrix().squaredNorm();
  return r;
}

struct PauliPair {
  GridFunction psi1;  // ~ exp(-alpha x^2)
  GridFunction psi2;  // ~ exp(-conj(alpha) x^2)
  double overlap2 = 0.0;           // |<psi1|psi2>|^2 on the grid
  double expected_overlap2 = 0.0;  // Re(alpha) / |alpha|
  double position_marginal_gap = 0.0;
  double momentum_marginal_gap = 0.0;
};

inline PauliPair pauli_pair(const Grid& g, double eta, cplx alpha) {
  if (!(alpha.real() > 0.0)) throw ConfigurationError("pauli_pair: Re(alpha) must be > 0");
  if (alpha.imag() == 0.0) throw ParameterError("pauli_pair: Im(alpha) = 0 gives identical states");
  CVec a(g.n()), b(g.n());
  for (int j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    a(j) = std::exp(-alpha * x * x);
    b(j) = std::exp(-std::conj(alpha) * x * x);
  }
  PauliPair out{GridFunction(g, Eta(eta), a).normalized(), GridFunction(g, Eta(eta), b).normalized()};
  out.overlap2 = std::norm(out.psi1.inner(out.psi2));
  out.expected_overlap2 = alpha.real() / std::abs(alpha);
  out.position_marginal_gap = (out.psi1.values.cwiseAbs2() - out.psi2.values.cwiseAbs2()).cwiseAbs().maxCoeff();
  const auto f1 = eta_fourier(out.psi1), f2 = eta_fourier(out.psi2);
  out.momentum_marginal_gap = (f1.values.cwiseAbs2() - f2.values.cwiseAbs2()).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace wignerlab
