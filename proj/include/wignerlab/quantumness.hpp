#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "symplectic.hpp"
#include "weyl.hpp"

namespace wignerlab {

// Classical Gaussian density (2 pi)^{-1} det(Sigma)^{-1/2} exp(-1/2 Sigma^{-1}(z - z0).(z - z0)), n = 1.
struct GaussianStateSpec {
  RMat sigma = RMat::Identity(2, 2);
  RVec mean = RVec::Zero(2);
};

inline PhaseSpaceFunction gaussian_state(const Grid& g, double eta, const GaussianStateSpec& spec) {
  detail::require_positive_definite(spec.sigma, "gaussian_state");
  if (spec.sigma.rows() != 2) throw ParameterError("gaussian_state: grids are one-dimensional (n = 1)");
  const RMat inv = spec.sigma.inverse();
  const double pre = 1.0 / (2.0 * kPi * std::sqrt(spec.sigma.determinant()));
  return sample_symbol(
      g, eta,
      [&](double x, double p) {
        RVec z(2);
        z << x - spec.mean(0), p - spec.mean(1);
        return cplx(pre * std::exp(-0.5 * z.dot(inv * z)), 0.0);
      },
      PhaseKind::density);
}

// psi_M(x) = (pi eta)^{-1/4} X^{1/4} exp(-M (x - x0)^2 / (2 eta)), M = X + iY, X > 0.
struct GaussianWavepacket {
  double X = 1.0;
  double Y = 0.0;
  double x0 = 0.0;

  GridFunction wavefunction(const Grid& g, double eta) const {
    if (!(X > 0.0)) throw ConfigurationError("wavepacket requires X > 0");
    const cplx m(X, Y);
    CVec v(g.n());
    const double pre = std::pow(kPi * eta, -0.25) * std::pow(X, 0.25);
    for (int j = 0; j < g.n(); ++j) {
      const double d = g.x(j) - x0;
      v(j) = pre * std::exp(-m * d * d / (2.0 * eta));
    }
    return GridFunction(g, Eta(eta), v);
  }
  // G = [[X + Y^2/X, Y/X], [Y/X, 1/X]] = S^T S
  RMat G() const {
    RMat g(2, 2);
    g << X + Y * Y / X, Y / X, Y / X, 1.0 / X;
    return g;
  }
  // S = [[X^{1/2}, 0], [X^{-1/2} Y, X^{-1/2}]]
  RMat S() const {
    RMat s(2, 2);
    s << std::sqrt(X), 0.0, Y / std::sqrt(X), 1.0 / std::sqrt(X);
    return s;
  }
  // (pi eta)^{-1} exp(-G (z - z0).(z - z0) / eta)
  PhaseSpaceFunction wigner(const Grid& g, double eta) const {
    const RMat gm = G();
    return sample_symbol(
        g, eta,
        [&](double x, double p) {
          RVec z(2);
          z << x - x0, p;
          return cplx(std::exp(-z.dot(gm * z) / eta) / (kPi * eta), 0.0);
        },
        PhaseKind::wigner);
  }
  // F_eta psi_M = (pi eta)^{-1/4} X^{1/4} M^{-1/2} exp(-M^{-1} p^2 / (2 eta)), principal root (x0 = 0).
  GridFunction fourier(const Grid& pgrid, double eta) const {
    const cplx m(X, Y);
    const cplx minv = 1.0 / m;
    const cplx root = 1.0 / std::sqrt(m);
    CVec v(pgrid.n());
    const double pre = std::pow(kPi * eta, -0.25) * std::pow(X, 0.25);
    for (int k = 0; k < pgrid.n(); ++k) {
      const double p = pgrid.x(k);
      v(k) = pre * root * std::exp(-minv * p * p / (2.0 * eta)) * std::polar(1.0, -p * x0 / eta);
    }
    return GridFunction(pgrid, Eta(eta), v);
  }
};

struct CovarianceMatrix {
  RVec mean = RVec::Zero(2);
  RMat sigma = RMat::Zero(2, 2);
};

inline CovarianceMatrix covariance_matrix(const PhaseSpaceFunction& w) {
  const double mass = w.integral().real();
  if (std::abs(mass - 1.0) > 1e-6) throw ValidationError("covariance_matrix: integral " + std::to_string(mass) + " != 1");
  const int n = w.grid.n();
  double mx = 0, mp = 0, xx = 0, pp = 0, xp = 0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double v = w.values(j, k).real(), x = w.x(j), p = w.p(k);
      mx += v * x;
      mp += v * p;
      xx += v * x * x;
      pp += v * p * p;
      xp += v * x * p;
    }
  const double c = w.cell();
  CovarianceMatrix out;
  out.mean << mx * c, mp * c;
  out.sigma << xx * c - out.mean(0) * out.mean(0), xp * c - out.mean(0) * out.mean(1),
      xp * c - out.mean(0) * out.mean(1), pp * c - out.mean(1) * out.mean(1);
  return out;
}

struct AdmissibilityReport {
  double eta = 0.0;
  bool positive_definite = false;
  RVec lambda;                     // symplectic eigenvalues when positive definite
  bool eigenvalue_criterion = false;  // eta <= 2 lambda_min
  double matrix_min_eigenvalue = 0.0;  // of Sigma + i eta J / 2
  cplx matrix_determinant;
  bool matrix_criterion = false;
  std::vector<double> rs_margins;  // dx_j^2 dp_j^2 - cov(x_j, p_j)^2 - eta^2 / 4
  bool rs_satisfied = false;
  bool admissible = false;
};

// Quantum admissibility of a Gaussian with covariance Sigma at parameter eta.
inline AdmissibilityReport gaussian_admissible(const RMat& sigma, double eta) {
  const int n = half_dimension(sigma);
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
    throw ParameterError("gaussian_admissible: matrix is not symmetric");
  AdmissibilityReport r;
  r.eta = Eta(eta);
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;

  Eigen::SelfAdjointEigenSolver<RMat> es(sigma, Eigen::EigenvaluesOnly);
  r.positive_definite = es.eigenvalues().minCoeff() > 1e-14 * es.eigenvalues().cwiseAbs().maxCoeff();
  if (r.positive_definite) {
    r.lambda = symplectic_eigenvalues(sigma).lambda;
    r.eigenvalue_criterion = eta <= 2.0 * r.lambda.minCoeff() * (1.0 + 1e-12);
  }

  const CMat m = sigma.cast<cplx>() + cplx(0.0, 0.5 * eta) * standard_J(n).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> ms(m, Eigen::EigenvaluesOnly);
  r.matrix_min_eigenvalue = ms.eigenvalues().minCoeff();
  r.matrix_determinant = m.determinant();
  r.matrix_criterion = r.matrix_min_eigenvalue >= -tol;

  r.rs_satisfied = true;
  for (int j = 0; j < n; ++j) {
    const double margin = sigma(j, j) * sigma(n + j, n + j) - sigma(j, n + j) * sigma(j, n + j) - 0.25 * eta * eta;
    r.rs_margins.push_back(margin);
    if (margin < -tol) r.rs_satisfied = false;
  }
  r.admissible = r.positive_definite && r.eigenvalue_criterion && r.matrix_criterion;
  return r;
}

struct KLMReport {
  double eta = 0.0;
  std::uint64_t seed = 0;
  int samples = 0;
  std::vector<PhaseSpacePoint> points;
  double continuity = 0.0;  // |(2 pi eta) a_sigma(0) - 1|
  bool continuity_ok = false;
  double hessian_min_eigenvalue = 0.0;  // of -a''(0) + i eta J / 2
  bool hessian_ok = false;
  double fourth_moment_x = 0.0;  // from the fourth derivative of the reduced symbol at 0
  double fourth_moment_p = 0.0;
  bool fourth_moments_ok = false;
  double min_eigenvalue = 0.0;  // of Lambda'
  double matrix_norm = 0.0;
  bool matrix_ok = false;
  bool pass = false;
  std::vector<std::string> violations;
};

namespace detail {

// Direct quadrature of (2 pi eta)^{-1} int exp(-i sigma(z, z') / eta) a(z') dz' at one point.
class TwistedSymbolEvaluator {
 public:
  TwistedSymbolEvaluator(const PhaseSpaceFunction& a, double eta) : a_(a), eta_(eta) {}
  cplx operator()(double x, double p) const {
    const int n = a_.grid.n();
    Eigen::VectorXcd u(n), v(n);
    for (int j = 0; j < n; ++j) u(j) = std::polar(1.0, -p * a_.x(j) / eta_);
    for (int k = 0; k < n; ++k) v(k) = std::polar(1.0, x * a_.p(k) / eta_);
    return (u.transpose() * a_.values * v)(0) * a_.cell() / (2.0 * kPi * eta_);
  }

 private:
  const PhaseSpaceFunction& a_;
  double eta_;
};

}  // namespace detail

// Samples the phase-twisted matrix exp(-i sigma(z_j, z_k) / (2 eta)) a_sigma(z_j - z_k) at seeded points,
// plus the second-order and fourth-order necessary conditions at the origin.
inline KLMReport klm_test(const PhaseSpaceFunction& a, double eta, int samples = 40, std::uint64_t seed = 1) {
  KLMReport r;
  r.eta = Eta(eta);
  r.seed = seed;
  r.samples = samples;
  if (samples < 2) throw ConfigurationError("klm_test: need at least two sample points");
  if ((a.values.imag().cwiseAbs().maxCoeff()) > 1e-10 * std::max(1e-300, a.values.cwiseAbs().maxCoeff()))
    throw ValidationError("klm_test: function is not real");
  const double mass = a.integral().real();
  if (std::abs(mass - 1.0) > 1e-6) throw ValidationError("klm_test: integral " + std::to_string(mass) + " != 1");

  const detail::TwistedSymbolEvaluator as(a, eta);
  const double red = 2.0 * kPi * eta;  // a_reduced(w) = red * a_sigma(eta w)

  r.continuity = std::abs(red * as(0.0, 0.0) - 1.0);
  r.continuity_ok = r.continuity <= 1e-6;
  if (!r.continuity_ok) r.violations.push_back("reduced symbol is not 1 at the origin");

  // Second-order condition: the Hessian of the reduced symbol at 0 is minus the matrix of raw
  // second moments in (w_x, w_p) order, differentiated exactly under the quadrature.
  {
    double xx = 0, pp = 0, xp = 0;
    for (int j = 0; j < a.grid.n(); ++j)
      for (int k = 0; k < a.grid.n(); ++k) {
        const double v = a.values(j, k).real(), x = a.x(j), p = a.p(k);
        xx += v * x * x;
        pp += v * p * p;
        xp += v * x * p;
      }
    RMat hess(2, 2);
    hess << -pp, xp, xp, -xx;
    hess *= a.cell();
    const CMat m = (-hess).cast<cplx>() + cplx(0.0, 0.5 * eta) * standard_J(1).cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMat> es(m, Eigen::EigenvaluesOnly);
    r.hessian_min_eigenvalue = es.eigenvalues().minCoeff();
    r.hessian_ok = r.hessian_min_eigenvalue >= -1e-5 * std::max(1.0, m.cwiseAbs().maxCoeff());
    if (!r.hessian_ok) r.violations.push_back("second-order condition at the origin fails");
  }

  // Fourth moments: <x^4> = d^4/dw_p^4 and <p^4> = d^4/dw_x^4 of the reduced symbol at 0.
  {
    double sx = 0, sp = 0;
    for (int j = 0; j < a.grid.n(); ++j)
      for (int k = 0; k < a.grid.n(); ++k) {
        sx += a.values(j, k).real() * a.x(j) * a.x(j);
        sp += a.values(j, k).real() * a.p(k) * a.p(k);
      }
    const double spread = std::sqrt(std::max({std::abs(sx * a.cell()), std::abs(sp * a.cell()), 1e-6}));
    const double h = 0.05 / spread;
    auto d4 = [&](double ux, double up) {
      auto f = [&](double t) { return red * as(eta * t * ux, eta * t * up).real(); };
      return (f(2 * h) - 4 * f(h) + 6 * f(0) - 4 * f(-h) + f(-2 * h)) / std::pow(h, 4);
    };
    r.fourth_moment_x = d4(0.0, 1.0);
    r.fourth_moment_p = d4(1.0, 0.0);
    const double tol = 1e-6 * std::pow(spread, 4);
    r.fourth_moments_ok = r.fourth_moment_x >= -tol && r.fourth_moment_p >= -tol;
    if (!r.fourth_moments_ok) r.violations.push_back("negative fourth moment");
  }

  // Seeded points, uniform in a disc of radius 3 sqrt(eta) inside the inner 80% of the window.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double window = 0.8 * 0.5 * std::min(a.grid.length(), a.grid.dual(a.eta).length());
  const double radius = std::min(3.0 * std::sqrt(eta), 0.5 * window);
  for (int i = 0; i < samples; ++i) {
    const double rr = radius * std::sqrt(uni(rng));
    const double th = 2.0 * kPi * uni(rng);
    r.points.push_back({rr * std::cos(th), rr * std::sin(th)});
  }
  CMat lam(samples, samples);
  for (int j = 0; j < samples; ++j)
    for (int k = j; k < samples; ++k) {
      const auto& zj = r.points[j];
      const auto& zk = r.points[k];
      const cplx v = std::polar(1.0, -sigma(zj, zk) / (2.0 * eta)) * as(zj.x - zk.x, zj.p - zk.p);
      lam(j, k) = v;
      lam(k, j) = std::conj(v);
    }
  Eigen::SelfAdjointEigenSolver<CMat> es(lam, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.matrix_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  r.matrix_ok = r.min_eigenvalue >= -1e-8 * r.matrix_norm;
  if (!r.matrix_ok) r.violations.push_back("sampled matrix has a negative eigenvalue");

  r.pass = r.continuity_ok && r.hessian_ok && r.fourth_moments_ok && r.matrix_ok;
  return r;
}

enum class EtaVerdict { pure, mixed_admissible, inadmissible };

inline std::string to_string(EtaVerdict v) {
  switch (v) {
    case EtaVerdict::pure: return "pure";
    case EtaVerdict::mixed_admissible: return "mixed-admissible";
    case EtaVerdict::inadmissible: return "inadmissible";
  }
  return "inadmissible";
}

struct EtaScanEntry {
  double eta = 0.0;
  double min_eigenvalue = 0.0;
  double psd_tolerance = 0.0;
  double purity_surrogate = 0.0;  // (2 pi eta) int a^2
  double trace = 0.0;
  EtaVerdict verdict = EtaVerdict::inadmissible;
};

struct EtaScanResult {
  std::vector<EtaScanEntry> entries;
  bool monotone = true;  // no admissible eta above an inadmissible one
};

// Quantizes (2 pi eta) Op_eta(a) for each eta and classifies it.
inline EtaScanResult eta_scan(const PhaseSpaceFunction& a, const std::vector<double>& etas) {
  if (etas.empty()) throw ParameterError("eta_scan: no eta values given");
  const double mass = a.integral().real();
  if (std::abs(mass - 1.0) > 1e-6) throw ValidationError("eta_scan: integral " + std::to_string(mass) + " != 1");
  EtaScanResult out;
  const double sq = a.values.squaredNorm() * a.cell();
  for (double e : etas) {
    EtaScanEntry en;
    en.eta = Eta(e);
    const OperatorMatrix op = cplx(2.0 * kPi * e) * weyl_quantize(a, e);
    const auto v = validate_density(op);
    en.min_eigenvalue = v.report.min_eigenvalue;
    en.psd_tolerance = v.report.psd_tolerance;
    en.trace = v.report.trace;
    en.purity_surrogate = 2.0 * kPi * e * sq;
    const bool psd = v.report.positive && v.report.hermitian;
    if (!psd || en.purity_surrogate > 1.0 + 1e-6)
      en.verdict = EtaVerdict::inadmissible;
    else if (en.purity_surrogate >= 1.0 - 1e-6)
      en.verdict = EtaVerdict::pure;
    else
      en.verdict = EtaVerdict::mixed_admissible;
    out.entries.push_back(en);
  }
  std::vector<EtaScanEntry> sorted = out.entries;
  std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.eta < y.eta; });
  bool seen_bad = false;
  for (auto& en : sorted) {
    if (en.verdict == EtaVerdict::inadmissible) seen_bad = true;
    else if (seen_bad) out.monotone = false;
  }
  return out;
}

// f(x, p) = (1 - a x^2 / 2 - b p^2 / 2) exp(-(a^2 x^4 + b^2 p^4)); a, b > 0.
// Its inverse Fourier transform has unit mass but a negative fourth moment -24 a^2.
struct NarcowichOConnell {
  double a = 0.5;
  double b = 0.5;

  double f(double x, double p) const {
    return (1.0 - 0.5 * a * x * x - 0.5 * b * p * p) * std::exp(-(a * a * std::pow(x, 4) + b * b * std::pow(p, 4)));
  }
  // Five-point stencil for the fourth x-derivative at the origin.
  double fourth_derivative(double h = 0.05) const {
    return (f(2 * h, 0) - 4 * f(h, 0) + 6 * f(0, 0) - 4 * f(-h, 0) + f(-2 * h, 0)) / std::pow(h, 4);
  }
  double expected_fourth_derivative() const { return -24.0 * a * a; }

  // rho(x, p) = (2 pi)^{-2} int exp(-i (x x' + p p')) f(x', p') dx' dp', sampled on the grid.
  PhaseSpaceFunction density(const Grid& g, double eta) const {
    const int n = g.n();
    const Grid kx = g.dual(1.0);
    const Grid pgrid = g.dual(eta);
    const Grid kp = pgrid.dual(1.0);
    CMat fs(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) fs(j, k) = f(kx.x(j), kp.x(k));
    CMat mid(n, n), out(n, n);
    std::vector<cplx> buf(n);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) buf[j] = fs(j, k);
      const auto t = continuous_ft(buf, kx.x_min(), kx.dx(), g.x_min(), g.dx(), 1.0, -1);
      for (int j = 0; j < n; ++j) mid(j, k) = t[j];
    }
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) buf[k] = mid(j, k);
      const auto t = continuous_ft(buf, kp.x_min(), kp.dx(), pgrid.x_min(), pgrid.dx(), 1.0, -1);
      for (int k = 0; k < n; ++k) out(j, k) = t[k].real() / (4.0 * kPi * kPi);
    }
    return PhaseSpaceFunction(g, Eta(eta), out, PhaseKind::density);
  }
};

}  // namespace wignerlab
