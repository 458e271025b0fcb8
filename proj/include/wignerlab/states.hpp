#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "numerics.hpp"

namespace wignerlab {

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kPsdRelativeTolerance = 1e-10;

// Integral kernel K(x_j, x_k) of an operator on grid functions: (A psi)_j = sum_k K_jk psi_k dx.
struct OperatorMatrix {
  Grid grid;
  Eta eta;
  CMat kernel;

  OperatorMatrix(Grid g, Eta e, CMat k) : grid(g), eta(e), kernel(std::move(k)) {
    if (kernel.rows() != grid.n() || kernel.cols() != grid.n())
      throw ConfigurationError("operator kernel shape does not match grid");
  }

  // Matrix in the orthonormal sample basis delta_j / sqrt(dx).
  CMat matrix() const { return kernel * grid.dx(); }
  static OperatorMatrix from_matrix(Grid g, Eta e, const CMat& m) { return OperatorMatrix(g, e, m / g.dx()); }
  static OperatorMatrix identity(Grid g, Eta e) {
    return OperatorMatrix(g, e, CMat::Identity(g.n(), g.n()) / g.dx());
  }

  GridFunction apply(const GridFunction& psi) const {
    if (!(psi.grid == grid)) throw ParameterError("operator and grid function live on different grids");
    return GridFunction(grid, eta, kernel * psi.values * grid.dx());
  }
  OperatorMatrix adjoint() const { return OperatorMatrix(grid, eta, kernel.adjoint()); }
  cplx trace() const { return kernel.diagonal().sum() * grid.dx(); }
  double hs_norm2() const { return kernel.squaredNorm() * grid.dx() * grid.dx(); }
};

inline OperatorMatrix compose(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (!(a.grid == b.grid)) throw ParameterError("compose: operators live on different grids");
  return OperatorMatrix(a.grid, a.eta, a.kernel * b.kernel * a.grid.dx());
}

inline OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  return OperatorMatrix(a.grid, a.eta, a.kernel + b.kernel);
}

inline OperatorMatrix operator*(cplx s, const OperatorMatrix& a) { return OperatorMatrix(a.grid, a.eta, s * a.kernel); }

struct DensityReport {
  double hermiticity_residue = 0.0;  // max |K - K^dagger| / max |K|
  double trace = 0.0;                // real part of sum K_jj dx
  double trace_from_spectrum = 0.0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double psd_tolerance = 0.0;  // relative tolerance * max |lambda|
  double clamped_total = 0.0;  // sum of |lambda| over clamped small negatives
  bool hermitian = false;
  bool positive = false;
  bool unit_trace = false;
  std::vector<std::string> violations;

  bool valid() const { return hermitian && positive && unit_trace; }
};

class DensityMatrix {
 public:
  const OperatorMatrix& op() const { return op_; }
  const DensityReport& report() const { return report_; }
  const Grid& grid() const { return op_.grid; }
  double eta() const { return op_.eta; }

 private:
  DensityMatrix(OperatorMatrix op, DensityReport r) : op_(std::move(op)), report_(std::move(r)) {}
  OperatorMatrix op_;
  DensityReport report_;
  friend struct DensityValidation validate_density(const OperatorMatrix& op, double psd_relative_tolerance);
};

struct DensityValidation {
  DensityReport report;
  std::optional<DensityMatrix> density;
};

namespace detail {

inline CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

inline Eigen::SelfAdjointEigenSolver<CMat> hermitian_eigen(const CMat& m, bool vectors) {
  return Eigen::SelfAdjointEigenSolver<CMat>(hermitian_part(m), vectors ? Eigen::ComputeEigenvectors
                                                                        : Eigen::EigenvaluesOnly);
}

}  // namespace detail

// Eigenvalues down to -psd_relative_tolerance * max |lambda| count as nonnegative.
inline DensityValidation validate_density(const OperatorMatrix& op, double psd_relative_tolerance = kPsdRelativeTolerance) {
  DensityReport r;
  const CMat m = op.matrix();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  r.hermiticity_residue = (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
  r.hermitian = r.hermiticity_residue <= kHermitianTolerance;
  if (!r.hermitian) r.violations.push_back("kernel is not Hermitian");

  const Eigen::VectorXd lambda = detail::hermitian_eigen(m, false).eigenvalues();
  r.min_eigenvalue = lambda.minCoeff();
  r.max_eigenvalue = lambda.maxCoeff();
  r.psd_tolerance = psd_relative_tolerance * lambda.cwiseAbs().maxCoeff();
  r.positive = r.min_eigenvalue >= -r.psd_tolerance;
  for (int i = 0; i < lambda.size(); ++i)
    if (lambda(i) < 0.0 && lambda(i) >= -r.psd_tolerance) r.clamped_total += -lambda(i);
  if (!r.positive) r.violations.push_back("negative eigenvalue " + std::to_string(r.min_eigenvalue));

  r.trace = m.trace().real();
  r.trace_from_spectrum = lambda.sum();
  r.unit_trace = std::abs(r.trace - 1.0) <= kTraceTolerance;
  if (!r.unit_trace) r.violations.push_back("trace " + std::to_string(r.trace) + " differs from 1");

  DensityValidation out{r, std::nullopt};
  if (r.valid()) out.density = DensityMatrix(op, r);
  return out;
}

inline DensityMatrix require_density(const OperatorMatrix& op) {
  auto v = validate_density(op);
  if (!v.density) {
    std::string msg = "not a density matrix:";
    for (auto& s : v.report.violations) msg += " " + s + ";";
    throw ValidationError(msg);
  }
  return *v.density;
}

inline DensityMatrix pure_density(const GridFunction& psi) {
  if (!psi.is_normalized()) throw NormalizationError("pure_density: psi is not normalized");
  return require_density(OperatorMatrix(psi.grid, psi.eta, psi.values * psi.values.adjoint()));
}

struct MixedStateSpec {
  std::vector<std::pair<double, GridFunction>> components;
};

inline DensityMatrix mix(const MixedStateSpec& spec) {
  if (spec.components.empty()) throw ConfigurationError("mix: no components");
  const Grid g = spec.components.front().second.grid;
  const Eta e = spec.components.front().second.eta;
  double total = 0.0;
  CMat k = CMat::Zero(g.n(), g.n());
  for (const auto& [w, psi] : spec.components) {
    if (!(psi.grid == g) || !same_eta(psi.eta, e)) throw ParameterError("mix: components on different grids");
    if (!(w >= 0.0)) throw ConfigurationError("mix: negative weight");
    if (!psi.is_normalized()) throw NormalizationError("mix: component is not normalized");
    total += w;
    k += w * psi.values * psi.values.adjoint();
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigurationError("mix: weights must sum to 1");
  return require_density(OperatorMatrix(g, e, k));
}

struct SpectralData {
  std::vector<double> eigenvalues;       // descending
  std::vector<GridFunction> eigenvectors;  // normalized on the grid
};

inline SpectralData spectral_decompose(const DensityMatrix& rho) {
  const CMat m = rho.op().matrix();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance * std::max(m.cwiseAbs().maxCoeff(), 1e-300))
    throw ValidationError("spectral_decompose: kernel is not Hermitian");
  auto es = detail::hermitian_eigen(m, true);
  const int n = m.rows();
  SpectralData out;
  const double inv_sqrt_dx = 1.0 / std::sqrt(rho.grid().dx());
  for (int i = n - 1; i >= 0; --i) {
    out.eigenvalues.push_back(es.eigenvalues()(i));
    out.eigenvectors.emplace_back(rho.grid(), Eta(rho.eta()), es.eigenvectors().col(i) * inv_sqrt_dx);
  }
  return out;
}

struct StateStats {
  double purity = 0.0;
  double entropy = 0.0;  // natural log
  double clamped_total = 0.0;
  int rank = 0;  // eigenvalues above the clamp tolerance
};

inline StateStats state_stats(const SpectralData& s) {
  double top = 0.0;
  for (double l : s.eigenvalues) top = std::max(top, std::abs(l));
  const double eps = kPsdRelativeTolerance * top;
  StateStats st;
  for (double l : s.eigenvalues) {
    if (l < -eps) throw ValidationError("state_stats: eigenvalue " + std::to_string(l) + " below tolerance");
    if (l <= eps) {
      if (l < 0.0) st.clamped_total += -l;
      continue;
    }
    ++st.rank;
    st.purity += l * l;
    st.entropy -= l * std::log(l);
  }
  return st;
}

inline StateStats state_stats(const DensityMatrix& rho) { return state_stats(spectral_decompose(rho)); }

// Phase-space translate of the ground state, sampled and renormalized on the grid.
inline GridFunction coherent_state(const Grid& g, double eta, double x0 = 0.0, double p0 = 0.0) {
  const Eta e(eta);
  CVec v(g.n());
  const double c = std::pow(kPi * eta, -0.25);
  for (int j = 0; j < g.n(); ++j) {
    const double x = g.x(j);
    v(j) = c * std::exp(-(x - x0) * (x - x0) / (2.0 * eta)) * std::polar(1.0, (p0 * x - 0.5 * p0 * x0) / eta);
  }
  return GridFunction(g, e, v).normalized();
}

// Oscillator eigenfunction of order n (physicists' Hermite polynomials in x / sqrt(eta)).
inline GridFunction hermite_state(const Grid& g, double eta, int order) {
  if (order < 0) throw ConfigurationError("hermite_state: negative order");
  const Eta e(eta);
  CVec v(g.n());
  double log_norm = -0.25 * std::log(kPi * eta) - 0.5 * (order * std::log(2.0) + std::lgamma(order + 1.0));
  for (int j = 0; j < g.n(); ++j) {
    const double u = g.x(j) / std::sqrt(eta);
    double h0 = 1.0, h1 = 2.0 * u;
    double h = order == 0 ? h0 : h1;
    for (int k = 2; k <= order; ++k) {
      h = 2.0 * u * h1 - 2.0 * (k - 1) * h0;
      h0 = h1;
      h1 = h;
    }
    v(j) = h * std::exp(log_norm - 0.5 * u * u);
  }
  return GridFunction(g, e, v).normalized();
}

}  // namespace wignerlab
