#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace wignerlab;
namespace ts = testing_support;

namespace {

double relative_l2(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  return (a.values - b.values).norm() / b.values.norm();
}

// Mean and variance of each tomogram row.
std::pair<double, double> moments(const TomogramSet& t, int row) {
  double m = 0.0, m2 = 0.0;
  for (int j = 0; j < t.xgrid.n(); ++j) {
    const double x = t.xgrid.x(j), v = t.values(row, j) * t.xgrid.dx();
    m += x * v;
    m2 += x * x * v;
  }
  return {m, m2 - m * m};
}

PhaseSpaceFunction anisotropic(const Grid& g, double eta, RMat sigma) {
  return gaussian_state(g, eta, GaussianStateSpec{std::move(sigma), RVec::Zero(2)});
}

}  // namespace

TEST(Radon, GroundStateIsRotationInvariant) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(256, eta);
  const auto w = wigner(coherent_state(g, eta)).function;
  const auto t = radon(w, uniform_angles(12));
  for (int a = 0; a < 12; ++a) {
    double err = 0.0;
    for (int j = 0; j < g.n(); ++j)
      err = std::max(err, std::abs(t.values(a, j) - std::exp(-g.x(j) * g.x(j) / eta) / std::sqrt(kPi * eta)));
    EXPECT_LE(err, 1e-8) << "angle " << t.angles[a];
    EXPECT_NEAR(t.mass(a), 1.0, 1e-10);
  }
}

TEST(Radon, ZeroAngleIsPositionMarginal) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(128, eta);
  std::mt19937_64 rng(241);
  const auto psi = ts::random_superposition(rng, g, eta);
  const auto w = wigner(psi).function;
  const auto t = radon(w, {0.0, 0.5 * kPi});
  const auto m = marginals(w);
  EXPECT_LT((t.values.row(0).transpose() - m.position).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((t.values.row(1).transpose() - m.momentum).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Radon, AnisotropicVarianceFollowsQuadrature) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(256, eta);
  RMat sigma(2, 2);
  sigma << 1.2, 0.3, 0.3, 0.6;
  const auto t = radon(anisotropic(g, eta, sigma), uniform_angles(18));
  for (int a = 0; a < 18; ++a) {
    const double c = std::cos(t.angles[a]), s = std::sin(t.angles[a]);
    const auto [mean, var] = moments(t, a);
    EXPECT_NEAR(mean, 0.0, 1e-10);
    EXPECT_NEAR(var, c * c * sigma(0, 0) + s * s * sigma(1, 1) + 2 * c * s * sigma(0, 1), 1e-8);
  }
}

TEST(Radon, HalfTurnReflectsCoordinate) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(128, eta);
  std::mt19937_64 rng(251);
  const auto w = wigner(ts::random_superposition(rng, g, eta)).function;
  for (double th : {0.3, 1.1, 2.5}) {
    const auto t = radon(w, {th, th + kPi});
    double err = 0.0;
    for (int j = 1; j < g.n(); ++j) err = std::max(err, std::abs(t.values(1, j) - t.values(0, g.n() - j)));
    EXPECT_LE(err, 1e-9) << "theta " << th;
  }
}

TEST(Radon, ConservesMass) {
  const Grid g = make_natural_grid(128, 1.0);
  std::mt19937_64 rng(257);
  const auto w = wigner(mix({{{0.5, ts::random_superposition(rng, g, 1.0)}, {0.5, hermite_state(g, 1.0, 2)}}})).function;
  const auto t = radon(w, uniform_angles(30));
  for (int a = 0; a < 30; ++a) EXPECT_NEAR(t.mass(a), 1.0, 1e-9);
  EXPECT_THROW(radon(w, {}), ParameterError);
}

TEST(InverseRadon, GroundStateRelativeError) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(256, eta);
  const auto w = wigner(coherent_state(g, eta)).function;
  const auto bp = inverse_radon(radon(w, uniform_angles(180)));
  EXPECT_FALSE(bp.underdetermined);
  EXPECT_LE(relative_l2(bp.function, w), 0.02);
}

TEST(InverseRadon, AnisotropicCovariance) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(128, eta);
  RMat sigma(2, 2);
  sigma << 1.4, -0.35, -0.35, 0.5;
  const auto w = anisotropic(g, eta, sigma);
  const auto bp = inverse_radon(radon(w, uniform_angles(90)));
  EXPECT_LE(relative_l2(bp.function, w), 0.02);
  const PhaseSpaceFunction unit(g, Eta(eta), bp.function.values / bp.function.integral().real(), PhaseKind::wigner);
  const auto cov = covariance_matrix(unit);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(cov.sigma(i, i), sigma(i, i), 0.03 * sigma(i, i));
  EXPECT_NEAR(cov.sigma(0, 1), sigma(0, 1), 0.03 * std::abs(sigma(0, 1)));
}

TEST(InverseRadon, ArgumentChecks) {
  const Grid g = make_natural_grid(64, 1.0);
  const auto w = wigner(coherent_state(g, 1.0)).function;
  auto t = radon(w, uniform_angles(16));
  EXPECT_THROW(inverse_radon(radon(w, {0.0, 0.2, 0.3})), ParameterError);
  TomogramSet doubled(t.xgrid, t.eta, t.angles, 2.0 * t.values);
  EXPECT_THROW(inverse_radon(doubled), NormalizationError);
  const auto one = inverse_radon(radon(w, {0.0}));
  EXPECT_TRUE(one.underdetermined);
  EXPECT_THROW(TomogramSet(g, 1.0, {0.0}, Eigen::MatrixXd::Zero(2, 64)), ConfigurationError);
}

TEST(ReconstructDensity, GroundStateFidelity) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(256, eta);
  const auto phi = coherent_state(g, eta);
  const auto r = reconstruct_density(radon(wigner(phi).function, uniform_angles(180)));
  ASSERT_TRUE(r.density.has_value());
  EXPECT_TRUE(r.report.hermitian);
  EXPECT_NEAR(r.report.trace, 1.0, 1e-8);
  const double fidelity = phi.inner(r.op.apply(phi)).real();
  EXPECT_GE(fidelity, 0.98);
  EXPECT_NEAR(r.purity, 1.0, 0.02);
  EXPECT_FALSE(r.repair_distance.has_value());
}

TEST(ReconstructDensity, BalancedMixturePurity) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(128, eta);
  const auto rho = mix({{{0.5, coherent_state(g, eta)}, {0.5, hermite_state(g, eta, 1)}}});
  const auto t = radon(wigner(rho).function, uniform_angles(120));
  EXPECT_NEAR(reconstruct_density(t).purity, 0.5, 0.03);
  const auto fixed = reconstruct_density(t, true);
  ASSERT_TRUE(fixed.density.has_value());
  EXPECT_NEAR(state_stats(*fixed.density).purity, 0.5, 0.03);
}

TEST(ReconstructDensity, RepairProjectsOntoStates) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(64, eta);
  const auto w = wigner(hermite_state(g, eta, 1)).function;
  const auto t = radon(w, uniform_angles(6));
  const auto plain = reconstruct_density(t);
  EXPECT_TRUE(plain.underdetermined);
  const auto fixed = reconstruct_density(t, true);
  ASSERT_TRUE(fixed.density.has_value());
  EXPECT_TRUE(fixed.report.valid());
  if (!plain.density) {
    ASSERT_TRUE(fixed.repair_distance.has_value());
    EXPECT_GT(*fixed.repair_distance, 0.0);
  }
  const auto es = detail::hermitian_eigen(fixed.op.matrix(), false);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(ProjectPsd, ClipsNegativeSpectrum) {
  const Grid g = make_natural_grid(32, 1.0);
  const auto a = coherent_state(g, 1.0).values, b = hermite_state(g, 1.0, 1).values;
  const OperatorMatrix op(g, Eta(1.0), 1.2 * a * a.adjoint() - 0.2 * b * b.adjoint());
  double d = 0.0;
  const auto p = project_psd(op, &d);
  EXPECT_LT(ts::max_abs(p.kernel - a * a.adjoint()), 1e-10);
  EXPECT_NEAR(d, std::sqrt(0.2 * 0.2 + 0.2 * 0.2), 1e-10);
}

TEST(Pauli, SameMarginalsDifferentStates) {
  const double eta = 1.0;
  const Grid g = make_natural_grid(256, eta);
  const auto pp = pauli_pair(g, eta, {1.0, 1.0});
  EXPECT_NEAR(pp.expected_overlap2, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(pp.overlap2, 1.0 / std::sqrt(2.0), 1e-6);
  EXPECT_LE(pp.position_marginal_gap, 1e-10);
  EXPECT_LE(pp.momentum_marginal_gap, 1e-10);
  const auto other = pauli_pair(g, eta, {0.5, -2.0});
  EXPECT_NEAR(other.overlap2, 0.5 / std::abs(cplx(0.5, -2.0)), 1e-6);
  EXPECT_THROW(pauli_pair(g, eta, {1.0, 0.0}), ParameterError);
  EXPECT_THROW(pauli_pair(g, eta, {-1.0, 1.0}), ConfigurationError);
}
