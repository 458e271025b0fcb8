#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace wignerlab;
namespace ts = testing_support;

namespace {

Grid natural(int n, double eta) { return make_natural_grid(static_cast<std::size_t>(n), eta); }

double min_real(const PhaseSpaceFunction& w) { return w.values.real().minCoeff(); }

}  // namespace

TEST(Wigner, CoherentStateClosedForm) {
  for (double eta : {0.5, 1.0, 2.0}) {
    const Grid g = natural(256, eta);
    const auto w = wigner(coherent_state(g, eta)).function;
    double err = 0.0;
    for (int j = 0; j < g.n(); ++j)
      for (int k = 0; k < g.n(); ++k) {
        const double r2 = w.x(j) * w.x(j) + w.p(k) * w.p(k);
        err = std::max(err, std::abs(w.values(j, k) - std::exp(-r2 / eta) / (kPi * eta)));
      }
    EXPECT_LE(err, 1e-8) << "eta = " << eta;
  }
}

// Direct quadrature of the defining integral from analytic wavefunctions.
TEST(Wigner, AgreesWithQuadratureOracle) {
  const double eta = 1.0;
  const Grid g = natural(64, eta);
  const auto h1 = hermite_state(g, eta, 1);
  const auto w = wigner(h1).function;
  const auto a = coherent_state(g, eta, 0.8, -0.6), b = coherent_state(g, eta, -0.5, 1.1);
  const auto c = cross_wigner(a, b);
  const auto wa = ts::coherent_wave(eta, 0.8, -0.6), wb = ts::coherent_wave(eta, -0.5, 1.1);
  for (int j = 8; j < 56; j += 5)
    for (int k = 8; k < 56; k += 5) {
      const double x = g.x(j), p = g.p(k, eta);
      EXPECT_NEAR(std::abs(w.values(j, k) - ts::cross_wigner_oracle(ts::hermite1_wave(eta), ts::hermite1_wave(eta), eta, x, p)),
                  0.0, 1e-9);
      EXPECT_NEAR(std::abs(c.values(j, k) - ts::cross_wigner_oracle(wa, wb, eta, x, p)), 0.0, 1e-9);
    }
}

TEST(Wigner, HermiteNegativityAtOrigin) {
  for (double eta : {1.0, 0.5}) {
    const Grid g = natural(256, eta);
    const auto w = wigner(hermite_state(g, eta, 1)).function;
    EXPECT_NEAR(w.values(128, 128).real(), -1.0 / (kPi * eta), 1e-6);
    EXPECT_LE(min_real(w), -0.9 / (kPi * eta));
  }
}

TEST(Wigner, GaussianSourcesAreNonnegative) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const Grid g = natural(128, 1.0);
  for (int t = 0; t < 5; ++t) EXPECT_GE(min_real(wigner(coherent_state(g, 1.0, u(rng), u(rng))).function), -1e-10);
  GaussianWavepacket sq{2.0, 0.7, 0.3};
  EXPECT_GE(min_real(wigner(sq.wavefunction(g, 1.0)).function), -1e-10);
}

TEST(Wigner, MixtureIsLinear) {
  const double eta = 1.0;
  const Grid g = natural(128, eta);
  const auto phi = coherent_state(g, eta), h1 = hermite_state(g, eta, 1);
  const auto wm = wigner(mix({{{0.5, phi}, {0.5, h1}}})).function;
  const CMat expect = 0.5 * wigner(phi).function.values + 0.5 * wigner(h1).function.values;
  EXPECT_LT(ts::max_abs(wm.values - expect), 1e-10);
  EXPECT_LT(ts::max_abs(wigner(pure_density(phi)).function.values - wigner(phi).function.values), 1e-12);
}

TEST(Wigner, RealnessAndNormalizationErrors) {
  std::mt19937_64 rng(47);
  const Grid g = natural(128, 1.0);
  for (int t = 0; t < 5; ++t) {
    const auto psi = ts::random_superposition(rng, g, 1.0);
    const auto raw = detail::cross_wigner_raw(psi, psi);
    EXPECT_LE(raw.values.imag().cwiseAbs().maxCoeff(), 1e-10 * raw.values.cwiseAbs().maxCoeff());
  }
  EXPECT_THROW(wigner(GridFunction(g, Eta(1.0), 2.0 * coherent_state(g, 1.0).values)), NormalizationError);
}

TEST(Wigner, LeakWarningNearEdge) {
  const Grid g = natural(64, 1.0);
  EXPECT_FALSE(wigner(coherent_state(g, 1.0)).leak_warning);
  EXPECT_TRUE(wigner(coherent_state(g, 1.0, 0.85 * g.x_max(), 0.0)).leak_warning);
}

TEST(CrossWigner, DiagonalAndInterference) {
  std::mt19937_64 rng(53);
  const Grid g = natural(128, 1.0);
  for (int t = 0; t < 5; ++t) {
    const auto psi = ts::random_superposition(rng, g, 1.0), phi = ts::random_superposition(rng, g, 1.0);
    EXPECT_LT(ts::max_abs(cross_wigner(psi, psi).values - wigner(psi).function.values), 1e-12);
    const GridFunction sum(g, Eta(1.0), psi.values + phi.values);
    const CMat lhs = detail::cross_wigner_raw(sum, sum).values;
    const CMat rhs = wigner(psi).function.values + wigner(phi).function.values +
                     2.0 * cross_wigner(psi, phi).values.real().cast<cplx>();
    EXPECT_LT(ts::max_abs(lhs - rhs), 1e-9);
  }
  EXPECT_THROW(cross_wigner(coherent_state(g, 1.0), coherent_state(natural(64, 1.0), 1.0)), ParameterError);
}

TEST(Marginals, GroundStateAndHermite) {
  for (double eta : {1.0, 0.7}) {
    const Grid g = natural(256, eta);
    const auto m = marginals(wigner(coherent_state(g, eta)).function);
    double ex = 0.0, ep = 0.0;
    for (int j = 0; j < g.n(); ++j) {
      const double x = g.x(j), p = g.p(j, eta);
      ex = std::max(ex, std::abs(m.position(j) - std::exp(-x * x / eta) / std::sqrt(kPi * eta)));
      ep = std::max(ep, std::abs(m.momentum(j) - std::exp(-p * p / eta) / std::sqrt(kPi * eta)));
    }
    EXPECT_LE(ex, 1e-6);
    EXPECT_LE(ep, 1e-6);
    const auto h = hermite_state(g, eta, 3);
    const auto mh = marginals(wigner(h).function);
    EXPECT_LE((mh.position - h.values.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((mh.momentum - eta_fourier(h).values.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(mh.position.sum() * g.dx(), 1.0, 1e-6);
    EXPECT_NEAR(mh.momentum.sum() * g.dp(eta), 1.0, 1e-6);
  }
}

TEST(Moyal, ExamplesFromStates) {
  const double eta = 1.0;
  const Grid g = natural(256, eta);
  const auto phi = coherent_state(g, eta), h1 = hermite_state(g, eta, 1);
  const auto w0 = wigner(phi).function, w1 = wigner(h1).function;
  EXPECT_NEAR(moyal_overlap(w0, w0), 1.0 / (2.0 * kPi * eta), 1e-8);
  EXPECT_NEAR(moyal_overlap(w0, w1), 0.0, 1e-8);
  std::mt19937_64 rng(59);
  const auto psi = ts::random_superposition(rng, g, eta);
  const PhaseSpacePoint z0{0.9, -0.4};
  const auto moved = displace(psi, z0);
  const double expect = std::norm(psi.inner(moved)) / (2.0 * kPi * eta);
  EXPECT_NEAR(moyal_overlap(wigner(psi).function, wigner(moved.normalized()).function), expect, 1e-9);
  EXPECT_THROW(moyal_overlap(w0, wigner(coherent_state(natural(64, eta), eta)).function), ParameterError);
}

TEST(Moyal, RandomStatesAndCrossMoyal) {
  const double eta = 1.0;
  const Grid g = natural(128, eta);
  std::mt19937_64 rng(61);
  for (int t = 0; t < 10; ++t) {
    const auto a = ts::random_superposition(rng, g, eta), b = ts::random_superposition(rng, g, eta);
    const auto c = ts::random_superposition(rng, g, eta), d = ts::random_superposition(rng, g, eta);
    const auto wa = wigner(a).function;
    EXPECT_NEAR(2.0 * kPi * eta * moyal_overlap(wa, wa), 1.0, 1e-7);
    const auto w1 = cross_wigner(a, b), w2 = cross_wigner(c, d);
    const cplx lhs = 2.0 * kPi * eta * phase_space_inner(w2, w1);
    EXPECT_LT(std::abs(lhs - c.inner(a) * b.inner(d)), 1e-7);
  }
}

TEST(Moyal, MixtureSquareIntegral) {
  const double eta = 1.0;
  const Grid g = natural(128, eta);
  std::mt19937_64 rng(67);
  const std::vector<double> al = {0.2, 0.5, 0.3};
  std::vector<GridFunction> psi;
  for (int i = 0; i < 3; ++i) psi.push_back(ts::random_superposition(rng, g, eta));
  const auto w = wigner(mix({{{al[0], psi[0]}, {al[1], psi[1]}, {al[2], psi[2]}}})).function;
  double expect = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) expect += al[j] * al[k] * std::norm(psi[j].inner(psi[k]));
  EXPECT_NEAR(moyal_overlap(w, w), expect / (2.0 * kPi * eta), 1e-8);
}

TEST(Moyal, HermiteFunctionsAreOrthonormalInPhaseSpace) {
  const double eta = 1.0;
  const Grid g = natural(256, eta);
  std::vector<PhaseSpaceFunction> w;
  for (int k = 0; k < 5; ++k) w.push_back(wigner(hermite_state(g, eta, k)).function);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) EXPECT_NEAR(2.0 * kPi * eta * moyal_overlap(w[a], w[b]), a == b ? 1.0 : 0.0, 1e-6);
}

TEST(Ambiguity, IsSymplecticFourierOfWigner) {
  const double eta = 1.0;
  const Grid g = natural(128, eta);
  std::mt19937_64 rng(71);
  for (int t = 0; t < 3; ++t) {
    const auto psi = ts::random_superposition(rng, g, eta);
    const auto w = wigner(psi).function;
    EXPECT_LT(ts::max_abs(symplectic_fourier(w).values - ambiguity(psi).values), 1e-9);
    EXPECT_LT(ts::max_abs(symplectic_fourier(ambiguity(psi)).values - w.values), 1e-9);
  }
  // Amb phi0(z) = (2 pi eta)^{-1} exp(-|z|^2 / (4 eta)).
  const auto a0 = ambiguity(coherent_state(g, eta));
  double err = 0.0;
  for (int j = 0; j < g.n(); ++j)
    for (int k = 0; k < g.n(); ++k) {
      const double r2 = a0.x(j) * a0.x(j) + a0.p(k) * a0.p(k);
      err = std::max(err, std::abs(a0.values(j, k) - std::exp(-r2 / (4 * eta)) / (2 * kPi * eta)));
    }
  EXPECT_LT(err, 1e-12);
}

TEST(Reflection, WignerAsReflectionExpectation) {
  const double eta = 1.0;
  const Grid g = natural(256, eta);
  const auto phi = coherent_state(g, eta);
  const auto w0 = wigner(phi).function;
  const auto c0 = reflection_wigner_check(phi, w0, {0.0, 0.0});
  EXPECT_LE(c0.residual, 1e-9);
  EXPECT_FALSE(c0.interpolated);
  const auto c1 = reflection_wigner_check(phi, w0, {1.0, 1.0});
  EXPECT_LE(c1.residual, 1e-7);
  EXPECT_TRUE(c1.interpolated);
  EXPECT_NEAR(c1.reflection_value.real(), std::exp(-2.0 / eta) / (kPi * eta), 1e-9);
  const auto h1 = hermite_state(g, eta, 1);
  const auto c2 = reflection_wigner_check(h1, wigner(h1).function, {0.0, 0.0});
  EXPECT_NEAR(c2.reflection_value.real(), -1.0 / (kPi * eta), 1e-9);
  EXPECT_LE(c2.residual, 1e-9);
}

TEST(Reflection, InvolutionAndParity) {
  const Grid g = natural(128, 1.0);
  std::mt19937_64 rng(73);
  const auto psi = ts::random_superposition(rng, g, 1.0);
  for (const PhaseSpacePoint z0 : {PhaseSpacePoint{0.0, 0.0}, PhaseSpacePoint{0.4, -0.3}, PhaseSpacePoint{-0.77, 1.1}})
    EXPECT_LT((reflect(reflect(psi, z0), z0).values - psi.values).cwiseAbs().maxCoeff(), 1e-10);
  const auto even = hermite_state(g, 1.0, 2);
  EXPECT_LT((reflect(even, {0.0, 0.0}).values - even.values).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Displacement, IdentityAndCoherentStates) {
  const double eta = 1.0;
  const Grid g = natural(256, eta);
  const auto phi = coherent_state(g, eta);
  EXPECT_LT((displace(phi, {0.0, 0.0}).values - phi.values).cwiseAbs().maxCoeff(), 1e-15);
  const auto moved = displace(phi, {1.3, -0.8});
  EXPECT_LT((moved.values - coherent_state(g, eta, 1.3, -0.8).values).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(displace_checked(phi, {1.3, -0.8}).warning);
  EXPECT_TRUE(displace_checked(phi, {0.97 * g.x_max(), 0.0}).warning);
}

TEST(Displacement, TranslationCovarianceOfWigner) {
  const double eta = 1.0;
  const Grid g = natural(256, eta);
  std::mt19937_64 rng(79);
  const auto psi = ts::random_superposition(rng, g, eta);
  const auto w = wigner(psi).function;
  for (const PhaseSpacePoint z0 : {PhaseSpacePoint{0.6, -0.35}, PhaseSpacePoint{-1.23, 0.5}}) {
    const auto wd = wigner(displace(psi, z0).normalized()).function;
    double err = 0.0;
    for (int j = 0; j < g.n(); j += 4)
      for (int k = 0; k < g.n(); k += 4) {
        if (std::abs(wd.x(j)) > 0.25 * g.length() || std::abs(wd.p(k)) > 0.25 * g.length()) continue;
        err = std::max(err, std::abs(wd.values(j, k) - interpolate(w, wd.x(j) - z0.x, wd.p(k) - z0.p)));
      }
    EXPECT_LE(err, 1e-6);
  }
}

// D(z0) D(z1) = exp(i sigma(z0, z1) / eta) D(z1) D(z0) and D(z0 + z1) = exp(-i sigma(z0, z1) / (2 eta)) D(z0) D(z1).
TEST(Displacement, HeisenbergWeylRelations) {
  const double eta = 1.0;
  const Grid g = natural(256, eta);
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const auto psi = ts::random_superposition(rng, g, eta);
  double e1 = 0.0, e2 = 0.0;
  for (int t = 0; t < 50; ++t) {
    const PhaseSpacePoint z0{u(rng), u(rng)}, z1{u(rng), u(rng)};
    const auto a = displace(displace(psi, z1), z0), b = displace(displace(psi, z0), z1);
    const cplx ph = std::polar(1.0, sigma(z0, z1) / eta);
    e1 = std::max(e1, (a.values - ph * b.values).cwiseAbs().maxCoeff());
    const auto c = displace(psi, {z0.x + z1.x, z0.p + z1.p});
    e2 = std::max(e2, (c.values - std::polar(1.0, -sigma(z0, z1) / (2 * eta)) * a.values).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(e1, 1e-9);
  EXPECT_LE(e2, 1e-9);
}

TEST(Displacement, OperatorMatchesAction) {
  const Grid g = natural(64, 1.0);
  std::mt19937_64 rng(89);
  const auto psi = ts::random_superposition(rng, g, 1.0);
  const PhaseSpacePoint z0{0.37, -0.52};
  EXPECT_LT((displacement_operator(g, 1.0, z0).apply(psi).values - displace(psi, z0).values).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((reflection_operator(g, 1.0, z0).apply(psi).values - reflect(psi, z0).values).cwiseAbs().maxCoeff(), 1e-10);
}
