#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "operators.hpp"

namespace wignerlab {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kSymplecticTolerance = 1e-9;

// J = [[0, I], [-I, 0]]
inline RMat standard_J(int n) {
  RMat j = RMat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = RMat::Identity(n, n);
  j.bottomLeftCorner(n, n) = -RMat::Identity(n, n);
  return j;
}

inline int half_dimension(const RMat& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0)
    throw ParameterError("expected a square matrix of even dimension");
  return static_cast<int>(m.rows() / 2);
}

// max |S^T J S - J|
inline double symplectic_residual(const RMat& s) {
  const RMat j = standard_J(half_dimension(s));
  return (s.transpose() * j * s - j).cwiseAbs().maxCoeff();
}

inline bool is_symplectic(const RMat& s, double tol = kSymplecticTolerance) { return symplectic_residual(s) <= tol; }

class SymplecticMatrix {
 public:
  explicit SymplecticMatrix(RMat m, double tol = kSymplecticTolerance) : m_(std::move(m)) {
    if (!is_symplectic(m_, tol))
      throw ParameterError("matrix is not symplectic (residual " + std::to_string(symplectic_residual(m_)) + ")");
  }
  const RMat& matrix() const { return m_; }
  int n() const { return static_cast<int>(m_.rows() / 2); }
  RMat A() const { return m_.topLeftCorner(n(), n()); }
  RMat B() const { return m_.topRightCorner(n(), n()); }
  RMat C() const { return m_.bottomLeftCorner(n(), n()); }
  RMat D() const { return m_.bottomRightCorner(n(), n()); }
  // S^{-1} = -J S^T J
  SymplecticMatrix inverse() const {
    const RMat j = standard_J(n());
    return SymplecticMatrix(-j * m_.transpose() * j);
  }

 private:
  RMat m_;
};

// V_{-P} = [[I, 0], [P, I]], P symmetric.
inline RMat chirp_matrix(const RMat& p) {
  const int n = p.rows();
  RMat v = RMat::Identity(2 * n, 2 * n);
  v.bottomLeftCorner(n, n) = p;
  return v;
}

// M_L = [[L^{-1}, 0], [0, L^T]]
inline RMat rescale_matrix(const RMat& l) {
  const int n = l.rows();
  RMat m = RMat::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = l.inverse();
  m.bottomRightCorner(n, n) = l.transpose();
  return m;
}

inline RMat scalar_matrix(double v) { return RMat::Constant(1, 1, v); }

namespace detail {

inline void require_positive_definite(const RMat& sigma, const char* who) {
  const int n2 = sigma.rows();
  if (sigma.cols() != n2 || n2 % 2 != 0) throw ParameterError(std::string(who) + ": expected 2n x 2n matrix");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
    throw ParameterError(std::string(who) + ": matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-14 * es.eigenvalues().cwiseAbs().maxCoeff())
    throw ParameterError(std::string(who) + ": matrix is not positive definite");
}

inline RMat spd_sqrt(const RMat& sigma) {
  Eigen::SelfAdjointEigenSolver<RMat> es(sigma);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

struct SymplecticSpectrum {
  RVec lambda;              // ascending
  double cross_check = 0.0;  // max difference between the two routes
};

// Moduli of the eigenvalues of J Sigma, paired against the spectrum of i Sigma^{1/2} J Sigma^{1/2}.
inline SymplecticSpectrum symplectic_eigenvalues(const RMat& sigma) {
  detail::require_positive_definite(sigma, "symplectic_eigenvalues");
  const int n = half_dimension(sigma);
  const RMat j = standard_J(n);

  Eigen::EigenSolver<RMat> es(j * sigma, false);
  std::vector<double> im;
  for (int i = 0; i < 2 * n; ++i)
    if (es.eigenvalues()(i).imag() > 0.0) im.push_back(es.eigenvalues()(i).imag());
  if (static_cast<int>(im.size()) != n) throw ValidationError("symplectic_eigenvalues: eigenvalues do not pair");
  std::sort(im.begin(), im.end());

  const RMat r = detail::spd_sqrt(sigma);
  const CMat h = cplx(0.0, 1.0) * (r * j * r).cast<cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> hs(h, Eigen::EigenvaluesOnly);
  SymplecticSpectrum out;
  out.lambda.resize(n);
  for (int i = 0; i < n; ++i) {
    out.lambda(i) = im[i];
    out.cross_check = std::max(out.cross_check, std::abs(hs.eigenvalues()(n + i) - im[i]));
  }
  return out;
}

struct WilliamsonForm {
  RMat S;      // symplectic
  RVec lambda;  // ascending symplectic eigenvalues
  bool near_degenerate = false;  // two eigenvalues closer than 1e-12: S is then not unique
  RMat D() const {
    RVec d(2 * lambda.size());
    d << lambda, lambda;
    return d.asDiagonal();
  }
  double reconstruction_error(const RMat& sigma) const {
    return (S.transpose() * D() * S - sigma).cwiseAbs().maxCoeff() / std::max(1.0, sigma.cwiseAbs().maxCoeff());
  }
};

// Sigma = S^T D S. For the orthogonal R taking Sigma^{1/2} J Sigma^{1/2} to [[0, L], [-L, 0]],
// S = D^{-1/2} R^T Sigma^{1/2}.
inline WilliamsonForm williamson(const RMat& sigma) {
  detail::require_positive_definite(sigma, "williamson");
  const int n = half_dimension(sigma);
  const RMat j = standard_J(n);
  const RMat r = detail::spd_sqrt(sigma);
  const RMat b = r * j * r;
  Eigen::SelfAdjointEigenSolver<CMat> hs(cplx(0.0, 1.0) * b.cast<cplx>());
  RMat rot(2 * n, 2 * n);
  RVec lambda(n);
  for (int i = 0; i < n; ++i) {
    // i B w = lambda w  =>  B u = lambda v, B v = -lambda u for w = u + i v.
    const Eigen::VectorXcd w = hs.eigenvectors().col(n + i);
    lambda(i) = hs.eigenvalues()(n + i);
    const RVec u = std::sqrt(2.0) * w.real();
    const RVec v = std::sqrt(2.0) * w.imag();
    rot.col(i) = v;
    rot.col(n + i) = u;
  }
  RVec dinv(2 * n);
  dinv << lambda.cwiseSqrt().cwiseInverse(), lambda.cwiseSqrt().cwiseInverse();
  WilliamsonForm out;
  out.S = dinv.asDiagonal() * rot.transpose() * r;
  out.lambda = lambda;
  for (int i = 1; i < n; ++i) out.near_degenerate |= std::abs(lambda(i) - lambda(i - 1)) < 1e-12;
  return out;
}

// Closed form for Sigma = [[a, b], [b, c]]: S = [[sqrt(a/d), b/sqrt(a d)], [0, sqrt(d/a)]], d = sqrt(ac - b^2).
inline WilliamsonForm williamson_2x2(const RMat& sigma) {
  detail::require_positive_definite(sigma, "williamson_2x2");
  if (sigma.rows() != 2) throw ParameterError("williamson_2x2: expected a 2x2 matrix");
  const double a = sigma(0, 0), b = sigma(0, 1), c = sigma(1, 1);
  const double d = std::sqrt(a * c - b * b);
  WilliamsonForm out;
  out.S.resize(2, 2);
  out.S << std::sqrt(a / d), b / std::sqrt(a * d), 0.0, std::sqrt(d / a);
  out.lambda = RVec::Constant(1, d);
  return out;
}

// Free generator: A(x, x') = 1/2 P x.x - (L x).x' + 1/2 Q x'.x' with P = D B^{-1}, L = B^{-1}, Q = B^{-1} A.
// Then p = dA/dx, p' = -dA/dx' reproduce (x, p) = S (x', p').
struct GeneratingFunction {
  RMat P, L, Q;
  double operator()(const RVec& x, const RVec& xp) const {
    return 0.5 * x.dot(P * x) - (L * x).dot(xp) + 0.5 * xp.dot(Q * xp);
  }
};

inline GeneratingFunction free_generating_function(const SymplecticMatrix& s) {
  const RMat b = s.B();
  const double det = b.determinant();
  if (std::abs(det) < 1e-12 * std::max(1.0, std::pow(b.cwiseAbs().maxCoeff(), b.rows())))
    throw ParameterError(
        "free_generating_function: B is singular, S is not free; write S as a product of two free matrices");
  const RMat l = b.inverse();
  return {s.D() * l, l, l * s.A()};
}

// One factor of a metaplectic word (n = 1).
struct MetaplecticLetter {
  enum class Kind { chirp, rescale, fourier, inverse_fourier };
  Kind kind = Kind::fourier;
  double value = 0.0;  // P for chirp, L for rescale
  int m = 0;           // Maslov index for rescale

  static MetaplecticLetter chirp(double p) { return {Kind::chirp, p, 0}; }
  static MetaplecticLetter rescale(double l, int m) { return {Kind::rescale, l, m}; }
  static MetaplecticLetter rescale(double l) { return {Kind::rescale, l, l > 0.0 ? 0 : 1}; }
  static MetaplecticLetter fourier() { return {Kind::fourier, 0.0, 0}; }
  static MetaplecticLetter inverse_fourier() { return {Kind::inverse_fourier, 0.0, 0}; }

  RMat projection() const {
    switch (kind) {
      case Kind::chirp: return chirp_matrix(scalar_matrix(value));
      case Kind::rescale: return rescale_matrix(scalar_matrix(value));
      case Kind::fourier: return standard_J(1);
      case Kind::inverse_fourier: return -standard_J(1);
    }
    return RMat::Identity(2, 2);
  }
  MetaplecticLetter inverse() const {
    switch (kind) {
      case Kind::chirp: return chirp(-value);
      case Kind::rescale: return rescale(1.0 / value, (4 - m % 4) % 4);
      case Kind::fourier: return inverse_fourier();
      case Kind::inverse_fourier: return fourier();
    }
    return *this;
  }
};

// Either a word in the generators (letters in product order, the last one acts first)
// or a free symplectic matrix applied by direct quadrature of its generating-function kernel.
struct MetaplecticSpec {
  std::vector<MetaplecticLetter> word;
  std::optional<RMat> free_matrix;
  int maslov = 0;

  static MetaplecticSpec from_word(std::vector<MetaplecticLetter> w) {
    MetaplecticSpec s;
    s.word = std::move(w);
    return s;
  }
  // m = 0 when det B^{-1} > 0, else 1.
  static MetaplecticSpec free(const RMat& s) {
    const SymplecticMatrix sm(s);
    if (sm.n() != 1) throw ParameterError("metaplectic operators are implemented for n = 1");
    free_generating_function(sm);
    MetaplecticSpec out;
    out.free_matrix = s;
    out.maslov = sm.B()(0, 0) > 0.0 ? 0 : 1;
    return out;
  }

  RMat projection() const {
    if (free_matrix) return *free_matrix;
    RMat s = RMat::Identity(2, 2);
    for (const auto& l : word) s = s * l.projection();
    return s;
  }

  MetaplecticSpec inverse() const {
    if (free_matrix) {
      // B' = -B, so the branch flips and the kernel is the adjoint one.
      return free(SymplecticMatrix(*free_matrix).inverse().matrix());
    }
    MetaplecticSpec out;
    for (auto it = word.rbegin(); it != word.rend(); ++it) out.word.push_back(it->inverse());
    return out;
  }
};

// V_{-P} M_{L,m} J V_{-Q} with P = D/B, L = 1/B, Q = A/B: the word whose kernel is the free generator.
inline MetaplecticSpec free_word(const RMat& s) {
  const auto gf = free_generating_function(SymplecticMatrix(s));
  const double l = gf.L(0, 0);
  return MetaplecticSpec::from_word({MetaplecticLetter::chirp(gf.P(0, 0)), MetaplecticLetter::rescale(l),
                                     MetaplecticLetter::fourier(), MetaplecticLetter::chirp(gf.Q(0, 0))});
}

namespace detail {

inline cplx i_power(double e) { return std::polar(1.0, 0.5 * kPi * e); }

// (2 pi eta)^{-1/2} sum_k exp(sign i x_j x_k / eta) psi_k dx on the same grid.
inline CVec fourier_on_grid(const GridFunction& psi, int sign) {
  const Grid& g = psi.grid;
  const double eta = psi.eta;
  const int n = g.n();
  const double norm = 1.0 / std::sqrt(2.0 * kPi * eta);
  CVec out(n);
  if (std::abs(n * g.dx() * g.dx() - 2.0 * kPi * eta) <= 1e-9 * 2.0 * kPi * eta) {
    const auto t = continuous_ft(std::span<const cplx>(psi.values.data(), g.size()), g.x_min(), g.dx(), g.x_min(),
                                 g.dx(), eta, sign);
    for (int j = 0; j < n; ++j) out(j) = t[j] * norm;
    return out;
  }
  for (int j = 0; j < n; ++j) {
    cplx acc(0.0);
    for (int k = 0; k < n; ++k) acc += std::polar(1.0, sign * g.x(j) * g.x(k) / eta) * psi.values(k);
    out(j) = acc * g.dx() * norm;
  }
  return out;
}

inline GridFunction apply_letter(const MetaplecticLetter& l, const GridFunction& psi) {
  const Grid& g = psi.grid;
  const double eta = psi.eta;
  const int n = g.n();
  CVec out(n);
  switch (l.kind) {
    case MetaplecticLetter::Kind::chirp:
      for (int j = 0; j < n; ++j) out(j) = psi.values(j) * std::polar(1.0, l.value * g.x(j) * g.x(j) / (2.0 * eta));
      break;
    case MetaplecticLetter::Kind::rescale: {
      const double a = std::abs(l.value);
      if (!(a >= 0.25 && a <= 4.0)) throw ParameterError("rescale factor outside [1/4, 4]");
      if ((l.m % 2 == 0) != (l.value > 0.0)) throw ParameterError("Maslov index parity does not match sign of L");
      const cplx pre = i_power(l.m) * std::sqrt(a);
      for (int j = 0; j < n; ++j) out(j) = pre * interpolate(psi, l.value * g.x(j));
      break;
    }
    case MetaplecticLetter::Kind::fourier: out = i_power(-0.5) * fourier_on_grid(psi, -1); break;
    case MetaplecticLetter::Kind::inverse_fourier: out = i_power(0.5) * fourier_on_grid(psi, +1); break;
  }
  return GridFunction(g, psi.eta, out);
}

// S psi(x) = (2 pi eta)^{-1/2} i^{m - 1/2} sqrt|L| int exp(i A(x, x') / eta) psi(x') dx'.
inline GridFunction apply_free(const RMat& s, int m, const GridFunction& psi) {
  const auto gf = free_generating_function(SymplecticMatrix(s));
  const double P = gf.P(0, 0), L = gf.L(0, 0), Q = gf.Q(0, 0);
  const Grid& g = psi.grid;
  const double eta = psi.eta;
  const int n = g.n();
  const cplx pre = i_power(m - 0.5) * std::sqrt(std::abs(L)) * g.dx() / std::sqrt(2.0 * kPi * eta);
  CVec chirped(n);
  for (int k = 0; k < n; ++k) chirped(k) = psi.values(k) * std::polar(1.0, 0.5 * Q * g.x(k) * g.x(k) / eta);
  // Frequencies L x beyond the dual window alias under the x' quadrature; those outputs are cut.
  const double p_edge = kPi * eta / g.dx();
  CVec out = CVec::Zero(n);
  parallel_for(n, [&](int j) {
    const double x = g.x(j);
    if (std::abs(L * x) > p_edge) return;
    cplx acc(0.0);
    for (int k = 0; k < n; ++k) acc += std::polar(1.0, -L * x * g.x(k) / eta) * chirped(k);
    out(j) = pre * std::polar(1.0, 0.5 * P * x * x / eta) * acc;
  });
  return GridFunction(g, psi.eta, out);
}

}  // namespace detail

inline GridFunction metaplectic_apply(const MetaplecticSpec& spec, const GridFunction& psi) {
  if (spec.free_matrix) return detail::apply_free(*spec.free_matrix, spec.maslov, psi);
  GridFunction cur = psi;
  for (auto it = spec.word.rbegin(); it != spec.word.rend(); ++it) cur = detail::apply_letter(*it, cur);
  return cur;
}

// Matrix of the operator on grid functions, built column by column from unit samples.
inline OperatorMatrix metaplectic_operator(const MetaplecticSpec& spec, const Grid& g, double eta) {
  const int n = g.n();
  CMat m(n, n);
  for (int k = 0; k < n; ++k) {
    GridFunction e(g, Eta(eta));
    e.values(k) = 1.0;
    m.col(k) = metaplectic_apply(spec, e).values;
  }
  return OperatorMatrix::from_matrix(g, Eta(eta), m);
}

// Random free symplectic 2x2 matrix with |B| bounded away from zero.
template <typename Rng>
RMat random_free_symplectic(Rng& rng, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::uniform_real_distribution<double> bmag(0.5, 1.5);
  std::bernoulli_distribution flip(0.5);
  const double b = (flip(rng) ? -1.0 : 1.0) * bmag(rng);
  const double a = u(rng), d = u(rng);
  RMat s(2, 2);
  s << a, b, (a * d - 1.0) / b, d;
  return s;
}

// Random symmetric positive-definite 2n x 2n matrix.
template <typename Rng>
RMat random_spd(Rng& rng, int n, double floor = 0.2) {
  std::normal_distribution<double> nd(0.0, 1.0);
  RMat a(2 * n, 2 * n);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) a(i, j) = nd(rng);
  return a * a.transpose() / (2.0 * n) + floor * RMat::Identity(2 * n, 2 * n);
}

}  // namespace wignerlab
