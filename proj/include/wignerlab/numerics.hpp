#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "errors.hpp"

namespace wignerlab {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNormTolerance = 1e-12;

// Reduced Planck parameter. Strictly positive and finite.
class Eta {
 public:
  explicit Eta(double value) : value_(value) {
    if (!std::isfinite(value) || value <= 0.0)
      throw ConfigurationError("eta must be finite and > 0, got " + std::to_string(value));
  }
  double value() const { return value_; }
  operator double() const { return value_; }

 private:
  double value_;
};

inline bool same_eta(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

// Uniform periodic grid x_j = x_min + j*dx, j = 0..N-1, dx = (x_max - x_min)/N.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n) : x_min_(x_min), x_max_(x_max), n_(n) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
      throw ConfigurationError("grid requires finite x_min < x_max");
    if (n < 16 || (n & (n - 1)) != 0)
      throw ConfigurationError("grid size must be a power of two >= 16, got " + std::to_string(n));
    dx_ = (x_max - x_min) / static_cast<double>(n);
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_; }
  int n() const { return static_cast<int>(n_); }
  double dx() const { return dx_; }
  double x(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx_; }
  double length() const { return x_max_ - x_min_; }

  // Conjugate momentum grid, centered: p_k = -N dp/2 + k dp.
  double dp(double eta) const { return 2.0 * kPi * eta / (static_cast<double>(n_) * dx_); }
  double p_min(double eta) const { return -0.5 * static_cast<double>(n_) * dp(eta); }
  double p(std::size_t k, double eta) const { return p_min(eta) + static_cast<double>(k) * dp(eta); }
  Grid dual(double eta) const { return Grid(p_min(eta), -p_min(eta), n_); }

  // x_min = -N dx / 2, so x = 0 sits on index N/2.
  bool centered() const { return std::abs(x_min_ + 0.5 * length()) <= 1e-12 * length(); }

  bool operator==(const Grid& o) const {
    const double tol = 1e-12 * std::max(length(), o.length());
    return n_ == o.n_ && std::abs(x_min_ - o.x_min_) <= tol && std::abs(x_max_ - o.x_max_) <= tol;
  }

 private:
  double x_min_, x_max_;
  std::size_t n_;
  double dx_;
};

inline Grid make_grid(double x_min, double x_max, std::size_t n) { return Grid(x_min, x_max, n); }

// Centered grid whose momentum grid coincides with the position grid (dp == dx).
inline Grid make_natural_grid(std::size_t n, double eta) {
  const double half = std::sqrt(kPi * Eta(eta) * static_cast<double>(n) / 2.0);
  return Grid(-half, half, n);
}

struct GridFunction {
  Grid grid;
  Eta eta;
  CVec values;

  GridFunction(Grid g, Eta e, CVec v) : grid(g), eta(e), values(std::move(v)) {
    if (values.size() != grid.n()) throw ConfigurationError("grid function length does not match grid");
  }
  GridFunction(Grid g, Eta e) : GridFunction(g, e, CVec::Zero(g.n())) {}

  double norm() const { return std::sqrt(values.squaredNorm() * grid.dx()); }
  bool is_normalized(double tol = kNormTolerance) const { return std::abs(norm() - 1.0) <= tol; }
  GridFunction normalized() const {
    const double nrm = norm();
    if (!(nrm > 0.0)) throw NormalizationError("cannot normalize a zero grid function");
    return GridFunction(grid, eta, values / nrm);
  }
  // <this|other> = sum conj(this) other dx
  cplx inner(const GridFunction& other) const { return values.dot(other.values) * grid.dx(); }
};

enum class PhaseKind { wigner, ambiguity, symbol, twisted_symbol, density, generic };

inline std::string to_string(PhaseKind k) {
  switch (k) {
    case PhaseKind::wigner: return "wigner";
    case PhaseKind::ambiguity: return "ambiguity";
    case PhaseKind::symbol: return "symbol";
    case PhaseKind::twisted_symbol: return "twisted_symbol";
    case PhaseKind::density: return "density";
    case PhaseKind::generic: return "generic";
  }
  return "generic";
}

inline PhaseKind phase_kind_from_string(const std::string& s) {
  for (auto k : {PhaseKind::wigner, PhaseKind::ambiguity, PhaseKind::symbol, PhaseKind::twisted_symbol,
                 PhaseKind::density, PhaseKind::generic})
    if (to_string(k) == s) return k;
  throw ConfigurationError("unknown phase-space kind: " + s);
}

// Samples on (x_j, p_k); rows index x, columns index p.
struct PhaseSpaceFunction {
  Grid grid;
  Eta eta;
  CMat values;
  PhaseKind kind = PhaseKind::generic;

  PhaseSpaceFunction(Grid g, Eta e, CMat v, PhaseKind k = PhaseKind::generic)
      : grid(g), eta(e), values(std::move(v)), kind(k) {
    if (values.rows() != grid.n() || values.cols() != grid.n())
      throw ConfigurationError("phase-space array shape does not match grid");
  }
  PhaseSpaceFunction(Grid g, Eta e, PhaseKind k = PhaseKind::generic)
      : PhaseSpaceFunction(g, e, CMat::Zero(g.n(), g.n()), k) {}

  double x(std::size_t j) const { return grid.x(j); }
  double p(std::size_t k) const { return grid.p(k, eta); }
  double dx() const { return grid.dx(); }
  double dp() const { return grid.dp(eta); }
  double cell() const { return dx() * dp(); }
  cplx integral() const { return values.sum() * cell(); }
};

inline void require_same_space(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  if (!(a.grid == b.grid) || !same_eta(a.eta, b.eta))
    throw ParameterError("phase-space functions live on different grids");
}

// Discrete phase-space inner product sum conj(a) b dx dp.
inline cplx phase_space_inner(const PhaseSpaceFunction& a, const PhaseSpaceFunction& b) {
  require_same_space(a, b);
  return (a.values.conjugate().cwiseProduct(b.values)).sum() * a.cell();
}

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return engine;
}

inline int signed_frequency(int k, int n) { return k < n / 2 ? k : k - n; }

}  // namespace detail

// Unscaled DFT: out_k = sum_j in_j exp(sign * 2 pi i j k / N).
inline std::vector<cplx> dft(const std::vector<cplx>& in, int sign) {
  std::vector<cplx> out;
  if (sign < 0)
    detail::fft_engine().fwd(out, in);
  else
    detail::fft_engine().inv(out, in);
  return out;
}

// g_k = sum_j f_j exp(sign i (x0 + j dx)(q0 + k dq) / eta) dx, valid when N dx dq = 2 pi eta.
inline std::vector<cplx> continuous_ft(std::span<const cplx> f, double x0, double dx, double q0, double dq,
                                       double eta, int sign) {
  const std::size_t n = f.size();
  const double nd = static_cast<double>(n);
  if (std::abs(nd * dx * dq - 2.0 * kPi * eta) > 1e-9 * 2.0 * kPi * eta)
    throw ParameterError("continuous_ft: spacings are not conjugate for this eta");
  const double s = sign < 0 ? -1.0 : 1.0;
  std::vector<cplx> pre(n);
  for (std::size_t j = 0; j < n; ++j)
    pre[j] = f[j] * std::polar(1.0, s * static_cast<double>(j) * dx * q0 / eta);
  auto d = dft(pre, sign);
  for (std::size_t k = 0; k < n; ++k)
    d[k] *= dx * std::polar(1.0, s * x0 * (q0 + static_cast<double>(k) * dq) / eta);
  return d;
}

// Trigonometric interpolation to the half-step grid: out[2j] = in[j].
inline std::vector<cplx> upsample2(std::span<const cplx> in) {
  const int n = static_cast<int>(in.size());
  auto c = dft(std::vector<cplx>(in.begin(), in.end()), -1);
  std::vector<cplx> big(2 * n, cplx(0.0));
  for (int k = 0; k < n; ++k) {
    if (k < n / 2)
      big[k] = c[k];
    else if (k > n / 2)
      big[k + n] = c[k];
  }
  big[n / 2] = 0.5 * c[n / 2];
  big[2 * n - n / 2] = 0.5 * c[n / 2];
  auto out = dft(big, +1);
  for (auto& v : out) v /= static_cast<double>(n);
  return out;
}

// Band-limited shift by s samples: out[j] = f(j - s), zero where j - s leaves the grid.
inline std::vector<cplx> shift_samples(std::span<const cplx> in, double s) {
  const int n = static_cast<int>(in.size());
  auto c = dft(std::vector<cplx>(in.begin(), in.end()), -1);
  for (int k = 0; k < n; ++k) {
    if (k == n / 2)
      c[k] *= std::cos(kPi * s);
    else
      c[k] *= std::polar(1.0, -2.0 * kPi * detail::signed_frequency(k, n) * s / n);
  }
  auto out = dft(c, +1);
  for (int j = 0; j < n; ++j) {
    const double u = j - s;
    out[j] = (u < -0.5 || u > n - 0.5) ? cplx(0.0) : out[j] / static_cast<double>(n);
  }
  return out;
}

// Periodic cardinal function of the N-point band-limited interpolant (Nyquist term split).
inline double cardinal(double v, int n) {
  if (std::abs(v) < 1e-12) return 1.0;
  const double t = std::tan(kPi * v / n);
  if (std::abs(t) < 1e-300) return 1.0;
  return std::sin(kPi * v) / (n * t);
}

// Weights w_k with f(x) = sum_k w_k f_k; all zero when x is off the grid.
inline Eigen::VectorXd interpolation_weights(const Grid& g, double x) {
  const int n = g.n();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  const double u = (x - g.x_min()) / g.dx();
  if (u < -0.5 || u > n - 0.5) return w;
  const double r = std::round(u);
  if (std::abs(u - r) < 1e-12) {
    w(static_cast<int>(r) % n) = 1.0;
    return w;
  }
  const double su = std::sin(kPi * u);
  for (int k = 0; k < n; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    w(k) = sign * su / (n * std::tan(kPi * (u - k) / n));
  }
  return w;
}

inline cplx interpolate(const GridFunction& f, double x) {
  return (interpolation_weights(f.grid, x).cast<cplx>().transpose() * f.values)(0);
}

// Band-limited evaluation of gridded phase-space data at an arbitrary point.
inline cplx interpolate(const PhaseSpaceFunction& a, double x, double p) {
  const Eigen::VectorXd wx = interpolation_weights(a.grid, x);
  const Eigen::VectorXd wp = interpolation_weights(a.grid.dual(a.eta), p);
  return (wx.cast<cplx>().transpose() * a.values * wp.cast<cplx>())(0);
}

enum class FourierDirection { forward, inverse };

// F_eta psi(p) = (2 pi eta)^{-1/2} int exp(-i p x / eta) psi(x) dx.
// Forward lands on the centered momentum grid; inverse lands on `target` (default: centered dual).
inline GridFunction eta_fourier(const GridFunction& psi, FourierDirection dir = FourierDirection::forward,
                                std::optional<Grid> target = std::nullopt,
                                std::optional<double> requested_eta = std::nullopt) {
  const double eta = psi.eta;
  if (requested_eta && !same_eta(*requested_eta, eta))
    throw ParameterError("eta_fourier: requested eta differs from the grid function's eta");
  const Grid& g = psi.grid;
  const Grid out = target ? *target : g.dual(eta);
  if (out.size() != g.size()) throw ParameterError("eta_fourier: target grid size mismatch");
  const double norm = 1.0 / std::sqrt(2.0 * kPi * eta);
  const int sign = dir == FourierDirection::forward ? -1 : +1;
  std::span<const cplx> in(psi.values.data(), g.size());
  auto v = continuous_ft(in, g.x_min(), g.dx(), out.x_min(), out.dx(), eta, sign);
  CVec res(g.n());
  for (int k = 0; k < g.n(); ++k) res(k) = v[k] * norm;
  return GridFunction(out, psi.eta, res);
}

// F_sigma a(z) = (2 pi eta)^{-1} int exp(-i sigma(z, z') / eta) a(z') dz', sigma(z, z') = p x' - x p'.
// Output lives on the same grid as the input.
inline PhaseSpaceFunction symplectic_fourier(const PhaseSpaceFunction& a) {
  const Grid& g = a.grid;
  const int n = g.n();
  const double eta = a.eta;
  const double dx = g.dx(), dp = g.dp(eta), pmin = g.p_min(eta);
  // Over x (kernel exp(-i p0 x / eta)): rows become p0.
  CMat b(n, n);
  std::vector<cplx> col(n);
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < n; ++j) col[j] = a.values(j, l);
    auto t = continuous_ft(col, g.x_min(), dx, pmin, dp, eta, -1);
    for (int m = 0; m < n; ++m) b(m, l) = t[m];
  }
  // Over p (kernel exp(+i x0 p / eta)): columns become x0.
  CMat out(n, n);
  std::vector<cplx> row(n);
  const double scale = 1.0 / (2.0 * kPi * eta);
  for (int m = 0; m < n; ++m) {
    for (int l = 0; l < n; ++l) row[l] = b(m, l);
    auto t = continuous_ft(row, pmin, dp, g.x_min(), dx, eta, +1);
    for (int i = 0; i < n; ++i) out(i, m) = t[i] * scale;
  }
  PhaseKind k = PhaseKind::generic;
  if (a.kind == PhaseKind::wigner) k = PhaseKind::ambiguity;
  else if (a.kind == PhaseKind::ambiguity) k = PhaseKind::wigner;
  else if (a.kind == PhaseKind::symbol) k = PhaseKind::twisted_symbol;
  else if (a.kind == PhaseKind::twisted_symbol) k = PhaseKind::symbol;
  return PhaseSpaceFunction(g, a.eta, out, k);
}

// Fraction of squared mass in the outer 5% of samples at either edge.
inline double boundary_leak(const GridFunction& f) {
  const int n = f.grid.n();
  const int m = std::max(1, static_cast<int>(std::ceil(0.05 * n)));
  const double total = f.values.squaredNorm();
  if (total == 0.0) return 0.0;
  const double edge = f.values.head(m).squaredNorm() + f.values.tail(m).squaredNorm();
  return edge / total;
}

inline double boundary_leak(const PhaseSpaceFunction& a) {
  const int n = a.grid.n();
  const int m = std::max(1, static_cast<int>(std::ceil(0.05 * n)));
  const double total = a.values.squaredNorm();
  if (total == 0.0) return 0.0;
  const double inner = a.values.block(m, m, n - 2 * m, n - 2 * m).squaredNorm();
  return (total - inner) / total;
}

// Worker count: hardware concurrency, capped by WIGNERLAB_THREADS when set.
inline unsigned thread_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("WIGNERLAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

// Runs fn(i) for i in [0, n); iterations must be independent.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(std::max(n, 1)));
  if (workers <= 1 || n < 8) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace wignerlab
