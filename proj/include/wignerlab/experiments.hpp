#pragma once

// Experiment runner behind the `wignerlab` command line tool.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "covariance.hpp"
#include "io.hpp"

namespace wignerlab::cli {

using json = nlohmann::json;

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"wigner", "moyal",       "metaplectic", "klm",
                                                 "gaussian", "eta-scan", "tomography",  "pauli"};
  return names;
}

inline const std::vector<std::string>& state_names() {
  static const std::vector<std::string> names = {"coherent", "hermite1", "hermite2", "cat"};
  return names;
}

struct ExperimentConfig {
  std::string experiment;
  int n = 256;
  double eta = 1.0;
  double hbar = 1.0;  // eta at which built-in states are prepared for klm and eta-scan
  std::uint64_t seed = 1;
  std::optional<double> x_min, x_max;
  std::string out = ".";
  std::optional<std::string> input;
  int angles = 180;
  int samples = 40;
  std::optional<double> tol;
  std::string state = "coherent";
  std::vector<double> etas;
  cplx alpha{1.0, 1.0};
  std::optional<RMat> sigma;
};

namespace detail {

template <typename T>
T config_value(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config key '") + key + "': " + e.what());
  }
}

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace detail

// Keys mirror the long flag names with '-' replaced by '_'. Unknown keys are rejected.
inline void apply_config_json(const json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigurationError("config file must hold a JSON object");
  using detail::config_value;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "experiment") c.experiment = config_value<std::string>(j, "experiment");
    else if (k == "N") c.n = config_value<int>(j, "N");
    else if (k == "eta") c.eta = config_value<double>(j, "eta");
    else if (k == "hbar") c.hbar = config_value<double>(j, "hbar");
    else if (k == "seed") c.seed = config_value<std::uint64_t>(j, "seed");
    else if (k == "x_min") c.x_min = config_value<double>(j, "x_min");
    else if (k == "x_max") c.x_max = config_value<double>(j, "x_max");
    else if (k == "out") c.out = config_value<std::string>(j, "out");
    else if (k == "input") c.input = config_value<std::string>(j, "input");
    else if (k == "angles") c.angles = config_value<int>(j, "angles");
    else if (k == "samples") c.samples = config_value<int>(j, "samples");
    else if (k == "tol") c.tol = config_value<double>(j, "tol");
    else if (k == "state") c.state = config_value<std::string>(j, "state");
    else if (k == "etas") c.etas = config_value<std::vector<double>>(j, "etas");
    else if (k == "alpha") {
      const auto a = config_value<std::vector<double>>(j, "alpha");
      if (a.size() != 2) throw ConfigurationError("config key 'alpha' must be [re, im]");
      c.alpha = {a[0], a[1]};
    } else if (k == "sigma") c.sigma = io::matrix_from_json(j.at("sigma"));
    else throw ConfigurationError("unknown config key '" + k + "'");
  }
}

inline void validate(const ExperimentConfig& c) {
  if (!detail::contains(experiment_names(), c.experiment))
    throw ConfigurationError("unknown experiment '" + c.experiment + "'");
  if (c.n < 16 || (c.n & (c.n - 1)) != 0) throw ConfigurationError("N must be a power of two >= 16");
  Eta(c.eta);
  Eta(c.hbar);
  if (c.x_min.has_value() != c.x_max.has_value()) throw ConfigurationError("x-min and x-max must be given together");
  if (c.x_min && !(*c.x_max > *c.x_min)) throw ConfigurationError("x-max must exceed x-min");
  if (c.input && !std::filesystem::is_regular_file(*c.input))
    throw ConfigurationError("input file '" + *c.input + "' does not exist");
  if (c.angles < 2) throw ConfigurationError("angles must be >= 2");
  if (c.samples < 2) throw ConfigurationError("samples must be >= 2");
  if (c.tol && !(*c.tol > 0.0)) throw ConfigurationError("tol must be > 0");
  if (!detail::contains(state_names(), c.state)) throw ConfigurationError("unknown state '" + c.state + "'");
  for (double e : c.etas) Eta{e};
  if (!(c.alpha.real() > 0.0)) throw ConfigurationError("Re(alpha) must be > 0");
  if (c.sigma && (c.sigma->rows() != c.sigma->cols() || c.sigma->rows() % 2 != 0))
    throw ConfigurationError("sigma must be a square matrix of even size");
  if (c.out.empty()) throw ConfigurationError("out must be a directory path");
}

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_least = false;  // value >= threshold instead of value <= threshold
  bool pass() const { return std::isfinite(value) && (at_least ? value >= threshold : value <= threshold); }
};

struct Summary {
  std::string experiment;
  std::vector<Check> checks;
  json results = json::object();
  std::vector<std::string> artifacts;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
  }
};

inline json config_json(const ExperimentConfig& c) {
  json j = {{"experiment", c.experiment}, {"N", c.n},           {"eta", c.eta},         {"hbar", c.hbar},
            {"seed", c.seed},             {"angles", c.angles}, {"samples", c.samples}, {"state", c.state},
            {"alpha", {c.alpha.real(), c.alpha.imag()}}};
  if (c.x_min) j["x_min"] = *c.x_min;
  if (c.x_max) j["x_max"] = *c.x_max;
  if (c.input) j["input"] = *c.input;
  if (c.tol) j["tol"] = *c.tol;
  if (!c.etas.empty()) j["etas"] = c.etas;
  if (c.sigma) j["sigma"] = io::to_json(*c.sigma);
  return j;
}

inline json summary_json(const Summary& s, const ExperimentConfig& c) {
  json checks = json::array();
  for (const auto& k : s.checks)
    checks.push_back({{"name", k.name},
                      {"value", k.value},
                      {"threshold", k.threshold},
                      {"relation", k.at_least ? ">=" : "<="},
                      {"pass", k.pass()}});
  return {{"schema", 1},        {"experiment", s.experiment}, {"config", config_json(c)}, {"pass", s.pass()},
          {"checks", checks},   {"results", s.results},       {"artifacts", s.artifacts}};
}

namespace detail {

class Context {
 public:
  explicit Context(const ExperimentConfig& c) : cfg(c), dir(c.out) { std::filesystem::create_directories(dir); }

  const ExperimentConfig& cfg;
  std::filesystem::path dir;
  Summary summary;

  Grid grid(double eta) const {
    if (cfg.x_min) return make_grid(*cfg.x_min, *cfg.x_max, static_cast<std::size_t>(cfg.n));
    return make_natural_grid(static_cast<std::size_t>(cfg.n), eta);
  }
  double tol(double fallback) const { return cfg.tol.value_or(fallback); }

  void at_most(const std::string& name, double value, double threshold) {
    summary.checks.push_back({name, value, tol(threshold), false});
  }
  void at_least(const std::string& name, double value, double threshold) {
    summary.checks.push_back({name, value, threshold, true});
  }
  void require(const std::string& name, bool ok) { summary.checks.push_back({name, ok ? 1.0 : 0.0, 1.0, true}); }

  template <typename T>
  void save_csv(const std::string& name, const T& value) {
    io::save_csv((dir / name).string(), value);
    summary.artifacts.push_back(name);
  }
  void save_json(const std::string& name, const json& j) {
    io::write_json_file((dir / name).string(), j);
    summary.artifacts.push_back(name);
  }
  void save_heatmap(const std::string& name, const PhaseSpaceFunction& f) {
    std::ofstream os(dir / name);
    if (!os) throw ConfigurationError("cannot write '" + (dir / name).string() + "'");
    io::write_heatmap(os, f);
    summary.artifacts.push_back(name);
  }
};

inline GridFunction make_state(const std::string& name, const Grid& g, double eta) {
  if (name == "coherent") return coherent_state(g, eta);
  if (name == "hermite1") return hermite_state(g, eta, 1);
  if (name == "hermite2") return hermite_state(g, eta, 2);
  if (name == "cat") {
    const double d = 2.0 * std::sqrt(eta);
    const CVec v = coherent_state(g, eta, -d, 0.0).values + coherent_state(g, eta, d, 0.0).values;
    return GridFunction(g, Eta(eta), v).normalized();
  }
  throw ConfigurationError("unknown state '" + name + "'");
}

// Phase-space input from --input, or the Wigner function of the configured state at hbar.
inline PhaseSpaceFunction phase_space_input(Context& ctx) {
  if (ctx.cfg.input) return io::load_phase_space(*ctx.cfg.input);
  const Grid g = ctx.grid(ctx.cfg.hbar);
  return wigner(make_state(ctx.cfg.state, g, ctx.cfg.hbar)).function;
}

inline double max_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline void run_wigner(Context& ctx) {
  const double eta = ctx.cfg.eta;
  const Grid g = ctx.grid(eta);
  const GridFunction psi = make_state(ctx.cfg.state, g, eta);
  const WignerResult wr = wigner(psi);
  const PhaseSpaceFunction& w = wr.function;
  ctx.save_csv("wigner.csv", w);
  ctx.save_heatmap("wigner_heatmap.csv", w);
  const Marginals m = marginals(w);
  const double gx = max_gap(m.position, psi.values.cwiseAbs2());
  const double gp = max_gap(m.momentum, eta_fourier(psi).values.cwiseAbs2());
  ctx.at_most("marginal_position", gx, 1e-6);
  ctx.at_most("marginal_momentum", gp, 1e-6);
  ctx.at_most("normalization", std::abs(w.integral().real() - 1.0), 1e-8);
  if (ctx.cfg.state == "coherent") {
    double err = 0.0;
    for (int j = 0; j < g.n(); ++j)
      for (int k = 0; k < g.n(); ++k) {
        const double r2 = w.x(j) * w.x(j) + w.p(k) * w.p(k);
        err = std::max(err, std::abs(w.values(j, k).real() - std::exp(-r2 / eta) / (kPi * eta)));
      }
    ctx.at_most("closed_form", err, 1e-8);
  }
  ctx.summary.results = {{"boundary_leak", wr.leak},
                         {"leak_warning", wr.leak_warning},
                         {"min_value", w.values.real().minCoeff()},
                         {"max_value", w.values.real().maxCoeff()}};
}

inline GridFunction random_superposition(std::mt19937_64& rng, const Grid& g, double eta) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::normal_distribution<double> amp(0.0, 1.0);
  CVec v = CVec::Zero(g.n());
  for (int t = 0; t < 3; ++t) {
    const double x0 = pos(rng) * std::sqrt(eta), p0 = pos(rng) * std::sqrt(eta);
    const cplx c(amp(rng), amp(rng));
    v += c * coherent_state(g, eta, x0, p0).values;
  }
  return GridFunction(g, Eta(eta), v).normalized();
}

inline void run_moyal(Context& ctx) {
  const double eta = ctx.cfg.eta;
  const Grid g = ctx.grid(eta);
  std::mt19937_64 rng(ctx.cfg.seed);
  std::vector<GridFunction> states;
  for (int t = 0; t < 20; ++t) states.push_back(random_superposition(rng, g, eta));
  double moyal = 0.0, cross = 0.0;
  for (const auto& s : states) {
    const auto w = wigner(s).function;
    moyal = std::max(moyal, std::abs(2.0 * kPi * eta * moyal_overlap(w, w) - 1.0));
  }
  std::uniform_int_distribution<int> pick(0, 19);
  for (int t = 0; t < 20; ++t) {
    const auto &p1 = states[pick(rng)], &f1 = states[pick(rng)], &p2 = states[pick(rng)], &f2 = states[pick(rng)];
    const auto w1 = cross_wigner(p1, f1), w2 = cross_wigner(p2, f2);
    const cplx lhs = 2.0 * kPi * eta * w1.values.cwiseProduct(w2.values.conjugate()).sum() * w1.cell();
    const cplx rhs = p2.inner(p1) * f1.inner(f2);
    cross = std::max(cross, std::abs(lhs - rhs));
  }
  ctx.at_most("moyal", moyal, 1e-7);
  ctx.at_most("cross_moyal", cross, 1e-7);
  ctx.summary.results = {{"states", 20}, {"quadruples", 20}};
}

inline void run_metaplectic(Context& ctx) {
  const double eta = ctx.cfg.eta;
  const Grid g = ctx.grid(eta);
  const GridFunction psi = coherent_state(g, eta, 0.4 * std::sqrt(eta), -0.3 * std::sqrt(eta));
  const PhaseSpacePoint z0{0.7 * std::sqrt(eta), -0.5 * std::sqrt(eta)};
  auto symbol = [eta](double x, double p) {
    return std::exp(-(x * x + 2.0 * p * p) / (4.0 * eta)) * std::polar(1.0, 0.3 * x / std::sqrt(eta));
  };
  const std::vector<std::pair<std::string, MetaplecticLetter>> gens = {
      {"J", MetaplecticLetter::fourier()}, {"M2", MetaplecticLetter::rescale(2.0)}, {"V1", MetaplecticLetter::chirp(1.0)}};
  json res = json::object();
  for (const auto& [name, letter] : gens) {
    const auto spec = MetaplecticSpec::from_word({letter});
    const auto r = covariance_residuals(spec, psi, z0, symbol);
    ctx.at_most(name + ".displacement", r.displacement, 1e-5);
    ctx.at_most(name + ".reflection", r.reflection, 1e-5);
    ctx.at_most(name + ".wigner", r.wigner, 1e-5);
    ctx.at_most(name + ".ambiguity", r.ambiguity, 1e-5);
    ctx.at_most(name + ".weyl", r.weyl, 1e-5);
    ctx.at_most(name + ".norm", std::abs(metaplectic_apply(spec, psi).norm() - 1.0), 1e-8);
    res[name] = {{"projection", io::to_json(spec.projection())}};
  }
  std::mt19937_64 rng(ctx.cfg.seed);
  const RMat s = random_free_symplectic(rng);
  const auto direct = metaplectic_apply(MetaplecticSpec::free(s), psi);
  const auto word = metaplectic_apply(free_word(s), psi);
  ctx.at_most("free_kernel_vs_word", (direct.values - word.values).cwiseAbs().maxCoeff(), 1e-8);
  const auto gf = free_generating_function(SymplecticMatrix(s));
  res["random_free"] = {{"S", io::to_json(s)},
                        {"P", gf.P(0, 0)},
                        {"L", gf.L(0, 0)},
                        {"Q", gf.Q(0, 0)},
                        {"maslov", MetaplecticSpec::free(s).maslov}};
  ctx.summary.results = res;
}

inline void run_klm(Context& ctx) {
  const PhaseSpaceFunction a = phase_space_input(ctx);
  const KLMReport r = klm_test(a, ctx.cfg.eta, ctx.cfg.samples, ctx.cfg.seed);
  ctx.save_json("klm.json", io::to_json(r));
  ctx.require("continuity", r.continuity_ok);
  ctx.require("hessian", r.hessian_ok);
  ctx.require("fourth_moments", r.fourth_moments_ok);
  ctx.require("sampled_matrix", r.matrix_ok);
  ctx.summary.results = {{"eta", r.eta},
                         {"symbol_eta", static_cast<double>(a.eta)},
                         {"min_eigenvalue", r.min_eigenvalue},
                         {"hessian_min_eigenvalue", r.hessian_min_eigenvalue},
                         {"fourth_moment_x", r.fourth_moment_x},
                         {"fourth_moment_p", r.fourth_moment_p},
                         {"violations", r.violations}};
}

inline void run_gaussian(Context& ctx) {
  RMat sigma(2, 2);
  sigma << 1.0, 0.3, 0.3, 0.8;
  if (ctx.cfg.sigma) sigma = *ctx.cfg.sigma;
  const double eta = ctx.cfg.eta;
  const AdmissibilityReport adm = gaussian_admissible(sigma, eta);
  json res = {{"admissibility", io::to_json(adm)}};
  ctx.require("positive_definite", adm.positive_definite);
  if (adm.positive_definite) {
    const WilliamsonForm w = williamson(sigma);
    ctx.at_most("williamson_reconstruction", w.reconstruction_error(sigma), 1e-8);
    ctx.at_most("williamson_symplectic", symplectic_residual(w.S), 1e-9);
    ctx.require("criteria_agree", adm.eigenvalue_criterion == adm.matrix_criterion);
    res["williamson"] = io::to_json(w, sigma);
    ctx.save_json("williamson.json", res["williamson"]);
  }
  ctx.require("admissible", adm.admissible);
  ctx.summary.results = res;
}

inline void run_eta_scan(Context& ctx) {
  const PhaseSpaceFunction a = phase_space_input(ctx);
  std::vector<double> etas = ctx.cfg.etas;
  if (etas.empty()) {
    const double e = a.eta;
    etas = {0.5 * e, e, 1.5 * e};
  }
  const EtaScanResult r = eta_scan(a, etas);
  ctx.save_json("eta_scan.json", io::to_json(r));
  ctx.require("monotone", r.monotone);
  ctx.summary.results = io::to_json(r);
}

inline void run_tomography(Context& ctx) {
  std::optional<GridFunction> reference;
  std::optional<PhaseSpaceFunction> w;
  TomogramSet t = [&] {
    if (ctx.cfg.input) return io::load_tomograms(*ctx.cfg.input);
    const Grid g = ctx.grid(ctx.cfg.eta);
    reference = make_state(ctx.cfg.state, g, ctx.cfg.eta);
    w = wigner(*reference).function;
    return radon(*w, uniform_angles(ctx.cfg.angles));
  }();
  if (!ctx.cfg.input) ctx.save_csv("tomograms.csv", t);
  const Reconstruction r = reconstruct_density(t);
  ctx.save_csv("reconstructed_wigner.csv", r.wigner);
  ctx.save_csv("density.csv", r.op);
  ctx.at_most("hermiticity", r.report.hermiticity_residue, kHermitianTolerance);
  ctx.at_most("trace", std::abs(r.op.trace() - 1.0), kTraceTolerance);
  ctx.require("density_valid", r.density.has_value());
  json res = {{"purity", r.purity}, {"underdetermined", r.underdetermined}, {"density", io::to_json(r.report)}};
  if (reference) {
    const double l2 = (r.wigner.values - w->values).norm() / w->values.norm();
    const double fid = reference->inner(r.op.apply(*reference)).real();
    ctx.at_most("wigner_l2_relative", l2, 0.02);
    ctx.at_least("fidelity", fid, 0.98);
    res["fidelity"] = fid;
    res["wigner_l2_relative"] = l2;
  }
  ctx.summary.results = res;
}

inline void run_pauli(Context& ctx) {
  const double eta = ctx.cfg.eta;
  const Grid g = ctx.grid(eta);
  const PauliPair p = pauli_pair(g, eta, ctx.cfg.alpha);
  ctx.save_csv("psi1.csv", p.psi1);
  ctx.save_csv("psi2.csv", p.psi2);
  ctx.at_most("overlap", std::abs(p.overlap2 - p.expected_overlap2), 1e-6);
  ctx.at_most("position_marginals", p.position_marginal_gap, 1e-10);
  ctx.at_most("momentum_marginals", p.momentum_marginal_gap, 1e-10);
  ctx.summary.results = {{"overlap2", p.overlap2}, {"expected_overlap2", p.expected_overlap2}};
}

}  // namespace detail

// Runs one experiment and writes summary.json plus its artifacts into cfg.out.
// Throws on configuration or input errors; the returned summary carries the check outcomes.
inline Summary run(const ExperimentConfig& cfg) {
  validate(cfg);
  detail::Context ctx(cfg);
  ctx.summary.experiment = cfg.experiment;
  static const std::map<std::string, void (*)(detail::Context&)> table = {
      {"wigner", detail::run_wigner},         {"moyal", detail::run_moyal},       {"metaplectic", detail::run_metaplectic},
      {"klm", detail::run_klm},               {"gaussian", detail::run_gaussian}, {"eta-scan", detail::run_eta_scan},
      {"tomography", detail::run_tomography}, {"pauli", detail::run_pauli}};
  table.at(cfg.experiment)(ctx);
  ctx.summary.artifacts.push_back("summary.json");
  io::write_json_file((ctx.dir / "summary.json").string(), summary_json(ctx.summary, cfg));
  return ctx.summary;
}

inline void print_table(std::ostream& os, const Summary& s) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  for (const auto& c : s.checks)
    os << (c.pass() ? "PASS " : "FAIL ") << c.name << ' ' << fmt(c.value) << (c.at_least ? " >= " : " <= ")
       << fmt(c.threshold) << '\n';
  if (s.experiment == "eta-scan")
    for (const auto& e : s.results.at("entries"))
      os << "eta " << fmt(e.at("eta").get<double>()) << ' ' << e.at("verdict").get<std::string>() << " min_eigenvalue "
         << fmt(e.at("min_eigenvalue").get<double>()) << '\n';
}

}  // namespace wignerlab::cli
