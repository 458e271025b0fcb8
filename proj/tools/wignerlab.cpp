#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <wignerlab/experiments.hpp>

namespace {

using wignerlab::cli::ExperimentConfig;

constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigError = 2;

struct Flags {
  std::string experiment;
  std::optional<std::string> config;
  std::optional<int> n, angles, samples;
  std::optional<double> eta, hbar, x_min, x_max, tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, input, state;
  std::vector<double> etas, alpha;
};

ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig c;
  if (f.config) wignerlab::cli::apply_config_json(wignerlab::io::read_json_file(*f.config), c);
  if (!f.experiment.empty()) c.experiment = f.experiment;
  if (f.n) c.n = *f.n;
  if (f.eta) c.eta = *f.eta;
  if (f.hbar) c.hbar = *f.hbar;
  if (f.seed) c.seed = *f.seed;
  if (f.x_min) c.x_min = *f.x_min;
  if (f.x_max) c.x_max = *f.x_max;
  if (f.out) c.out = *f.out;
  if (f.input) c.input = *f.input;
  if (f.angles) c.angles = *f.angles;
  if (f.samples) c.samples = *f.samples;
  if (f.tol) c.tol = *f.tol;
  if (f.state) c.state = *f.state;
  if (!f.etas.empty()) c.etas = f.etas;
  if (!f.alpha.empty()) c.alpha = {f.alpha[0], f.alpha[1]};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space quantum mechanics on a grid"};
  app.require_subcommand(1);
  Flags f;
  auto* run = app.add_subcommand("run", "Run one experiment and write its artifacts and summary.json");
  run->add_option("experiment", f.experiment, "wigner | moyal | metaplectic | klm | gaussian | eta-scan | tomography | pauli");
  run->add_option("--config", f.config, "JSON config file; flags override its values");
  run->add_option("--N", f.n, "Grid size (power of two >= 16)");
  run->add_option("--eta", f.eta, "Planck parameter");
  run->add_option("--hbar", f.hbar, "Planck parameter of the built-in state for klm and eta-scan");
  run->add_option("--seed", f.seed, "Random seed");
  run->add_option("--x-min", f.x_min, "Left end of the position window");
  run->add_option("--x-max", f.x_max, "Right end of the position window");
  run->add_option("--out", f.out, "Output directory");
  run->add_option("--input", f.input, "Input CSV (phase-space function or tomograms)");
  run->add_option("--angles", f.angles, "Number of tomography angles");
  run->add_option("--samples", f.samples, "Sample points for the KLM matrix");
  run->add_option("--tol", f.tol, "Override for the upper-bound check tolerances");
  run->add_option("--state", f.state, "coherent | hermite1 | hermite2 | cat");
  run->add_option("--etas", f.etas, "Planck parameters for eta-scan");
  run->add_option("--alpha", f.alpha, "Pauli pair parameter as two numbers: re im")->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    const ExperimentConfig cfg = resolve(f);
    const auto summary = wignerlab::cli::run(cfg);
    wignerlab::cli::print_table(std::cout, summary);
    std::cout << (summary.pass() ? "PASS" : "FAIL") << ' ' << cfg.experiment << '\n';
    return summary.pass() ? 0 : kExitCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}
