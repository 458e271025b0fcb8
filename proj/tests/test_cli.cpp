#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <wignerlab/experiments.hpp>

using namespace wignerlab;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("wignerlab_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

cli::ExperimentConfig config(const std::string& experiment, const std::string& name, int n = 64) {
  cli::ExperimentConfig c;
  c.experiment = experiment;
  c.n = n;
  c.out = scratch_dir(name).string();
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, JsonKeysApply) {
  cli::ExperimentConfig c;
  cli::apply_config_json(json::parse(R"({"experiment": "pauli", "N": 128, "eta": 0.5, "seed": 9,
                                         "alpha": [2, -1], "etas": [0.1, 0.2], "sigma": [[1, 0], [0, 1]]})"),
                         c);
  EXPECT_EQ(c.experiment, "pauli");
  EXPECT_EQ(c.n, 128);
  EXPECT_EQ(c.eta, 0.5);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.alpha, cplx(2.0, -1.0));
  EXPECT_EQ(c.etas, (std::vector<double>{0.1, 0.2}));
  ASSERT_TRUE(c.sigma.has_value());
  EXPECT_EQ(*c.sigma, RMat::Identity(2, 2));
  EXPECT_NO_THROW(cli::validate(c));
}

TEST(Config, RejectsUnknownAndMistypedKeys) {
  cli::ExperimentConfig c;
  EXPECT_THROW(cli::apply_config_json(json::parse(R"({"Nn": 3})"), c), ConfigurationError);
  EXPECT_THROW(cli::apply_config_json(json::parse(R"({"N": "big"})"), c), ConfigurationError);
  EXPECT_THROW(cli::apply_config_json(json::parse(R"({"alpha": [1]})"), c), ConfigurationError);
  EXPECT_THROW(cli::apply_config_json(json::parse("[1, 2]"), c), ConfigurationError);
}

// Each single corruption of a valid config is rejected.
TEST(Config, ValidateRejectsEachCorruption) {
  const auto base = [] {
    cli::ExperimentConfig c;
    c.experiment = "wigner";
    return c;
  };
  EXPECT_NO_THROW(cli::validate(base()));
  const std::vector<std::function<void(cli::ExperimentConfig&)>> corrupt = {
      [](auto& c) { c.experiment = "nope"; },
      [](auto& c) { c.n = 100; },
      [](auto& c) { c.n = 8; },
      [](auto& c) { c.eta = 0.0; },
      [](auto& c) { c.eta = -1.0; },
      [](auto& c) { c.hbar = -2.0; },
      [](auto& c) { c.x_min = -5.0; },
      [](auto& c) { c.x_min = 5.0, c.x_max = -5.0; },
      [](auto& c) { c.input = "/nonexistent/file.csv"; },
      [](auto& c) { c.angles = 1; },
      [](auto& c) { c.samples = 0; },
      [](auto& c) { c.tol = 0.0; },
      [](auto& c) { c.state = "squeezed"; },
      [](auto& c) { c.etas = {1.0, -0.5}; },
      [](auto& c) { c.alpha = {0.0, 1.0}; },
      [](auto& c) { c.sigma = RMat::Identity(3, 3); },
      [](auto& c) { c.out = ""; },
  };
  for (std::size_t i = 0; i < corrupt.size(); ++i) {
    auto c = base();
    corrupt[i](c);
    EXPECT_THROW(cli::validate(c), ConfigurationError) << "corruption " << i;
  }
}

TEST(Run, WignerWritesSummaryAndArtifacts) {
  const auto c = config("wigner", "wigner");
  const auto s = cli::run(c);
  EXPECT_TRUE(s.pass());
  const auto j = json::parse(slurp(std::filesystem::path(c.out) / "summary.json"));
  EXPECT_EQ(j.at("schema"), 1);
  EXPECT_EQ(j.at("experiment"), "wigner");
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_EQ(j.at("config").at("N"), 64);
  for (const auto& a : j.at("artifacts")) EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.out) / a.get<std::string>()));
  const auto w = io::load_phase_space((std::filesystem::path(c.out) / "wigner.csv").string());
  EXPECT_EQ(w.grid.n(), 64);
}

TEST(Run, SummariesAreDeterministic) {
  auto a = config("klm", "det_a");
  auto b = config("klm", "det_b");
  a.seed = b.seed = 4;
  cli::run(a);
  cli::run(b);
  auto strip = [](json j) {
    j["config"].erase("out");
    return j.dump();
  };
  EXPECT_EQ(strip(json::parse(slurp(std::filesystem::path(a.out) / "summary.json"))),
            strip(json::parse(slurp(std::filesystem::path(b.out) / "summary.json"))));
  EXPECT_EQ(slurp(std::filesystem::path(a.out) / "klm.json"), slurp(std::filesystem::path(b.out) / "klm.json"));
}

TEST(Run, ToleranceOverrideCanFailChecks) {
  auto c = config("pauli", "tol");
  c.tol = 1e-300;
  const auto s = cli::run(c);
  EXPECT_FALSE(s.pass());
  EXPECT_FALSE(json::parse(slurp(std::filesystem::path(c.out) / "summary.json")).at("pass").get<bool>());
}

TEST(Run, KlmOnSavedWignerAtLargerEtaFails) {
  const auto w = config("wigner", "klm_src");
  cli::run(w);
  auto k = config("klm", "klm_fail");
  k.input = (std::filesystem::path(w.out) / "wigner.csv").string();
  k.eta = 1.5;
  EXPECT_FALSE(cli::run(k).pass());
  k.eta = 1.0;
  EXPECT_TRUE(cli::run(k).pass());
}

TEST(Run, GaussianAndEtaScanExperiments) {
  auto g = config("gaussian", "gauss");
  EXPECT_TRUE(cli::run(g).pass());
  RMat tight(2, 2);
  tight << 0.3, 0.0, 0.0, 0.3;
  g.sigma = tight;
  EXPECT_FALSE(cli::run(g).pass());
  auto e = config("eta-scan", "scan", 128);
  const auto s = cli::run(e);
  EXPECT_TRUE(s.pass());
  const auto& entries = s.results.at("entries");
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].at("verdict"), "mixed-admissible");
  EXPECT_EQ(entries[1].at("verdict"), "pure");
  EXPECT_EQ(entries[2].at("verdict"), "inadmissible");
  std::ostringstream os;
  cli::print_table(os, s);
  EXPECT_NE(os.str().find("eta 1 pure"), std::string::npos) << os.str();
}

TEST(Run, StatesAndSmallExperiments) {
  for (const auto& st : cli::state_names()) {
    auto c = config("wigner", "state_" + st);
    c.state = st;
    const auto s = cli::run(c);
    EXPECT_TRUE(s.pass()) << st;
  }
  EXPECT_TRUE(cli::run(config("moyal", "moyal", 128)).pass());
  EXPECT_TRUE(cli::run(config("pauli", "pauli")).pass());
}

TEST(Run, ConfigErrorsThrowBeforeWriting) {
  auto c = config("wigner", "bad");
  c.eta = -1.0;
  EXPECT_THROW(cli::run(c), ConfigurationError);
  EXPECT_FALSE(std::filesystem::exists(c.out));
}
