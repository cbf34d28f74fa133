#include "relaxdamp/config.hpp"
#include "relaxdamp/errors.hpp"
#include "relaxdamp/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

using namespace relaxdamp;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorKind::Io;
}

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTiny = R"({
  "model": {"kind": "jinxin"},
  "profile": {"X": 12.0, "n": 481, "method": "exact"},
  "spectral": {"n_xi": 200},
  "dynamics": {"T": 1.0, "dx": 0.05, "n_out": 10},
  "verify": {"norms": ["C0", "H2"], "n_paths": 10, "substeps": 2}
})";

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("relaxdamp_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, Defaults) {
  const Config c = parse_config_text(R"({"model": {"kind": "jinxin"}})");
  EXPECT_EQ(c.profile.n, 4001);
  EXPECT_EQ(c.dynamics.T, 80.0);
  EXPECT_EQ(c.dynamics.backend, Backend::Moc);
  EXPECT_EQ(c.verify.C_cap, 1000.0);
  EXPECT_EQ(c.seed, 7u);
  const ModelSpec m = build_model(c.model);
  EXPECT_EQ(m.dim(), 2);
}

TEST(Config, RepoConfigsParse) {
  for (const char* name : {"default", "supercharacteristic", "offset", "quick"}) {
    const fs::path p = fs::path(RELAXDAMP_SOURCE_DIR) / "configs" / (std::string(name) + ".json");
    EXPECT_NO_THROW(parse_config(p.string())) << name;
  }
}

TEST(Config, MalformedJsonIsParseError) {
  EXPECT_EQ(kind_of("{\"model\": "), ErrorKind::ParseError);
  EXPECT_THROW(parse_config("/nonexistent/relaxdamp.json"), Error);
}

TEST(Config, UnknownKeyNamesPath) {
  EXPECT_EQ(kind_of(R"({"model": {"kind": "jinxin", "bogus": 1}})"), ErrorKind::ValidationError);
  EXPECT_EQ(message_of(R"({"model": {"kind": "jinxin"}, "dynamics": {"Tmax": 3}})").rfind("dynamics", 0), 0u);
}

TEST(Config, NegativeRelaxationTime) {
  EXPECT_EQ(kind_of(R"({"model": {"kind": "jinxin", "eps": -1}})"), ErrorKind::ValidationError);
  EXPECT_NE(message_of(R"({"model": {"kind": "jinxin", "eps": -1}})").find("model.eps"), std::string::npos);
}

TEST(Config, MisspelledSectionIsRejected) {
  EXPECT_EQ(kind_of(R"({"model": {"kind": "jinxin"}, "modle": {}})"), ErrorKind::ValidationError);
}

TEST(Config, RangeChecks) {
  EXPECT_EQ(kind_of(R"({"model": {"kind": "jinxin"}, "dynamics": {"cfl": 1.5}})"), ErrorKind::ValidationError);
  EXPECT_EQ(kind_of(R"({"model": {"kind": "jinxin"}, "profile": {"n": 2}})"), ErrorKind::ValidationError);
  EXPECT_EQ(kind_of(R"({"model": {"kind": "jinxin"}, "verify": {"norms": ["C7"]}})"), ErrorKind::ValidationError);
  EXPECT_EQ(kind_of(R"({"model": {"kind": "heat"}})"), ErrorKind::ValidationError);
  EXPECT_EQ(kind_of(R"({"profile": {"n": 11}})"), ErrorKind::ValidationError);
}

TEST(Config, PerturbationAndShift) {
  const Config c = parse_config_text(R"({"model": {"kind": "jinxin"},
    "dynamics": {"perturbation": {"kind": "offset", "d_minus": [1e-3, 0], "d_plus": [0, 0]},
                 "shift": {"kind": "sinusoid", "amplitude": 0.05, "frequency": 0.1}}})");
  EXPECT_EQ(c.dynamics.perturbation.kind, PerturbationSpec::Kind::Offset);
  EXPECT_EQ(c.dynamics.perturbation.d_minus(0), 1e-3);
  EXPECT_NEAR(c.dynamics.shift.eps_delta(), 5e-3, 1e-15);
}

TEST(Pipeline, SubcommandNames) {
  EXPECT_EQ(parse_subcommand("all"), Subcommand::All);
  EXPECT_EQ(parse_subcommand("verify"), Subcommand::Verify);
  EXPECT_FALSE(parse_subcommand("dance").has_value());
}

TEST(Pipeline, AtomicWrite) {
  const fs::path dir = scratch("atomic");
  fs::create_directories(dir);
  write_atomic((dir / "a.json").string(), "{}\n");
  EXPECT_EQ(slurp(dir / "a.json"), "{}\n");
  EXPECT_FALSE(fs::exists(dir / "a.json.tmp"));
}

TEST(Pipeline, AllStagesWriteArtifacts) {
  const Config c = parse_config_text(kTiny);
  const fs::path dir = scratch("all");
  ASSERT_EQ(run(Subcommand::All, c, dir.string()), exit_code::kPass);
  for (const char* f : {"profile.csv", "profile.json", "assumptions.json", "frames.csv", "spectrum.csv",
                        "trajectory.csv", "norms.csv", "evolve.json", "characteristics.csv", "h_bound.json",
                        "damping.json", "energies.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto a = nlohmann::json::parse(slurp(dir / "assumptions.json"));
  EXPECT_TRUE(a["certified"].get<bool>());
  EXPECT_NEAR(a["assumption3_dissipativity"]["theta_E"].get<double>(), 0.125, 1e-12);
}

TEST(Pipeline, Deterministic) {
  const Config c = parse_config_text(kTiny);
  const fs::path d1 = scratch("det1"), d2 = scratch("det2");
  ASSERT_EQ(run(Subcommand::All, c, d1.string()), 0);
  ASSERT_EQ(run(Subcommand::All, c, d2.string()), 0);
  for (const char* f : {"profile.json", "assumptions.json", "evolve.json", "damping.json", "h_bound.json"})
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
}

TEST(Pipeline, UncertifiedModelExitsThree) {
  Config c = parse_config_text(kTiny);
  c.model.a = 0.5;
  c.profile.method = "shoot";  // the closed form needs the subcharacteristic condition
  const fs::path dir = scratch("super");
  EXPECT_EQ(run(Subcommand::Check, c, dir.string()), exit_code::kCertification);
  const auto a = nlohmann::json::parse(slurp(dir / "assumptions.json"));
  EXPECT_FALSE(a["certified"].get<bool>());
}

TEST(Pipeline, RuntimeErrorWritesErrorJson) {
  Config c = parse_config_text(kTiny);
  c.dynamics.perturbation = PerturbationSpec::gaussian(1.0, 2.0);  // far above the budget
  const fs::path dir = scratch("budget");
  EXPECT_EQ(run(Subcommand::Evolve, c, dir.string()), exit_code::kCrash);
  const auto e = nlohmann::json::parse(slurp(dir / "error.json"));
  EXPECT_EQ(e["error"]["kind"].get<std::string>(), "BudgetExceeded");
}
