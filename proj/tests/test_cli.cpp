#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "conelab/report.hpp"

using namespace conelab;
using namespace conelab::app;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = CONELAB_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("conelab_test_" + name);
  fs::remove_all(p);
  return p;
}

int run_cmd(const std::string& cmd, const std::string& config, const fs::path& out, std::string* stdout_text = nullptr,
            std::string* stderr_text = nullptr, const std::string& selector = "") {
  Invocation inv{cmd, selector, config, std::nullopt, std::nullopt, out.string()};
  std::ostringstream o, e;
  const int rc = run(inv, o, e);
  if (stdout_text) *stdout_text = o.str();
  if (stderr_text) *stderr_text = e.str();
  return rc;
}

}  // namespace

TEST(Config, RationalProbabilities) {
  EXPECT_EQ(parse_probability("1/8"), 0.125);
  EXPECT_EQ(parse_probability("3/8"), 3.0 / 8);
  EXPECT_EQ(parse_probability("0.25"), 0.25);
  EXPECT_THROW(parse_probability("1/0"), ConfigError);
  EXPECT_THROW(parse_probability("a/3"), ConfigError);
  EXPECT_THROW(parse_probability("0.5x"), ConfigError);
}

TEST(Config, LoadsReferenceModel) {
  const auto c = load_config(kConfigs + "/nn4.json");
  EXPECT_EQ(c.steps.size(), 4u);
  EXPECT_EQ(c.probs[1], 0.375);
  EXPECT_TRUE(c.cone.is_orthant());
  EXPECT_EQ(c.n_max, 400);
}

TEST(Config, UnknownKeyNamed) {
  const std::string text = R"({"model": {"steps": [{"step": [1,0], "prob": "1/2"}, {"step": [0,-1], "prob": "1/2"}],
    "cone": {"type": "orthant", "dim": 2}}, "simulate": {"nsamples": 5}})";
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("simulate.nsamples"), std::string::npos) << e.what();
  }
}

TEST(Config, BadProbabilityNamed) {
  const std::string text = R"({"model": {"steps": [{"step": [1,0], "prob": "1/2"}, {"step": [0,-1], "prob": "x"}],
    "cone": {"type": "orthant", "dim": 2}}})";
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("model.steps[1].prob"), std::string::npos) << e.what();
  }
}

TEST(Config, StartMustBeInCone) {
  const std::string text = R"({"model": {"steps": [{"step": [1,0], "prob": "1/2"}, {"step": [0,-1], "prob": "1/2"}],
    "cone": {"type": "orthant", "dim": 2}}, "start": [0, 3]})";
  EXPECT_THROW(parse_config(text), ConfigError);
}

TEST(Cli, CramerPrintsClosedForm) {
  std::string out;
  EXPECT_EQ(run_cmd("cramer", kConfigs + "/nn4.json", scratch("cramer"), &out), 0);
  EXPECT_NE(out.find("0.549306"), std::string::npos) << out;
  EXPECT_NE(out.find("0.866025"), std::string::npos) << out;
}

TEST(Cli, CollinearRejected) {
  std::string err;
  EXPECT_EQ(run_cmd("dp", kConfigs + "/bad_collinear.json", scratch("bad"), nullptr, &err), 2);
  EXPECT_NE(err.find("Assumption 2 violated"), std::string::npos) << err;
}

TEST(Cli, MissingConfig) { EXPECT_EQ(run_cmd("dp", "/nonexistent.json", scratch("missing")), 2); }

TEST(Cli, UnknownSelector) {
  EXPECT_EQ(run_cmd("verify", kConfigs + "/nn4.json", scratch("sel"), nullptr, nullptr, "nope"), 2);
}

TEST(Cli, DpDeterministicFiles) {
  const auto a = scratch("dp_a"), b = scratch("dp_b");
  ASSERT_EQ(run_cmd("dp", kConfigs + "/nn4.json", a), 0);
  ASSERT_EQ(run_cmd("dp", kConfigs + "/nn4.json", b), 0);
  int csv = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename();
    ASSERT_TRUE(fs::exists(b / name)) << name;
    EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
    if (e.path().extension() == ".csv") {
      ++csv;
      EXPECT_EQ(slurp(e.path()).rfind("n,raw_survival_log,rescaled_b_n\n", 0), 0u);
    }
    if (name.string().rfind("manifest_", 0) == 0) {
      const auto hash = hex64(fnv1a(slurp(kConfigs + "/nn4.json")));
      EXPECT_NE(slurp(e.path()).find(hash), std::string::npos);
    }
  }
  EXPECT_EQ(csv, 1);
}

TEST(Cli, VerifySingleSelector) {
  const auto dir = scratch("verify");
  std::string out;
  EXPECT_EQ(run_cmd("verify", kConfigs + "/nn4.json", dir, &out, nullptr, "hazard"), 0);
  EXPECT_NE(out.find("PASS hazard"), std::string::npos);
  bool found = false;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".jsonl") {
      const auto text = slurp(e.path());
      EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
      EXPECT_NE(text.find("\"check\":\"hazard\""), std::string::npos);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(Report, Formats) {
  EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  McEstimate e{"direct", 0.25, 0.001, -1.0, 1000, 250, 42, 2};
  EXPECT_EQ(estimate_json(e),
            R"({"estimator":"direct","value":0.25,"std_error":0.001,"n_samples":1000,"seed":42,"workers":2})");
  VerificationReport r = make_report("hazard", 0.1, 0.11, 0.1, 0.02);
  EXPECT_EQ(summary_csv({r}), "check,predicted,measured,deviation,tolerance,pass\n"
                              "hazard,0.10000000000000001,0.11,0.10000000000000001,0.02,false\n");
}
