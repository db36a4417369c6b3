#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>

#include "irrsde/config.hpp"
#include "irrsde/harness.hpp"
#include "irrsde/selftest.hpp"

using namespace irrsde;

namespace {

ExperimentConfig small_config(const std::string& problem) {
  ExperimentConfig c;
  c.problem = {problem, {}, 0.0, 1.0};
  c.norms = {"L1_terminal", "L1_sup", "Lp_sup"};
  c.n_list = {4, 8, 16, 32};
  c.n_ref_factor = 8;
  c.paths = 400;
  c.seed = 17;
  c.output = "unused.csv";
  return c;
}

std::string csv_of(const ExperimentConfig& c, std::size_t threads) {
  std::ostringstream os;
  write_report_csv(os, run_experiment(c, threads));
  return os.str();
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<accepted>";
}

const char* kMinimal = R"({
  "problem": {"name": "G4", "params": {"alpha": 0.25}},
  "norms": ["L1_terminal"],
  "n_list": [16, 32, 64],
  "paths": 200,
  "seed": 5,
  "output": "x.csv"
})";

}  // namespace

TEST(Config, PresetsValidateAndRoundTrip) {
  for (const auto& name : preset_names()) {
    const auto c = preset(name);
    EXPECT_NO_THROW(validate_config(c)) << name;
    const auto text = serialize_config(c);
    const auto back = parse_config(text);
    EXPECT_EQ(back, c) << name;
    EXPECT_EQ(serialize_config(back), text) << name;
  }
  EXPECT_THROW(preset("thm-9.9"), std::invalid_argument);
}

TEST(Config, OptionalFieldsRoundTrip) {
  auto c = small_config("G1");
  c.stopping_level = 0.25;
  c.truncation_m = {3, 7};
  c.path_dump = "paths.bin";
  c.threads = 3;
  c.gates = false;
  c.problem.params = {{"kappa", 2.0}};
  c.problem.x0 = -0.5;
  c.problem.horizon = 2.0;
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, ParsesDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.n_ref_factor, 32u);
  EXPECT_EQ(c.problem.horizon, 1.0);
  EXPECT_FALSE(c.stopping_level.has_value());
  EXPECT_TRUE(c.gates);
  EXPECT_EQ(c.seed, 5u);
}

TEST(Config, ScalarTruncationLevel) {
  std::string text = kMinimal;
  text.insert(text.rfind('}'), R"(, "truncation_m": 4)");
  EXPECT_EQ(parse_config(text).truncation_m, std::vector<int>{4});
}

TEST(Config, ErrorsNameTheKey) {
  auto with = [](const std::string& from, const std::string& to) {
    std::string t = kMinimal;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  EXPECT_EQ(config_error_key(with("\"paths\": 200", "\"paths\": 10")), "paths");
  EXPECT_EQ(config_error_key(with("\"seed\": 5,", "")), "seed");
  EXPECT_EQ(config_error_key(with("[16, 32, 64]", "[16, 48, 96]")), "n_list");
  EXPECT_EQ(config_error_key(with("[16, 32, 64]", "[16, 32]")), "n_list");
  EXPECT_EQ(config_error_key(with("[16, 32, 64]", "[16, 16, 32]")), "n_list");
  EXPECT_EQ(config_error_key(with("\"seed\": 5", "\"seed\": 5, \"colour\": 1")), "colour");
  EXPECT_EQ(config_error_key(with("\"params\"", "\"x0\": 0, \"parms\"")), "problem.parms");
  EXPECT_EQ(config_error_key(with("\"alpha\"", "\"alpah\"")), "problem");
  EXPECT_EQ(config_error_key(with("\"G4\"", "\"G9\"")), "problem");
  EXPECT_EQ(config_error_key(with("L1_terminal", "L3_terminal")), "norms");
  EXPECT_EQ(config_error_key(with("\"seed\": 5", "\"seed\": 5, \"n_ref_factor\": 24")), "n_ref_factor");
  EXPECT_EQ(config_error_key(with("\"seed\": 5", "\"seed\": 5, \"gamma\": 1.0")), "gamma");
  EXPECT_EQ(config_error_key(with("\"seed\": 5", "\"seed\": 5, \"p\": 0.5")), "p");
  EXPECT_EQ(config_error_key(with("\"seed\": 5", "\"seed\": 5, \"truncation_m\": [0]")), "truncation_m");
  EXPECT_EQ(config_error_key(with("\"paths\": 200", "\"paths\": \"many\"")), "paths");
  EXPECT_EQ(config_error_key("{not json"), "<root>");
  EXPECT_EQ(config_error_key("[1, 2]"), "<root>");
}

TEST(Harness, ExactSchemeSkipsFit) {
  for (const char* name : {"G5", "CONST"}) {
    const auto r = run_experiment(small_config(name));
    ASSERT_EQ(r.variants.size(), 1u);
    EXPECT_TRUE(r.variants[0].exact_scheme) << name;
    EXPECT_TRUE(r.variants[0].rates.empty());
    EXPECT_TRUE(r.gates_passed());
    std::ostringstream os;
    write_report_csv(os, r);
    EXPECT_NE(os.str().find("# " + std::string(name) + ",exact_scheme\n"), std::string::npos);
  }
}

TEST(Harness, CsvIndependentOfThreads) {
  auto c = small_config("G4");
  c.norms = {"L1_terminal", "L1_stopping", "gamma_sup", "Lp_sup"};
  EXPECT_EQ(csv_of(c, 1), csv_of(c, 8));
  EXPECT_EQ(csv_of(c, 1), csv_of(c, 3));
}

TEST(Harness, CsvLayout) {
  auto c = small_config("G4");
  const auto text = csv_of(c, 1);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "problem,norm,p,n,paths,mean,std_error,seed");
  std::size_t data = 0, roots = 0;
  while (std::getline(in, line) && line[0] != '#') {
    ++data;
    if (line.find(",Lp_sup_root,") != std::string::npos) ++roots;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7) << line;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "17");
  }
  EXPECT_EQ(data, 3u * 4u + 4u);
  EXPECT_EQ(roots, 4u);
  EXPECT_EQ(line, "# rate_fit");
  std::getline(in, line);
  EXPECT_EQ(line,
            "# problem,norm,p,mode,slope,intercept,r_squared,theoretical_exponent,subpolynomial_correction,gate");
  std::size_t fits = 0;
  while (std::getline(in, line)) {
    ASSERT_EQ(line.substr(0, 5), "# G4,");
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9) << line;
    ++fits;
  }
  EXPECT_EQ(fits, 3u);
}

TEST(Harness, TruncationVariantsAndMartingale) {
  auto c = small_config("G1");
  c.norms = {"L1_terminal"};
  c.truncation_m = {2, 4};
  c.martingale_check = true;
  const auto r = run_experiment(c, 1);
  ASSERT_EQ(r.variants.size(), 2u);
  EXPECT_EQ(r.variants[0].label, "G1[m=2]");
  EXPECT_EQ(r.variants[1].label, "G1[m=4]");
  for (const auto& v : r.variants) {
    ASSERT_TRUE(v.martingale.has_value());
    EXPECT_EQ(v.martingale_steps, 8u * 32u);
    EXPECT_LT(std::abs(v.martingale->z_score), 5.0);
    ASSERT_EQ(v.rates.size(), 1u);
    EXPECT_EQ(v.rates[0].theory.mode, RateMode::polynomial);
  }
  std::ostringstream os;
  write_report_csv(os, r);
  EXPECT_NE(os.str().find("# martingale\n"), std::string::npos);
}

TEST(Harness, MartingaleNeedsIntegrableDrift) {
  auto c = small_config("G1");
  c.martingale_check = true;
  try {
    run_experiment(c);
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "truncation_m");
  }
}

TEST(Harness, GateComparesAgainstTheory) {
  auto c = small_config("G3");
  c.norms = {"L1_terminal"};
  const auto r = run_experiment(c, 1);
  ASSERT_EQ(r.variants[0].rates.size(), 1u);
  const auto& rc = r.variants[0].rates[0];
  ASSERT_TRUE(rc.fit.has_value());
  EXPECT_TRUE(rc.gated);
  EXPECT_EQ(rc.passed, rc.fit->slope >= rc.theory.exponent - kGateTolerance);
  c.gates = false;
  EXPECT_FALSE(run_experiment(c, 1).variants[0].rates[0].gated);
}

TEST(Harness, RunAndReportWritesOutput) {
  auto c = small_config("G5");
  const auto path = std::filesystem::temp_directory_path() / "irrsde_harness_test.csv";
  c.output = path.string();
  std::ostringstream summary;
  EXPECT_TRUE(run_and_report(c, summary, 1));
  EXPECT_TRUE(std::filesystem::exists(path));
  EXPECT_NE(summary.str().find("exact scheme"), std::string::npos);
  EXPECT_NE(summary.str().find("gates: all passed"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Selftest, AllChecksPassDeterministically) {
  const auto a = selftest();
  for (const auto& i : a.items) EXPECT_TRUE(i.passed) << i.name << "  " << i.detail;
  std::ostringstream s1, s2;
  write_selftest(s1, a);
  write_selftest(s2, selftest());
  EXPECT_EQ(s1.str(), s2.str());
}

TEST(Selftest, DetectsInjectedNormalizationFault) {
  const auto r = selftest(SelftestHooks{1.0 + 1e-6});
  ASSERT_EQ(r.failures(), 1u);
  for (const auto& i : r.items)
    if (!i.passed) EXPECT_EQ(i.name, "yw.psi_normalization");
}
