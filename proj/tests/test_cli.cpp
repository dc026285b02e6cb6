#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "cli_io.hpp"

using namespace onecomp;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "onecomp_cli_test";

struct Run {
  int status;
  std::string err;
};

Run run_cli(const std::string& args) {
  const fs::path err = kWork / "stderr.txt";
  const std::string cmd = std::string(ONECOMP_CLI) + " " + args + " 2> " + err.string() + " > /dev/null";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, cli::read_file(err)};
}

cli::Json load(const fs::path& p) { return cli::parse_json(cli::read_file(p), p.string()); }

std::string without_timestamp(std::string s) {
  const auto at = s.find("\"created\"");
  if (at == std::string::npos) return s;
  return s.erase(at, s.find('\n', at) - at);
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
    ASSERT_EQ(run_cli("--seed-examples --out " + (kWork / "in").string()).status, 0);
  }
  static std::string in(const std::string& name) { return (kWork / "in" / name).string(); }
  static std::string out(const std::string& name) { return (kWork / name).string(); }
};

}  // namespace

TEST_F(Cli, ClassifySingleAtom) {
  ASSERT_EQ(run_cli("classify --inner " + in("atom1.json") + " --depth 14 --out " + out("c1")).status, 0);
  const auto j = load(kWork / "c1" / "report.json");
  EXPECT_EQ(j["report"]["verdict"], "OneComponentEvidence");
  EXPECT_EQ(j["report"]["depth_trace"].size(), 13u);
  EXPECT_TRUE(j["report"]["tests"].contains("criterion_scan"));
  EXPECT_EQ(j["report"]["witnesses"][0]["z"].size(), 2u);
}

TEST_F(Cli, LevelSetOfMobius) {
  ASSERT_EQ(run_cli("levelset --inner " + in("mobius.json") + " --epsilon 0.5 --depth 10 --out " + out("l1")).status, 0);
  EXPECT_EQ(load(kWork / "l1" / "levelset.json")["level_set"]["component_count"], 1);
  const auto csv = cli::read_file(kWork / "l1" / "levelset.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "depth,index,label");
  EXPECT_EQ(cli::read_file(kWork / "l1" / "levelset.pgm").substr(0, 3), "P5\n");
}

TEST_F(Cli, ConstructUnitAtom) {
  ASSERT_EQ(run_cli("construct --inner " + in("atom1.json") + " --horizon 2000 --depth 14 --out " + out("k1")).status, 0);
  const auto j = load(kWork / "k1" / "companion.json")["companion"];
  EXPECT_EQ(j["verification"]["verified"], true);
  EXPECT_EQ(j["zero_count"], 2000);
  // the inline block and the separate file agree, and reloading reproduces the file
  const auto csv = cli::read_file(kWork / "k1" / "zeros.csv");
  EXPECT_EQ(j["zeros_csv"].get<std::string>(), csv);
  const auto zs = cli::zeros_from_csv(csv, "zeros.csv");
  ASSERT_EQ(zs.size(), 2000u);
  EXPECT_EQ(cli::zeros_to_csv(zs), csv);
}

TEST_F(Cli, OutputsAreDeterministic) {
  const std::string args = "classify --inner " + in("example1.json") + " --depth 10";
  ASSERT_EQ(run_cli(args + " --threads 1 --out " + out("d1")).status, 0);
  ASSERT_EQ(run_cli(args + " --threads 4 --out " + out("d2")).status, 0);
  const auto a = cli::read_file(kWork / "d1" / "report.json");
  const auto b = cli::read_file(kWork / "d2" / "report.json");
  EXPECT_NE(a.find("\"created\""), std::string::npos);
  EXPECT_EQ(without_timestamp(a), without_timestamp(b));
  const std::string lv = "levelset --inner " + in("atoms2.json") + " --epsilon 0.3 --depth 9";
  ASSERT_EQ(run_cli(lv + " --threads 1 --out " + out("d3")).status, 0);
  ASSERT_EQ(run_cli(lv + " --threads 3 --out " + out("d4")).status, 0);
  for (const char* f : {"levelset.csv", "levelset.pgm"}) {
    EXPECT_EQ(cli::read_file(kWork / "d3" / f), cli::read_file(kWork / "d4" / f)) << f;
  }
}

TEST_F(Cli, MeasureAndEval) {
  ASSERT_EQ(run_cli("measure --measure " + in("cantor_measure.json") + " --depth 6 --out " + out("m1")).status, 0);
  const auto j = load(kWork / "m1" / "measure.json")["measure"];
  EXPECT_EQ(j["total_mass"], 1.0);
  EXPECT_EQ(j["support_lebesgue_measure"], 0.0);
  ASSERT_EQ(run_cli("eval --inner " + in("mobius.json") + " --depth 4 --out " + out("e1")).status, 0);
  const auto csv = cli::read_file(kWork / "e1" / "eval.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "re,im,value_re,value_im,modulus_lo,modulus_hi");
}

TEST_F(Cli, ExitCodesAndDiagnostics) {
  cli::write_file(kWork / "bad.json", "{\n  \"measure\": {\"kind\": \"atoms\",, }\n}\n");
  auto r = run_cli("classify --inner " + out("bad.json"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("line 2, column"), std::string::npos) << r.err;

  cli::write_file(kWork / "bad.csv", "re,im\n0.1,0.2\n0.3,abc\n");
  r = run_cli("eval --inner " + in("mobius.json") + " --points " + out("bad.csv") + " --out " + out("x"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("line 3, column 5"), std::string::npos) << r.err;

  cli::write_file(kWork / "unknown.json", "{\"zeros\": {\"kind\": \"radial\", \"exponent\": \"linear\", \"x\": 1}}");
  r = run_cli("classify --inner " + out("unknown.json"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("unknown field"), std::string::npos) << r.err;

  EXPECT_EQ(run_cli("levelset --inner " + in("atom1.json") + " --epsilon 1.5").status, 2);
  EXPECT_EQ(run_cli("construct --inner " + in("atom1.json") + " --horizon 1").status, 2);
  EXPECT_EQ(run_cli("").status, 2);

  r = run_cli("eval --inner " + in("cantor.json") + " --depth 4 --tol 1e-300 --out " + out("x"));
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.err.find("precision exhausted"), std::string::npos) << r.err;
}

TEST(CliIo, ZerosCsvRoundTrip) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DiscPoint> zs;
  for (int i = 0; i < 5000; ++i) {
    zs.push_back(DiscPoint::from_depth(std::pow(10.0, -12.0 * u(rng)), kTwoPi * u(rng)));
  }
  const auto csv = cli::zeros_to_csv(zs);
  const auto back = cli::zeros_from_csv(csv, "mem");
  ASSERT_EQ(back.size(), zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) {
    EXPECT_NEAR(back[i].re(), zs[i].re(), 1e-15);
    EXPECT_NEAR(back[i].im(), zs[i].im(), 1e-15);
  }
  const auto again = cli::zeros_from_csv(cli::zeros_to_csv(back), "mem");
  EXPECT_EQ(cli::zeros_to_csv(again), cli::zeros_to_csv(back));
}

TEST(CliIo, MeasureSchema) {
  const auto atoms = cli::measure_from_json(cli::Json::parse(
      R"({"kind":"atoms","atoms":[{"theta":"0.0","mass":"1.0"},{"theta":"3","mass":"0.5"}],"tail_mass":"0"})"));
  EXPECT_DOUBLE_EQ(atoms.total_mass(), 1.5);
  const auto ratio = cli::measure_from_json(cli::Json::parse(R"({"kind":"cantor","delta":{"ratio":"0.5"}})"));
  EXPECT_EQ(ratio.support().lebesgue_measure(), 0.0);
  const auto listed = cli::measure_from_json(
      cli::Json::parse(R"({"kind":"cantor","delta":["6.283185307179586","4.1887902047863905"]})"));
  EXPECT_NEAR(listed.mass_of_arc(BoundaryArc::between(0.0, kTwoPi / 3.0)), 0.5, 1e-9);
  const auto cdf = cli::measure_from_json(cli::Json::parse(R"({"kind":"cdf","samples":[[0,0],[1,2]]})"));
  EXPECT_DOUBLE_EQ(cdf.total_mass(), 2.0);
  EXPECT_THROW(cli::measure_from_json(cli::Json::parse(R"({"kind":"cdf","samples":[[0,1],[1,0]]})")),
               PreconditionError);
  EXPECT_THROW(cli::measure_from_json(cli::Json::parse(R"({"kind":"atoms","atoms":[],"extra":1})")),
               cli::InputError);
  EXPECT_THROW(cli::measure_from_json(cli::Json::parse(R"({"kind":"atoms","atoms":[{"theta":"x","mass":"1"}]})")),
               cli::InputError);
  EXPECT_THROW(cli::measure_from_json(cli::Json::parse(R"({"kind":"smooth"})")), cli::InputError);
}

TEST(CliIo, RealsUseSeventeenDigits) {
  const cli::Json j{{"x", 0.1}, {"y", std::vector<double>{1.0 / 3.0}}, {"z", std::numeric_limits<double>::infinity()}};
  const auto s = cli::dump(j);
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(s.find("0.33333333333333331"), std::string::npos);
  EXPECT_NE(s.find("null"), std::string::npos);
  EXPECT_EQ(cli::Json::parse(s)["x"].get<double>(), 0.1);
}
