#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kExamples = EMEASURE_EXAMPLES_DIR;

std::string ex(const std::string& name) { return kExamples + "/" + name; }

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = emeasure::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string temp_file(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "emeasure_cli_tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p.string();
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(CliSpace, OverlapLeastTable) {
  auto r = cli({"space", "--space", ex("overlap_space.yaml")});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "intersection-closed: yes"));
  EXPECT_TRUE(contains(r.out, "P2  {P1,P2}"));
}

TEST(CliSpace, EmptyGeneratorsGiveEmptySetOnly) {
  auto r = cli({"space", "--space", temp_file("empty.yaml", "points: [a, b]\ngenerators: []\n")});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "members: 1\n"));
}

TEST(CliSpace, ToyInstanceHas256Members) {
  auto r = cli({"space", "--space", ex("toy_space.yaml"), "--format", "records"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "\"members\":256"));
}

TEST(CliSpace, SchemaErrorsAreInputErrors) {
  auto r = cli({"space", "--space", temp_file("bad.yaml", "points: [a, b]\ngenerators: [[a, z]]\n")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "generators[0]"));
  EXPECT_TRUE(contains(r.err, "unknown point 'z'"));
  auto y = cli({"space", "--space", temp_file("syntax.yaml", "points: [a, b\n")});
  EXPECT_EQ(y.code, 2);
  EXPECT_TRUE(contains(y.err, "line"));
}

TEST(CliSpace, ModelSizeCap) {
  std::string labels;
  for (int i = 0; i < 25; ++i) labels += (i ? ", p" : "p") + std::to_string(i);
  auto r = cli({"space", "--space", temp_file("big.yaml", "points: [" + labels + "]\ngenerators: []\n")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "cap is 24"));
}

TEST(CliClosure, TwoPointExampleChangesOneEntry) {
  auto r = cli({"closure", "--space", ex("two_point_space.yaml"), "--evidence", ex("two_point_capacity.yaml")});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "1 entry changed"));
  EXPECT_TRUE(contains(r.out, "method: fast"));
}

TEST(CliClosure, MeasureIsUnchanged) {
  auto f = temp_file("measure.yaml", "evidence: {'{P1}': 4, '{P2}': 2, '{P1,P2}': 2}\n");
  auto r = cli({"closure", "--space", ex("two_point_space.yaml"), "--evidence", f});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "no change"));
}

TEST(CliClosure, BruteForceOnCrossingClassAndCap) {
  auto f = temp_file("cross.yaml", "evidence: {'{P1,P2}': 3, '{P2,P3}': 5, '{P1,P2,P3}': 1}\n");
  auto r = cli({"closure", "--space", ex("crossing_space.yaml"), "--evidence", f, "--format", "records"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "\"method\":\"brute-force\""));
  EXPECT_TRUE(contains(r.out, "{\"type\":\"entry\",\"hypothesis\":\"{P1,P2,P3}\",\"before\":\"1\",\"after\":\"3\""));
  auto capped = cli({"closure", "--space", ex("crossing_space.yaml"), "--evidence", f, "--cap-members", "2"});
  EXPECT_EQ(capped.code, 2);
  EXPECT_TRUE(contains(capped.err, "--cap-members"));
}

TEST(CliClosure, MissingEntryIsNamed) {
  auto f = temp_file("partial.yaml", "evidence: {'{P1}': 4}\n");
  auto r = cli({"closure", "--space", ex("two_point_space.yaml"), "--evidence", f});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "no value for {P2}"));
}

TEST(CliCheck, LikelihoodKernelPasses) {
  for (const std::string c : {"validity", "posthoc", "fwe", "fer"}) {
    auto r = cli({"check", "--space", ex("coins_space.yaml"), "--model", ex("coins_model.yaml"), "--kernel",
                  ex("coins_likelihood.yaml"), "--check", c});
    EXPECT_EQ(r.code, 0) << c << "\n" << r.out << r.err;
  }
}

TEST(CliCheck, ConstantTwoFailsWithWitness) {
  auto r = cli({"check", "--space", ex("coins_space.yaml"), "--model", ex("coins_model.yaml"), "--kernel",
                ex("coins_constant2.yaml"), "--format", "records"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "\"witness\":\"{fair} under fair: expectation = 2\""));
}

TEST(CliCheck, AnytimeProcess) {
  auto r = cli({"check", "--space", ex("coins_space.yaml"), "--model", ex("coins_process_model.yaml"), "--kernel",
                ex("coins_process.yaml"), "--check", "anytime"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "stopping times checked: 5"));
}

TEST(CliCheck, PredictiveOverOutcomes) {
  auto space = temp_file("pred_space.yaml", "points: [x1, x2]\ngenerators: [[x1], [x2]]\n");
  auto model = temp_file("pred_model.yaml", "pmf:\n  q1: {x1: 1/2, x2: 1/2}\n  q2: {x1: 1/4, x2: 3/4}\n");
  auto kernel = temp_file("pred_kernel.yaml",
                          "kernel:\n  '{x1}': {x1: 1, x2: 2}\n  '{x2}': {x1: 3, x2: 1}\n  '{x1,x2}': {x1: 1, x2: 1}\n");
  auto r = cli({"check", "--space", space, "--model", model, "--kernel", kernel, "--check", "predictive"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(CliMtp, GoldenTableMatches) {
  auto r = cli({"mtp", "--golden", "table1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "evidence cells: 44/44 match"));
  EXPECT_TRUE(contains(r.out, "FSP cells: 8/8 match"));
}

TEST(CliMtp, PerturbedCellGivesTargetedDiff) {
  auto r = cli({"mtp", "--golden", "table1", "--cells", "5,61,29,11,70,65,40,100"});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "mismatch H_1 / e: expected 60, got 61"));
  EXPECT_FALSE(contains(r.out, "mismatch H_2"));
}

TEST(CliMtp, OtherAlphaIsLabelled) {
  auto r = cli({"mtp", "--golden", "table1", "--alpha", "0.01"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "not compared with the golden table"));
}

TEST(CliMtp, ProceduresOnToyInstance) {
  EXPECT_TRUE(contains(cli({"mtp", "--procedure", "ebh"}).out, "rejected: G_1\n"));
  EXPECT_TRUE(contains(cli({"mtp", "--procedure", "closed-ebh"}).out, "rejected: G_1 G_2 G_3\n"));
  auto fer = cli({"mtp", "--procedure", "fer", "--format", "records"});
  EXPECT_EQ(fer.code, 0);
  EXPECT_TRUE(contains(fer.out, "{\"type\":\"row\",\"name\":\"G_1\",\"e\":\"60\",\"post\":\"195/2\"}"));
  EXPECT_TRUE(contains(cli({"mtp", "--procedure", "ebh", "--family", "G_2,G_3"}).out, "rejected: none"));
}

TEST(CliMtp, RecordsAreByteStable) {
  auto a = cli({"mtp", "--golden", "table1", "--format", "records"});
  auto b = cli({"mtp", "--golden", "table1", "--format", "records"});
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(contains(a.out, "\"post\":\"195/2\""));
}

TEST(CliDecide, MleRankingFollowsLikelihood) {
  auto r = cli({"decide", "--loss", ex("mle_loss.yaml"), "--model", ex("mle_model.yaml"), "--kernel",
                ex("mle_kernel.yaml"), "--format", "records"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "\"outcome\":\"x1\",\"kind\":\"optimality\",\"order\":[\"P1\",\"P2\",\"P3\"]"));
  EXPECT_TRUE(contains(r.out, "\"outcome\":\"x2\",\"kind\":\"optimality\",\"order\":[\"P2\",\"P1\",\"P3\"]"));
  EXPECT_TRUE(contains(r.out, "\"outcome\":\"x3\",\"kind\":\"optimality\",\"order\":[\"P3\",\"P1\",\"P2\"]"));
}

TEST(CliDecide, BoundsPass) {
  for (const std::string b : {"econsequence", "grunwald", "probability"}) {
    auto r = cli({"decide", "--loss", ex("mle_loss.yaml"), "--model", ex("mle_model.yaml"), "--kernel",
                  ex("mle_kernel.yaml"), "--bound", b, "--alpha", "1/10"});
    EXPECT_EQ(r.code, 0) << b << r.err;
  }
  auto u = cli({"decide", "--loss", ex("umbrella_loss.yaml"), "--model", ex("umbrella_model.yaml"), "--kernel",
                ex("umbrella_kernel.yaml")});
  EXPECT_EQ(u.code, 0) << u.err;
}

TEST(CliDecide, OrderMeasurabilityViolationIsNamed) {
  auto r = cli({"decide", "--loss", ex("umbrella_loss.yaml"), "--model", ex("umbrella_model.yaml"), "--kernel",
                ex("umbrella_kernel.yaml"), "--space", ex("umbrella_coarse_space.yaml")});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "consequence row of rain, {rain}"));
}

TEST(CliArgs, UsageErrors) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"space"}).code, 2);
  EXPECT_EQ(cli({"mtp", "--alpha", "2"}).code, 2);
  EXPECT_EQ(cli({"mtp", "--procedure", "bh"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST(CliArgs, CapsEnvironment) {
  ::setenv("EMEASURE_CAPS", "points=2", 1);
  auto r = cli({"space", "--space", ex("overlap_space.yaml")});
  ::setenv("EMEASURE_CAPS", "bogus=1", 1);
  auto bad = cli({"space", "--space", ex("overlap_space.yaml")});
  ::unsetenv("EMEASURE_CAPS");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.err, "cap is 2"));
  EXPECT_EQ(bad.code, 2);
  EXPECT_TRUE(contains(bad.err, "unknown cap 'bogus'"));
}
