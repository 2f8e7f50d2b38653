#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "common.hpp"
#include "json.hpp"

using namespace tt;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// stdout and stderr together, run from the data directory
Outcome cli(const std::string& args) {
  std::string cmd = "cd '" + std::string(TA_DATA) + "' && '" + std::string(TA_CLI) + "' " + args + " 2>&1";
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

bool has(const Outcome& r, const std::string& s) { return r.out.find(s) != std::string::npos; }

std::string temp_file(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ta_cli_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST(CheckModel, FalseGoalExitsOne) {
  Outcome r = cli("check-model ex_sound.ta ex_sound.tam --goal \"true = false\"");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r, "FALSE  goal  true = false")) << r.out;
  EXPECT_EQ(cli("check-model ex_sound.ta ex_sound.tam").code, 0);
}

TEST(Oracle, CountermodelExitsOne) {
  Outcome r = cli("--max-size 2 oracle ex_sound.ta \"true = false\"");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(has(r, "countermodel found after 1514 models:")) << r.out;
  EXPECT_TRUE(has(r, "carrier Elt = {}")) << r.out;
}

TEST(Oracle, StructuredOutputIsJson) {
  Outcome r = cli("--format structured --max-size 2 oracle ex_sound.ta \"true = false\"");
  EXPECT_EQ(r.code, 1);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["command"], "oracle");
  EXPECT_NE(j["text"].get<std::string>().find("carrier Elt = {}"), std::string::npos);
}

TEST(Oracle, WrittenModelParsesBack) {
  std::string out = temp_file("counter.tam");
  Outcome r = cli("--max-size 2 -o '" + out + "' oracle ex_sound.ta \"true = false\"");
  ASSERT_EQ(r.code, 1) << r.out;
  Theory th = load_theory("ex_sound.ta");
  FiniteModel m = parse_model(slurp(out), th.sig);
  EXPECT_EQ(m.size("Elt"), 0);
  EXPECT_TRUE(satisfies_all(m, th.axiom_set()));
  EXPECT_FALSE(satisfies(m, parse_sentence("true = false", th.sig)));
}

TEST(Oracle, CeilingExitsThree) {
  Outcome r = cli("--ceiling 10 --max-size 3 oracle ex_sound.ta \"true = false\"");
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(has(r, "bounded:")) << r.out;
}

TEST(Prove, BoundedAndSchematic) {
  Outcome b = cli("--star-bound 5 prove star_bounded.ta star_bounded.tap");
  EXPECT_EQ(b.code, 3);
  EXPECT_TRUE(has(b, "BOUNDED_VALID(5)")) << b.out;
  Outcome s = cli("prove star_bounded.ta star_bounded.tap");
  EXPECT_EQ(s.code, 0);
  EXPECT_TRUE(has(s, "VALID")) << s.out;
}

TEST(Prove, RuleTypoIsAUsageError) {
  std::string tap = temp_file("typo.tap");
  {
    std::ofstream o(tap);
    o << "x = rule Monotonicty conclusion \"a = a\"\n";
  }
  Outcome r = cli("prove star_bounded.ta '" + tap + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(has(r, "error: 1:10: unknown rule Monotonicty")) << r.out;
}

TEST(Prove, InvalidScriptExitsOne) {
  std::string tap = temp_file("wrong.tap");
  {
    std::ofstream o(tap);
    o << "x = rule R conclusion \"a = b\"\n";
  }
  Outcome r = cli("prove star_bounded.ta '" + tap + "'");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_TRUE(has(r, "INVALID")) << r.out;
}

TEST(Usage, MissingArgumentsExitTwo) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("prove star_bounded.ta").code, 2);
  EXPECT_EQ(cli("--format fancy prove star_bounded.ta star_bounded.tap").code, 2);
  EXPECT_EQ(cli("prove no_such_file.ta star_bounded.tap").code, 2);
}

TEST(EntailBasic, NonAtomicTheoryIsRejected) {
  Outcome r = cli("entail-basic ex_sound.ta \"true = true\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(has(r, "not atomic")) << r.out;
}

TEST(Ccs, CompileEmitsSevenActAxiomsAndParsesBack) {
  Outcome r = cli("ccs compile coffee.ccs");
  ASSERT_EQ(r.code, 0);
  std::size_t acts = 0;
  for (std::size_t at = 0; (at = r.out.find("@Act[", at)) != std::string::npos; ++at) ++acts;
  EXPECT_EQ(acts, 7u);
  std::string out = temp_file("coffee.ta");
  ASSERT_EQ(cli("-o '" + out + "' ccs compile coffee.ccs").code, 0);
  Theory th = parse_theory(slurp(out));
  Theory direct = compile_to_theory(parse_ccs(slurp(data_path("coffee.ccs"))));
  EXPECT_TRUE(th.sig == direct.sig);
  EXPECT_EQ(th.axioms.size(), direct.axioms.size());
}

TEST(Ccs, SearchFindsTheTheoremCycle) {
  Outcome r = cli("ccs search coffee.ccs --from Institute --depth 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(has(r, "tau,tau,'theorem  ->  (Mathematician | CoffeeVM) \\ coin \\ coffee   (start)")) << r.out;
}

TEST(Ccs, ProveInstitute) {
  Outcome r = cli("ccs prove coffee.ccs institute.tap");
  EXPECT_EQ(r.code, 0) << r.out;
  Outcome j = cli("--format structured ccs prove coffee.ccs institute.tap");
  auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc["command"], "ccs prove");
  EXPECT_FALSE(doc["steps"].empty());
}

TEST(Ccs, CertifiedScriptReplays) {
  std::string out = temp_file("cycle.tap");
  Outcome r = cli("-o '" + out + "' ccs certify coffee.ccs --from Institute --word \"tau,tau,'theorem\"");
  ASSERT_EQ(r.code, 0) << r.out;
  Outcome again = cli("ccs prove coffee.ccs '" + out + "'");
  EXPECT_EQ(again.code, 0) << again.out;
}

TEST(Ccs, MutantsAreAllRejected) {
  Outcome r = cli("ccs mutants coffee.ccs institute.tap");
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Forcing, ValidateGenericModelCrosscheck) {
  Outcome v = cli("--term-depth 1 forcing validate forcing/chain3.taf");
  EXPECT_EQ(v.code, 0);
  EXPECT_TRUE(has(v, "0 problem(s)")) << v.out;
  Outcome g = cli("--term-depth 1 forcing generic forcing/chain3.taf");
  EXPECT_EQ(g.code, 0);
  EXPECT_TRUE(has(g, "n=8 (1,2)")) << g.out;
  Outcome m = cli("--term-depth 1 forcing model forcing/single.taf");
  EXPECT_EQ(m.code, 0);
  EXPECT_TRUE(has(m, "carrier s = { ")) << m.out;
  Outcome x = cli("--term-depth 1 forcing crosscheck forcing/cross.taf");
  EXPECT_EQ(x.code, 0);
  EXPECT_TRUE(has(x, "26 instance(s), 0 disagreement(s)")) << x.out;
}
