#include <gtest/gtest.h>

#include "common.hpp"

using namespace tt;

namespace {

const char* kTheory = R"(
theory rules
sorts { s }
ops { a, b, c : -> s; f : s -> s [mono]; g : s -> s; }
labels { l, m }
axioms {
  @ab a =[l]=> b;
  @bc b =[m]=> c;
  @eq a = c;
  @u a =[l | m]=> b;
  @or a = b \/ a = c;
  @all forall {x:s} . x =[l]=> b -> f(x) = b;
  @nn not not b = b;
}
)";

const Theory& rules() {
  static Theory th = parse_theory(kTheory);
  return th;
}

Verdict run(const std::string& script, CheckMode mode = CheckMode::schematic_mode(), const Theory& th = rules()) {
  TapScript sc = parse_tap(script, th);
  return check_tap(sc, th, mode).overall;
}

void expect_valid(const std::string& script) {
  Verdict v = run(script);
  EXPECT_EQ(v.status, Status::Valid) << verdict_string(v) << "\n" << script;
}

void expect_invalid(const std::string& script, const std::string& why = "") {
  Verdict v = run(script);
  EXPECT_EQ(v.status, Status::Invalid) << script;
  if (!why.empty()) EXPECT_NE(v.reason.find(why), std::string::npos) << v.reason;
}

}  // namespace

TEST(Structural, MonotonicityNeedsTheSentenceInTheAntecedent) {
  expect_valid("m = rule Monotonicity conclusion @ab\n");
  expect_invalid("m = rule Monotonicity conclusion \"b =[l]=> a\"\n", "not in the antecedent");
}

TEST(Structural, UnionAndTransitivityCut) {
  expect_valid(
      "x = rule Monotonicity conclusion @ab\n"
      "y = rule Monotonicity conclusion @eq\n"
      "u = rule Union [x, y] conclusion { @ab, @eq }\n"
      "r = rule R bare hyp @ab hyp @eq conclusion \"b = b\"\n"
      "e = rule Monotonicity bare hyp @ab hyp @eq conclusion @eq\n"
      "w = rule Monotonicity bare hyp @ab hyp @eq conclusion @ab\n"
      "z = rule P [e, r, w] bare hyp @ab hyp @eq conclusion \"c =[l]=> b\"\n"
      "t = rule Transitivity [u, z] conclusion \"c =[l]=> b\"\n");
}

TEST(Equational, RSTF) {
  expect_valid("r = rule R conclusion \"f(a) = f(a)\"\n");
  expect_valid("e = rule Monotonicity conclusion @eq\ns = rule S [e] conclusion \"c = a\"\n");
  expect_valid(
      "e = rule Monotonicity conclusion @eq\ns = rule S [e] conclusion \"c = a\"\n"
      "t = rule T [e, s] conclusion \"a = a\"\n");
  expect_valid("e = rule Monotonicity conclusion @eq\nx = rule F [e] conclusion \"g(a) = g(c)\"\n");
  expect_invalid("e = rule Monotonicity conclusion @eq\ns = rule S [e] conclusion \"a = c\"\n");
  expect_invalid("e = rule Monotonicity conclusion @eq\nx = rule F [e] conclusion \"g(a) = f(c)\"\n", "same symbol");
}

TEST(Transitions, PandM) {
  expect_valid(
      "e = rule Monotonicity conclusion @eq\nr = rule R conclusion \"b = b\"\n"
      "t = rule Monotonicity conclusion @ab\np = rule P [e, r, t] conclusion \"c =[l]=> b\"\n");
  expect_valid("t = rule Monotonicity conclusion @ab\nx = rule M [t] conclusion \"f(a) =[l]=> f(b)\"\n");
  expect_invalid("t = rule Monotonicity conclusion @ab\nx = rule M [t] conclusion \"g(a) =[l]=> g(b)\"\n",
                 "not monotonic");
}

TEST(Actions, CompositionIntroduction) {
  expect_valid(
      "x = rule Monotonicity conclusion @ab\ny = rule Monotonicity conclusion @bc\n"
      "z = rule Comp_I [x, y] conclusion \"a =[l ; m]=> c\"\n");
  expect_invalid(
      "x = rule Monotonicity conclusion @ab\ny = rule Monotonicity conclusion @bc\n"
      "z = rule Comp_I [y, x] conclusion \"a =[l ; m]=> c\"\n");
}

TEST(Actions, UnionIntroductionAndElimination) {
  expect_valid("x = rule Monotonicity conclusion @ab\ny = rule Union_I [x] conclusion \"a =[l | m]=> b\"\n");
  expect_valid("x = rule Monotonicity conclusion @ab\ny = rule Union_I [x] pick 1 conclusion \"a =[l | m]=> b\"\n");
  expect_invalid("x = rule Monotonicity conclusion @ab\ny = rule Union_I [x] pick 2 conclusion \"a =[l | m]=> b\"\n",
                 "second branch");
  expect_valid(
      "u = rule Monotonicity conclusion @u\n"
      "h1 = rule Monotonicity hyp \"a =[l]=> b\" conclusion \"a =[l]=> b\"\n"
      "i1 = rule Union_I [h1] hyp \"a =[l]=> b\" conclusion \"a =[m | l]=> b\"\n"
      "h2 = rule Monotonicity hyp \"a =[m]=> b\" conclusion \"a =[m]=> b\"\n"
      "i2 = rule Union_I [h2] hyp \"a =[m]=> b\" conclusion \"a =[m | l]=> b\"\n"
      "e = rule Union_E [u, i1, i2] conclusion \"a =[m | l]=> b\"\n");
}

TEST(Actions, StarIntroductionIndex) {
  expect_valid("r = rule R conclusion \"a = a\"\ns = rule Star_I [r] index 0 conclusion \"a =[l*]=> a\"\n");
  expect_valid(
      "x = rule Monotonicity conclusion @ab\ny = rule Monotonicity conclusion @bc\n"
      "z = rule Comp_I [x, y] conclusion \"a =[l ; m]=> c\"\n"
      "s = rule Star_I [z] index 1 conclusion \"a =[(l ; m)*]=> c\"\n");
  expect_invalid("r = rule R conclusion \"a = a\"\ns = rule Star_I [r] index 1 conclusion \"a =[l*]=> a\"\n");
}

TEST(Actions, StarEliminationBoundedAndSchematic) {
  Theory th = load_theory("star_bounded.ta");
  std::string script = slurp(data_path("star_bounded.tap"));
  Verdict b = run(script, CheckMode::bounded(5), th);
  EXPECT_EQ(b.status, Status::BoundedValid);
  EXPECT_EQ(b.bound, 5);
  EXPECT_EQ(verdict_string(b), "BOUNDED_VALID(5)");
  EXPECT_EQ(run(script, CheckMode::schematic_mode(), th).status, Status::Valid);
}

TEST(Actions, StarEliminationFamilyMustMatch) {
  Theory th = load_theory("star_bounded.ta");
  std::string script = slurp(data_path("star_bounded.tap"));
  // the family must assume a -l^kappa-> b, not a fixed power
  std::string broken = script;
  std::size_t at = 0;
  while ((at = broken.find("l^kappa", at)) != std::string::npos) broken.replace(at, 7, "l^2");
  EXPECT_THROW(
      {
        Verdict v = run(broken, CheckMode::schematic_mode(), th);
        if (!v.ok()) throw Error(v.reason);
      },
      std::exception);
}

TEST(Boolean, NegationRules) {
  expect_valid(
      "n = rule Monotonicity conclusion @nn\n"
      "d = rule Neg_D [n] conclusion \"b = b\"\n");
  expect_valid(
      "b = rule Monotonicity hyp \"bot\" conclusion \"bot\"\n"
      "t = rule Neg_I [b] conclusion \"top\"\n");
  expect_valid(
      "n = rule Monotonicity hyp \"not a = b\" conclusion \"not a = b\"\n"
      "e = rule Neg_E [n] hyp \"not a = b\" hyp \"a = b\" conclusion \"bot\"\n"
      "f = rule False [e] hyp \"not a = b\" hyp \"a = b\" conclusion \"c =[l]=> c\"\n");
  expect_invalid(
      "n = rule Monotonicity hyp \"not a = b\" conclusion \"not a = b\"\n"
      "e = rule Neg_E [n] hyp \"not a = b\" conclusion \"bot\"\n",
      "plus the negated sentence");
}

TEST(Boolean, DisjunctionRules) {
  expect_valid(
      "o = rule Monotonicity conclusion @or\n"
      "h1 = rule Monotonicity hyp \"a = b\" conclusion \"a = b\"\n"
      "d1 = rule Disj_I [h1] hyp \"a = b\" conclusion \"a = c \\/ a = b\"\n"
      "h2 = rule Monotonicity hyp \"a = c\" conclusion \"a = c\"\n"
      "d2 = rule Disj_I [h2] hyp \"a = c\" conclusion \"a = c \\/ a = b\"\n"
      "e = rule Disj_E [o, d1, d2] conclusion \"a = c \\/ a = b\"\n");
  expect_invalid("h = rule Monotonicity conclusion @eq\nd = rule Disj_I [h] conclusion \"a = b \\/ b = c\"\n",
                 "not a disjunct");
}

TEST(Quantifiers, SubstitutionAndGeneralizedModusPonens) {
  expect_valid(
      "x = rule Monotonicity conclusion @ab\n"
      "e = rule Subst [x] subst { y := \"b\" } conclusion \"exists {y:s} . a =[l]=> y\"\n");
  expect_invalid(
      "x = rule Monotonicity conclusion @ab\n"
      "e = rule Subst [x] subst { y := \"c\" } conclusion \"exists {y:s} . a =[l]=> y\"\n");
  expect_valid(
      "u = rule Monotonicity conclusion @all\nx = rule Monotonicity conclusion @ab\n"
      "g = rule GMP [u, x] subst { x := \"a\" } conclusion \"f(a) = b\"\n");
  expect_invalid(
      "u = rule Monotonicity conclusion @all\n"
      "g = rule GMP [u] subst { x := \"a\" } conclusion \"f(a) = b\"\n",
      "premises");
}

TEST(Quantifiers, ExistentialInTheAntecedent) {
  Theory th = parse_theory(
      "theory q\nsorts { s }\nops { a : -> s; }\nlabels { l, m }\n"
      "axioms { @ex exists {x:s} . a =[l]=> x; }\n");
  std::string script =
      "h = rule Monotonicity over {x:s} bare hyp \"a =[l]=> x\" conclusion \"a =[l]=> x\"\n"
      "i = rule Union_I [h] over {x:s} bare hyp \"a =[l]=> x\" conclusion \"a =[l | m]=> x\"\n"
      "w = rule Subst [i] over {x:s} bare hyp \"a =[l]=> x\" subst { y := \"x\" } "
      "conclusion \"exists {y:s} . a =[l | m]=> y\"\n"
      "q = rule Quant_I [w] conclusion \"exists {y:s} . a =[l | m]=> y\"\n";
  Verdict v = run(script, CheckMode::schematic_mode(), th);
  EXPECT_EQ(v.status, Status::Valid) << verdict_string(v);
}

TEST(Oracle, BasicOracleStep) {
  expect_valid("o = rule BasicOracle conclusion \"f(c) =[l]=> f(b)\"\n");
  expect_invalid("o = rule BasicOracle conclusion \"b =[l]=> a\"\n");
}

TEST(Translation, AlongAnInclusion) {
  const Theory& th = rules();
  Signature big = th.sig;
  big.add_func({"d", {}, "s"});
  SentSet ant = th.axiom_set();
  Sentence ab = *th.axiom("ab");
  auto small = make_node("m", sequent(th.sig, ant, ab), Rule::Monotonicity);
  auto up = make_node("t", sequent(big, translate_set(inclusion_morphism(th.sig, big), ant), ab), Rule::Translation,
                      {small});
  up->morphism = inclusion_morphism(th.sig, big);
  EXPECT_EQ(check_proof(up).status, Status::Valid);
  up->morphism = identity_morphism(th.sig);
  EXPECT_EQ(check_proof(up).status, Status::Invalid);
}

TEST(Script, GoalMustMatchTheRoot) {
  Verdict v = run("goal \"a = b\"\nr = rule R conclusion \"a = a\"\n");
  EXPECT_EQ(v.status, Status::Invalid);
  EXPECT_NE(v.reason.find("stated goal"), std::string::npos);
}

TEST(Script, UnknownRuleIsAParseError) {
  EXPECT_THROW(parse_tap("x = rule Monotonicty conclusion @ab\n", rules()), ParseError);
  EXPECT_THROW(parse_tap("x = rule Monotonicity conclusion @nope\n", rules()), ParseError);
}

TEST(Script, PrintThenParseReplays) {
  CcsProgram prog = parse_ccs(slurp(data_path("coffee.ccs")));
  Theory th = compile_to_theory(prog);
  TapScript sc = parse_tap(slurp(data_path("institute.tap")), th);
  std::string printed = print_tap(sc.root, th);
  TapScript again = parse_tap(printed, th);
  EXPECT_EQ(check_proof(again.root).status, Status::Valid);
  EXPECT_EQ(print_tap(again.root, th), printed);
}

TEST(Verdicts, CombineKeepsTheWeakest) {
  Verdict ok;
  Verdict b3;
  b3.status = Status::BoundedValid;
  b3.bound = 3;
  Verdict b5 = b3;
  b5.bound = 5;
  Verdict bad = Verdict::invalid("x");
  EXPECT_EQ(combine(ok, b5).bound, 5);
  EXPECT_EQ(combine(b3, b5).bound, 3);
  EXPECT_EQ(combine(b3, bad).status, Status::Invalid);
  EXPECT_EQ(verdict_string(ok), "VALID");
}

TEST(Property, FixtureProofsSurviveNoLeafMutation) {
  TafFile t = load_taf(data_path("forcing/cross.taf"));
  int mutants = 0;
  for (const auto& c : t.checks) {
    if (!c.script) continue;
    Theory th = condition_theory(t.fp, t.fp.index(c.condition));
    TapScript sc = parse_tap(*c.script, th);
    ASSERT_EQ(check_proof(sc.root).status, Status::Valid) << c.script_path;
    for (const auto& m : proof_mutants(sc.root, th.sig)) {
      Verdict v = check_proof(m.proof);
      if (v.ok()) {
        // a surviving mutant must still be a proof of something true
        auto o = semantic_entails_bounded(th.sig, m.proof->seq.ant, *m.proof->seq.concl.begin(), uniform_bound(th.sig, 2));
        EXPECT_TRUE(o.entailed) << c.script_path << ": " << m.what;
      }
      ++mutants;
    }
  }
  EXPECT_GT(mutants, 10);
}
