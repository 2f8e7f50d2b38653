#include <gtest/gtest.h>

#include "common.hpp"

using namespace tt;

namespace {

Theory small() {
  return parse_theory(
      "theory small\n"
      "sorts { s, t }\n"
      "ops { a, b, c : -> s; f : s -> t [mono]; g : s s -> t; }\n"
      "labels { l }\n");
}

std::vector<Sentence> atoms(const Theory& th, std::initializer_list<const char*> src) {
  std::vector<Sentence> out;
  for (const char* s : src) out.push_back(parse_sentence(s, th.sig));
  return out;
}

bool entails(const Theory& th, std::initializer_list<const char*> E, const char* goal) {
  return decide_basic(th.sig, atoms(th, E), parse_sentence(goal, th.sig));
}

}  // namespace

TEST(DecideBasic, EquationalRules) {
  Theory th = small();
  EXPECT_TRUE(entails(th, {}, "a = a"));
  EXPECT_TRUE(entails(th, {"a = b"}, "b = a"));
  EXPECT_TRUE(entails(th, {"a = b", "b = c"}, "a = c"));
  EXPECT_TRUE(entails(th, {"a = b"}, "f(a) = f(b)"));
  EXPECT_TRUE(entails(th, {"a = b", "b = c"}, "g(a, c) = g(c, a)"));
  EXPECT_FALSE(entails(th, {"a = b"}, "a = c"));
  EXPECT_FALSE(entails(th, {"f(a) = f(b)"}, "a = b"));
}

TEST(DecideBasic, TransitionRules) {
  Theory th = small();
  EXPECT_TRUE(entails(th, {"a =[l]=> b"}, "a =[l]=> b"));
  EXPECT_TRUE(entails(th, {"a =[l]=> b", "a = c"}, "c =[l]=> b"));
  EXPECT_TRUE(entails(th, {"a =[l]=> b"}, "f(a) =[l]=> f(b)"));
  EXPECT_FALSE(entails(th, {"a =[l]=> b"}, "g(a, a) =[l]=> g(b, a)")) << "g is not monotonic";
  EXPECT_FALSE(entails(th, {"a =[l]=> b", "b =[l]=> c"}, "a =[l]=> c")) << "single steps do not chain";
  EXPECT_FALSE(entails(th, {"a =[l]=> b"}, "b =[l]=> a"));
}

TEST(DecideBasic, TraceNamesUsedAtoms) {
  Theory th = small();
  GroundTheory E{th.sig, atoms(th, {"a = b", "c =[l]=> c", "b = c"})};
  BasicResult r = decide_basic(E, parse_sentence("a = c", th.sig));
  ASSERT_TRUE(r.holds);
  EXPECT_EQ(r.used, (std::set<std::size_t>{0, 2}));
  EXPECT_FALSE(r.trace.empty());
}

TEST(DecideBasic, RejectsNonAtomicGoals) {
  Theory th = small();
  EXPECT_THROW(decide_basic(th.sig, {}, parse_sentence("not a = b", th.sig)), Error);
}

TEST(TermModel, QuotientAndTransitions) {
  Theory th = small();
  GroundTheory E{th.sig, atoms(th, {"a = b", "a =[l]=> c"})};
  auto tm = build_term_model(E, 3);
  ASSERT_TRUE(std::holds_alternative<TermModel>(tm));
  const auto& M = std::get<TermModel>(tm).model;
  EXPECT_EQ(M.size("s"), 2);
  // f and g over two classes: f gives 2, g gives 4, and f(a) -l-> f(c) is the only t-step
  EXPECT_EQ(M.size("t"), 6);
  EXPECT_TRUE(satisfies(M, parse_sentence("b =[l]=> c", th.sig)));
  EXPECT_TRUE(satisfies(M, parse_sentence("f(b) =[l]=> f(c)", th.sig)));
  EXPECT_EQ(M.relation("l", "t").count(), 1u);
}

TEST(TermModel, InfiniteUniverseIsReported) {
  Theory th = parse_theory("theory n\nsorts { N }\nops { z : -> N; s : N -> N; }\n");
  auto tm = build_term_model(GroundTheory{th.sig, {}}, 3);
  ASSERT_TRUE(std::holds_alternative<Unbounded>(tm));
  EXPECT_EQ(std::get<Unbounded>(tm).sort, "N");
}

TEST(TermModel, InitialAmongRandomModels) {
  Rng rng(seed("basic.initial"));
  int homs = 0;
  for (int k = 0; k < 200; ++k) {
    Signature sig = random_layered_signature(rng);
    auto terms = all_ground_terms(sig);
    std::vector<Sentence> E;
    for (int i = 0, n = 1 + rng.below(4); i < n; ++i) E.push_back(random_atom(rng, sig, terms));
    auto tm = std::get<TermModel>(build_term_model(GroundTheory{sig, E}, 4));
    for (int j = 0; j < 20; ++j) {
      FiniteModel m = random_model(rng, sig, 2);
      bool models_E = true;
      for (const auto& a : E) models_E = models_E && satisfies(m, a);
      auto h = check_initiality(GroundTheory{sig, E}, tm, m);
      ASSERT_EQ(h.has_value(), models_E);
      homs += h.has_value();
    }
  }
  EXPECT_GT(homs, 0);
}

TEST(Property, DecisionMatchesSaturationAndTermModel) {
  Rng rng(seed("basic.triangle"));
  for (int k = 0; k < 150; ++k) {
    Signature sig = random_layered_signature(rng);
    auto terms = all_ground_terms(sig);
    std::vector<Sentence> E;
    for (int i = 0, n = 1 + rng.below(6); i < n; ++i) E.push_back(random_atom(rng, sig, terms));
    std::map<Term, int, TermLess> id;
    for (std::size_t i = 0; i < terms.size(); ++i) id[terms[i]] = static_cast<int>(i);
    Saturation S = saturate_basic(sig, terms, E, -1);
    auto built = build_term_model(GroundTheory{sig, E}, 4);
    const FiniteModel& A = std::get<TermModel>(built).model;
    for (int j = 0; j < 30; ++j) {
      Sentence phi = random_atom(rng, sig, terms);
      bool d = decide_basic(sig, E, phi);
      ASSERT_EQ(d, saturation_has(S, id, phi)) << print_sentence(phi, sig);
      ASSERT_EQ(d, satisfies(A, phi)) << print_sentence(phi, sig);
    }
  }
}

TEST(Property, EntailmentIsMonotoneInTheAtoms) {
  Rng rng(seed("basic.monotone"));
  for (int k = 0; k < 100; ++k) {
    Signature sig = random_layered_signature(rng);
    auto terms = all_ground_terms(sig);
    std::vector<Sentence> E;
    for (int i = 0, n = 1 + rng.below(4); i < n; ++i) E.push_back(random_atom(rng, sig, terms));
    std::vector<Sentence> bigger = E;
    bigger.push_back(random_atom(rng, sig, terms));
    for (int j = 0; j < 20; ++j) {
      Sentence phi = random_atom(rng, sig, terms);
      if (decide_basic(sig, E, phi)) ASSERT_TRUE(decide_basic(sig, bigger, phi));
    }
  }
}
