#include <gtest/gtest.h>

#include "common.hpp"

using namespace tt;

namespace {

Signature one_label_sig() {
  Signature sig;
  sig.add_sort("s");
  sig.add_label("l");
  return sig;
}

}  // namespace

TEST(Satisfaction, ExSoundModelSatisfiesAxiomsButNotTrueEqFalse) {
  Theory th = load_theory("ex_sound.ta");
  FiniteModel m = parse_model(slurp(data_path("ex_sound.tam")), th.sig);
  EXPECT_EQ(m.size("Elt"), 0);
  for (const auto& a : th.axioms) EXPECT_TRUE(satisfies(m, a.sentence)) << a.name;
  EXPECT_FALSE(satisfies(m, parse_sentence("true = false", th.sig)));
}

TEST(Satisfaction, EmptyTheoryIsVacuous) {
  Theory th = parse_theory("theory empty\nsorts { s }\n");
  FiniteModel m;
  m.sig = th.sig;
  m.carrier["s"] = 1;
  EXPECT_TRUE(th.axioms.empty());
  EXPECT_TRUE(satisfies_all(m, th.axiom_set()));
}

TEST(Satisfaction, ThreeCycleSatisfiesFinitenessSentence) {
  Theory th = load_theory("phi_omega.ta");
  FiniteModel m = parse_model(slurp(data_path("phi_omega_cycle3.tam")), th.sig);
  EXPECT_TRUE(satisfies(m, *th.axiom("phi_omega")));
}

TEST(Satisfaction, FinitenessSentenceOnHandBuiltModels) {
  Theory th = load_theory("phi_omega.ta");
  Sentence phi = *th.axiom("phi_omega");
  for (int n = 1; n <= 6; ++n) EXPECT_TRUE(satisfies(cycle_model(th.sig, n), phi)) << n;
  FiniteModel two_loops = cycle_model(th.sig, 2);
  two_loops.rel["l"]["s"] = Relation::identity(2);
  EXPECT_FALSE(satisfies(two_loops, phi));
  for (const char* f : {"phi_omega_disconnected.tam", "phi_omega_nonfunctional.tam", "phi_omega_noninjective.tam"})
    EXPECT_FALSE(satisfies(parse_model(slurp(data_path(f)), th.sig), phi)) << f;
}

TEST(Actions, CompositionUnionAndPowers) {
  Signature sig = one_label_sig();
  sig.add_label("m");
  FiniteModel M;
  M.sig = sig;
  M.carrier["s"] = 3;
  Relation l(3), m(3);
  l.set(0, 1);
  m.set(1, 2);
  M.rel["l"]["s"] = l;
  M.rel["m"]["s"] = m;
  M.normalize();
  Relation seq = interpret_action(M, make_seq(make_label("l"), make_label("m")), "s");
  EXPECT_TRUE(seq.get(0, 2));
  EXPECT_EQ(seq.count(), 1u);
  Relation uni = interpret_action(M, make_union(make_label("l"), make_label("m")), "s");
  EXPECT_EQ(uni.count(), 2u);
  Relation zero = interpret_action(M, make_pow_node(make_label("l"), 0, false), "s");
  EXPECT_TRUE(zero == Relation::identity(3));
}

TEST(Actions, StarAgreesWithMatrixPowering) {
  Rng rng(seed("semantics.star"));
  for (int k = 0; k < 2000; ++k) {
    int n = 1 + rng.below(6);
    Relation R(n);
    for (auto& c : R.cell) c = rng.coin(25) ? 1 : 0;
    Relation S = rel_star(R);
    ASSERT_TRUE(S == closure_by_powers(R));
    ASSERT_TRUE(rel_star(S) == S);
    ASSERT_TRUE(rel_compose(R, S).cell.size() == S.cell.size() && S.contains(rel_compose(R, S)));
  }
}

TEST(Reduct, SatisfactionConditionOnRandomTriples) {
  Rng rng(seed("semantics.reduct"));
  Signature src;
  src.add_sort("u");
  src.add_func({"a", {}, "u"});
  src.add_func({"f", {"u"}, "u"});
  src.add_label("l");
  src.add_label("m");
  Signature dst;
  dst.add_sort("s");
  dst.add_sort("extra");
  dst.add_func({"p", {}, "s"});
  dst.add_func({"q", {}, "s"});
  dst.add_func({"F", {"s"}, "s"});
  dst.add_label("x");
  for (int k = 0; k < 300; ++k) {
    SignatureMorphism chi{src, dst, {{"u", "s"}}, {}, {{"l", "x"}, {"m", "x"}}};
    chi.func_map[{"a", {}, "u"}] = rng.coin() ? FuncDecl{"p", {}, "s"} : FuncDecl{"q", {}, "s"};
    chi.func_map[{"f", {"u"}, "u"}] = {"F", {"s"}, "s"};
    chi.validate();
    FiniteModel M = random_model(rng, dst, 3);
    int fresh = 0;
    Sentence phi = random_sentence(rng, src, "u", {}, 3, fresh);
    ASSERT_EQ(satisfies(reduct(chi, M), phi), satisfies(M, translate_sentence(chi, phi))) << print_sentence(phi, src);
  }
}

TEST(ModelText, PrintThenParseIsIdentity) {
  Theory th = load_theory("ex_sound.ta");
  FiniteModel m = parse_model(slurp(data_path("ex_sound.tam")), th.sig);
  std::string once = print_model(m);
  FiniteModel again = parse_model(once, th.sig);
  EXPECT_EQ(print_model(again), once);
  EXPECT_EQ(again.table, m.table);
}

TEST(ModelText, RejectsPartialTables) {
  Theory th = load_theory("star_bounded.ta");
  EXPECT_THROW(parse_model("carrier s = { x, y }\nfun a : -> s { -> x }\n", th.sig), std::exception);
}

TEST(ModelText, MonotonicityIsEnforced) {
  Theory th = parse_theory("theory t\nsorts { s }\nops { f : s -> s [mono]; }\nlabels { l }\n");
  FiniteModel m;
  m.sig = th.sig;
  m.carrier["s"] = 2;
  m.table[{"f", {"s"}, "s"}] = {0, 0};
  Relation r(2);
  r.set(0, 1);
  m.rel["l"]["s"] = r;
  EXPECT_THROW(m.validate(), Error);  // 0 -l-> 1 but f(0) = f(1) = 0 has no l-loop
  r.set(0, 0);
  m.rel["l"]["s"] = r;
  EXPECT_NO_THROW(m.validate());
}

TEST(TheoryText, PrintThenParseKeepsAxioms) {
  for (const char* f : {"ex_sound.ta", "phi_omega.ta", "star_bounded.ta"}) {
    Theory th = load_theory(f);
    Theory again = parse_theory(print_theory(th));
    EXPECT_TRUE(again.sig == th.sig) << f;
    ASSERT_EQ(again.axioms.size(), th.axioms.size()) << f;
    for (std::size_t i = 0; i < th.axioms.size(); ++i) {
      EXPECT_EQ(again.axioms[i].name, th.axioms[i].name);
      EXPECT_TRUE(sentence_equal(again.axioms[i].sentence, th.axioms[i].sentence)) << th.axioms[i].name;
    }
  }
}

TEST(Oracle, FindsTheEmptyCarrierCountermodel) {
  Theory th = load_theory("ex_sound.ta");
  auto r = semantic_entails_bounded(th.sig, th.axiom_set(), parse_sentence("true = false", th.sig),
                                    SizeBound{{"Elt", 1}, {"Bool", 2}});
  ASSERT_FALSE(r.entailed);
  EXPECT_EQ(r.countermodel->size("Elt"), 0);
  EXPECT_EQ(r.countermodel->size("Bool"), 2);
}

TEST(Oracle, NonemptyEltForcesTrueEqFalse) {
  Theory th = load_theory("ex_sound.ta");
  Sentence goal = parse_sentence("true = false", th.sig);
  std::size_t models = 0;
  enumerate_models(th.sig, SizeBound{{"Elt", 2}, {"Bool", 2}}, [&](const FiniteModel& m) {
    if (m.size("Elt") > 0 && satisfies_all(m, th.axiom_set())) {
      ++models;
      EXPECT_TRUE(satisfies(m, goal));
    }
    return true;
  });
  EXPECT_GT(models, 0u);
}

TEST(Oracle, ReflexivityHasNoCountermodel) {
  Theory th = load_theory("star_bounded.ta");
  for (int k = 0; k <= 3; ++k)
    EXPECT_TRUE(semantic_entails_bounded(th.sig, {}, parse_sentence("a = a", th.sig), uniform_bound(th.sig, k)).entailed);
}

TEST(Oracle, StarIsTransitiveUpToBoundThree) {
  Theory th = parse_theory("theory t\nsorts { s }\nops { a, b, c : -> s; }\nlabels { l }\n");
  SentSet gamma = {parse_sentence("a =[l*]=> b", th.sig), parse_sentence("b =[l*]=> c", th.sig)};
  auto r = semantic_entails_bounded(th.sig, gamma, parse_sentence("a =[l*]=> c", th.sig), uniform_bound(th.sig, 3));
  EXPECT_TRUE(r.entailed);
  EXPECT_GT(r.models_visited, 0u);
  auto s = semantic_entails_bounded(th.sig, gamma, parse_sentence("a =[l]=> c", th.sig), uniform_bound(th.sig, 3));
  EXPECT_FALSE(s.entailed);
}

TEST(Oracle, CeilingGuard) {
  Theory th = load_theory("ex_sound.ta");
  EXPECT_THROW(semantic_entails_bounded(th.sig, th.axiom_set(), parse_sentence("true = false", th.sig),
                                        uniform_bound(th.sig, 4), 1000.0L),
               CeilingExceeded);
  EXPECT_GT(estimate_models(th.sig, uniform_bound(th.sig, 3)), 1000.0L);
}

TEST(Enumeration, CountsMatchTheClosedForm) {
  Signature sig = one_label_sig();
  sig.add_func({"c", {}, "s"});
  // sum over n = 1..3 of n * 2^(n*n); the empty carrier has no room for c
  std::size_t visited = 0;
  enumerate_models(sig, SizeBound{{"s", 3}}, [&](const FiniteModel&) {
    ++visited;
    return true;
  });
  EXPECT_EQ(visited, 1u * 2 + 2u * 16 + 3u * 512);
}

TEST(Property, PlannedSearchMatchesPlainEnumeration) {
  Rng rng(seed("semantics.planned"));
  int refuted = 0;
  for (int k = 0; k < 150; ++k) {
    Signature sig;
    sig.add_sort("s");
    for (const char* c : {"a", "b", "c"}) sig.add_func({c, {}, "s"});
    sig.add_func({"f", {"s"}, "s"}, rng.coin());
    if (rng.coin()) sig.add_func({"g", {"s"}, "s"});
    sig.add_label("l");
    if (rng.coin()) sig.add_label("m");
    SentSet gamma;
    int fresh = 0;
    for (int i = 0, n = rng.below(3); i < n; ++i) gamma.insert(random_sentence(rng, sig, "s", {}, 2, fresh));
    // a ground literal over constants, which the planner checks first
    if (rng.coin()) {
      Sentence e = make_eq(make_app(rng.coin() ? "a" : "b", "s"), make_app("c", "s"));
      gamma.insert(rng.coin() ? make_not(e) : e);
    }
    Sentence phi = random_sentence(rng, sig, "s", {}, 2, fresh);
    SizeBound b{{"s", 2}};
    bool brute = true;
    enumerate_models(sig, b, [&](const FiniteModel& m) {
      if (satisfies_all(m, gamma) && !satisfies(m, phi)) brute = false;
      return brute;
    });
    auto r = semantic_entails_bounded(sig, gamma, phi, b);
    ASSERT_EQ(r.entailed, brute) << print_sentence(phi, sig);
    if (!r.entailed) {
      ++refuted;
      ASSERT_NO_THROW(r.countermodel->validate());
      ASSERT_TRUE(satisfies_all(*r.countermodel, gamma));
      ASSERT_FALSE(satisfies(*r.countermodel, phi));
    }
  }
  EXPECT_GT(refuted, 10);
  EXPECT_LT(refuted, 150);
}

TEST(Oracle, ConstantGuardsPruneBeforeTheCeiling) {
  // seven distinct constants cannot live in three elements, however large the rest is
  Signature sig;
  sig.add_sort("s");
  std::vector<std::string> cs = {"c0", "c1", "c2", "c3", "c4", "c5", "c6"};
  for (const auto& c : cs) sig.add_func({c, {}, "s"});
  sig.add_func({"h", {"s", "s"}, "s"});
  sig.add_label("l");
  SentSet gamma;
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) gamma.insert(make_not(make_eq(make_app(cs[i], "s"), make_app(cs[j], "s"))));
  Sentence phi = parse_sentence("h(c0, c1) =[l]=> c2", sig);
  EXPECT_THROW(enumerate_models(sig, SizeBound{{"s", 3}}, [](const FiniteModel&) { return true; }), CeilingExceeded);
  auto r = semantic_entails_bounded(sig, gamma, phi, SizeBound{{"s", 3}});
  EXPECT_TRUE(r.entailed);
  EXPECT_EQ(r.models_visited, 0u);
}
