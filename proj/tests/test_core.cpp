#include <gtest/gtest.h>

#include "common.hpp"

using namespace tt;

namespace {

Signature nat_sig() {
  Signature sig;
  sig.add_sort("Nat");
  sig.add_func({"zero", {}, "Nat"});
  sig.add_func({"s", {"Nat"}, "Nat"}, true);
  sig.add_label("tick");
  return sig;
}

Term zero() { return make_app("zero", "Nat"); }
Term succ(Term t) { return make_app("s", "Nat", {std::move(t)}); }

}  // namespace

TEST(Signature, RejectsUndeclaredSorts) {
  Signature sig;
  sig.add_sort("A");
  sig.add_func({"f", {"B"}, "A"});
  EXPECT_THROW(sig.validate(), Error);
}

TEST(Signature, DuplicateDeclarationThrows) {
  Signature sig = nat_sig();
  EXPECT_THROW(sig.add_func({"zero", {}, "Nat"}), Error);
}

TEST(Signature, OverloadingByRankIsAllowed) {
  Signature sig = nat_sig();
  sig.add_sort("Bool");
  sig.add_func({"zero", {}, "Bool"});
  EXPECT_EQ(sig.lookup("zero").size(), 2u);
  EXPECT_NO_THROW(sig.validate());
}

TEST(Signature, ExtensionByVariablesAddsConstants) {
  Signature sig = nat_sig();
  Signature ext = extend_signature(sig, {Variable{"x", "Nat", 0}});
  EXPECT_TRUE(sig.included_in(ext));
  EXPECT_TRUE(ext.has_func({"x", {}, "Nat"}));
  EXPECT_FALSE(ext.included_in(sig));
}

TEST(Action, PowerOneIsTheActionItself) {
  Action a = make_label("tick");
  EXPECT_TRUE(action_equal(make_power(a, 1), a));
  EXPECT_TRUE(action_equal(make_power(a, 3), make_seq(a, make_seq(a, a))));
  EXPECT_THROW(make_power(a, -1), Error);
}

TEST(Action, ZeroPowerTransitionIsAnEquation) {
  Sentence s = make_trans(zero(), make_power(make_label("tick"), 0), succ(zero()));
  ASSERT_EQ(s->kind, SentKind::Eq);
  EXPECT_TRUE(term_equal(s->l, zero()));
}

TEST(Action, SymbolicPowerInstantiates) {
  Action a = make_label("tick");
  Action k2 = make_power_sym(a, 2);  // a^(kappa+2)
  EXPECT_TRUE(action_is_symbolic(k2));
  EXPECT_FALSE(action_is_symbolic(instantiate_action(k2, 0)));
  EXPECT_TRUE(action_equal(instantiate_action(make_power_sym(a, 0), 3), make_power(a, 3)));
  EXPECT_TRUE(action_equal(instantiate_action(k2, 1), make_seq(a, make_seq(a, a))));
  EXPECT_THROW(instantiate_action(make_power_sym(a, -1), 0), Error);
}

TEST(Sentence, DerivedConnectives) {
  Sentence p = make_eq(zero(), zero());
  EXPECT_TRUE(is_bot(make_bot()));
  EXPECT_EQ(make_top()->kind, SentKind::Not);
  Sentence imp = make_implies(p, p);
  ASSERT_EQ(imp->kind, SentKind::Or);
  EXPECT_EQ(imp->ops.size(), 2u);
}

TEST(Sentence, AlphaEquivalentQuantifiersCompareEqual) {
  Variable x{"x", "Nat", 0}, y{"y", "Nat", 0};
  Sentence a = make_exists({x}, make_eq(make_var(x), zero()));
  Sentence b = make_exists({y}, make_eq(make_var(y), zero()));
  EXPECT_TRUE(sentence_equal(a, b));
  Sentence c = make_exists({y}, make_eq(zero(), make_var(y)));
  EXPECT_FALSE(sentence_equal(a, c));
}

TEST(Sentence, CheckRejectsUnknownLabel) {
  Signature sig = nat_sig();
  EXPECT_NO_THROW(check_sentence(sig, make_trans(zero(), make_label("tick"), zero())));
  EXPECT_THROW(check_sentence(sig, make_trans(zero(), make_label("tock"), zero())), Error);
}

TEST(Substitution, RespectsBinders) {
  Variable x{"x", "Nat", 0};
  Sentence body = make_or({make_eq(make_var(x), zero()), make_exists({x}, make_eq(make_var(x), zero()))});
  Sentence out = apply_substitution(Substitution{{x, succ(zero())}}, body);
  ASSERT_EQ(out->kind, SentKind::Or);
  bool saw_free = false, saw_bound = false;
  for (const auto& o : out->ops) {
    if (o->kind == SentKind::Eq) saw_free = term_equal(o->l, succ(zero()));
    if (o->kind == SentKind::Exists) saw_bound = sentence_equal(o, make_exists({x}, make_eq(make_var(x), zero())));
  }
  EXPECT_TRUE(saw_free);
  EXPECT_TRUE(saw_bound);
}

TEST(TermUniverse, DepthBoundAndCompleteness) {
  Signature sig = nat_sig();
  auto U = enumerate_terms(sig, 3);
  EXPECT_EQ(U.by_sort["Nat"].size(), 3u);  // zero, s(zero), s(s(zero)); constants have depth 1
  EXPECT_FALSE(U.complete);
  EXPECT_EQ(U.unbounded_sort, "Nat");

  Signature flat;
  flat.add_sort("A");
  flat.add_sort("B");
  flat.add_func({"a", {}, "A"});
  flat.add_func({"b", {}, "A"});
  flat.add_func({"g", {"A", "A"}, "B"});
  auto V = enumerate_terms(flat, 5);
  EXPECT_TRUE(V.complete);
  EXPECT_EQ(V.by_sort["B"].size(), 4u);
}

TEST(Morphism, CompositionTranslatesStepwise) {
  Signature a;
  a.add_sort("s");
  a.add_func({"c", {}, "s"});
  a.add_label("l");
  Signature b;
  b.add_sort("t");
  b.add_func({"d", {}, "t"});
  b.add_label("m");
  Signature c;
  c.add_sort("u");
  c.add_func({"e", {}, "u"});
  c.add_func({"e2", {}, "u"});
  c.add_label("n");
  SignatureMorphism f{a, b, {{"s", "t"}}, {{{"c", {}, "s"}, {"d", {}, "t"}}}, {{"l", "m"}}};
  SignatureMorphism g{b, c, {{"t", "u"}}, {{{"d", {}, "t"}, {"e", {}, "u"}}}, {{"m", "n"}}};
  f.validate();
  g.validate();
  Variable x{"x", "s", 0};
  Sentence phi = make_exists({x}, make_trans(make_var(x), make_star(make_label("l")), make_app("c", "s")));
  Sentence direct = translate_sentence(compose(f, g), phi);
  Sentence stepwise = translate_sentence(g, translate_sentence(f, phi));
  EXPECT_TRUE(sentence_equal(direct, stepwise));
  EXPECT_TRUE(sentence_equal(translate_sentence(identity_morphism(a), phi), phi));
}

TEST(Morphism, QuantifiedVariableAvoidsTargetConstant) {
  Signature a;
  a.add_sort("s");
  a.add_func({"c", {}, "s"});
  Signature b = a;
  b.add_func({"x", {}, "s"});
  Variable x{"x", "s", 0};
  Sentence phi = make_exists({x}, make_eq(make_var(x), make_app("c", "s")));
  Sentence out = translate_sentence(inclusion_morphism(a, b), phi);
  ASSERT_EQ(out->kind, SentKind::Exists);
  EXPECT_NE(out->vars[0].name, "x");
  EXPECT_NO_THROW(check_sentence(b, out));
}

TEST(Morphism, RankMismatchIsRejected) {
  Signature a;
  a.add_sort("s");
  a.add_func({"f", {"s"}, "s"});
  Signature b;
  b.add_sort("t");
  b.add_func({"g", {}, "t"});
  SignatureMorphism bad{a, b, {{"s", "t"}}, {{{"f", {"s"}, "s"}, {"g", {}, "t"}}}, {}};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Morphism, MonotonicSymbolsMustStayMonotonic) {
  Signature a;
  a.add_sort("s");
  a.add_func({"f", {"s"}, "s"}, true);
  Signature b;
  b.add_sort("s");
  b.add_func({"f", {"s"}, "s"});
  EXPECT_NO_THROW(identity_morphism(a).validate());
  SignatureMorphism m{a, b, {{"s", "s"}}, {{{"f", {"s"}, "s"}, {"f", {"s"}, "s"}}}, {}};
  EXPECT_THROW(m.validate(), Error);
}

TEST(Property, RandomSentencesTranslateAlongIdentity) {
  Rng rng(seed("core.identity"));
  Signature sig;
  sig.add_sort("s");
  sig.add_func({"a", {}, "s"});
  sig.add_func({"f", {"s"}, "s"});
  sig.add_label("l");
  sig.add_label("m");
  auto id = identity_morphism(sig);
  for (int k = 0; k < 300; ++k) {
    int fresh = 0;
    Sentence phi = random_sentence(rng, sig, "s", {}, 3, fresh);
    ASSERT_TRUE(sentence_equal(translate_sentence(id, phi), phi)) << print_sentence(phi, sig);
    ASSERT_NO_THROW(check_sentence(sig, phi));
  }
}
