#pragma once

// Proof trees for the dynamic entailment calculus and their checker.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ta/basic.hpp"
#include "ta/core.hpp"
#include "ta/syntax.hpp"

namespace ta {

enum class Rule {
  Monotonicity,
  Transitivity,
  Union,
  Translation,
  R,
  S,
  T,
  F,
  P,
  M,
  Comp_I,
  Comp_E,
  Union_I,
  Union_E,
  Star_I,
  Star_E,
  Neg_D,
  False,
  Neg_I,
  Neg_E,
  Disj_I,
  Disj_E,
  Quant_I,
  Quant_E,
  Subst,
  BasicOracle,
  GMP
};

inline const std::vector<std::pair<Rule, std::string>>& rule_names() {
  static const std::vector<std::pair<Rule, std::string>> names = {
      {Rule::Monotonicity, "Monotonicity"}, {Rule::Transitivity, "Transitivity"}, {Rule::Union, "Union"},
      {Rule::Translation, "Translation"},   {Rule::R, "R"},                       {Rule::S, "S"},
      {Rule::T, "T"},                       {Rule::F, "F"},                       {Rule::P, "P"},
      {Rule::M, "M"},                       {Rule::Comp_I, "Comp_I"},             {Rule::Comp_E, "Comp_E"},
      {Rule::Union_I, "Union_I"},           {Rule::Union_E, "Union_E"},           {Rule::Star_I, "Star_I"},
      {Rule::Star_E, "Star_E"},             {Rule::Neg_D, "Neg_D"},               {Rule::False, "False"},
      {Rule::Neg_I, "Neg_I"},               {Rule::Neg_E, "Neg_E"},               {Rule::Disj_I, "Disj_I"},
      {Rule::Disj_E, "Disj_E"},             {Rule::Quant_I, "Quant_I"},           {Rule::Quant_E, "Quant_E"},
      {Rule::Subst, "Subst"},               {Rule::BasicOracle, "BasicOracle"},   {Rule::GMP, "GMP"}};
  return names;
}

inline std::string rule_name(Rule r) {
  for (const auto& [k, n] : rule_names())
    if (k == r) return n;
  return "?";
}

inline std::optional<Rule> rule_from_name(const std::string& s) {
  for (const auto& [k, n] : rule_names())
    if (n == s) return k;
  return std::nullopt;
}

struct Sequent {
  Signature sig;
  SentSet ant;
  SentSet concl;

  // The single conclusion of most rules.
  Sentence goal() const {
    if (concl.size() != 1) throw Error("sequent has " + std::to_string(concl.size()) + " conclusions");
    return *concl.begin();
  }
};

struct ProofNode;
using Proof = std::shared_ptr<ProofNode>;

// A proof template over the exponent symbol kappa, standing for one premise
// per natural number.
struct PremiseFamily {
  Proof tmpl;
  std::vector<int> checked;
};

struct ProofNode {
  std::string id;
  Sequent seq;
  Rule rule = Rule::Monotonicity;
  std::vector<Proof> premises;
  std::optional<PremiseFamily> family;

  std::optional<SignatureMorphism> morphism;
  Substitution subst;
  std::optional<Variable> fresh;
  int index = 0;
  bool index_symbolic = false;
  int pick = 0;
};

inline Proof make_node(std::string id, Sequent seq, Rule rule, std::vector<Proof> premises = {}) {
  auto n = std::make_shared<ProofNode>();
  n->id = std::move(id);
  n->seq = std::move(seq);
  n->rule = rule;
  n->premises = std::move(premises);
  return n;
}

inline Sequent sequent(const Signature& sig, SentSet ant, const Sentence& goal) { return Sequent{sig, std::move(ant), {goal}}; }

enum class Status { Valid, BoundedValid, Invalid };

struct Verdict {
  Status status = Status::Valid;
  int bound = -1;
  std::string reason;
  std::vector<std::string> path;

  bool ok() const { return status != Status::Invalid; }
  static Verdict invalid(std::string why) {
    Verdict v;
    v.status = Status::Invalid;
    v.reason = std::move(why);
    return v;
  }
};

inline std::string status_name(Status s) {
  switch (s) {
    case Status::Valid:
      return "VALID";
    case Status::BoundedValid:
      return "BOUNDED_VALID";
    case Status::Invalid:
      return "INVALID";
  }
  return "?";
}

inline std::string verdict_string(const Verdict& v) {
  std::string s = status_name(v.status);
  if (v.status == Status::BoundedValid) s += "(" + std::to_string(v.bound) + ")";
  if (v.status == Status::Invalid) {
    s += ": " + v.reason;
    if (!v.path.empty()) {
      s += " at ";
      for (std::size_t i = 0; i < v.path.size(); ++i) s += (i ? "/" : "") + v.path[i];
    }
  }
  return s;
}

// INVALID dominates, then BOUNDED_VALID with the smallest bound.
inline Verdict combine(const Verdict& a, const Verdict& b) {
  if (a.status == Status::Invalid) return a;
  if (b.status == Status::Invalid) return b;
  if (a.status == Status::BoundedValid && b.status == Status::BoundedValid) return a.bound <= b.bound ? a : b;
  if (a.status == Status::BoundedValid) return a;
  return b;
}

struct CheckMode {
  bool schematic = true;
  int bound = 0;

  static CheckMode bounded(int b) { return CheckMode{false, b}; }
  static CheckMode schematic_mode() { return CheckMode{true, 0}; }
};

// ----------------------------------------------------------------- helpers

namespace calc {

struct Violation : Error {
  using Error::Error;
};

[[noreturn]] inline void fail(const std::string& why) { throw Violation(why); }

inline void need(bool cond, const std::string& why) {
  if (!cond) fail(why);
}

inline bool same_set(const SentSet& a, const SentSet& b) {
  if (a.size() != b.size()) return false;
  auto it = b.begin();
  for (const auto& x : a)
    if (!sentence_equal(x, *it++)) return false;
  return true;
}

inline SentSet with(SentSet s, const std::vector<Sentence>& extra) {
  for (const auto& e : extra) s.insert(e);
  return s;
}

inline std::string show(const Sentence& s, const Signature& sig) { return print_sentence(s, sig); }

inline void premise_count(const ProofNode& n, std::size_t k) {
  need(n.premises.size() == k, rule_name(n.rule) + " expects " + std::to_string(k) + " premise(s), got " +
                                   std::to_string(n.premises.size()));
}

inline void same_context(const ProofNode& n, const ProofNode& p) {
  need(n.seq.sig == p.seq.sig, "premise " + p.id + " is over a different signature");
  need(same_set(n.seq.ant, p.seq.ant), "premise " + p.id + " has a different antecedent");
}

inline const Sentence& only(const SentSet& s, const std::string& who) {
  need(s.size() == 1, who + " must have exactly one conclusion");
  return *s.begin();
}

inline void expect_sentence(const Sentence& got, const Sentence& want, const Signature& sig, const std::string& who) {
  need(sentence_equal(got, want), who + " should be " + show(want, sig) + " but is " + show(got, sig));
}

// Endpoints and action of a transition; an equation is the identity step.
struct TransView {
  Term l, r;
  Action act;
};

inline std::optional<TransView> as_trans(const Sentence& s) {
  if (s->kind == SentKind::Trans) return TransView{s->l, s->r, s->act};
  if (s->kind == SentKind::Eq) return TransView{s->l, s->r, nullptr};
  return std::nullopt;
}

inline Sentence expect_trans(const Sentence& s, const std::string& who) {
  need(s->kind == SentKind::Trans, who + " must be a transition");
  return s;
}

inline bool is_eq(const Sentence& s) { return s->kind == SentKind::Eq; }

inline std::string fresh_prefix() { return "$"; }

}  // namespace calc

// --------------------------------------------------------- instantiation

inline Proof instantiate_proof(const Proof& p, int n) {
  auto q = std::make_shared<ProofNode>(*p);
  SentSet ant, concl;
  for (const auto& s : p->seq.ant) ant.insert(instantiate_sentence(s, n));
  for (const auto& s : p->seq.concl) concl.insert(instantiate_sentence(s, n));
  q->seq.ant = ant;
  q->seq.concl = concl;
  if (p->rule == Rule::Star_I && p->index_symbolic) {
    q->index = n + p->index;
    q->index_symbolic = false;
    if (q->index < 0) throw Error("exponent kappa" + std::to_string(p->index) + " is negative at kappa = " + std::to_string(n));
  }
  q->premises.clear();
  for (const auto& c : p->premises) q->premises.push_back(instantiate_proof(c, n));
  if (p->family) {
    q->family->tmpl = instantiate_proof(p->family->tmpl, n);
  }
  return q;
}

// ---------------------------------------------------------------- checker

struct CheckOptions {
  CheckMode mode;
  // Called for every node with its local result, for step tables.
  std::function<void(const ProofNode&, const Verdict&)> on_node;
};

Verdict check_proof(const Proof& root, const CheckOptions& opt);

inline Verdict check_proof(const Proof& root, CheckMode mode = CheckMode::schematic_mode()) {
  CheckOptions o;
  o.mode = mode;
  return check_proof(root, o);
}

namespace calc {

inline void check_gmp(const ProofNode& n);

// Local side conditions of one node, premises taken as given.
inline void check_local(const ProofNode& n) {
  const Signature& sig = n.seq.sig;
  const SentSet& G = n.seq.ant;
  for (const auto& s : n.seq.ant) check_sentence(sig, s);
  for (const auto& s : n.seq.concl) check_sentence(sig, s);
  auto P = [&](std::size_t i) -> const ProofNode& { return *n.premises.at(i); };
  switch (n.rule) {
    case Rule::Monotonicity: {
      premise_count(n, 0);
      for (const auto& c : n.seq.concl) need(G.count(c) > 0, "conclusion " + show(c, sig) + " is not in the antecedent");
      return;
    }
    case Rule::Transitivity: {
      premise_count(n, 2);
      need(P(0).seq.sig == sig && P(1).seq.sig == sig, "Transitivity premises must share the signature");
      need(same_set(P(0).seq.ant, G), "first premise must have the node's antecedent");
      need(same_set(P(1).seq.ant, P(0).seq.concl), "second premise antecedent must be the first premise's conclusion");
      need(same_set(P(1).seq.concl, n.seq.concl), "second premise conclusion must be the node's conclusion");
      return;
    }
    case Rule::Union: {
      SentSet got;
      for (const auto& p : n.premises) {
        same_context(n, *p);
        got.insert(only(p->seq.concl, "Union premise"));
      }
      need(same_set(got, n.seq.concl), "conclusion set is not the union of the premise conclusions");
      return;
    }
    case Rule::Translation: {
      premise_count(n, 1);
      need(n.morphism.has_value(), "Translation needs a morphism");
      const auto& chi = *n.morphism;
      chi.validate();
      need(chi.source == P(0).seq.sig, "morphism source differs from the premise signature");
      need(chi.target == sig, "morphism target differs from the node signature");
      need(same_set(translate_set(chi, P(0).seq.ant), G), "antecedent is not the translated premise antecedent");
      need(same_set(translate_set(chi, P(0).seq.concl), n.seq.concl), "conclusion is not the translated premise conclusion");
      return;
    }
    case Rule::R: {
      premise_count(n, 0);
      const auto& c = only(n.seq.concl, "R");
      need(is_eq(c) && term_equal(c->l, c->r), "R concludes t = t");
      return;
    }
    case Rule::S: {
      premise_count(n, 1);
      same_context(n, P(0));
      const auto& c = only(n.seq.concl, "S");
      const auto& p = only(P(0).seq.concl, "premise");
      need(is_eq(c) && is_eq(p), "S relates equations");
      expect_sentence(c, make_eq(p->r, p->l), sig, "conclusion");
      return;
    }
    case Rule::T: {
      premise_count(n, 2);
      same_context(n, P(0));
      same_context(n, P(1));
      const auto& a = only(P(0).seq.concl, "premise");
      const auto& b = only(P(1).seq.concl, "premise");
      need(is_eq(a) && is_eq(b), "T relates equations");
      need(term_equal(a->r, b->l), "T premises do not chain");
      expect_sentence(only(n.seq.concl, "T"), make_eq(a->l, b->r), sig, "conclusion");
      return;
    }
    case Rule::F: {
      const auto& c = only(n.seq.concl, "F");
      need(is_eq(c) && !c->l->is_var && !c->r->is_var, "F concludes an equation between applications");
      need(decl_of(c->l) == decl_of(c->r), "F needs the same symbol on both sides");
      premise_count(n, c->l->args.size());
      for (std::size_t i = 0; i < n.premises.size(); ++i) {
        same_context(n, P(i));
        expect_sentence(only(P(i).seq.concl, "premise"), make_eq(c->l->args[i], c->r->args[i]), sig,
                        "premise " + std::to_string(i + 1));
      }
      return;
    }
    case Rule::P: {
      premise_count(n, 3);
      for (std::size_t i = 0; i < 3; ++i) same_context(n, P(i));
      const auto& e1 = only(P(0).seq.concl, "premise");
      const auto& e2 = only(P(1).seq.concl, "premise");
      const auto& tr = only(P(2).seq.concl, "premise");
      need(is_eq(e1) && is_eq(e2), "first two premises of P are equations");
      need(tr->kind == SentKind::Trans && tr->act->kind == ActKind::Label, "third premise of P is a label transition");
      need(term_equal(tr->l, e1->l) && term_equal(tr->r, e2->l), "P premises do not match the transition endpoints");
      expect_sentence(only(n.seq.concl, "P"), make_trans(e1->r, tr->act, e2->r), sig, "conclusion");
      return;
    }
    case Rule::M: {
      premise_count(n, 1);
      same_context(n, P(0));
      const auto& c = only(n.seq.concl, "M");
      const auto& p = only(P(0).seq.concl, "premise");
      need(c->kind == SentKind::Trans && c->act->kind == ActKind::Label, "M concludes a label transition");
      need(p->kind == SentKind::Trans && action_equal(p->act, c->act), "M premise must use the same label");
      need(!c->l->args.empty() && decl_of(c->l) == decl_of(c->r), "M lifts through one symbol");
      need(sig.is_mono(decl_of(c->l)), "symbol " + c->l->name + " is not monotonic");
      bool found = false;
      for (std::size_t j = 0; j < c->l->args.size() && !found; ++j) {
        if (!term_equal(c->l->args[j], p->l) || !term_equal(c->r->args[j], p->r)) continue;
        bool rest = true;
        for (std::size_t i = 0; i < c->l->args.size(); ++i)
          if (i != j && !term_equal(c->l->args[i], c->r->args[i])) rest = false;
        found = rest;
      }
      need(found, "conclusion is not a one-position lift of the premise");
      return;
    }
    case Rule::Comp_I: {
      premise_count(n, 2);
      same_context(n, P(0));
      same_context(n, P(1));
      const auto& c = expect_trans(only(n.seq.concl, "Comp_I"), "Comp_I conclusion");
      need(c->act->kind == ActKind::Seq, "Comp_I concludes a composition");
      const auto& p1 = only(P(0).seq.concl, "premise");
      auto v = as_trans(p1);
      need(v.has_value(), "first Comp_I premise must be a transition");
      expect_sentence(p1, make_trans(c->l, c->act->a, v->r), sig, "first premise");
      expect_sentence(only(P(1).seq.concl, "premise"), make_trans(v->r, c->act->b, c->r), sig, "second premise");
      return;
    }
    case Rule::Comp_E: {
      premise_count(n, 2);
      same_context(n, P(0));
      need(n.fresh.has_value(), "Comp_E needs a fresh constant");
      const Variable& x = *n.fresh;
      need(x.name.rfind(fresh_prefix(), 0) == 0, "fresh constant " + x.name + " is not from the reserved namespace");
      need(!sig.has_func(FuncDecl{x.name, {}, x.sort}), "constant " + x.name + " is not fresh");
      const auto& phi = only(n.seq.concl, "Comp_E");
      need(!sentence_mentions(phi, x), "fresh constant escapes into the conclusion");
      const auto& c = expect_trans(only(P(0).seq.concl, "premise"), "first Comp_E premise");
      need(c->act->kind == ActKind::Seq, "first Comp_E premise must be a composition");
      need(c->l->sort == x.sort, "fresh constant has the wrong sort");
      Signature sx = extend_signature(sig, {x});
      need(P(1).seq.sig == sx, "second premise must be over the signature extended by " + x.name);
      Term xt = make_var(x);
      SentSet want = with(G, {make_trans(c->l, c->act->a, xt), make_trans(xt, c->act->b, c->r)});
      need(same_set(P(1).seq.ant, want), "second premise antecedent must add the two split transitions");
      expect_sentence(only(P(1).seq.concl, "premise"), phi, sig, "second premise conclusion");
      return;
    }
    case Rule::Union_I: {
      premise_count(n, 1);
      same_context(n, P(0));
      const auto& c = expect_trans(only(n.seq.concl, "Union_I"), "Union_I conclusion");
      need(c->act->kind == ActKind::Union, "Union_I concludes a union");
      const auto& p = only(P(0).seq.concl, "premise");
      bool a = sentence_equal(p, make_trans(c->l, c->act->a, c->r));
      bool b = sentence_equal(p, make_trans(c->l, c->act->b, c->r));
      if (n.pick == 1) need(a, "premise is not the first branch");
      else if (n.pick == 2) need(b, "premise is not the second branch");
      else need(a || b, "premise is neither branch of the union");
      return;
    }
    case Rule::Union_E: {
      premise_count(n, 3);
      same_context(n, P(0));
      const auto& phi = only(n.seq.concl, "Union_E");
      const auto& u = expect_trans(only(P(0).seq.concl, "premise"), "first Union_E premise");
      need(u->act->kind == ActKind::Union, "first Union_E premise must be a union");
      Action branch[2] = {u->act->a, u->act->b};
      for (int i = 0; i < 2; ++i) {
        const auto& q = P(1 + i);
        need(q.seq.sig == sig, "branch premise is over a different signature");
        need(same_set(q.seq.ant, with(G, {make_trans(u->l, branch[i], u->r)})),
             "branch " + std::to_string(i + 1) + " antecedent must add its transition");
        expect_sentence(only(q.seq.concl, "premise"), phi, sig, "branch conclusion");
      }
      return;
    }
    case Rule::Star_I: {
      premise_count(n, 1);
      same_context(n, P(0));
      const auto& c = expect_trans(only(n.seq.concl, "Star_I"), "Star_I conclusion");
      need(c->act->kind == ActKind::Star, "Star_I concludes a star");
      Action pw = n.index_symbolic ? make_power_sym(c->act->a, n.index) : make_power(c->act->a, n.index);
      need(n.index_symbolic || n.index >= 0, "Star_I index must be a natural number");
      expect_sentence(only(P(0).seq.concl, "premise"), make_trans(c->l, pw, c->r), sig, "premise");
      return;
    }
    case Rule::Star_E: {
      premise_count(n, 1);
      same_context(n, P(0));
      need(n.family.has_value() && n.family->tmpl, "Star_E needs a premise family");
      const auto& s = expect_trans(only(P(0).seq.concl, "premise"), "first Star_E premise");
      need(s->act->kind == ActKind::Star, "first Star_E premise must be a star");
      const auto& t = *n.family->tmpl;
      need(t.seq.sig == sig, "family is over a different signature");
      SentSet want = with(G, {make_trans(s->l, make_power_sym(s->act->a, 0), s->r)});
      need(same_set(t.seq.ant, want), "family antecedent must add the transition with exponent kappa");
      need(same_set(t.seq.concl, n.seq.concl), "family conclusion differs from the node conclusion");
      return;
    }
    case Rule::Neg_D: {
      premise_count(n, 1);
      same_context(n, P(0));
      expect_sentence(only(P(0).seq.concl, "premise"), make_not(make_not(only(n.seq.concl, "Neg_D"))), sig, "premise");
      return;
    }
    case Rule::False: {
      premise_count(n, 1);
      same_context(n, P(0));
      only(n.seq.concl, "False");
      need(is_bot(only(P(0).seq.concl, "premise")), "False needs a proof of bot");
      return;
    }
    case Rule::Neg_I: {
      premise_count(n, 1);
      const auto& c = only(n.seq.concl, "Neg_I");
      need(c->kind == SentKind::Not, "Neg_I concludes a negation");
      need(P(0).seq.sig == sig, "premise is over a different signature");
      need(same_set(P(0).seq.ant, with(G, {c->sub})), "premise antecedent must add the negated sentence");
      need(is_bot(only(P(0).seq.concl, "premise")), "Neg_I premise must conclude bot");
      return;
    }
    case Rule::Neg_E: {
      premise_count(n, 1);
      need(P(0).seq.sig == sig, "premise is over a different signature");
      need(is_bot(only(n.seq.concl, "Neg_E")), "Neg_E concludes bot");
      const auto& p = only(P(0).seq.concl, "premise");
      need(p->kind == SentKind::Not, "Neg_E premise must be a negation");
      need(same_set(G, with(P(0).seq.ant, {p->sub})), "antecedent must be the premise antecedent plus the negated sentence");
      return;
    }
    case Rule::Disj_I: {
      premise_count(n, 1);
      same_context(n, P(0));
      const auto& c = only(n.seq.concl, "Disj_I");
      need(c->kind == SentKind::Or, "Disj_I concludes a disjunction");
      const auto& p = only(P(0).seq.concl, "premise");
      bool in = false;
      for (const auto& o : c->ops) in = in || sentence_equal(o, p);
      need(in, "premise is not a disjunct of the conclusion");
      return;
    }
    case Rule::Disj_E: {
      const auto& gamma = only(n.seq.concl, "Disj_E");
      need(!n.premises.empty(), "Disj_E needs the disjunction premise");
      same_context(n, P(0));
      const auto& d = only(P(0).seq.concl, "premise");
      need(d->kind == SentKind::Or, "first Disj_E premise must be a disjunction");
      premise_count(n, d->ops.size() + 1);
      std::vector<bool> covered(d->ops.size(), false);
      for (std::size_t i = 1; i < n.premises.size(); ++i) {
        const auto& q = P(i);
        need(q.seq.sig == sig, "branch premise is over a different signature");
        expect_sentence(only(q.seq.concl, "premise"), gamma, sig, "branch conclusion");
        bool matched = false;
        for (std::size_t k = 0; k < d->ops.size() && !matched; ++k)
          if (!covered[k] && same_set(q.seq.ant, with(G, {d->ops[k]}))) covered[k] = matched = true;
        need(matched, "branch premise " + q.id + " does not assume a disjunct");
      }
      return;
    }
    case Rule::Quant_I: {
      premise_count(n, 1);
      const auto& p = P(0);
      expect_sentence(only(p.seq.concl, "premise"), only(n.seq.concl, "Quant_I"), sig, "premise conclusion");
      for (const auto& e : G) {
        if (e->kind != SentKind::Exists) continue;
        Signature sx;
        try {
          sx = extend_signature(sig, e->vars);
        } catch (const Error&) {
          continue;
        }
        if (!(p.seq.sig == sx)) continue;
        SentSet rest = G;
        rest.erase(e);
        for (const auto& r : rest)
          for (const auto& x : e->vars)
            need(!sentence_mentions(r, x) || sentence_equal(r, e), "antecedent mentions quantified " + x.name);
        if (same_set(p.seq.ant, with(rest, {e->sub}))) return;
      }
      fail("no existential in the antecedent matches the premise");
    }
    case Rule::Quant_E: {
      premise_count(n, 1);
      const auto& p = P(0);
      expect_sentence(only(p.seq.concl, "premise"), only(n.seq.concl, "Quant_E"), sig, "premise conclusion");
      for (const auto& e : p.seq.ant) {
        if (e->kind != SentKind::Exists) continue;
        Signature sx;
        try {
          sx = extend_signature(p.seq.sig, e->vars);
        } catch (const Error&) {
          continue;
        }
        if (!(sx == sig)) continue;
        SentSet rest = p.seq.ant;
        rest.erase(e);
        if (same_set(G, with(rest, {e->sub}))) return;
      }
      fail("no existential in the premise antecedent matches the node");
    }
    case Rule::Subst: {
      premise_count(n, 1);
      same_context(n, P(0));
      const auto& c = only(n.seq.concl, "Subst");
      need(c->kind == SentKind::Exists, "Subst concludes an existential");
      need(n.subst.size() == c->vars.size(), "substitution must cover exactly the quantified variables");
      for (const auto& x : c->vars) {
        auto it = n.subst.find(x);
        need(it != n.subst.end(), "substitution misses variable " + x.name);
        need(it->second->sort == x.sort, "substitution for " + x.name + " has the wrong sort");
        check_term(sig, it->second);
      }
      expect_sentence(only(P(0).seq.concl, "premise"), apply_substitution(n.subst, c->sub), sig, "premise");
      return;
    }
    case Rule::BasicOracle: {
      premise_count(n, 0);
      const auto& c = only(n.seq.concl, "BasicOracle");
      need(is_atomic(c), "BasicOracle concludes an atomic sentence");
      std::vector<Sentence> atoms;
      for (const auto& g : G)
        if (is_atomic(g)) atoms.push_back(g);
      need(decide_basic(sig, atoms, c), "atoms of the antecedent do not basically entail " + show(c, sig));
      return;
    }
    case Rule::GMP:
      check_gmp(n);
      return;
  }
}

// Ways to read body as /\Phi -> gamma. hyp is the antecedent A of the
// implication when there is one; conj marks A = /\{phi_i} read as its conjuncts.
struct GmpSplit {
  std::vector<Sentence> Phi;
  Sentence gamma;
  Sentence hyp;
  bool conj = false;
};

inline std::vector<GmpSplit> gmp_splits(const Sentence& body) {
  std::vector<GmpSplit> out;
  out.push_back({{}, body, nullptr, false});
  if (body->kind == SentKind::Or && body->ops.size() == 2) {
    for (int k = 0; k < 2; ++k) {
      const auto& neg = body->ops[k];
      const auto& gamma = body->ops[1 - k];
      if (neg->kind != SentKind::Not) continue;
      const auto& A = neg->sub;
      out.push_back({{A}, gamma, A, false});
      if (A->kind == SentKind::Not && A->sub->kind == SentKind::Or) {
        std::vector<Sentence> phis;
        bool all = true;
        for (const auto& o : A->sub->ops) {
          if (o->kind != SentKind::Not) all = false;
          else phis.push_back(o->sub);
        }
        if (all) out.push_back({phis, gamma, A, true});
      }
    }
  }
  return out;
}

// Variables and body of forall X . body, or empty X for an unquantified sentence.
inline std::pair<std::vector<Variable>, Sentence> strip_forall(const Sentence& s) {
  if (s->kind == SentKind::Not && s->sub->kind == SentKind::Exists && s->sub->sub->kind == SentKind::Not)
    return {s->sub->vars, s->sub->sub->sub};
  return {{}, s};
}

struct GmpMatch {
  std::vector<Variable> X;
  GmpSplit split;
  Sentence body;
};

inline std::optional<GmpMatch> match_gmp(const ProofNode& n, std::string* why = nullptr) {
  const Signature& sig = n.seq.sig;
  if (n.premises.empty()) {
    if (why) *why = "GMP needs the universal premise";
    return std::nullopt;
  }
  const auto& univ = *n.premises[0]->seq.concl.begin();
  const auto& target = *n.seq.concl.begin();
  auto [X, body] = strip_forall(univ);
  std::set<Variable> dom;
  for (const auto& [v, t] : n.subst) dom.insert(v);
  std::set<Variable> xs(X.begin(), X.end());
  if (dom != xs) {
    if (why) *why = "substitution domain differs from the quantified variables";
    return std::nullopt;
  }
  for (const auto& [v, t] : n.subst) {
    if (t->sort != v.sort) {
      if (why) *why = "substitution for " + v.name + " has the wrong sort";
      return std::nullopt;
    }
  }
  std::string last = "conclusion is not an instance of the implication";
  for (auto& sp : gmp_splits(body)) {
    if (!sentence_equal(apply_substitution(n.subst, sp.gamma), target)) continue;
    if (n.premises.size() != sp.Phi.size() + 1) {
      last = "GMP with " + std::to_string(sp.Phi.size()) + " hypotheses needs " + std::to_string(sp.Phi.size() + 1) +
             " premises";
      continue;
    }
    std::vector<bool> used(n.premises.size(), false);
    bool ok = true;
    for (const auto& phi : sp.Phi) {
      Sentence inst = apply_substitution(n.subst, phi);
      bool hit = false;
      for (std::size_t i = 1; i < n.premises.size() && !hit; ++i)
        if (!used[i] && n.premises[i]->seq.concl.size() == 1 && sentence_equal(*n.premises[i]->seq.concl.begin(), inst))
          used[i] = hit = true;
      if (!hit) {
        ok = false;
        last = "no premise proves " + show(inst, sig);
        break;
      }
    }
    if (ok) return GmpMatch{X, sp, body};
  }
  if (why) *why = last;
  return std::nullopt;
}

inline void check_gmp(const ProofNode& n) {
  const Signature& sig = n.seq.sig;
  only(n.seq.concl, "GMP");
  for (const auto& p : n.premises) {
    same_context(n, *p);
    only(p->seq.concl, "GMP premise");
  }
  for (const auto& [v, t] : n.subst) check_term(sig, t);
  std::string why;
  if (!match_gmp(n, &why)) fail(why);
}

}  // namespace calc

inline Verdict check_node(const Proof& node, const CheckOptions& opt, std::vector<std::string>& path) {
  path.push_back(node->id.empty() ? rule_name(node->rule) : node->id);
  Verdict local;
  try {
    calc::check_local(*node);
    if (!opt.mode.schematic)
      for (const auto& s : node->seq.concl)
        if (sentence_is_symbolic(s) && node->rule != Rule::Star_E)
          calc::fail("symbolic exponent outside a premise family");
  } catch (const Error& e) {
    local = Verdict::invalid(e.what());
    local.path = path;
  }
  if (opt.on_node) opt.on_node(*node, local);
  Verdict v = local;
  if (v.ok()) {
    for (const auto& p : node->premises) {
      v = combine(v, check_node(p, opt, path));
      if (!v.ok()) break;
    }
  }
  if (v.ok() && node->rule == Rule::Star_E && node->family) {
    auto& fam = *node->family;
    if (opt.mode.schematic) {
      v = combine(v, check_node(fam.tmpl, opt, path));
    } else {
      fam.checked.clear();
      for (int k = 0; k <= opt.mode.bound && v.ok(); ++k) {
        try {
          Proof inst = instantiate_proof(fam.tmpl, k);
          Verdict iv = check_node(inst, CheckOptions{CheckMode::bounded(opt.mode.bound), nullptr}, path);
          if (!iv.ok()) iv.reason = "instance kappa = " + std::to_string(k) + ": " + iv.reason;
          v = combine(v, iv);
        } catch (const Error& e) {
          v = Verdict::invalid(std::string("instance kappa = ") + std::to_string(k) + ": " + e.what());
          v.path = path;
        }
        fam.checked.push_back(k);
      }
      if (v.ok()) {
        Verdict b;
        b.status = Status::BoundedValid;
        b.bound = opt.mode.bound;
        v = combine(v, b);
      }
    }
  }
  path.pop_back();
  return v;
}

inline Verdict check_proof(const Proof& root, const CheckOptions& opt) {
  std::vector<std::string> path;
  return check_node(root, opt, path);
}

// Sentences of the root antecedent that leaves actually draw on.
inline SentSet used_premises(const Proof& root) {
  SentSet out;
  std::function<void(const Proof&)> walk = [&](const Proof& p) {
    if (p->rule == Rule::Monotonicity)
      for (const auto& c : p->seq.concl)
        if (root->seq.ant.count(c)) out.insert(c);
    if (p->rule == Rule::BasicOracle) {
      std::vector<Sentence> atoms;
      for (const auto& g : p->seq.ant)
        if (is_atomic(g)) atoms.push_back(g);
      auto r = decide_basic(GroundTheory{p->seq.sig, atoms}, *p->seq.concl.begin());
      for (auto i : r.used)
        if (root->seq.ant.count(atoms[i])) out.insert(atoms[i]);
    }
    for (const auto& c : p->premises) walk(c);
    if (p->family) walk(p->family->tmpl);
  };
  walk(root);
  return out;
}

// ------------------------------------------------------ GMP expansion

namespace calc {

struct Builder {
  Signature sig;
  int counter = 0;
  std::string base;

  std::string id() { return base + "." + std::to_string(++counter); }

  Proof node(const SentSet& ant, const Sentence& goal, Rule r, std::vector<Proof> prem = {}) {
    return make_node(id(), sequent(sig, ant, goal), r, std::move(prem));
  }

  Proof mono(const SentSet& ant, const Sentence& goal) { return node(ant, goal, Rule::Monotonicity); }

  // From small |- phi to big |- phi, small a subset of big.
  Proof weaken(const SentSet& big, const Proof& p) {
    if (same_set(big, p->seq.ant)) return p;
    auto m = make_node(id(), Sequent{sig, big, p->seq.ant}, Rule::Monotonicity);
    return make_node(id(), Sequent{sig, big, p->seq.concl}, Rule::Transitivity, {m, p});
  }

  // big |- bot from a proof of phi and a proof of big u {phi} |- bot.
  Proof cut(const SentSet& big, const Sentence& phi, const Proof& proves_phi, const Proof& bot) {
    SentSet plus = with(big, {phi});
    if (same_set(plus, big)) return bot;
    std::vector<Proof> parts;
    for (const auto& s : big) parts.push_back(mono(big, s));
    parts.push_back(weaken(big, proves_phi));
    auto un = make_node(id(), Sequent{sig, big, plus}, Rule::Union, parts);
    return make_node(id(), Sequent{sig, big, {make_bot()}}, Rule::Transitivity, {un, bot});
  }

  // big |- bot when not phi is in big and phi is proved.
  Proof clash(const SentSet& big, const Sentence& phi, const Proof& proves_phi) {
    auto ne = node(with(big, {phi}), make_bot(), Rule::Neg_E, {mono(big, make_not(phi))});
    return cut(big, phi, proves_phi, ne);
  }
};

}  // namespace calc

// Replaces one GMP node by primitive rules: assume not theta(gamma), refute
// theta(body) by cases, and contradict the universal premise through Subst.
inline Proof expand_gmp(const Proof& n) {
  if (n->rule != Rule::GMP) throw Error("expand_gmp needs a GMP node");
  if (n->seq.concl.size() != 1) throw Error("premise shape mismatch: GMP has one conclusion");
  std::string why;
  auto match = calc::match_gmp(*n, &why);
  if (!match) throw Error("premise shape mismatch: " + why);
  calc::Builder b{n->seq.sig, 0, n->id};
  const SentSet& G = n->seq.ant;
  const Sentence goal = *n->seq.concl.begin();
  const Sentence univ = *n->premises[0]->seq.concl.begin();
  const Substitution& th = n->subst;
  const auto& sp = match->split;

  auto premise_for = [&](const Sentence& s) -> Proof {
    for (std::size_t i = 1; i < n->premises.size(); ++i)
      if (sentence_equal(*n->premises[i]->seq.concl.begin(), s)) return n->premises[i];
    throw Error("premise shape mismatch: no premise proves " + print_sentence(s, n->seq.sig));
  };

  Sentence ng = make_not(goal);
  SentSet G1 = calc::with(G, {ng});
  Sentence tpsi = apply_substitution(th, match->body);
  SentSet G2 = calc::with(G1, {tpsi});

  Proof refute_body;
  if (!sp.hyp) {
    refute_body = b.clash(G2, goal, b.mono(G2, goal));
  } else {
    Sentence thyp = apply_substitution(th, sp.hyp);
    Sentence neg_hyp = make_not(thyp);
    if (tpsi->kind != SentKind::Or || tpsi->ops.size() != 2)
      throw Error("premise shape mismatch: instantiated implication collapses");
    std::vector<Proof> de{b.mono(G2, tpsi)};
    SentSet Gg = calc::with(G2, {goal});
    de.push_back(b.node(Gg, make_bot(), Rule::Neg_E, {b.mono(G2, ng)}));
    SentSet Gh = calc::with(G2, {neg_hyp});
    if (!sp.conj) {
      de.push_back(b.clash(Gh, thyp, premise_for(thyp)));
    } else {
      Sentence disj = thyp->sub;
      std::vector<Proof> inner{b.node(Gh, disj, Rule::Neg_D, {b.mono(Gh, neg_hyp)})};
      for (const auto& nphi : disj->ops) {
        SentSet Gi = calc::with(Gh, {nphi});
        inner.push_back(b.clash(Gi, nphi->sub, premise_for(nphi->sub)));
      }
      de.push_back(b.node(Gh, make_bot(), Rule::Disj_E, inner));
    }
    refute_body = b.node(G2, make_bot(), Rule::Disj_E, de);
  }
  auto ni = b.node(G1, make_not(tpsi), Rule::Neg_I, {refute_body});
  Proof contradiction;
  if (!match->X.empty()) {
    Sentence ex = univ->sub;
    auto sub = b.node(G1, ex, Rule::Subst, {ni});
    sub->subst = th;
    auto ne = b.node(calc::with(G1, {ex}), make_bot(), Rule::Neg_E, {b.weaken(G1, n->premises[0])});
    contradiction = b.cut(G1, ex, sub, ne);
  } else {
    auto ne = b.node(calc::with(G1, {tpsi}), make_bot(), Rule::Neg_E, {ni});
    contradiction = b.cut(G1, tpsi, n->premises[0], ne);
  }
  auto nn = b.node(G, make_not(ng), Rule::Neg_I, {contradiction});
  auto root = b.node(G, goal, Rule::Neg_D, {nn});
  root->id = n->id;
  return root;
}

// Expands every GMP node in the tree.
inline Proof expand_all_gmp(const Proof& p) {
  auto q = std::make_shared<ProofNode>(*p);
  for (auto& c : q->premises) c = expand_all_gmp(c);
  if (q->family) q->family->tmpl = expand_all_gmp(q->family->tmpl);
  if (q->rule == Rule::GMP) return expand_gmp(q);
  return q;
}

inline std::size_t proof_size(const Proof& p) {
  std::size_t n = 1;
  for (const auto& c : p->premises) n += proof_size(c);
  if (p->family) n += proof_size(p->family->tmpl);
  return n;
}

}  // namespace ta
