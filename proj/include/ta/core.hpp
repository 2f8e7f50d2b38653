#pragma once

// Syntax layer: signatures, morphisms, terms, actions, sentences.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ta {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct FuncDecl {
  std::string name;
  std::vector<std::string> arity;
  std::string result;

  auto operator<=>(const FuncDecl&) const = default;
  bool operator==(const FuncDecl&) const = default;
  bool is_constant() const { return arity.empty(); }
};

inline std::string decl_to_string(const FuncDecl& d) {
  std::string s = d.name + " :";
  for (const auto& a : d.arity) s += " " + a;
  return s + " -> " + d.result;
}

// A variable is identified by name and sort; the tag records which
// signature it extends and is carried along but never compared.
struct Variable {
  std::string name;
  std::string sort;
  std::uint64_t tag = 0;

  bool operator==(const Variable& o) const { return name == o.name && sort == o.sort; }
  bool operator<(const Variable& o) const {
    return name != o.name ? name < o.name : sort < o.sort;
  }
};

// Parsing hints for mixfix operators; they do not affect identity.
struct OpSyntax {
  int prec = 41;
  bool right_assoc = false;
};

class Signature {
 public:
  std::set<std::string> sorts;
  std::set<FuncDecl> funcs;
  std::set<FuncDecl> mono;
  std::set<std::string> labels;
  std::set<Variable> vars;
  std::map<std::string, OpSyntax> syntax;

  bool operator==(const Signature& o) const {
    return sorts == o.sorts && funcs == o.funcs && mono == o.mono && labels == o.labels;
  }

  void add_sort(const std::string& s) { sorts.insert(s); }
  void add_label(const std::string& l) { labels.insert(l); }
  void add_func(const FuncDecl& d, bool is_mono = false) {
    if (funcs.count(d)) throw Error("duplicate declaration " + decl_to_string(d));
    funcs.insert(d);
    if (is_mono) mono.insert(d);
  }

  bool has_func(const FuncDecl& d) const { return funcs.count(d) > 0; }
  bool is_mono(const FuncDecl& d) const { return mono.count(d) > 0; }
  bool is_var(const std::string& name, const std::string& sort) const {
    return vars.count(Variable{name, sort, 0}) > 0;
  }

  std::vector<FuncDecl> lookup(const std::string& name) const {
    std::vector<FuncDecl> out;
    for (auto it = funcs.lower_bound(FuncDecl{name, {}, ""}); it != funcs.end() && it->name == name; ++it)
      out.push_back(*it);
    return out;
  }

  std::vector<FuncDecl> constants_of(const std::string& sort) const {
    std::vector<FuncDecl> out;
    for (const auto& f : funcs)
      if (f.arity.empty() && f.result == sort) out.push_back(f);
    return out;
  }

  void validate() const {
    for (const auto& f : funcs) {
      for (const auto& a : f.arity)
        if (!sorts.count(a)) throw Error("unknown sort " + a + " in " + decl_to_string(f));
      if (!sorts.count(f.result)) throw Error("unknown sort " + f.result + " in " + decl_to_string(f));
    }
    for (const auto& m : mono)
      if (!funcs.count(m)) throw Error("monotonic symbol not declared: " + decl_to_string(m));
  }

  bool included_in(const Signature& o) const {
    auto sub = [](const auto& a, const auto& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); };
    return sub(sorts, o.sorts) && sub(funcs, o.funcs) && sub(mono, o.mono) && sub(labels, o.labels);
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& s : sorts) h = fnv1a("S" + s, h);
    for (const auto& f : funcs) {
      h = fnv1a("F" + f.name + ">" + f.result, h);
      for (const auto& a : f.arity) h = fnv1a("," + a, h);
    }
    for (const auto& f : mono) h = fnv1a("M" + f.name, h);
    for (const auto& l : labels) h = fnv1a("L" + l, h);
    return h;
  }
};

// Σ[X]: the variables become constants of their sorts.
inline Signature extend_signature(const Signature& sig, const std::vector<Variable>& X) {
  Signature out = sig;
  std::uint64_t tag = sig.fingerprint();
  for (const auto& x : X) {
    if (!sig.sorts.count(x.sort)) throw Error("variable " + x.name + " has unknown sort " + x.sort);
    FuncDecl d{x.name, {}, x.sort};
    if (out.funcs.count(d)) throw Error("variable " + x.name + " collides with a constant of sort " + x.sort);
    out.funcs.insert(d);
    out.vars.insert(Variable{x.name, x.sort, tag});
  }
  return out;
}

inline Signature signature_union(const Signature& a, const Signature& b) {
  Signature out = a;
  out.sorts.insert(b.sorts.begin(), b.sorts.end());
  out.funcs.insert(b.funcs.begin(), b.funcs.end());
  out.mono.insert(b.mono.begin(), b.mono.end());
  out.labels.insert(b.labels.begin(), b.labels.end());
  out.vars.insert(b.vars.begin(), b.vars.end());
  for (const auto& [k, v] : b.syntax) out.syntax.emplace(k, v);
  return out;
}

// ---------------------------------------------------------------- terms

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  std::string name;
  std::string sort;
  std::vector<Term> args;
  bool is_var = false;
  std::uint64_t tag = 0;
  std::size_t size = 1;
  std::size_t depth = 1;
};

inline Term make_app(const std::string& name, const std::string& sort, std::vector<Term> args = {}) {
  auto n = std::make_shared<TermNode>();
  n->name = name;
  n->sort = sort;
  std::size_t sz = 1, dp = 0;
  for (const auto& a : args) {
    sz += a->size;
    dp = std::max(dp, a->depth);
  }
  n->size = sz;
  n->depth = dp + 1;
  n->args = std::move(args);
  return n;
}

inline Term make_var(const Variable& v) {
  auto n = std::make_shared<TermNode>();
  n->name = v.name;
  n->sort = v.sort;
  n->is_var = true;
  n->tag = v.tag;
  return n;
}

inline Term make_app(const FuncDecl& d, std::vector<Term> args) {
  if (args.size() != d.arity.size()) throw Error("arity mismatch for " + d.name);
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i]->sort != d.arity[i])
      throw Error("argument " + std::to_string(i + 1) + " of " + d.name + " has sort " + args[i]->sort +
                  ", expected " + d.arity[i]);
  return make_app(d.name, d.result, std::move(args));
}

inline FuncDecl decl_of(const Term& t) {
  FuncDecl d{t->name, {}, t->sort};
  for (const auto& a : t->args) d.arity.push_back(a->sort);
  return d;
}

// Bound-variable environment used by alpha-aware comparison.
using BoundEnv = std::vector<Variable>;

inline int bound_index(const BoundEnv& env, const TermNode& t) {
  if (!t.args.empty()) return -1;
  for (int i = static_cast<int>(env.size()) - 1; i >= 0; --i)
    if (env[i].name == t.name && env[i].sort == t.sort) return i;
  return -1;
}

inline int cmp_str(const std::string& a, const std::string& b) { return a < b ? -1 : (b < a ? 1 : 0); }

// Canonical term order: size, then head, then sort, then arguments.
inline int compare_terms(const Term& a, const Term& b, const BoundEnv& ea, const BoundEnv& eb) {
  if (a == b && ea.empty() && eb.empty()) return 0;
  if (a->size != b->size) return a->size < b->size ? -1 : 1;
  int ia = bound_index(ea, *a), ib = bound_index(eb, *b);
  if (ia >= 0 || ib >= 0) {
    if (ia < 0) return 1;
    if (ib < 0) return -1;
    if (ia != ib) return ia < ib ? -1 : 1;
    return 0;
  }
  if (int c = cmp_str(a->name, b->name)) return c;
  if (int c = cmp_str(a->sort, b->sort)) return c;
  if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (int c = compare_terms(a->args[i], b->args[i], ea, eb)) return c;
  return 0;
}

inline int compare_terms(const Term& a, const Term& b) {
  static const BoundEnv empty;
  return compare_terms(a, b, empty, empty);
}

struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare_terms(a, b) < 0; }
};

inline bool term_equal(const Term& a, const Term& b) { return compare_terms(a, b) == 0; }

inline bool term_is_ground(const Term& t) {
  if (t->is_var) return false;
  for (const auto& a : t->args)
    if (!term_is_ground(a)) return false;
  return true;
}

inline void collect_subterms(const Term& t, std::set<Term, TermLess>& out) {
  if (!out.insert(t).second) return;
  for (const auto& a : t->args) collect_subterms(a, out);
}

inline bool term_mentions(const Term& t, const std::string& name, const std::string& sort) {
  if (t->args.empty() && t->name == name && t->sort == sort) return true;
  for (const auto& a : t->args)
    if (term_mentions(a, name, sort)) return true;
  return false;
}

// Well-formedness over a signature.
inline void check_term(const Signature& sig, const Term& t) {
  for (const auto& a : t->args) check_term(sig, a);
  if (!sig.has_func(decl_of(t))) throw Error("undeclared symbol " + decl_to_string(decl_of(t)));
}

// -------------------------------------------------------------- actions

enum class ActKind { Label, Seq, Union, Star, Pow };

struct ActionNode;
using Action = std::shared_ptr<const ActionNode>;

// Pow is kept only for a^0 and for symbolic exponents kappa+k with k <= 0;
// every positive constant power is unfolded into right-nested composition.
struct ActionNode {
  ActKind kind = ActKind::Label;
  std::string label;
  Action a, b;
  int exp = 0;
  bool symbolic = false;
  std::size_t size = 1;
};

inline Action make_label(const std::string& l) {
  auto n = std::make_shared<ActionNode>();
  n->label = l;
  return n;
}

inline Action make_binary(ActKind k, Action x, Action y) {
  auto n = std::make_shared<ActionNode>();
  n->kind = k;
  n->size = 1 + x->size + y->size;
  n->a = std::move(x);
  n->b = std::move(y);
  return n;
}

inline Action make_seq(Action x, Action y) { return make_binary(ActKind::Seq, std::move(x), std::move(y)); }
inline Action make_union(Action x, Action y) { return make_binary(ActKind::Union, std::move(x), std::move(y)); }

inline Action make_star(Action x) {
  auto n = std::make_shared<ActionNode>();
  n->kind = ActKind::Star;
  n->size = 1 + x->size;
  n->a = std::move(x);
  return n;
}

inline Action make_pow_node(Action x, int exp, bool symbolic) {
  auto n = std::make_shared<ActionNode>();
  n->kind = ActKind::Pow;
  n->size = 1 + x->size;
  n->a = std::move(x);
  n->exp = exp;
  n->symbolic = symbolic;
  return n;
}

inline Action make_power(const Action& x, int n) {
  if (n < 0) throw Error("negative action exponent");
  if (n == 0) return make_pow_node(x, 0, false);
  if (n == 1) return x;
  return make_seq(x, make_power(x, n - 1));
}

// a^(kappa+k)
inline Action make_power_sym(const Action& x, int k) {
  if (k > 0) return make_seq(x, make_power_sym(x, k - 1));
  return make_pow_node(x, k, true);
}

inline int compare_actions(const Action& x, const Action& y) {
  if (x == y) return 0;
  if (x->size != y->size) return x->size < y->size ? -1 : 1;
  if (x->kind != y->kind) return x->kind < y->kind ? -1 : 1;
  switch (x->kind) {
    case ActKind::Label:
      return cmp_str(x->label, y->label);
    case ActKind::Seq:
    case ActKind::Union:
      if (int c = compare_actions(x->a, y->a)) return c;
      return compare_actions(x->b, y->b);
    case ActKind::Star:
      return compare_actions(x->a, y->a);
    case ActKind::Pow:
      if (x->symbolic != y->symbolic) return x->symbolic ? 1 : -1;
      if (x->exp != y->exp) return x->exp < y->exp ? -1 : 1;
      return compare_actions(x->a, y->a);
  }
  return 0;
}

inline bool action_equal(const Action& x, const Action& y) { return compare_actions(x, y) == 0; }

inline bool action_is_symbolic(const Action& x) {
  if (!x) return false;
  if (x->kind == ActKind::Pow && x->symbolic) return true;
  return action_is_symbolic(x->a) || action_is_symbolic(x->b);
}

inline void collect_labels(const Action& x, std::set<std::string>& out) {
  if (!x) return;
  if (x->kind == ActKind::Label) out.insert(x->label);
  collect_labels(x->a, out);
  collect_labels(x->b, out);
}

inline Action instantiate_action(const Action& x, int kappa) {
  switch (x->kind) {
    case ActKind::Label:
      return x;
    case ActKind::Seq:
      return make_seq(instantiate_action(x->a, kappa), instantiate_action(x->b, kappa));
    case ActKind::Union:
      return make_union(instantiate_action(x->a, kappa), instantiate_action(x->b, kappa));
    case ActKind::Star:
      return make_star(instantiate_action(x->a, kappa));
    case ActKind::Pow:
      if (!x->symbolic) return make_pow_node(instantiate_action(x->a, kappa), x->exp, false);
      if (kappa + x->exp < 0) throw Error("exponent kappa" + std::to_string(x->exp) + " negative at kappa=" + std::to_string(kappa));
      return make_power(instantiate_action(x->a, kappa), kappa + x->exp);
  }
  return x;
}

// ------------------------------------------------------------ sentences

enum class SentKind { Eq, Trans, Not, Or, Exists };

struct SentenceNode;
using Sentence = std::shared_ptr<const SentenceNode>;

struct SentenceNode {
  SentKind kind = SentKind::Eq;
  Term l, r;
  Action act;
  Sentence sub;
  std::vector<Sentence> ops;
  std::vector<Variable> vars;
  std::size_t size = 1;
};

int compare_sentences(const Sentence& a, const Sentence& b, BoundEnv& ea, BoundEnv& eb);

inline int compare_sentences(const Sentence& a, const Sentence& b) {
  BoundEnv ea, eb;
  return compare_sentences(a, b, ea, eb);
}

struct SentLess {
  bool operator()(const Sentence& a, const Sentence& b) const { return compare_sentences(a, b) < 0; }
};

using SentSet = std::set<Sentence, SentLess>;

inline bool sentence_equal(const Sentence& a, const Sentence& b) { return compare_sentences(a, b) == 0; }

inline Sentence make_eq(Term l, Term r) {
  if (l->sort != r->sort) throw Error("equation between sorts " + l->sort + " and " + r->sort);
  auto n = std::make_shared<SentenceNode>();
  n->kind = SentKind::Eq;
  n->size = 1 + l->size + r->size;
  n->l = std::move(l);
  n->r = std::move(r);
  return n;
}

// t1 =[a^0]=> t2 is the equation t1 = t2.
inline Sentence make_trans(Term l, Action a, Term r) {
  if (a->kind == ActKind::Pow && !a->symbolic && a->exp == 0) return make_eq(std::move(l), std::move(r));
  if (l->sort != r->sort) throw Error("transition between sorts " + l->sort + " and " + r->sort);
  auto n = std::make_shared<SentenceNode>();
  n->kind = SentKind::Trans;
  n->size = 1 + l->size + r->size + a->size;
  n->l = std::move(l);
  n->r = std::move(r);
  n->act = std::move(a);
  return n;
}

inline Sentence make_not(Sentence s) {
  auto n = std::make_shared<SentenceNode>();
  n->kind = SentKind::Not;
  n->size = 1 + s->size;
  n->sub = std::move(s);
  return n;
}

inline Sentence make_or(std::vector<Sentence> ops) {
  std::sort(ops.begin(), ops.end(), SentLess{});
  ops.erase(std::unique(ops.begin(), ops.end(), [](const Sentence& a, const Sentence& b) { return sentence_equal(a, b); }),
            ops.end());
  auto n = std::make_shared<SentenceNode>();
  n->kind = SentKind::Or;
  n->size = 1;
  for (const auto& o : ops) n->size += o->size;
  n->ops = std::move(ops);
  return n;
}

inline Sentence make_exists(std::vector<Variable> X, Sentence body) {
  std::sort(X.begin(), X.end());
  for (std::size_t i = 1; i < X.size(); ++i)
    if (X[i] == X[i - 1]) throw Error("repeated variable " + X[i].name);
  auto n = std::make_shared<SentenceNode>();
  n->kind = SentKind::Exists;
  n->size = X.size() + body->size;
  n->vars = std::move(X);
  n->sub = std::move(body);
  return n;
}

inline Sentence make_bot() { return make_or({}); }
inline Sentence make_top() { return make_not(make_bot()); }

inline Sentence make_and(const std::vector<Sentence>& ops) {
  std::vector<Sentence> neg;
  for (const auto& o : ops) neg.push_back(make_not(o));
  return make_not(make_or(std::move(neg)));
}

inline Sentence make_implies(const Sentence& a, const Sentence& b) { return make_or({make_not(a), b}); }

inline Sentence make_forall(std::vector<Variable> X, const Sentence& body) {
  return make_not(make_exists(std::move(X), make_not(body)));
}

inline bool is_atomic(const Sentence& s) {
  return s->kind == SentKind::Eq || (s->kind == SentKind::Trans && s->act->kind == ActKind::Label);
}

inline bool is_bot(const Sentence& s) { return s->kind == SentKind::Or && s->ops.empty(); }

inline int compare_sorted_ops(const std::vector<Sentence>& a, const std::vector<Sentence>& b, BoundEnv& ea, BoundEnv& eb) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (ea.empty() && eb.empty()) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      BoundEnv x, y;
      if (int c = compare_sentences(a[i], b[i], x, y)) return c;
    }
    return 0;
  }
  // Under binders the stored order depends on bound names, so re-sort.
  auto sa = a, sb = b;
  std::sort(sa.begin(), sa.end(), [&](const Sentence& x, const Sentence& y) {
    BoundEnv e1 = ea, e2 = ea;
    return compare_sentences(x, y, e1, e2) < 0;
  });
  std::sort(sb.begin(), sb.end(), [&](const Sentence& x, const Sentence& y) {
    BoundEnv e1 = eb, e2 = eb;
    return compare_sentences(x, y, e1, e2) < 0;
  });
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (int c = compare_sentences(sa[i], sb[i], ea, eb)) return c;
  return 0;
}

inline int compare_sentences(const Sentence& a, const Sentence& b, BoundEnv& ea, BoundEnv& eb) {
  if (a == b && ea.empty() && eb.empty()) return 0;
  if (a->size != b->size) return a->size < b->size ? -1 : 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  switch (a->kind) {
    case SentKind::Eq:
      if (int c = compare_terms(a->l, b->l, ea, eb)) return c;
      return compare_terms(a->r, b->r, ea, eb);
    case SentKind::Trans:
      if (int c = compare_terms(a->l, b->l, ea, eb)) return c;
      if (int c = compare_actions(a->act, b->act)) return c;
      return compare_terms(a->r, b->r, ea, eb);
    case SentKind::Not:
      return compare_sentences(a->sub, b->sub, ea, eb);
    case SentKind::Or:
      return compare_sorted_ops(a->ops, b->ops, ea, eb);
    case SentKind::Exists: {
      if (a->vars.size() != b->vars.size()) return a->vars.size() < b->vars.size() ? -1 : 1;
      for (std::size_t i = 0; i < a->vars.size(); ++i)
        if (int c = cmp_str(a->vars[i].sort, b->vars[i].sort)) return c;
      std::size_t na = ea.size(), nb = eb.size();
      ea.insert(ea.end(), a->vars.begin(), a->vars.end());
      eb.insert(eb.end(), b->vars.begin(), b->vars.end());
      int c = compare_sentences(a->sub, b->sub, ea, eb);
      ea.resize(na);
      eb.resize(nb);
      return c;
    }
  }
  return 0;
}

inline bool sentence_mentions(const Sentence& s, const std::string& name, const std::string& sort) {
  switch (s->kind) {
    case SentKind::Eq:
    case SentKind::Trans:
      return term_mentions(s->l, name, sort) || term_mentions(s->r, name, sort);
    case SentKind::Not:
      return sentence_mentions(s->sub, name, sort);
    case SentKind::Or:
      for (const auto& o : s->ops)
        if (sentence_mentions(o, name, sort)) return true;
      return false;
    case SentKind::Exists:
      for (const auto& v : s->vars)
        if (v.name == name && v.sort == sort) return false;
      return sentence_mentions(s->sub, name, sort);
  }
  return false;
}

inline bool sentence_mentions(const Sentence& s, const Variable& v) { return sentence_mentions(s, v.name, v.sort); }

inline bool sentence_is_symbolic(const Sentence& s) {
  switch (s->kind) {
    case SentKind::Eq:
      return false;
    case SentKind::Trans:
      return action_is_symbolic(s->act);
    case SentKind::Not:
    case SentKind::Exists:
      return sentence_is_symbolic(s->sub);
    case SentKind::Or:
      for (const auto& o : s->ops)
        if (sentence_is_symbolic(o)) return true;
      return false;
  }
  return false;
}

inline Sentence instantiate_sentence(const Sentence& s, int kappa) {
  switch (s->kind) {
    case SentKind::Eq:
      return s;
    case SentKind::Trans:
      return make_trans(s->l, instantiate_action(s->act, kappa), s->r);
    case SentKind::Not:
      return make_not(instantiate_sentence(s->sub, kappa));
    case SentKind::Or: {
      std::vector<Sentence> ops;
      for (const auto& o : s->ops) ops.push_back(instantiate_sentence(o, kappa));
      return make_or(std::move(ops));
    }
    case SentKind::Exists:
      return make_exists(s->vars, instantiate_sentence(s->sub, kappa));
  }
  return s;
}

// Number of connectives (not, or, exists) and composite action nodes.
inline std::size_t sentence_depth(const Sentence& s) {
  switch (s->kind) {
    case SentKind::Eq:
    case SentKind::Trans:
      return 0;
    case SentKind::Not:
    case SentKind::Exists:
      return 1 + sentence_depth(s->sub);
    case SentKind::Or: {
      std::size_t d = 0;
      for (const auto& o : s->ops) d = std::max(d, sentence_depth(o));
      return 1 + d;
    }
  }
  return 0;
}

inline void check_action(const Signature& sig, const Action& a) {
  std::set<std::string> ls;
  collect_labels(a, ls);
  for (const auto& l : ls)
    if (!sig.labels.count(l)) throw Error("undeclared label " + l);
}

// Well-formedness over a signature; bodies of existentials are checked over Σ[X].
inline void check_sentence(const Signature& sig, const Sentence& s) {
  switch (s->kind) {
    case SentKind::Eq:
      check_term(sig, s->l);
      check_term(sig, s->r);
      return;
    case SentKind::Trans:
      check_term(sig, s->l);
      check_term(sig, s->r);
      check_action(sig, s->act);
      return;
    case SentKind::Not:
      check_sentence(sig, s->sub);
      return;
    case SentKind::Or:
      for (const auto& o : s->ops) check_sentence(sig, o);
      return;
    case SentKind::Exists:
      check_sentence(extend_signature(sig, s->vars), s->sub);
      return;
  }
}

// -------------------------------------------------------- substitutions

using Substitution = std::map<Variable, Term>;

inline Term substitute_term(const Term& t, const Substitution& theta, const std::set<Variable>& shadow) {
  if (t->args.empty()) {
    Variable key{t->name, t->sort, 0};
    auto it = theta.find(key);
    if (it != theta.end() && !shadow.count(key) && t->is_var) return it->second;
    return t;
  }
  std::vector<Term> args;
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(substitute_term(a, theta, shadow));
    changed = changed || args.back() != a;
  }
  if (!changed) return t;
  return make_app(t->name, t->sort, std::move(args));
}

inline Sentence substitute_sentence(const Sentence& s, const Substitution& theta, std::set<Variable>& shadow) {
  switch (s->kind) {
    case SentKind::Eq:
      return make_eq(substitute_term(s->l, theta, shadow), substitute_term(s->r, theta, shadow));
    case SentKind::Trans:
      return make_trans(substitute_term(s->l, theta, shadow), s->act, substitute_term(s->r, theta, shadow));
    case SentKind::Not:
      return make_not(substitute_sentence(s->sub, theta, shadow));
    case SentKind::Or: {
      std::vector<Sentence> ops;
      for (const auto& o : s->ops) ops.push_back(substitute_sentence(o, theta, shadow));
      return make_or(std::move(ops));
    }
    case SentKind::Exists: {
      std::vector<Variable> added;
      for (const auto& v : s->vars)
        if (shadow.insert(v).second) added.push_back(v);
      auto body = substitute_sentence(s->sub, theta, shadow);
      for (const auto& v : added) shadow.erase(v);
      return make_exists(s->vars, body);
    }
  }
  return s;
}

inline void check_substitution(const Substitution& theta) {
  for (const auto& [x, t] : theta)
    if (t->sort != x.sort)
      throw Error("substitution for variable " + x.name + " has sort " + t->sort + ", expected " + x.sort);
}

inline Sentence apply_substitution(const Substitution& theta, const Sentence& phi) {
  check_substitution(theta);
  std::set<Variable> shadow;
  return substitute_sentence(phi, theta, shadow);
}

inline Term apply_substitution(const Substitution& theta, const Term& t) {
  check_substitution(theta);
  return substitute_term(t, theta, {});
}

// ------------------------------------------------------------ morphisms

struct SignatureMorphism {
  Signature source;
  Signature target;
  std::map<std::string, std::string> sort_map;
  std::map<FuncDecl, FuncDecl> func_map;
  std::map<std::string, std::string> label_map;

  std::string map_sort(const std::string& s) const {
    auto it = sort_map.find(s);
    if (it == sort_map.end()) throw Error("morphism does not map sort " + s);
    return it->second;
  }
  std::string map_label(const std::string& l) const {
    auto it = label_map.find(l);
    if (it == label_map.end()) throw Error("morphism does not map label " + l);
    return it->second;
  }
  FuncDecl map_func(const FuncDecl& d) const {
    auto it = func_map.find(d);
    if (it == func_map.end()) throw Error("morphism does not map " + decl_to_string(d));
    return it->second;
  }

  void validate() const {
    for (const auto& s : source.sorts)
      if (!target.sorts.count(map_sort(s))) throw Error("sort image " + map_sort(s) + " not in target");
    for (const auto& l : source.labels)
      if (!target.labels.count(map_label(l))) throw Error("label image " + map_label(l) + " not in target");
    for (const auto& f : source.funcs) {
      FuncDecl g = map_func(f);
      if (!target.funcs.count(g)) throw Error("image " + decl_to_string(g) + " not declared in target");
      if (g.arity.size() != f.arity.size() || g.result != map_sort(f.result))
        throw Error("morphism is not rank-compatible on " + f.name);
      for (std::size_t i = 0; i < f.arity.size(); ++i)
        if (g.arity[i] != map_sort(f.arity[i])) throw Error("morphism is not rank-compatible on " + f.name);
      if (source.mono.count(f) && !target.mono.count(g))
        throw Error("monotonic symbol " + f.name + " mapped to non-monotonic " + g.name);
    }
  }
};

inline SignatureMorphism identity_morphism(const Signature& sig) {
  SignatureMorphism m{sig, sig, {}, {}, {}};
  for (const auto& s : sig.sorts) m.sort_map[s] = s;
  for (const auto& f : sig.funcs) m.func_map[f] = f;
  for (const auto& l : sig.labels) m.label_map[l] = l;
  return m;
}

inline SignatureMorphism inclusion_morphism(const Signature& sub, const Signature& super) {
  if (!sub.included_in(super)) throw Error("signature is not included in the target");
  SignatureMorphism m = identity_morphism(sub);
  m.target = super;
  return m;
}

// second ∘ first
inline SignatureMorphism compose(const SignatureMorphism& first, const SignatureMorphism& second) {
  SignatureMorphism m{first.source, second.target, {}, {}, {}};
  for (const auto& [s, t] : first.sort_map) m.sort_map[s] = second.map_sort(t);
  for (const auto& [f, g] : first.func_map) m.func_map[f] = second.map_func(g);
  for (const auto& [l, k] : first.label_map) m.label_map[l] = second.map_label(k);
  return m;
}

inline Action translate_action(const SignatureMorphism& chi, const Action& a) {
  switch (a->kind) {
    case ActKind::Label:
      return make_label(chi.map_label(a->label));
    case ActKind::Seq:
      return make_seq(translate_action(chi, a->a), translate_action(chi, a->b));
    case ActKind::Union:
      return make_union(translate_action(chi, a->a), translate_action(chi, a->b));
    case ActKind::Star:
      return make_star(translate_action(chi, a->a));
    case ActKind::Pow:
      return make_pow_node(translate_action(chi, a->a), a->exp, a->symbolic);
  }
  return a;
}

namespace detail {

// Bound variables of the source map to (possibly renamed) bound variables of the target.
using VarRename = std::map<Variable, Variable>;

inline Term translate_term_env(const SignatureMorphism& chi, const Term& t, const VarRename& ren) {
  if (t->args.empty()) {
    auto it = ren.find(Variable{t->name, t->sort, 0});
    if (it != ren.end()) return make_var(it->second);
  }
  std::vector<Term> args;
  for (const auto& a : t->args) args.push_back(translate_term_env(chi, a, ren));
  FuncDecl g = chi.map_func(decl_of(t));
  if (t->is_var && chi.target.is_var(g.name, g.result)) {
    return make_var(Variable{g.name, g.result, t->tag});
  }
  return make_app(g.name, g.result, std::move(args));
}

inline bool name_taken(const Signature& sig, const VarRename& ren, const std::string& name, const std::string& sort) {
  if (sig.has_func(FuncDecl{name, {}, sort})) return true;
  for (const auto& [k, v] : ren)
    if (v.name == name && v.sort == sort) return true;
  return false;
}

inline Sentence translate_sentence_env(const SignatureMorphism& chi, const Sentence& s, VarRename& ren,
                                       std::uint64_t tag) {
  switch (s->kind) {
    case SentKind::Eq:
      return make_eq(translate_term_env(chi, s->l, ren), translate_term_env(chi, s->r, ren));
    case SentKind::Trans:
      return make_trans(translate_term_env(chi, s->l, ren), translate_action(chi, s->act),
                        translate_term_env(chi, s->r, ren));
    case SentKind::Not:
      return make_not(translate_sentence_env(chi, s->sub, ren, tag));
    case SentKind::Or: {
      std::vector<Sentence> ops;
      for (const auto& o : s->ops) ops.push_back(translate_sentence_env(chi, o, ren, tag));
      return make_or(std::move(ops));
    }
    case SentKind::Exists: {
      VarRename saved = ren;
      std::vector<Variable> X2;
      for (const auto& x : s->vars) {
        std::string sort = chi.map_sort(x.sort);
        std::string name = x.name;
        for (int k = 1; name_taken(chi.target, ren, name, sort); ++k) name = x.name + "_" + std::to_string(k);
        Variable y{name, sort, tag};
        ren[Variable{x.name, x.sort, 0}] = y;
        X2.push_back(y);
      }
      auto body = translate_sentence_env(chi, s->sub, ren, tag);
      ren = saved;
      return make_exists(std::move(X2), body);
    }
  }
  return s;
}

}  // namespace detail

inline Term translate_term(const SignatureMorphism& chi, const Term& t) {
  return detail::translate_term_env(chi, t, {});
}

inline Sentence translate_sentence(const SignatureMorphism& chi, const Sentence& phi) {
  detail::VarRename ren;
  return detail::translate_sentence_env(chi, phi, ren, chi.target.fingerprint());
}

inline SentSet translate_set(const SignatureMorphism& chi, const SentSet& S) {
  SentSet out;
  for (const auto& s : S) out.insert(translate_sentence(chi, s));
  return out;
}

// χ extended to Σ[X] → Σ'[X'].
inline SignatureMorphism extend_morphism(const SignatureMorphism& chi, const std::vector<Variable>& X,
                                         std::vector<Variable>* image = nullptr) {
  std::vector<Variable> X2;
  for (const auto& x : X) X2.push_back(Variable{x.name, chi.map_sort(x.sort), 0});
  SignatureMorphism m = chi;
  m.source = extend_signature(chi.source, X);
  m.target = extend_signature(chi.target, X2);
  for (std::size_t i = 0; i < X.size(); ++i)
    m.func_map[FuncDecl{X[i].name, {}, X[i].sort}] = FuncDecl{X2[i].name, {}, X2[i].sort};
  if (image) *image = X2;
  return m;
}

// ---------------------------------------------------- ground term universe

struct TermUniverse {
  std::map<std::string, std::vector<Term>> by_sort;
  bool complete = true;            // no new terms would appear one level deeper
  std::string unbounded_sort;      // a sort still growing at the bound
};

// All ground terms of depth <= max_depth.
inline TermUniverse enumerate_terms(const Signature& sig, std::size_t max_depth) {
  TermUniverse u;
  std::map<std::string, std::set<Term, TermLess>> have;
  for (const auto& s : sig.sorts) have[s];
  auto grow = [&](std::map<std::string, std::set<Term, TermLess>>& cur) {
    std::map<std::string, std::vector<Term>> fresh;
    for (const auto& f : sig.funcs) {
      std::vector<std::vector<Term>> pools;
      bool empty = false;
      for (const auto& a : f.arity) {
        pools.emplace_back(cur[a].begin(), cur[a].end());
        if (pools.back().empty()) empty = true;
      }
      if (empty) continue;
      std::vector<std::size_t> idx(pools.size(), 0);
      while (true) {
        std::vector<Term> args;
        for (std::size_t i = 0; i < pools.size(); ++i) args.push_back(pools[i][idx[i]]);
        Term t = make_app(f.name, f.result, std::move(args));
        if (sig.is_var(f.name, f.result) && f.arity.empty()) t = make_var(Variable{f.name, f.result, 0});
        if (!cur[f.result].count(t)) fresh[f.result].push_back(t);
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == pools[k].size()) idx[k++] = 0;
        if (k == idx.size()) break;
      }
    }
    return fresh;
  };
  for (std::size_t d = 0; d < max_depth; ++d) {
    auto fresh = grow(have);
    bool any = false;
    for (auto& [s, v] : fresh)
      for (auto& t : v) any = have[s].insert(t).second || any;
    if (!any) break;
  }
  auto probe = grow(have);
  for (auto& [s, v] : probe)
    if (!v.empty()) {
      u.complete = false;
      if (u.unbounded_sort.empty()) u.unbounded_sort = s;
    }
  for (auto& [s, set] : have) u.by_sort[s] = std::vector<Term>(set.begin(), set.end());
  return u;
}

}  // namespace ta
