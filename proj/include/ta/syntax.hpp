#pragma once

// Text syntax for terms, actions, sentences and .ta theories.

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ta/core.hpp"
#include "ta/lexer.hpp"

namespace ta {

struct NamedSentence {
  std::string name;
  Sentence sentence;
};

struct Theory {
  Signature sig;
  std::vector<NamedSentence> axioms;

  SentSet axiom_set() const {
    SentSet s;
    for (const auto& a : axioms) s.insert(a.sentence);
    return s;
  }
  std::optional<Sentence> axiom(const std::string& name) const {
    for (const auto& a : axioms)
      if (a.name == name) return a.sentence;
    return std::nullopt;
  }
};

// --------------------------------------------------------------- mixfix

inline bool is_infix_name(const std::string& n) { return n.size() > 2 && n.front() == '_' && n.back() == '_'; }
inline bool is_prefix_name(const std::string& n) { return n.size() > 1 && n.back() == '_' && n.front() != '_'; }
inline std::string infix_core(const std::string& n) { return n.substr(1, n.size() - 2); }
inline std::string prefix_core(const std::string& n) { return n.substr(0, n.size() - 1); }

inline int op_binding(const Signature& sig, const std::string& name, bool* right = nullptr) {
  auto it = sig.syntax.find(name);
  OpSyntax s = it == sig.syntax.end() ? OpSyntax{} : it->second;
  if (right) *right = s.right_assoc;
  return 1000 - s.prec;
}

inline const std::set<std::string>& reserved_words() {
  static const std::set<std::string> r{"not", "exists", "forall", "bot", "top"};
  return r;
}

// ------------------------------------------------------------- printing

inline std::string print_term(const Term& t, const Signature* sig = nullptr, int ctx_bp = 0);

inline std::string print_term(const Term& t, const Signature* sig, int ctx_bp) {
  if (is_infix_name(t->name) && t->args.size() == 2) {
    bool right = false;
    int bp = sig ? op_binding(*sig, t->name, &right) : 959;
    std::string op = infix_core(t->name);
    std::string s = print_term(t->args[0], sig, right ? bp + 1 : bp) + " " + op + " " +
                    print_term(t->args[1], sig, right ? bp : bp + 1);
    return bp < ctx_bp ? "(" + s + ")" : s;
  }
  if (is_prefix_name(t->name) && t->args.size() == 1) {
    std::string s = prefix_core(t->name) + " " + print_term(t->args[0], sig, 2000);
    return ctx_bp > 1999 ? "(" + s + ")" : s;
  }
  if (t->args.empty()) return t->name;
  std::string s = t->name + "(";
  for (std::size_t i = 0; i < t->args.size(); ++i) s += (i ? ", " : "") + print_term(t->args[i], sig, 0);
  return s + ")";
}

inline std::string print_action(const Action& a, int ctx = 0) {
  // ctx: 0 union, 1 seq-left, 2 seq-right / union operand, 3 postfix operand
  switch (a->kind) {
    case ActKind::Label:
      return a->label;
    case ActKind::Union: {
      std::string s = print_action(a->a, 0) + " | " + print_action(a->b, 2);
      return ctx > 0 ? "(" + s + ")" : s;
    }
    case ActKind::Seq: {
      std::string s = print_action(a->a, 1) + " ; " + print_action(a->b, 3);
      return ctx > 1 ? "(" + s + ")" : s;
    }
    case ActKind::Star:
      return print_action(a->a, 3) + "*";
    case ActKind::Pow: {
      std::string e = a->symbolic ? (a->exp == 0 ? "kappa" : "kappa" + std::to_string(a->exp)) : std::to_string(a->exp);
      return print_action(a->a, 3) + "^" + e;
    }
  }
  return "?";
}

inline std::string print_vars(const std::vector<Variable>& X) {
  std::string s = "{";
  for (std::size_t i = 0; i < X.size(); ++i) s += (i ? ", " : "") + X[i].name + ":" + X[i].sort;
  return s + "}";
}

namespace detail {

// Precedence levels: 0 implication, 1 disjunction, 2 conjunction, 3 unary/atomic.
inline std::string print_sent(const Sentence& s, const Signature* sig, int ctx);

inline std::string wrap(const std::string& s, int level, int ctx) { return level < ctx ? "(" + s + ")" : s; }

inline bool all_negations(const std::vector<Sentence>& ops) {
  for (const auto& o : ops)
    if (o->kind != SentKind::Not) return false;
  return true;
}

// An atom whose sides are all overloaded constants needs a sort ascription.
inline std::string print_side(const Term& t, const Term& other, const Signature* sig) {
  auto overloaded = [&](const Term& x) {
    if (!x->args.empty()) return false;
    int n = 0;
    for (const auto& d : sig->lookup(x->name)) n += d.arity.empty();
    return n > 1;
  };
  std::string s = print_term(t, sig);
  if (sig && overloaded(t) && overloaded(other)) return "(" + s + " : " + t->sort + ")";
  return s;
}

inline std::string print_sent(const Sentence& s, const Signature* sig, int ctx) {
  switch (s->kind) {
    case SentKind::Eq:
      return print_side(s->l, s->r, sig) + " = " + print_side(s->r, s->l, sig);
    case SentKind::Trans:
      return print_term(s->l, sig) + " =[" + print_action(s->act) + "]=> " + print_term(s->r, sig);
    case SentKind::Not: {
      const Sentence& b = s->sub;
      if (is_bot(b)) return "top";
      if (b->kind == SentKind::Eq) return print_side(b->l, b->r, sig) + " != " + print_side(b->r, b->l, sig);
      if (b->kind == SentKind::Exists && b->sub->kind == SentKind::Not)
        return wrap("forall " + print_vars(b->vars) + " . " + print_sent(b->sub->sub, sig, 0), 0, ctx);
      if (b->kind == SentKind::Or && !b->ops.empty() && all_negations(b->ops)) {
        if (b->ops.size() == 1) return "/\\{" + print_sent(b->ops[0]->sub, sig, 0) + "}";
        std::string out;
        for (std::size_t i = 0; i < b->ops.size(); ++i) out += (i ? " /\\ " : "") + print_sent(b->ops[i]->sub, sig, 3);
        return wrap(out, 2, ctx);
      }
      return "not " + print_sent(b, sig, 3);
    }
    case SentKind::Or: {
      if (s->ops.empty()) return "bot";
      if (s->ops.size() == 1) return "\\/{" + print_sent(s->ops[0], sig, 0) + "}";
      if (s->ops.size() == 2) {
        int negs = (s->ops[0]->kind == SentKind::Not) + (s->ops[1]->kind == SentKind::Not);
        if (negs == 1) {
          const Sentence& n = s->ops[0]->kind == SentKind::Not ? s->ops[0] : s->ops[1];
          const Sentence& g = s->ops[0]->kind == SentKind::Not ? s->ops[1] : s->ops[0];
          return wrap(print_sent(n->sub, sig, 1) + " -> " + print_sent(g, sig, 0), 0, ctx);
        }
      }
      std::string out;
      for (std::size_t i = 0; i < s->ops.size(); ++i) out += (i ? " \\/ " : "") + print_sent(s->ops[i], sig, 2);
      return wrap(out, 1, ctx);
    }
    case SentKind::Exists:
      return wrap("exists " + print_vars(s->vars) + " . " + print_sent(s->sub, sig, 0), 0, ctx);
  }
  return "?";
}

}  // namespace detail

inline std::string print_sentence(const Sentence& s, const Signature* sig = nullptr) {
  return detail::print_sent(s, sig, 0);
}

inline std::string print_sentence(const Sentence& s, const Signature& sig) { return print_sentence(s, &sig); }
inline std::string print_term(const Term& t, const Signature& sig) { return print_term(t, &sig, 0); }

inline std::string print_op_name(const std::string& n) {
  if (is_infix_name(n)) return "_" + infix_core(n) + "_";
  return n;
}

inline std::string print_signature_blocks(const Signature& sig) {
  std::ostringstream o;
  o << "sorts {";
  for (const auto& s : sig.sorts) o << " " << s;
  o << " }\n";
  o << "ops {\n";
  for (const auto& f : sig.funcs) {
    if (sig.vars.count(Variable{f.name, f.result, 0}) && f.arity.empty()) continue;
    o << "  " << print_op_name(f.name) << " :";
    for (const auto& a : f.arity) o << " " << a;
    o << " -> " << f.result;
    std::vector<std::string> attrs;
    if (sig.mono.count(f)) attrs.push_back("mono");
    auto it = sig.syntax.find(f.name);
    if (it != sig.syntax.end()) {
      if (it->second.prec != OpSyntax{}.prec) attrs.push_back("prec " + std::to_string(it->second.prec));
      if (it->second.right_assoc) attrs.push_back("right");
    }
    if (!attrs.empty()) {
      o << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) o << (i ? ", " : "") << attrs[i];
      o << "]";
    }
    o << " ;\n";
  }
  o << "}\n";
  o << "labels {";
  for (const auto& l : sig.labels) o << " " << l;
  o << " }\n";
  return o.str();
}

inline std::string print_theory(const Theory& th) {
  std::ostringstream o;
  o << print_signature_blocks(th.sig);
  o << "axioms {\n";
  for (const auto& a : th.axioms) {
    o << "  ";
    if (!a.name.empty()) o << "@" << a.name << " ";
    o << print_sentence(a.sentence, th.sig) << " ;\n";
  }
  o << "}\n";
  return o.str();
}

// -------------------------------------------------------------- parsing

struct RawTerm {
  std::string name;
  std::vector<RawTerm> args;
  SourcePos pos;
  std::string ascribed;  // from (t : s)
};

struct ParseContext {
  Signature sig;
  const std::map<std::string, Term>* abbrevs = nullptr;
  std::function<Sentence(const std::string&, SourcePos)> axiom_ref;
};

class SentenceParser {
 public:
  SentenceParser(TokenStream& ts, const ParseContext& ctx) : ts_(ts), ctx_(ctx) {}

  Sentence sentence() { return impl(ctx_.sig); }

  Term term(std::optional<std::string> sort = std::nullopt) {
    RawTerm r = raw_term(ctx_.sig, 0);
    return elaborate(ctx_.sig, r, sort);
  }

  Action action() { return act_union(ctx_.sig); }

  std::vector<Variable> var_block(const Signature& sig) {
    ts_.expect("{");
    std::vector<Variable> X;
    if (!ts_.is("}")) {
      do {
        std::vector<std::string> names{ts_.ident("variable name")};
        while (ts_.peek().kind == TokKind::Ident && !ts_.is_symbol(":", 0)) names.push_back(ts_.ident());
        ts_.expect(":");
        std::string sort = ts_.ident("sort");
        if (!sig.sorts.count(sort)) ts_.fail("unknown sort " + sort);
        for (auto& n : names) X.push_back(Variable{n, sort, sig.fingerprint()});
      } while (ts_.accept(","));
    }
    ts_.expect("}");
    return X;
  }

  // Bracketed names such as Act['coin] or Res[tau,coin].
  static std::string bracket_name(TokenStream& ts) {
    std::string n = ts.ident("name");
    if (ts.is_symbol("[")) {
      ts.next();
      n += "[";
      int depth = 1;
      while (depth > 0) {
        if (ts.at_end()) ts.fail("unterminated name");
        const Token& t = ts.next();
        if (t.kind == TokKind::Symbol && t.text == "[") ++depth;
        if (t.kind == TokKind::Symbol && t.text == "]") --depth;
        n += t.text;
      }
    }
    return n;
  }

 private:
  TokenStream& ts_;
  const ParseContext& ctx_;

  Sentence impl(const Signature& sig) {
    Sentence lhs = disj(sig);
    if (ts_.accept("->")) return make_implies(lhs, impl(sig));
    return lhs;
  }

  Sentence disj(const Signature& sig) {
    std::vector<Sentence> items{conj(sig)};
    while (ts_.is_symbol("\\/") && !ts_.is_symbol("{", 1)) {
      ts_.next();
      items.push_back(conj(sig));
    }
    return items.size() == 1 ? items[0] : make_or(items);
  }

  Sentence conj(const Signature& sig) {
    std::vector<Sentence> items{unary(sig)};
    while (ts_.is_symbol("/\\") && !ts_.is_symbol("{", 1)) {
      ts_.next();
      items.push_back(unary(sig));
    }
    return items.size() == 1 ? items[0] : make_and(items);
  }

  Sentence unary(const Signature& sig) {
    if (ts_.peek().kind == TokKind::Ident && ts_.peek().text == "not") {
      ts_.next();
      return make_not(unary(sig));
    }
    if (ts_.peek().kind == TokKind::Ident && (ts_.peek().text == "exists" || ts_.peek().text == "forall")) {
      bool ex = ts_.next().text == "exists";
      SourcePos p = ts_.peek().pos;
      auto X = var_block(sig);
      Signature ext;
      try {
        ext = extend_signature(sig, X);
      } catch (const Error& e) {
        throw ParseError(e.what(), p);
      }
      ts_.expect(".");
      Sentence body = impl(ext);
      return ex ? make_exists(X, body) : make_forall(X, body);
    }
    return atom(sig);
  }

  std::vector<Sentence> sentence_set(const Signature& sig) {
    ts_.expect("{");
    std::vector<Sentence> items;
    if (!ts_.is("}")) {
      do items.push_back(impl(sig));
      while (ts_.accept(","));
    }
    ts_.expect("}");
    return items;
  }

  Sentence atom(const Signature& sig) {
    const Token& t = ts_.peek();
    if (t.kind == TokKind::Ident && t.text == "bot") {
      ts_.next();
      return make_bot();
    }
    if (t.kind == TokKind::Ident && t.text == "top") {
      ts_.next();
      return make_top();
    }
    if (ts_.is_symbol("\\/") && ts_.is_symbol("{", 1)) {
      ts_.next();
      return make_or(sentence_set(sig));
    }
    if (ts_.is_symbol("/\\") && ts_.is_symbol("{", 1)) {
      ts_.next();
      return make_and(sentence_set(sig));
    }
    if (ts_.is_symbol("@")) {
      SourcePos p = ts_.next().pos;
      std::string name = bracket_name(ts_);
      if (!ctx_.axiom_ref) throw ParseError("axiom references are not available here", p);
      return ctx_.axiom_ref(name, p);
    }
    if (ts_.is_symbol("(")) {
      std::size_t m = ts_.mark();
      try {
        return term_atom(sig);
      } catch (const ParseError&) {
        ts_.reset(m);
      }
      ts_.expect("(");
      Sentence s = impl(sig);
      ts_.expect(")");
      return s;
    }
    return term_atom(sig);
  }

  Sentence term_atom(const Signature& sig) {
    SourcePos p = ts_.peek().pos;
    RawTerm l = raw_term(sig, 0);
    if (ts_.accept("=")) {
      RawTerm r = raw_term(sig, 0);
      auto [lt, rt] = elaborate_pair(sig, l, r, p);
      return make_eq(lt, rt);
    }
    if (ts_.accept("!=")) {
      RawTerm r = raw_term(sig, 0);
      auto [lt, rt] = elaborate_pair(sig, l, r, p);
      return make_not(make_eq(lt, rt));
    }
    if (ts_.accept("=[")) {
      Action a = act_union(sig);
      ts_.expect("]=>");
      RawTerm r = raw_term(sig, 0);
      auto [lt, rt] = elaborate_pair(sig, l, r, p);
      return make_trans(lt, a, rt);
    }
    ts_.fail("expected '=', '!=' or '=[' after term" + ts_.found());
  }

  // ---- actions

  Action act_union(const Signature& sig) {
    Action a = act_seq(sig);
    while (ts_.accept("|")) a = make_union(a, act_seq(sig));
    return a;
  }
  Action act_seq(const Signature& sig) {
    Action a = act_post(sig);
    while (ts_.accept(";")) a = make_seq(a, act_post(sig));
    return a;
  }
  Action act_post(const Signature& sig) {
    Action a = act_primary(sig);
    while (true) {
      if (ts_.accept("*")) {
        a = make_star(a);
      } else if (ts_.accept("^")) {
        if (ts_.peek().kind == TokKind::Ident && ts_.peek().text == "kappa") {
          ts_.next();
          int k = 0;
          if (ts_.accept("+")) k = ts_.integer();
          else if (ts_.accept("-")) k = -ts_.integer();
          a = make_power_sym(a, k);
        } else {
          a = make_power(a, ts_.integer());
        }
      } else {
        return a;
      }
    }
  }
  Action act_primary(const Signature& sig) {
    if (ts_.accept("(")) {
      Action a = act_union(sig);
      ts_.expect(")");
      return a;
    }
    SourcePos p = ts_.peek().pos;
    std::string l = ts_.ident("label");
    if (!sig.labels.count(l)) throw ParseError("undeclared label " + l, p);
    return make_label(l);
  }

  // ---- terms

  bool infix_here(const Signature& sig, std::string* name) const {
    const Token& t = ts_.peek();
    if (t.kind == TokKind::End || t.kind == TokKind::String) return false;
    if (t.text == "=" || t.text == "!=" || t.text == "=[" || t.text == "->" || t.text == "/\\" || t.text == "\\/")
      return false;
    std::string n = "_" + t.text + "_";
    if (sig.lookup(n).empty()) return false;
    *name = n;
    return true;
  }

  RawTerm raw_term(const Signature& sig, int min_bp) {
    RawTerm lhs = raw_primary(sig);
    std::string op;
    while (infix_here(sig, &op)) {
      bool right = false;
      int bp = op_binding(sig, op, &right);
      if (bp < min_bp) break;
      SourcePos p = ts_.next().pos;
      RawTerm rhs = raw_term(sig, right ? bp : bp + 1);
      lhs = RawTerm{op, {lhs, rhs}, p};
    }
    return lhs;
  }

  RawTerm raw_primary(const Signature& sig) {
    const Token& t = ts_.peek();
    SourcePos p = t.pos;
    if (ts_.is_symbol("(")) {
      ts_.next();
      RawTerm r = raw_term(sig, 0);
      if (ts_.accept(":")) {
        SourcePos sp = ts_.peek().pos;
        r.ascribed = ts_.ident("sort");
        if (!sig.sorts.count(r.ascribed)) throw ParseError("unknown sort " + r.ascribed, sp);
      }
      ts_.expect(")");
      return r;
    }
    if (t.kind != TokKind::End && t.kind != TokKind::String && !sig.lookup(t.text + "_").empty() &&
        !(t.kind == TokKind::Ident && ts_.is_symbol("(", 1) && !sig.lookup(t.text).empty())) {
      std::string n = ts_.next().text + "_";
      RawTerm arg = raw_primary(sig);
      return RawTerm{n, {arg}, p};
    }
    if (t.kind != TokKind::Ident) ts_.fail("expected term" + ts_.found());
    if (reserved_words().count(t.text)) ts_.fail("unexpected keyword '" + t.text + "'");
    std::string n = ts_.next().text;
    RawTerm r{n, {}, p};
    if (ts_.is_symbol("(")) {
      ts_.next();
      if (!ts_.is(")")) {
        do r.args.push_back(raw_term(sig, 0));
        while (ts_.accept(","));
      }
      ts_.expect(")");
    }
    return r;
  }

  // All typings of a raw term, keyed by result sort.
  std::map<std::string, Term> typings(const Signature& sig, const RawTerm& r) {
    std::map<std::string, Term> out;
    if (r.args.empty() && ctx_.abbrevs) {
      auto it = ctx_.abbrevs->find(r.name);
      if (it != ctx_.abbrevs->end() && sig.lookup(r.name).empty()) {
        out[it->second->sort] = it->second;
        return out;
      }
    }
    std::vector<std::map<std::string, Term>> argt;
    for (const auto& a : r.args) argt.push_back(typings(sig, a));
    std::set<std::string> ambiguous;
    for (const auto& d : sig.lookup(r.name)) {
      if (d.arity.size() != r.args.size()) continue;
      std::vector<Term> args;
      bool ok = true;
      for (std::size_t i = 0; i < d.arity.size() && ok; ++i) {
        auto it = argt[i].find(d.arity[i]);
        if (it == argt[i].end()) ok = false;
        else args.push_back(it->second);
      }
      if (!ok) continue;
      Term t = d.arity.empty() && sig.is_var(d.name, d.result) ? make_var(Variable{d.name, d.result, 0})
                                                              : make_app(d.name, d.result, args);
      if (out.count(d.result)) ambiguous.insert(d.result);
      out[d.result] = t;
    }
    for (const auto& s : ambiguous) out.erase(s);
    if (!r.ascribed.empty()) {
      auto it = out.find(r.ascribed);
      if (it == out.end()) throw ParseError("term has no typing of sort " + r.ascribed, r.pos);
      Term t = it->second;
      out.clear();
      out[r.ascribed] = t;
    }
    if (out.empty()) {
      if (sig.lookup(r.name).empty()) throw ParseError("unknown symbol " + display(r.name), r.pos);
      throw ParseError("no declaration of " + display(r.name) + " fits its arguments", r.pos);
    }
    return out;
  }

  static std::string display(const std::string& n) {
    if (is_infix_name(n)) return "'" + infix_core(n) + "'";
    if (is_prefix_name(n)) return "'" + prefix_core(n) + "'";
    return n;
  }

  Term elaborate(const Signature& sig, const RawTerm& r, std::optional<std::string> sort) {
    auto ty = typings(sig, r);
    if (sort) {
      auto it = ty.find(*sort);
      if (it == ty.end()) throw ParseError("term has no typing of sort " + *sort, r.pos);
      return it->second;
    }
    if (ty.size() > 1) throw ParseError("ambiguous term " + display(r.name), r.pos);
    return ty.begin()->second;
  }

  std::pair<Term, Term> elaborate_pair(const Signature& sig, const RawTerm& l, const RawTerm& r, SourcePos p) {
    auto tl = typings(sig, l);
    auto tr = typings(sig, r);
    std::vector<std::string> common;
    for (const auto& [s, t] : tl)
      if (tr.count(s)) common.push_back(s);
    if (common.empty()) throw ParseError("sides have no common sort", p);
    if (common.size() > 1) throw ParseError("ambiguous sort for atom", p);
    return {tl[common[0]], tr[common[0]]};
  }
};

inline Sentence parse_sentence(const std::string& text, const ParseContext& ctx) {
  TokenStream ts(text);
  SentenceParser p(ts, ctx);
  Sentence s = p.sentence();
  if (!ts.at_end()) ts.fail("trailing input" + ts.found());
  return s;
}

inline Sentence parse_sentence(const std::string& text, const Signature& sig) {
  ParseContext ctx;
  ctx.sig = sig;
  return parse_sentence(text, ctx);
}

inline Term parse_term(const std::string& text, const Signature& sig, std::optional<std::string> sort = std::nullopt,
                       const std::map<std::string, Term>* abbrevs = nullptr) {
  ParseContext ctx;
  ctx.sig = sig;
  ctx.abbrevs = abbrevs;
  TokenStream ts(text);
  SentenceParser p(ts, ctx);
  Term t = p.term(sort);
  if (!ts.at_end()) ts.fail("trailing input" + ts.found());
  return t;
}

inline Action parse_action(const std::string& text, const Signature& sig) {
  ParseContext ctx;
  ctx.sig = sig;
  TokenStream ts(text);
  SentenceParser p(ts, ctx);
  Action a = p.action();
  if (!ts.at_end()) ts.fail("trailing input" + ts.found());
  return a;
}

// Operator name in a declaration: plain identifiers, _s_ infix, s_ prefix.
inline std::string parse_op_name(TokenStream& ts) {
  const Token& t = ts.peek();
  if (t.kind == TokKind::Ident && t.text == "_" && ts.peek(1).kind == TokKind::Symbol && ts.is("_", 2)) {
    ts.next();
    std::string s = ts.next().text;
    ts.next();
    return "_" + s + "_";
  }
  if (t.kind == TokKind::Symbol && ts.is("_", 1)) {
    std::string s = ts.next().text;
    ts.next();
    return s + "_";
  }
  if (t.kind == TokKind::Ident) {
    if (reserved_words().count(t.text)) ts.fail("reserved word '" + t.text + "' cannot name an operator");
    if (t.text.front() == '$') ts.fail("names starting with '$' are reserved");
    return ts.next().text;
  }
  ts.fail("expected operator name" + ts.found());
}

inline void parse_signature_block(TokenStream& ts, Signature& sig, const std::string& kw) {
  if (kw == "sorts" || kw == "labels") {
    ts.expect("{");
    while (!ts.accept("}")) {
      std::string n = ts.ident(kw == "sorts" ? "sort name" : "label name");
      if (kw == "sorts") sig.add_sort(n);
      else sig.add_label(n);
      ts.accept(",");
      ts.accept(";");
    }
    return;
  }
  if (kw == "ops") {
    ts.expect("{");
    while (!ts.accept("}")) {
      SourcePos p = ts.peek().pos;
      std::vector<std::string> names{parse_op_name(ts)};
      while (ts.accept(",")) names.push_back(parse_op_name(ts));
      ts.expect(":");
      std::vector<std::string> arity;
      while (!ts.is("->")) arity.push_back(ts.ident("sort"));
      ts.expect("->");
      std::string result = ts.ident("sort");
      bool mono = false;
      OpSyntax syn;
      bool has_syn = false;
      if (ts.accept("[")) {
        do {
          std::string a = ts.ident("attribute");
          if (a == "mono") mono = true;
          else if (a == "prec") {
            syn.prec = ts.integer();
            has_syn = true;
          } else if (a == "right") {
            syn.right_assoc = true;
            has_syn = true;
          } else {
            ts.fail("unknown attribute " + a);
          }
        } while (ts.accept(","));
        ts.expect("]");
      }
      if (!ts.is("}")) ts.expect(";");
      for (const auto& s : arity)
        if (!sig.sorts.count(s)) throw ParseError("unknown sort " + s, p);
      if (!sig.sorts.count(result)) throw ParseError("unknown sort " + result, p);
      for (const auto& n : names) {
        if (is_infix_name(n) && arity.size() != 2) throw ParseError("infix operator " + n + " needs two arguments", p);
        if (is_prefix_name(n) && arity.size() != 1) throw ParseError("prefix operator " + n + " needs one argument", p);
        try {
          sig.add_func(FuncDecl{n, arity, result}, mono);
        } catch (const Error& e) {
          throw ParseError(e.what(), p);
        }
        if (has_syn) sig.syntax[n] = syn;
      }
    }
    return;
  }
  ts.fail("unknown block " + kw);
}

inline std::vector<NamedSentence> parse_axiom_block(TokenStream& ts, const ParseContext& ctx) {
  std::vector<NamedSentence> out;
  ts.expect("{");
  while (!ts.accept("}")) {
    std::string name;
    if (ts.accept("@")) name = SentenceParser::bracket_name(ts);
    SentenceParser sp(ts, ctx);
    Sentence s = sp.sentence();
    if (!ts.is("}")) ts.expect(";");
    out.push_back({name, s});
  }
  return out;
}

inline Theory parse_theory(const std::string& text) {
  TokenStream ts(text);
  Theory th;
  while (!ts.at_end()) {
    SourcePos p = ts.peek().pos;
    std::string kw = ts.ident("block keyword");
    if (kw == "theory") {
      ts.ident("theory name");
      continue;
    }
    if (kw == "axioms") {
      ParseContext ctx;
      ctx.sig = th.sig;
      auto ax = parse_axiom_block(ts, ctx);
      for (auto& a : ax) {
        if (a.name.empty()) a.name = "ax" + std::to_string(th.axioms.size() + 1);
        for (const auto& b : th.axioms)
          if (b.name == a.name) throw ParseError("duplicate axiom name " + a.name, p);
        th.axioms.push_back(a);
      }
      continue;
    }
    if (kw != "sorts" && kw != "ops" && kw != "labels") throw ParseError("unknown block " + kw, p);
    parse_signature_block(ts, th.sig, kw);
  }
  th.sig.validate();
  return th;
}

}  // namespace ta
