#pragma once

// CCS processes as terms of a transition-algebra signature.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ta/calculus.hpp"
#include "ta/core.hpp"
#include "ta/lexer.hpp"
#include "ta/syntax.hpp"

namespace ta {

inline const std::string kTau = "tau";

inline bool is_co_name(const std::string& a) { return !a.empty() && a[0] == '\''; }

// Co-naming on CCS actions; tau is fixed.
inline std::string co_name(const std::string& a) {
  if (a == kTau) return a;
  return is_co_name(a) ? a.substr(1) : "'" + a;
}

inline std::string channel_of(const std::string& a) { return is_co_name(a) ? a.substr(1) : a; }

struct CcsProgram {
  std::set<std::string> process_ids;
  std::set<std::string> channel_names;
  std::map<std::string, Term> declarations;
  std::map<std::string, Term> abbrevs;
  std::vector<std::string> order;  // declaration order
  std::vector<std::vector<std::string>> restriction_seqs;  // length >= 2, as written
  Signature sig;

  std::vector<std::string> actions() const {
    std::vector<std::string> out;
    for (const auto& c : channel_names) out.push_back(c);
    for (const auto& c : channel_names) out.push_back("'" + c);
    if (!channel_names.empty()) out.push_back(kTau);
    return out;
  }
};

namespace ccsdetail {

inline const std::string Proc = "Process";
inline const std::string Act = "Action";
inline const std::string Chan = "Channel";

inline Term zero() { return make_app("0", Proc); }
inline Term prefix(const std::string& a, Term p) { return make_app("_._", Proc, {make_app(a, Act), std::move(p)}); }
inline Term sum(Term a, Term b) { return make_app("_+_", Proc, {std::move(a), std::move(b)}); }
inline Term par(Term a, Term b) { return make_app("_|_", Proc, {std::move(a), std::move(b)}); }
inline Term restrict(Term p, const std::string& k) { return make_app("_\\_", Proc, {std::move(p), make_app(k, Chan)}); }
inline Term restrict_all(Term p, const std::vector<std::string>& K) {
  for (const auto& k : K) p = restrict(p, k);
  return p;
}

inline Signature ccs_signature(const std::set<std::string>& ids, const std::set<std::string>& chans) {
  Signature sig;
  for (const auto& s : {Chan, Act, Proc}) sig.add_sort(s);
  sig.add_func(FuncDecl{"0", {}, Proc});
  for (const auto& p : ids) sig.add_func(FuncDecl{p, {}, Proc});
  for (const auto& c : chans) {
    sig.add_func(FuncDecl{c, {}, Chan});
    sig.add_func(FuncDecl{c, {}, Act});
    sig.add_func(FuncDecl{"'" + c, {}, Act});
    sig.add_label(c);
    sig.add_label("'" + c);
  }
  if (!chans.empty()) {
    sig.add_func(FuncDecl{kTau, {}, Act});
    sig.add_label(kTau);
  }
  sig.add_func(FuncDecl{"_._", {Act, Proc}, Proc});
  sig.add_func(FuncDecl{"_+_", {Proc, Proc}, Proc});
  sig.add_func(FuncDecl{"_|_", {Proc, Proc}, Proc}, true);
  sig.add_func(FuncDecl{"_\\_", {Proc, Chan}, Proc});
  sig.syntax["_\\_"] = OpSyntax{10, false};
  sig.syntax["_._"] = OpSyntax{20, true};
  sig.syntax["_+_"] = OpSyntax{30, false};
  sig.syntax["_|_"] = OpSyntax{40, false};
  return sig;
}

// Untyped process tree produced by the first pass.
struct Raw {
  enum Kind { Zero, Ident, Prefix, Sum, Par, Res } kind = Zero;
  std::string name;  // identifier or action
  std::vector<std::string> chans;
  std::vector<Raw> kids;
  SourcePos pos;
};

class Reader {
 public:
  explicit Reader(TokenStream& ts) : ts_(ts) {}

  Raw par() {
    Raw l = sum();
    while (ts_.is_symbol("|")) {
      SourcePos p = ts_.next().pos;
      Raw r = sum();
      l = Raw{Raw::Par, "", {}, {l, r}, p};
    }
    return l;
  }

 private:
  TokenStream& ts_;

  Raw sum() {
    Raw l = pre();
    while (ts_.is_symbol("+")) {
      SourcePos p = ts_.next().pos;
      Raw r = pre();
      l = Raw{Raw::Sum, "", {}, {l, r}, p};
    }
    return l;
  }

  Raw pre() {
    const Token& t = ts_.peek();
    if (t.kind == TokKind::Ident && ts_.is_symbol(".", 1)) {
      SourcePos p = t.pos;
      std::string a = ts_.next().text;
      ts_.next();
      Raw body = pre();
      return Raw{Raw::Prefix, a, {}, {body}, p};
    }
    return res();
  }

  Raw res() {
    Raw r = atom();
    while (ts_.is_symbol("\\")) {
      SourcePos p = ts_.next().pos;
      std::vector<std::string> ks;
      if (ts_.accept("(")) {
        do ks.push_back(ts_.ident("channel name"));
        while (ts_.accept(","));
        ts_.expect(")");
      } else {
        ks.push_back(ts_.ident("channel name"));
      }
      r = Raw{Raw::Res, "", ks, {r}, p};
    }
    return r;
  }

  Raw atom() {
    SourcePos p = ts_.peek().pos;
    if (ts_.accept("(")) {
      Raw r = par();
      ts_.expect(")");
      return r;
    }
    std::string n = ts_.ident("process");
    if (n == "0") return Raw{Raw::Zero, "", {}, {}, p};
    return Raw{Raw::Ident, n, {}, {}, p};
  }
};

}  // namespace ccsdetail

// Declarations "Id ::= P" and abbreviations "Name = P", optionally separated
// by ';'. An optional "channels a, b, c" line fixes the channel names.
inline CcsProgram parse_ccs(const std::string& text) {
  using namespace ccsdetail;
  TokenStream ts(text);
  Reader rd(ts);
  struct Entry {
    std::string name;
    bool decl;
    Raw body;
    SourcePos pos;
  };
  std::vector<Entry> entries;
  std::optional<std::set<std::string>> declared_chans;
  while (!ts.at_end()) {
    SourcePos p = ts.peek().pos;
    if (ts.peek().text == "channels" && ts.peek(1).kind == TokKind::Ident) {
      ts.next();
      declared_chans.emplace();
      do {
        SourcePos cp = ts.peek().pos;
        std::string c = ts.ident("channel name");
        if (c == kTau || is_co_name(c) || c == "0") throw ParseError("bad channel name " + c, cp);
        declared_chans->insert(c);
      } while (ts.accept(","));
      ts.accept(";");
      continue;
    }
    std::string name = ts.ident("process identifier");
    if (name == "0" || name == kTau || is_co_name(name)) throw ParseError("bad process identifier " + name, p);
    bool decl;
    if (ts.accept("::=")) decl = true;
    else if (ts.accept("=")) decl = false;
    else ts.fail("expected '::=' or '='" + ts.found());
    for (const auto& e : entries)
      if (e.name == name) throw ParseError("duplicate declaration of " + name, p);
    entries.push_back(Entry{name, decl, rd.par(), p});
    ts.accept(";");
  }

  CcsProgram prog;
  std::map<std::string, const Entry*> by_name;
  for (const auto& e : entries) {
    by_name[e.name] = &e;
    if (e.decl) prog.process_ids.insert(e.name);
  }
  std::set<std::string> chans;
  auto add_chan = [&](const std::string& c, SourcePos p) {
    if (c == kTau || is_co_name(c) || c == "0") throw ParseError("bad channel name " + c, p);
    if (declared_chans && !declared_chans->count(c)) throw ParseError("undeclared channel " + c, p);
    chans.insert(c);
  };
  std::function<void(const Raw&)> scan = [&](const Raw& r) {
    if (r.kind == Raw::Ident && !by_name.count(r.name)) throw ParseError("undeclared identifier " + r.name, r.pos);
    if (r.kind == Raw::Prefix && r.name != kTau) add_chan(channel_of(r.name), r.pos);
    if (r.kind == Raw::Res) {
      for (const auto& k : r.chans) add_chan(k, r.pos);
      if (r.chans.size() >= 2 &&
          std::find(prog.restriction_seqs.begin(), prog.restriction_seqs.end(), r.chans) == prog.restriction_seqs.end())
        prog.restriction_seqs.push_back(r.chans);
    }
    for (const auto& k : r.kids) scan(k);
  };
  for (const auto& e : entries) scan(e.body);
  if (declared_chans) chans = *declared_chans;
  prog.channel_names = chans;
  prog.sig = ccs_signature(prog.process_ids, chans);

  std::set<std::string> expanding;
  std::function<Term(const Raw&)> build = [&](const Raw& r) -> Term {
    switch (r.kind) {
      case Raw::Zero:
        return zero();
      case Raw::Ident: {
        const Entry& e = *by_name.at(r.name);
        if (e.decl) return make_app(r.name, Proc);
        if (expanding.count(r.name)) throw ParseError("abbreviation " + r.name + " is recursive", r.pos);
        expanding.insert(r.name);
        Term t = build(e.body);
        expanding.erase(r.name);
        return t;
      }
      case Raw::Prefix:
        return prefix(r.name, build(r.kids[0]));
      case Raw::Sum:
        return sum(build(r.kids[0]), build(r.kids[1]));
      case Raw::Par:
        return par(build(r.kids[0]), build(r.kids[1]));
      case Raw::Res:
        return restrict_all(build(r.kids[0]), r.chans);
    }
    return zero();
  };
  for (const auto& e : entries) {
    Term t = build(e.body);
    if (e.decl) {
      prog.declarations[e.name] = t;
      prog.order.push_back(e.name);
    } else {
      prog.abbrevs[e.name] = t;
    }
  }
  return prog;
}

// Term for a process written in .ccs syntax, with the program's abbreviations.
inline Term parse_process(const CcsProgram& prog, const std::string& text) {
  using namespace ccsdetail;
  TokenStream ts(text);
  Reader rd(ts);
  Raw r = rd.par();
  if (!ts.at_end()) ts.fail("trailing input" + ts.found());
  std::function<Term(const Raw&)> build = [&](const Raw& x) -> Term {
    switch (x.kind) {
      case Raw::Zero:
        return zero();
      case Raw::Ident:
        if (prog.process_ids.count(x.name)) return make_app(x.name, Proc);
        if (prog.abbrevs.count(x.name)) return prog.abbrevs.at(x.name);
        throw ParseError("undeclared identifier " + x.name, x.pos);
      case Raw::Prefix:
        if (x.name != kTau && !prog.channel_names.count(channel_of(x.name)))
          throw ParseError("unknown action " + x.name, x.pos);
        return prefix(x.name, build(x.kids[0]));
      case Raw::Sum:
        return sum(build(x.kids[0]), build(x.kids[1]));
      case Raw::Par:
        return par(build(x.kids[0]), build(x.kids[1]));
      case Raw::Res:
        for (const auto& k : x.chans)
          if (!prog.channel_names.count(k)) throw ParseError("unknown channel " + k, x.pos);
        return restrict_all(build(x.kids[0]), x.chans);
    }
    return zero();
  };
  return build(r);
}

inline std::string print_process(const Term& t, const CcsProgram& prog) {
  return print_term(t, prog.sig);
}

inline std::string join_names(const std::vector<std::string>& v, const std::string& sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

inline std::string res_star_name(const CcsProgram& prog, const std::string& a, const std::vector<std::string>& K) {
  if (prog.restriction_seqs.size() == 1) return "ResStar[" + a + "]";
  return "ResStar[" + a + "," + join_names(K) + "]";
}

inline Theory compile_to_theory(const CcsProgram& prog) {
  using namespace ccsdetail;
  Theory th;
  th.sig = prog.sig;
  Variable vP{"P", Proc, 0}, vP1{"P'", Proc, 0}, vQ{"Q", Proc, 0}, vQ1{"Q'", Proc, 0}, vR{"R", Proc, 0};
  Term P = make_var(vP), P1 = make_var(vP1), Q = make_var(vQ), Q1 = make_var(vQ1), R = make_var(vR);
  auto act = [](const std::string& a) { return make_app(a, Act); };
  auto tr = [](Term l, const std::string& a, Term r) { return make_trans(std::move(l), make_label(a), std::move(r)); };
  auto neq = [&](const std::string& a, const std::string& b) { return make_not(make_eq(act(a), act(b))); };
  auto add = [&](std::string n, Sentence s) { th.axioms.push_back(NamedSentence{std::move(n), std::move(s)}); };

  const auto A = prog.actions();
  for (const auto& a : A) add("Act[" + a + "]", make_forall({vP}, tr(prefix(a, P), a, P)));
  for (const auto& a : A)
    add("Sum[" + a + "]", make_forall({vP, vP1, vQ}, make_implies(tr(P, a, P1), tr(sum(P, Q), a, P1))));
  for (const auto& c : prog.channel_names)
    add("Com[" + c + "]", make_forall({vP, vP1, vQ, vQ1}, make_implies(make_and({tr(P, c, P1), tr(Q, "'" + c, Q1)}),
                                                                       tr(par(P, Q), kTau, par(P1, Q1)))));
  auto side = [&](const std::string& a, const std::vector<std::string>& K) {
    std::vector<Sentence> out;
    for (const auto& k : K) {
      out.push_back(neq(a, k));
      out.push_back(neq(co_name(a), k));
    }
    return out;
  };
  for (const auto& a : A)
    for (const auto& k : prog.channel_names) {
      auto conds = side(a, {k});
      conds.insert(conds.begin(), tr(P, a, P1));
      add("Res[" + a + "," + k + "]",
          make_forall({vP, vP1}, make_implies(make_and(conds), tr(restrict(P, k), a, restrict(P1, k)))));
    }
  for (const auto& K : prog.restriction_seqs)
    for (const auto& a : A) {
      auto conds = side(a, K);
      conds.insert(conds.begin(), tr(P, a, P1));
      add(res_star_name(prog, a, K),
          make_forall({vP, vP1}, make_implies(make_and(conds), tr(restrict_all(P, K), a, restrict_all(P1, K)))));
    }
  for (const auto& pi : prog.order)
    for (const auto& a : A)
      add("Con[" + pi + "," + a + "]",
          make_forall({vP1}, make_implies(tr(prog.declarations.at(pi), a, P1), tr(make_app(pi, Proc), a, P1))));
  auto ac = [&](const std::string& name, std::function<Term(Term, Term)> op) {
    add("Assoc" + name, make_forall({vP, vQ, vR}, make_eq(op(op(P, Q), R), op(P, op(Q, R)))));
    add("Comm" + name, make_forall({vP, vQ}, make_eq(op(P, Q), op(Q, P))));
    add("Id" + name, make_forall({vP}, make_eq(op(P, zero()), P)));
  };
  ac("Sum", sum);
  ac("Par", par);
  for (const auto& a : A)
    for (const auto& b : A)
      if (a != b) add("Neq[" + a + "," + b + "]", neq(a, b));
  return th;
}

// ------------------------------------------------------------ step search

enum class SosRule { Act, SumL, SumR, ParL, ParR, Com, ComSwap, Res, Con };

struct Derivation;
using DerivPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  SosRule rule;
  Term src;
  std::string act;
  Term dst;
  std::vector<DerivPtr> sub;
  std::vector<std::string> chans;  // Res: innermost first
  std::string pi;                  // Con
};

namespace ccsdetail {

inline bool is_op(const Term& t, const char* name) { return t->name == name && t->args.size() == 2; }

inline void sos(const CcsProgram& prog, const Term& t, std::set<std::string>& unfolding, std::vector<DerivPtr>& out) {
  auto mk = [&](SosRule r, std::string a, Term dst, std::vector<DerivPtr> sub) {
    auto d = std::make_shared<Derivation>();
    d->rule = r;
    d->src = t;
    d->act = std::move(a);
    d->dst = std::move(dst);
    d->sub = std::move(sub);
    return d;
  };
  if (t->args.empty()) {
    auto it = prog.declarations.find(t->name);
    // A repeated unfolding on one path only yields longer derivations.
    if (it == prog.declarations.end() || unfolding.count(t->name)) return;
    unfolding.insert(t->name);
    std::vector<DerivPtr> inner;
    sos(prog, it->second, unfolding, inner);
    unfolding.erase(t->name);
    for (const auto& d : inner) {
      auto c = mk(SosRule::Con, d->act, d->dst, {d});
      c->pi = t->name;
      out.push_back(c);
    }
    return;
  }
  if (is_op(t, "_._")) {
    out.push_back(mk(SosRule::Act, t->args[0]->name, t->args[1], {}));
    return;
  }
  if (is_op(t, "_+_")) {
    std::vector<DerivPtr> l, r;
    sos(prog, t->args[0], unfolding, l);
    sos(prog, t->args[1], unfolding, r);
    for (const auto& d : l) out.push_back(mk(SosRule::SumL, d->act, d->dst, {d}));
    for (const auto& d : r) out.push_back(mk(SosRule::SumR, d->act, d->dst, {d}));
    return;
  }
  if (is_op(t, "_|_")) {
    std::vector<DerivPtr> l, r;
    sos(prog, t->args[0], unfolding, l);
    sos(prog, t->args[1], unfolding, r);
    for (const auto& d : l) out.push_back(mk(SosRule::ParL, d->act, par(d->dst, t->args[1]), {d}));
    for (const auto& d : r) out.push_back(mk(SosRule::ParR, d->act, par(t->args[0], d->dst), {d}));
    for (const auto& x : l)
      for (const auto& y : r) {
        if (x->act == kTau || y->act != co_name(x->act)) continue;
        out.push_back(mk(is_co_name(x->act) ? SosRule::ComSwap : SosRule::Com, kTau, par(x->dst, y->dst), {x, y}));
      }
    return;
  }
  if (is_op(t, "_\\_")) {
    std::vector<std::string> K;
    Term base = t;
    while (is_op(base, "_\\_")) {
      K.insert(K.begin(), base->args[1]->name);
      base = base->args[0];
    }
    std::vector<DerivPtr> inner;
    sos(prog, base, unfolding, inner);
    for (const auto& d : inner) {
      bool blocked = false;
      for (const auto& k : K) blocked = blocked || d->act == k || co_name(d->act) == k;
      if (blocked) continue;
      auto r = mk(SosRule::Res, d->act, restrict_all(d->dst, K), {d});
      r->chans = K;
      out.push_back(r);
    }
  }
}

}  // namespace ccsdetail

// One-step derivations of t, each carrying its rule tree.
inline std::vector<DerivPtr> ccs_steps(const CcsProgram& prog, const Term& t) {
  std::vector<DerivPtr> out;
  std::set<std::string> unfolding;
  ccsdetail::sos(prog, t, unfolding, out);
  return out;
}

struct CcsResult {
  std::vector<std::string> word;
  Term term;
  std::vector<DerivPtr> path;

  bool operator<(const CcsResult& o) const {
    if (word != o.word) return word < o.word;
    return compare_terms(term, o.term) < 0;
  }
};

inline std::size_t default_state_ceiling() { return 100000; }

// Every (word, derivative) with 1 <= |word| <= depth.
inline std::vector<CcsResult> ccs_step_search(const CcsProgram& prog, const Term& from, int depth,
                                              std::size_t ceiling = default_state_ceiling()) {
  if (depth < 0) throw Error("search depth must be non-negative");
  std::set<CcsResult> seen;
  std::vector<CcsResult> frontier{CcsResult{{}, from, {}}};
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    std::vector<CcsResult> next;
    for (const auto& r : frontier)
      for (const auto& d : ccs_steps(prog, r.term)) {
        CcsResult n{r.word, d->dst, r.path};
        n.word.push_back(d->act);
        n.path.push_back(d);
        if (seen.count(n)) continue;
        seen.insert(n);
        if (seen.size() > ceiling)
          throw Error("state ceiling exceeded: more than " + std::to_string(ceiling) + " states");
        next.push_back(n);
      }
    frontier = std::move(next);
  }
  return std::vector<CcsResult>(seen.begin(), seen.end());
}

// ---------------------------------------------------------- certificates

class CcsCertifier {
 public:
  CcsCertifier(const CcsProgram& prog, const Theory& th) : prog_(prog), th_(th), G_(th.axiom_set()) {}

  const SentSet& antecedent() const { return G_; }

  Proof step(const DerivPtr& d) {
    using namespace ccsdetail;
    Term P = make_var(Variable{"P", Proc, 0}), P1 = make_var(Variable{"P'", Proc, 0});
    Sentence goal = make_trans(d->src, make_label(d->act), d->dst);
    switch (d->rule) {
      case SosRule::Act:
        return gmp("Act[" + d->act + "]", {{"P", d->dst}}, {}, goal);
      case SosRule::SumL:
        return gmp("Sum[" + d->act + "]", {{"P", d->src->args[0]}, {"P'", d->dst}, {"Q", d->src->args[1]}},
                   {step(d->sub[0])}, goal);
      case SosRule::SumR: {
        const Term &l = d->src->args[0], &r = d->src->args[1];
        auto inner = gmp("Sum[" + d->act + "]", {{"P", r}, {"P'", d->dst}, {"Q", l}}, {step(d->sub[0])},
                         make_trans(sum(r, l), make_label(d->act), d->dst));
        auto e1 = gmp("CommSum", {{"P", r}, {"Q", l}}, {}, make_eq(sum(r, l), sum(l, r)));
        auto e2 = node(make_eq(d->dst, d->dst), Rule::R, {});
        return node(goal, Rule::P, {e1, e2, inner});
      }
      case SosRule::ParL:
      case SosRule::ParR:
        return node(goal, Rule::M, {step(d->sub[0])});
      case SosRule::Com: {
        const auto &x = d->sub[0], &y = d->sub[1];
        return gmp("Com[" + x->act + "]", {{"P", x->src}, {"P'", x->dst}, {"Q", y->src}, {"Q'", y->dst}},
                   {step(x), step(y)}, goal);
      }
      case SosRule::ComSwap: {
        const auto &x = d->sub[0], &y = d->sub[1];
        auto inner = gmp("Com[" + y->act + "]", {{"P", y->src}, {"P'", y->dst}, {"Q", x->src}, {"Q'", x->dst}},
                         {step(y), step(x)}, make_trans(par(y->src, x->src), make_label(kTau), par(y->dst, x->dst)));
        auto e1 = gmp("CommPar", {{"P", y->src}, {"Q", x->src}}, {}, make_eq(par(y->src, x->src), par(x->src, y->src)));
        auto e2 = gmp("CommPar", {{"P", y->dst}, {"Q", x->dst}}, {}, make_eq(par(y->dst, x->dst), par(x->dst, y->dst)));
        return node(goal, Rule::P, {e1, e2, inner});
      }
      case SosRule::Res: {
        const auto& inner = d->sub[0];
        const auto& K = d->chans;
        std::string rs = res_star_name(prog_, d->act, K);
        if (K.size() >= 2 && th_.axiom(rs) &&
            std::find(prog_.restriction_seqs.begin(), prog_.restriction_seqs.end(), K) != prog_.restriction_seqs.end())
          return gmp(rs, {{"P", inner->src}, {"P'", inner->dst}}, with_sides({step(inner)}, d->act, K), goal);
        Proof cur = step(inner);
        Term s = inner->src, t = inner->dst;
        for (const auto& k : K) {
          Term s2 = restrict(s, k), t2 = restrict(t, k);
          cur = gmp("Res[" + d->act + "," + k + "]", {{"P", s}, {"P'", t}}, with_sides({cur}, d->act, {k}),
                    make_trans(s2, make_label(d->act), t2));
          s = s2;
          t = t2;
        }
        return cur;
      }
      case SosRule::Con:
        return gmp("Con[" + d->pi + "," + d->act + "]", {{"P'", d->dst}}, {step(d->sub[0])}, goal);
    }
    (void)P;
    (void)P1;
    throw Error("unknown derivation rule");
  }

  // from =[a1 ; a2 ; ... ; an]=> to, composed to the left.
  Proof word(const std::vector<DerivPtr>& path) {
    if (path.empty()) throw Error("empty transition path");
    Proof cur = step(path[0]);
    Action a = make_label(path[0]->act);
    for (std::size_t i = 1; i < path.size(); ++i) {
      a = make_seq(a, make_label(path[i]->act));
      cur = node(make_trans(path[0]->src, a, path[i]->dst), Rule::Comp_I, {cur, step(path[i])});
    }
    return cur;
  }

  // start =[(tau* ; b) ; tau*]=> start from a path tau^n b that returns to start.
  Proof cycle(const std::vector<DerivPtr>& path) {
    if (path.empty()) throw Error("empty transition path");
    const Term start = path.front()->src;
    const DerivPtr& last = path.back();
    if (!term_equal(last->dst, start)) throw Error("path does not return to its start");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      if (path[i]->act != kTau) throw Error("cycle prefix must consist of silent steps");
    Action tau = make_label(kTau);
    Action taus = make_star(tau);
    int n = static_cast<int>(path.size()) - 1;
    Term mid = last->src;
    Proof pre;
    if (n == 0) {
      pre = star(make_trans(start, taus, mid), 0, node(make_eq(start, start), Rule::R, {}));
    } else {
      std::vector<DerivPtr> silent(path.begin(), path.end() - 1);
      Proof chain = n == 1 ? step(silent[0]) : right_chain(silent, 0);
      pre = star(make_trans(start, taus, mid), n, chain);
    }
    Proof left = node(make_trans(start, make_seq(taus, make_label(last->act)), start), Rule::Comp_I, {pre, step(last)});
    Proof back = star(make_trans(start, taus, start), 0, node(make_eq(start, start), Rule::R, {}));
    return node(make_trans(start, make_seq(make_seq(taus, make_label(last->act)), taus), start), Rule::Comp_I,
                {left, back});
  }

  // t1 = t2 modulo associativity, commutativity and identity of + and |,
  // from ground instances of the compiled equations closed by BasicOracle.
  std::optional<Proof> ac_equal(const Term& t1, const Term& t2) {
    inst_.clear();
    Term n1 = norm(t1), n2 = norm(t2);
    if (!term_equal(n1, n2)) return std::nullopt;
    Sentence goal = make_eq(t1, t2);
    std::vector<Proof> parts;
    SentSet G2 = G_;
    for (const auto& s : G_) parts.push_back(node(s, Rule::Monotonicity, {}));
    for (const auto& [name, sub] : inst_) {
      auto [X, body] = calc::strip_forall(*th_.axiom(name));
      Sentence e = apply_substitution(sub, body);
      if (G2.count(e)) continue;
      G2.insert(e);
      Proof p = node(e, Rule::GMP, {node(*th_.axiom(name), Rule::Monotonicity, {})});
      p->subst = sub;
      parts.push_back(p);
    }
    auto un = make_node(fresh_id("union"), Sequent{th_.sig, G_, G2}, Rule::Union, parts);
    auto oracle = make_node(fresh_id("oracle"), sequent(th_.sig, G2, goal), Rule::BasicOracle);
    return make_node(fresh_id("trans"), sequent(th_.sig, G_, goal), Rule::Transitivity, {un, oracle});
  }

 private:
  const CcsProgram& prog_;
  const Theory& th_;
  SentSet G_;
  int counter_ = 0;
  std::vector<std::pair<std::string, Substitution>> inst_;

  std::string fresh_id(const std::string& stem) { return stem + std::to_string(++counter_); }

  Proof node(const Sentence& goal, Rule r, std::vector<Proof> prem) {
    std::string stem = rule_name(r);
    std::transform(stem.begin(), stem.end(), stem.begin(), [](unsigned char c) { return std::tolower(c); });
    stem.erase(std::remove(stem.begin(), stem.end(), '_'), stem.end());
    return make_node(fresh_id(stem), sequent(th_.sig, G_, goal), r, std::move(prem));
  }

  Substitution subst_of(const std::string& ax, const std::map<std::string, Term>& bind) {
    auto [X, body] = calc::strip_forall(*th_.axiom(ax));
    Substitution s;
    for (const auto& x : X) s[x] = bind.at(x.name);
    return s;
  }

  Proof gmp(const std::string& ax, const std::map<std::string, Term>& bind, std::vector<Proof> prem,
            const Sentence& goal) {
    auto univ = th_.axiom(ax);
    if (!univ) throw Error("missing axiom " + ax);
    prem.insert(prem.begin(), node(*univ, Rule::Monotonicity, {}));
    Proof p = node(goal, Rule::GMP, std::move(prem));
    p->subst = subst_of(ax, bind);
    return p;
  }

  std::vector<Proof> with_sides(std::vector<Proof> prem, const std::string& a, const std::vector<std::string>& K) {
    SentSet seen;
    for (const auto& k : K)
      for (const auto& x : {a, co_name(a)}) {
        Sentence s = make_not(make_eq(make_app(x, ccsdetail::Act), make_app(k, ccsdetail::Act)));
        if (seen.insert(s).second) prem.push_back(node(s, Rule::Monotonicity, {}));
      }
    return prem;
  }

  // Right-nested composition a ; (a ; ...) matching make_power.
  Proof right_chain(const std::vector<DerivPtr>& p, std::size_t i) {
    if (i + 1 == p.size()) return step(p[i]);
    Proof rest = right_chain(p, i + 1);
    Action a = make_power(make_label(p[i]->act), static_cast<int>(p.size() - i));
    return node(make_trans(p[i]->src, a, p.back()->dst), Rule::Comp_I, {step(p[i]), rest});
  }

  Proof star(const Sentence& goal, int n, Proof prem) {
    Proof p = node(goal, Rule::Star_I, {std::move(prem)});
    p->index = n;
    return p;
  }

  // AC normal form: right-nested, sorted, without 0, recording the
  // equation instances that justify each rewrite.
  void record(const std::string& ax, std::map<std::string, Term> bind) { inst_.push_back({ax, subst_of(ax, bind)}); }

  Term norm(const Term& t) {
    if (t->args.empty()) return t;
    std::vector<Term> args;
    for (const auto& a : t->args) args.push_back(norm(a));
    if (t->name != "_+_" && t->name != "_|_") return make_app(decl_of(t), args);
    return merge(t->name, args[0], args[1]);
  }

  std::string suffix(const std::string& op) const { return op == "_+_" ? "Sum" : "Par"; }

  Term merge(const std::string& op, const Term& a, const Term& b) {
    auto zero = [](const Term& x) { return x->name == "0" && x->args.empty(); };
    if (zero(a)) {
      record("Comm" + suffix(op), {{"P", a}, {"Q", b}});
      record("Id" + suffix(op), {{"P", b}});
      return b;
    }
    if (zero(b)) {
      record("Id" + suffix(op), {{"P", a}});
      return a;
    }
    if (a->name == op) {
      record("Assoc" + suffix(op), {{"P", a->args[0]}, {"Q", a->args[1]}, {"R", b}});
      return insert(op, a->args[0], merge(op, a->args[1], b));
    }
    return insert(op, a, b);
  }

  Term insert(const std::string& op, const Term& x, const Term& L) {
    auto mk = [&](Term l, Term r) { return make_app(op, ccsdetail::Proc, {std::move(l), std::move(r)}); };
    if (L->name != op) {
      if (compare_terms(x, L) <= 0) return mk(x, L);
      record("Comm" + suffix(op), {{"P", x}, {"Q", L}});
      return mk(L, x);
    }
    const Term &y = L->args[0], &r = L->args[1];
    if (compare_terms(x, y) <= 0) return mk(x, L);
    record("Assoc" + suffix(op), {{"P", x}, {"Q", y}, {"R", r}});
    record("Comm" + suffix(op), {{"P", x}, {"Q", y}});
    record("Assoc" + suffix(op), {{"P", y}, {"Q", x}, {"R", r}});
    return mk(y, insert(op, x, r));
  }
};

// The derivation path of a search result ending in `to` with the given word.
inline std::optional<CcsResult> find_path(const CcsProgram& prog, const Term& from, const std::vector<std::string>& word,
                                          const std::optional<Term>& to = std::nullopt) {
  for (const auto& r : ccs_step_search(prog, from, static_cast<int>(word.size())))
    if (r.word == word && (!to || term_equal(r.term, *to))) return r;
  return std::nullopt;
}

// ------------------------------------------------------------ mutation

// Copy of the tree with node `target` replaced by f(copy of target).
inline Proof rebuild_with(const Proof& root, const ProofNode* target, const std::function<void(ProofNode&)>& f) {
  std::function<Proof(const Proof&)> go = [&](const Proof& p) -> Proof {
    auto c = std::make_shared<ProofNode>(*p);
    for (auto& q : c->premises) q = go(q);
    if (p.get() == target) f(*c);
    return c;
  };
  return go(root);
}

inline std::vector<const ProofNode*> proof_nodes(const Proof& root) {
  std::vector<const ProofNode*> out;
  std::function<void(const Proof&)> walk = [&](const Proof& p) {
    out.push_back(p.get());
    for (const auto& q : p->premises) walk(q);
  };
  walk(root);
  return out;
}

struct Mutant {
  std::string what;
  Proof proof;
};

// Single-point corruptions of a proof: every leaf gets its conclusion
// perturbed, GMP nodes lose a side premise, Star_I indices shift.
inline std::vector<Mutant> proof_mutants(const Proof& root, const Signature& sig) {
  std::vector<Mutant> out;
  std::vector<std::string> labels(sig.labels.begin(), sig.labels.end());
  auto other_label = [&](const std::string& l) {
    for (const auto& x : labels)
      if (x != l) return x;
    return l;
  };
  auto perturb = [&](const Sentence& s) -> Sentence {
    auto [X, body] = calc::strip_forall(s);
    std::function<Sentence(const Sentence&)> go = [&](const Sentence& x) -> Sentence {
      switch (x->kind) {
        case SentKind::Trans:
          if (x->act->kind == ActKind::Label) return make_trans(x->l, make_label(other_label(x->act->label)), x->r);
          return make_trans(x->r, x->act, x->l);
        case SentKind::Eq:
          for (const auto& c : sig.constants_of(x->r->sort))
            if (!term_equal(make_app(c, {}), x->r) && !term_equal(make_app(c, {}), x->l)) return make_eq(x->l, make_app(c, {}));
          return make_eq(x->r, x->l);
        case SentKind::Not:
          return make_not(go(x->sub));
        case SentKind::Or: {
          std::vector<Sentence> ops(x->ops.begin(), x->ops.end());
          if (!ops.empty()) ops.back() = go(ops.back());
          return make_or(ops);
        }
        case SentKind::Exists:
          return make_exists(x->vars, go(x->sub));
      }
      return x;
    };
    Sentence b = go(body);
    return X.empty() ? b : make_forall(X, b);
  };
  for (const auto* n : proof_nodes(root)) {
    if (n->premises.empty() && n->seq.concl.size() == 1) {
      Sentence c = *n->seq.concl.begin();
      Sentence m = perturb(c);
      if (sentence_equal(m, c)) continue;
      out.push_back({"perturb leaf " + n->id, rebuild_with(root, n, [&](ProofNode& x) { x.seq.concl = {m}; })});
    }
    if (n->rule == Rule::GMP && n->premises.size() > 2)
      out.push_back({"drop last premise of " + n->id,
                     rebuild_with(root, n, [](ProofNode& x) { x.premises.pop_back(); })});
    if (n->rule == Rule::Star_I)
      out.push_back({"shift index of " + n->id, rebuild_with(root, n, [](ProofNode& x) {
                       x.index = x.index > 0 ? x.index - 1 : 1;
                     })});
  }
  return out;
}

}  // namespace ta
