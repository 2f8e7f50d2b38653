#pragma once

// Proof scripts (.tap): flat named steps that reference earlier steps.
//
//   abbrev Institute = "(M | CVM) \ coin \ coffee"
//   goal "Institute =[tau* ; 'theorem ; tau*]=> Institute"
//   s1 = rule Monotonicity conclusion @Act['theorem]
//   s2 = rule GMP [s1] subst {a := "'theorem", P := "M"} conclusion "..."
//   family kappa: s7 = rule ... conclusion "..."
//   s8 = rule Star_E [s6] family s7 conclusion "..."

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ta/calculus.hpp"
#include "ta/lexer.hpp"
#include "ta/syntax.hpp"

namespace ta {

struct TapStep {
  std::string name;
  Proof node;
  bool in_family = false;
  int line = 0;
};

struct TapScript {
  std::vector<TapStep> steps;
  std::map<std::string, Term> abbrevs;
  std::optional<Sentence> goal;
  Proof root;
};

namespace tapdetail {

struct PendingSubst {
  std::string var;
  std::optional<std::string> sort;
  std::string text;
  SourcePos pos;
};

}  // namespace tapdetail

inline TapScript parse_tap(const std::string& text, const Theory& th) {
  TokenStream ts(text);
  TapScript sc;
  std::map<std::string, Proof> by_name;
  auto axiom_ref = [&th](const std::string& name, SourcePos p) -> Sentence {
    auto s = th.axiom(name);
    if (!s) throw ParseError("unknown axiom @" + name, p);
    return *s;
  };
  auto ctx_for = [&](const Signature& sig) {
    ParseContext ctx;
    ctx.sig = sig;
    ctx.abbrevs = &sc.abbrevs;
    ctx.axiom_ref = axiom_ref;
    return ctx;
  };
  auto sentence_in = [&](const std::string& src, SourcePos p, const Signature& sig) -> Sentence {
    try {
      return parse_sentence(src, ctx_for(sig));
    } catch (const ParseError& e) {
      throw ParseError(std::string("in sentence: ") + e.what(), p);
    } catch (const Error& e) {
      throw ParseError(e.what(), p);
    }
  };
  // A sentence given as a string or as @AxiomName.
  auto sentence_arg = [&](const Signature& sig) -> Sentence {
    SourcePos p = ts.peek().pos;
    if (ts.accept("@")) return axiom_ref(SentenceParser::bracket_name(ts), p);
    return sentence_in(ts.string_lit("sentence"), p, sig);
  };
  SentSet axioms = th.axiom_set();

  while (!ts.at_end()) {
    SourcePos p = ts.peek().pos;
    if (ts.accept("abbrev")) {
      std::string name = ts.ident("abbreviation name");
      ts.expect("=");
      SourcePos q = ts.peek().pos;
      std::string src = ts.string_lit("term");
      try {
        sc.abbrevs[name] = parse_term(src, th.sig, std::nullopt, &sc.abbrevs);
      } catch (const Error& e) {
        throw ParseError(e.what(), q);
      }
      continue;
    }
    if (ts.accept("goal")) {
      sc.goal = sentence_arg(th.sig);
      continue;
    }
    bool fam = false;
    if (ts.accept("family")) {
      std::string k = ts.ident("kappa");
      if (k != "kappa") ts.fail("family steps are indexed by kappa");
      ts.expect(":");
      fam = true;
    }
    std::string name = ts.ident("step name");
    if (by_name.count(name)) throw ParseError("step " + name + " defined twice", p);
    ts.expect("=");
    ts.expect("rule");
    SourcePos rp = ts.peek().pos;
    std::string rname = ts.ident("rule name");
    auto rule = rule_from_name(rname);
    if (!rule) throw ParseError("unknown rule " + rname, rp);
    std::vector<Proof> prem;
    if (ts.accept("[")) {
      while (!ts.accept("]")) {
        SourcePos sp = ts.peek().pos;
        std::string ref = ts.ident("step reference");
        auto it = by_name.find(ref);
        if (it == by_name.end()) throw ParseError("unknown step " + ref, sp);
        prem.push_back(it->second);
        ts.accept(",");
      }
    }
    auto node = make_node(name, Sequent{th.sig, {}, {}}, *rule, prem);
    std::vector<Variable> over;
    std::vector<std::pair<std::string, SourcePos>> hyps_src;
    std::vector<Sentence> hyp_axioms;
    bool bare = false;
    std::vector<tapdetail::PendingSubst> substs;
    std::optional<std::string> family_ref;
    SourcePos family_pos;
    bool have_concl = false;
    std::vector<std::pair<std::string, SourcePos>> concl_src;
    std::vector<Sentence> concl_axioms;
    while (!have_concl) {
      SourcePos op = ts.peek().pos;
      std::string opt = ts.ident("step option or 'conclusion'");
      if (opt == "over") {
        SentenceParser sp(ts, ctx_for(th.sig));
        for (auto& v : sp.var_block(th.sig)) over.push_back(Variable{v.name, v.sort, 0});
      } else if (opt == "hyp") {
        if (ts.accept("@")) {
          hyp_axioms.push_back(axiom_ref(SentenceParser::bracket_name(ts), op));
        } else {
          SourcePos hp = ts.peek().pos;
          hyps_src.push_back({ts.string_lit("hypothesis"), hp});
        }
      } else if (opt == "bare") {
        bare = true;
      } else if (opt == "subst") {
        ts.expect("{");
        while (!ts.accept("}")) {
          tapdetail::PendingSubst ps;
          ps.pos = ts.peek().pos;
          ps.var = ts.ident("variable");
          if (ts.accept(":")) ps.sort = ts.ident("sort");
          ts.expect(":=");
          ps.text = ts.string_lit("term");
          substs.push_back(ps);
          ts.accept(",");
        }
      } else if (opt == "index") {
        if (ts.accept("kappa")) {
          node->index_symbolic = true;
          node->index = 0;
          if (ts.accept("+")) node->index = ts.integer();
          else if (ts.accept("-")) node->index = -ts.integer();
        } else {
          node->index = ts.integer();
        }
      } else if (opt == "fresh") {
        std::string x = ts.ident("fresh constant");
        ts.expect(":");
        std::string s = ts.ident("sort");
        node->fresh = Variable{x, s, 0};
      } else if (opt == "pick") {
        node->pick = ts.integer();
      } else if (opt == "family") {
        family_pos = ts.peek().pos;
        family_ref = ts.ident("family step");
      } else if (opt == "conclusion") {
        if (ts.accept("{")) {
          while (!ts.accept("}")) {
            if (ts.accept("@")) concl_axioms.push_back(axiom_ref(SentenceParser::bracket_name(ts), op));
            else {
              SourcePos cp = ts.peek().pos;
              concl_src.push_back({ts.string_lit("sentence"), cp});
            }
            ts.accept(",");
          }
        } else if (ts.accept("@")) {
          concl_axioms.push_back(axiom_ref(SentenceParser::bracket_name(ts), op));
        } else {
          SourcePos cp = ts.peek().pos;
          concl_src.push_back({ts.string_lit("sentence"), cp});
        }
        have_concl = true;
      } else {
        throw ParseError("unknown step option " + opt, op);
      }
    }
    Signature sig = th.sig;
    try {
      if (!over.empty()) sig = extend_signature(th.sig, over);
    } catch (const Error& e) {
      throw ParseError(e.what(), p);
    }
    if (node->fresh && !node->fresh->name.empty() && !sig.sorts.count(node->fresh->sort))
      throw ParseError("unknown sort " + node->fresh->sort, p);
    node->seq.sig = sig;
    if (!bare) node->seq.ant = axioms;
    for (const auto& h : hyp_axioms) node->seq.ant.insert(h);
    for (const auto& [src, hp] : hyps_src) {
      Signature hs = sig;
      // Comp_E premises mention the fresh constant in their hypotheses.
      node->seq.ant.insert(sentence_in(src, hp, hs));
    }
    for (const auto& c : concl_axioms) node->seq.concl.insert(c);
    for (const auto& [src, cp] : concl_src) node->seq.concl.insert(sentence_in(src, cp, sig));
    if (family_ref) {
      auto it = by_name.find(*family_ref);
      if (it == by_name.end()) throw ParseError("unknown family step " + *family_ref, family_pos);
      node->family = PremiseFamily{it->second, {}};
    }
    if (!substs.empty()) {
      // Variable sorts come from the quantifier being instantiated.
      std::vector<Variable> X;
      if (*rule == Rule::GMP && !prem.empty() && prem[0]->seq.concl.size() == 1)
        X = calc::strip_forall(*prem[0]->seq.concl.begin()).first;
      if (*rule == Rule::Subst && node->seq.concl.size() == 1 && (*node->seq.concl.begin())->kind == SentKind::Exists)
        X = (*node->seq.concl.begin())->vars;
      for (const auto& ps : substs) {
        std::optional<std::string> sort = ps.sort;
        if (!sort)
          for (const auto& x : X)
            if (x.name == ps.var) sort = x.sort;
        if (!sort) throw ParseError("cannot infer the sort of " + ps.var + "; write " + ps.var + ":sort", ps.pos);
        try {
          node->subst[Variable{ps.var, *sort, 0}] = parse_term(ps.text, sig, *sort, &sc.abbrevs);
        } catch (const Error& e) {
          throw ParseError(e.what(), ps.pos);
        }
      }
    }
    by_name[name] = node;
    sc.steps.push_back(TapStep{name, node, fam, p.line});
  }
  for (auto it = sc.steps.rbegin(); it != sc.steps.rend(); ++it)
    if (!it->in_family) {
      sc.root = it->node;
      break;
    }
  if (!sc.root) throw ParseError("proof script has no steps", SourcePos{});
  return sc;
}

struct TapReport {
  Verdict overall;
  std::vector<std::pair<std::string, Verdict>> steps;
};

inline TapReport check_tap(const TapScript& sc, const Theory& th, CheckMode mode) {
  TapReport rep;
  std::map<std::string, Verdict> local;
  CheckOptions opt;
  opt.mode = mode;
  opt.on_node = [&](const ProofNode& n, const Verdict& v) {
    auto it = local.find(n.id);
    if (it == local.end()) local[n.id] = v;
    else it->second = combine(it->second, v);
  };
  rep.overall = check_proof(sc.root, opt);
  if (rep.overall.ok() && sc.goal) {
    const auto& root = *sc.root;
    if (!(root.seq.sig == th.sig) || !calc::same_set(root.seq.ant, th.axiom_set()) || root.seq.concl.size() != 1 ||
        !sentence_equal(*root.seq.concl.begin(), *sc.goal)) {
      Verdict v = Verdict::invalid("root step does not prove the stated goal from the theory");
      v.path = {root.id};
      rep.overall = v;
    }
  }
  for (const auto& st : sc.steps) {
    auto it = local.find(st.name);
    if (it != local.end()) rep.steps.push_back({st.name, it->second});
    else {
      Verdict v;
      v.reason = "not reached from the root";
      rep.steps.push_back({st.name, v});
    }
  }
  return rep;
}

// Writes a proof tree back as a script; shared subtrees appear once.
inline std::string print_tap(const Proof& root, const Theory& th, const std::map<std::string, Term>& abbrevs = {}) {
  std::ostringstream o;
  for (const auto& [n, t] : abbrevs) o << "abbrev " << n << " = \"" << print_term(t, th.sig) << "\"\n";
  std::map<const ProofNode*, std::string> names;
  SentSet axioms = th.axiom_set();
  int counter = 0;
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::function<void(const Proof&, bool)> emit = [&](const Proof& p, bool fam) {
    if (names.count(p.get())) return;
    for (const auto& c : p->premises) emit(c, fam);
    if (p->family) emit(p->family->tmpl, true);
    std::string name = p->id.empty() ? "s" + std::to_string(++counter) : p->id;
    for (const auto& [k, v] : names)
      if (v == name) name += "_" + std::to_string(++counter);
    names[p.get()] = name;
    if (fam) o << "family kappa: ";
    o << name << " = rule " << rule_name(p->rule);
    if (!p->premises.empty()) {
      o << " [";
      for (std::size_t i = 0; i < p->premises.size(); ++i) o << (i ? ", " : "") << names[p->premises[i].get()];
      o << "]";
    }
    std::vector<Variable> over;
    for (const auto& v : p->seq.sig.vars)
      if (!th.sig.is_var(v.name, v.sort)) over.push_back(v);
    if (!over.empty()) o << " over " << print_vars(over);
    bool has_all = std::includes(p->seq.ant.begin(), p->seq.ant.end(), axioms.begin(), axioms.end(), SentLess{});
    if (!has_all) o << " bare";
    for (const auto& s : p->seq.ant)
      if (!has_all || !axioms.count(s)) o << " hyp " << quote(print_sentence(s, p->seq.sig));
    if (!p->subst.empty()) {
      o << " subst {";
      bool first = true;
      for (const auto& [v, t] : p->subst) {
        o << (first ? "" : ", ") << v.name << ":" << v.sort << " := " << quote(print_term(t, p->seq.sig));
        first = false;
      }
      o << "}";
    }
    if (p->rule == Rule::Star_I) {
      if (p->index_symbolic) {
        o << " index kappa";
        if (p->index > 0) o << "+" << p->index;
        if (p->index < 0) o << "-" << -p->index;
      } else {
        o << " index " << p->index;
      }
    }
    if (p->fresh) o << " fresh " << p->fresh->name << ":" << p->fresh->sort;
    if (p->pick) o << " pick " << p->pick;
    if (p->family) o << " family " << names[p->family->tmpl.get()];
    if (p->seq.concl.size() == 1) {
      const Sentence& c = *p->seq.concl.begin();
      std::string ref;
      for (const auto& a : th.axioms)
        if (ref.empty() && sentence_equal(a.sentence, c)) ref = a.name;
      if (!ref.empty()) o << " conclusion @" << ref;
      else o << " conclusion " << quote(print_sentence(c, p->seq.sig));
    } else {
      o << " conclusion {";
      bool first = true;
      for (const auto& c : p->seq.concl) {
        o << (first ? " " : ", ") << quote(print_sentence(c, p->seq.sig));
        first = false;
      }
      o << " }";
    }
    o << "\n";
  };
  emit(root, false);
  return o.str();
}

}  // namespace ta
