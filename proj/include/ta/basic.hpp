#pragma once

// Basic entailment on ground atoms: congruence closure plus transition
// saturation under P and M, and the term model A^E.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ta/core.hpp"
#include "ta/semantics.hpp"
#include "ta/syntax.hpp"

namespace ta {

struct GroundTheory {
  Signature sig;
  std::vector<Sentence> atoms;
};

struct BasicStep {
  std::string rule;
  std::vector<std::string> premises;
  std::string derived;
};

struct BasicResult {
  bool holds = false;
  std::set<std::size_t> used;  // indices into E.atoms
  std::vector<BasicStep> trace;
};

inline void check_ground_atom(const Signature& sig, const Sentence& s) {
  if (!is_atomic(s)) throw Error("not an atomic sentence: " + print_sentence(s));
  check_term(sig, s->l);
  check_term(sig, s->r);
  if (s->kind == SentKind::Trans && !sig.labels.count(s->act->label))
    throw Error("undeclared label " + s->act->label);
}

// Saturated congruence over a subterm-closed universe.
class Congruence {
 public:
  Congruence(const Signature& sig, const std::vector<Sentence>& atoms, const std::vector<Term>& extra)
      : sig_(sig), atoms_(atoms) {
    std::set<Term, TermLess> all;
    for (const auto& a : atoms_) {
      check_ground_atom(sig_, a);
      collect_subterms(a->l, all);
      collect_subterms(a->r, all);
    }
    for (const auto& t : extra) {
      check_term(sig_, t);
      collect_subterms(t, all);
    }
    init(all);
  }

  Congruence(const Signature& sig, const std::vector<Sentence>& atoms, const std::set<Term, TermLess>& universe)
      : sig_(sig), atoms_(atoms) {
    std::set<Term, TermLess> all = universe;
    for (const auto& a : atoms_) {
      check_ground_atom(sig_, a);
      collect_subterms(a->l, all);
      collect_subterms(a->r, all);
    }
    init(all);
  }

  const std::vector<Term>& terms() const { return terms_; }
  int id(const Term& t) const {
    auto it = index_.find(t);
    return it == index_.end() ? -1 : it->second;
  }
  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }
  bool equal(const Term& a, const Term& b) const {
    int x = id(a), y = id(b);
    if (x < 0 || y < 0) return term_equal(a, b);
    return find(x) == find(y);
  }
  // Least term of the class in canonical order.
  const Term& rep(int x) const { return terms_[rep_[find(x)]]; }

  bool has_trans(const std::string& l, const Term& a, const Term& b) const { return trans_fact(l, a, b) >= 0; }

  // Transition pairs by class, for term-model construction.
  std::set<std::tuple<std::string, int, int>> trans_classes() const {
    std::set<std::tuple<std::string, int, int>> out;
    for (const auto& f : facts_) out.insert({f.label, find(f.from), find(f.to)});
    return out;
  }

  // Why a == b: atom indices used, with the derivation appended to trace.
  void explain_eq(int a, int b, std::set<std::size_t>& used, std::vector<BasicStep>& trace) const {
    std::set<std::pair<int, int>> done;
    explain_eq_rec(a, b, used, trace, done);
  }

  std::optional<BasicResult> prove(const Sentence& goal) const {
    BasicResult r;
    int a = id(goal->l), b = id(goal->r);
    if (a < 0 || b < 0) return std::nullopt;
    if (goal->kind == SentKind::Eq) {
      if (find(a) != find(b)) return std::nullopt;
      explain_eq(a, b, r.used, r.trace);
    } else {
      int f = trans_fact(goal->act->label, goal->l, goal->r);
      if (f < 0) return std::nullopt;
      std::set<std::pair<int, int>> done;
      explain_fact(f, r.used, r.trace, done);
      const Fact& fact = facts_[f];
      if (fact.from != a || fact.to != b) {
        explain_eq_rec(fact.from, a, r.used, r.trace, done);
        explain_eq_rec(fact.to, b, r.used, r.trace, done);
        r.trace.push_back({"P", {fact_str(fact), eq_str(fact.from, a), eq_str(fact.to, b)}, print_sentence(goal)});
      }
    }
    r.holds = true;
    return r;
  }

 private:
  struct Edge {
    int other;
    int atom;       // >= 0: equation from E
    int cong_a = -1;  // otherwise congruence between two applications
    int cong_b = -1;
  };
  struct Fact {
    std::string label;
    int from, to;
    int atom = -1;
    int parent = -1;  // M-lift of this fact
    int pos = -1;
    int via_from = -1, via_to = -1;  // application terms the lift matched
  };

  void init(const std::set<Term, TermLess>& all) {
    terms_.assign(all.begin(), all.end());
    for (std::size_t i = 0; i < terms_.size(); ++i) index_[terms_[i]] = static_cast<int>(i);
    parent_.resize(terms_.size());
    rep_.resize(terms_.size());
    adj_.resize(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) parent_[i] = rep_[i] = static_cast<int>(i);
    args_.resize(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i)
      for (const auto& a : terms_[i]->args) args_[i].push_back(index_.at(a));
    for (std::size_t k = 0; k < atoms_.size(); ++k)
      if (atoms_[k]->kind == SentKind::Eq) merge(id(atoms_[k]->l), id(atoms_[k]->r), Edge{0, static_cast<int>(k)});
    close();
    saturate();
  }

  void merge(int a, int b, Edge why) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return;
    Edge e1 = why, e2 = why;
    e1.other = b;
    e2.other = a;
    adj_[a].push_back(e1);
    adj_[b].push_back(e2);
    // Rank by term order keeps the least term as representative.
    int keep = rep_[ra] < rep_[rb] ? ra : rb;
    int drop = keep == ra ? rb : ra;
    parent_[drop] = keep;
  }

  void close() {
    bool changed = true;
    while (changed) {
      changed = false;
      std::map<std::pair<FuncDecl, std::vector<int>>, int> sig_table;
      for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i]->args.empty()) continue;
        std::vector<int> key;
        for (int a : args_[i]) key.push_back(find(a));
        auto [it, fresh] = sig_table.insert({{decl_of(terms_[i]), key}, static_cast<int>(i)});
        if (!fresh && find(it->second) != find(static_cast<int>(i))) {
          Edge e{0, -1, it->second, static_cast<int>(i)};
          merge(it->second, static_cast<int>(i), e);
          changed = true;
        }
      }
    }
  }

  std::tuple<std::string, int, int> key(const Fact& f) const { return {f.label, find(f.from), find(f.to)}; }

  void saturate() {
    std::set<std::tuple<std::string, int, int>> seen;
    for (std::size_t k = 0; k < atoms_.size(); ++k)
      if (atoms_[k]->kind == SentKind::Trans) {
        Fact f{atoms_[k]->act->label, id(atoms_[k]->l), id(atoms_[k]->r), static_cast<int>(k)};
        if (seen.insert(key(f)).second) facts_.push_back(f);
      }
    std::vector<int> apps;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (!terms_[i]->args.empty() && sig_.is_mono(decl_of(terms_[i]))) apps.push_back(static_cast<int>(i));
    for (std::size_t next = 0; next < facts_.size(); ++next) {
      Fact cur = facts_[next];
      int cf = find(cur.from), ct = find(cur.to);
      for (int v : apps)
        for (std::size_t j = 0; j < args_[v].size(); ++j) {
          if (find(args_[v][j]) != cf) continue;
          for (int w : apps) {
            if (decl_of(terms_[v]) != decl_of(terms_[w])) continue;
            if (find(args_[w][j]) != ct) continue;
            bool same = true;
            for (std::size_t i = 0; i < args_[v].size() && same; ++i)
              if (i != j && find(args_[v][i]) != find(args_[w][i])) same = false;
            if (!same) continue;
            Fact f{cur.label, v, w, -1, static_cast<int>(next), static_cast<int>(j), v, w};
            if (seen.insert(key(f)).second) facts_.push_back(f);
          }
        }
    }
  }

  int trans_fact(const std::string& l, const Term& a, const Term& b) const {
    int x = id(a), y = id(b);
    if (x < 0 || y < 0) return -1;
    for (std::size_t k = 0; k < facts_.size(); ++k)
      if (facts_[k].label == l && find(facts_[k].from) == find(x) && find(facts_[k].to) == find(y))
        return static_cast<int>(k);
    return -1;
  }

  std::string eq_str(int a, int b) const { return print_term(terms_[a], sig_) + " = " + print_term(terms_[b], sig_); }
  std::string fact_str(const Fact& f) const {
    return print_term(terms_[f.from], sig_) + " =[" + f.label + "]=> " + print_term(terms_[f.to], sig_);
  }

  // Path between a and b in the proof forest.
  std::vector<std::pair<int, Edge>> path(int a, int b) const {
    std::map<int, std::pair<int, Edge>> prev;
    std::vector<int> queue{a};
    prev[a] = {a, Edge{0, -2}};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      int x = queue[i];
      if (x == b) break;
      for (const auto& e : adj_[x])
        if (!prev.count(e.other)) {
          prev[e.other] = {x, e};
          queue.push_back(e.other);
        }
    }
    std::vector<std::pair<int, Edge>> out;
    if (!prev.count(b)) return out;
    for (int x = b; x != a; x = prev[x].first) out.push_back({x, prev[x].second});
    std::reverse(out.begin(), out.end());
    return out;
  }

  void explain_eq_rec(int a, int b, std::set<std::size_t>& used, std::vector<BasicStep>& trace,
                      std::set<std::pair<int, int>>& done) const {
    if (a == b) {
      if (done.insert({a, b}).second) trace.push_back({"R", {}, eq_str(a, a)});
      return;
    }
    if (!done.insert({a, b}).second) return;
    auto steps = path(a, b);
    int cur = a;
    for (const auto& [x, e] : steps) {
      if (e.atom >= 0) {
        used.insert(static_cast<std::size_t>(e.atom));
        const auto& at = atoms_[e.atom];
        bool flipped = id(at->l) != cur;
        trace.push_back({"E", {}, print_sentence(at, sig_)});
        if (flipped) trace.push_back({"S", {print_sentence(at, sig_)}, eq_str(cur, x)});
      } else {
        std::vector<std::string> prem;
        for (std::size_t i = 0; i < args_[cur].size(); ++i) {
          explain_eq_rec(args_[cur][i], args_[x][i], used, trace, done);
          prem.push_back(eq_str(args_[cur][i], args_[x][i]));
        }
        trace.push_back({"F", prem, eq_str(cur, x)});
      }
      if (cur != a) trace.push_back({"T", {eq_str(a, cur), eq_str(cur, x)}, eq_str(a, x)});
      cur = x;
    }
  }

  void explain_fact(int k, std::set<std::size_t>& used, std::vector<BasicStep>& trace,
                    std::set<std::pair<int, int>>& done) const {
    const Fact& f = facts_[k];
    if (f.atom >= 0) {
      used.insert(static_cast<std::size_t>(f.atom));
      trace.push_back({"E", {}, print_sentence(atoms_[f.atom], sig_)});
      return;
    }
    const Fact& p = facts_[f.parent];
    explain_fact(f.parent, used, trace, done);
    int v = f.via_from, w = f.via_to;
    std::vector<std::string> prem{fact_str(p)};
    explain_eq_rec(p.from, args_[v][f.pos], used, trace, done);
    explain_eq_rec(p.to, args_[w][f.pos], used, trace, done);
    for (std::size_t i = 0; i < args_[v].size(); ++i)
      if (static_cast<int>(i) != f.pos) explain_eq_rec(args_[v][i], args_[w][i], used, trace, done);
    std::string lifted = print_term(terms_[v], sig_) + " =[" + f.label + "]=> " + print_term(terms_[w], sig_);
    trace.push_back({"M", prem, lifted});
  }

  Signature sig_;
  std::vector<Sentence> atoms_;
  std::vector<Term> terms_;
  std::map<Term, int, TermLess> index_;
  std::vector<int> parent_, rep_;
  std::vector<std::vector<int>> args_;
  std::vector<std::vector<Edge>> adj_;
  std::vector<Fact> facts_;
};

inline BasicResult decide_basic(const GroundTheory& E, const Sentence& goal) {
  check_ground_atom(E.sig, goal);
  if (goal->kind == SentKind::Eq && term_equal(goal->l, goal->r)) {
    BasicResult r;
    r.holds = true;
    r.trace.push_back({"R", {}, print_sentence(goal, E.sig)});
    return r;
  }
  Congruence cc(E.sig, E.atoms, std::vector<Term>{goal->l, goal->r});
  if (auto r = cc.prove(goal)) return *r;
  return BasicResult{};
}

inline bool decide_basic(const Signature& sig, const std::vector<Sentence>& atoms, const Sentence& goal) {
  return decide_basic(GroundTheory{sig, atoms}, goal).holds;
}

// ---------------------------------------------------------- term model

struct Unbounded {
  std::string sort;
};

struct TermModel {
  FiniteModel model;
  std::map<std::string, std::vector<Term>> reps;  // canonical representative per element
  std::map<Term, int, TermLess> class_of;         // every ground term up to the bound
};

inline std::string element_label(const Term& t, std::size_t k) {
  std::string s = print_term(t);
  bool plain = !s.empty();
  for (char c : s)
    if (!is_ident_char(c)) plain = false;
  return plain ? s : "e" + std::to_string(k);
}

inline std::variant<TermModel, Unbounded> build_term_model(const GroundTheory& E, std::size_t depth_bound) {
  TermUniverse U = enumerate_terms(E.sig, depth_bound);
  if (!U.complete) return Unbounded{U.unbounded_sort};
  std::set<Term, TermLess> all;
  for (const auto& [s, ts] : U.by_sort) all.insert(ts.begin(), ts.end());
  Congruence cc(E.sig, E.atoms, all);
  TermModel tm;
  FiniteModel& m = tm.model;
  m.sig = E.sig;
  std::map<int, int> elem;  // class root -> element index within its sort
  for (const auto& s : E.sig.sorts) {
    m.carrier[s] = 0;
    m.names[s] = {};
  }
  for (const auto& t : cc.terms()) {
    int root = cc.find(cc.id(t));
    if (elem.count(root)) continue;
    const std::string& s = t->sort;
    int e = m.carrier[s]++;
    elem[root] = e;
    const Term& r = cc.rep(root);
    tm.reps[s].push_back(r);
    m.names[s].push_back(element_label(r, m.names[s].size()));
  }
  for (const auto& [s, names] : m.names) {
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size())
      for (std::size_t i = 0; i < names.size(); ++i) m.names[s][i] = "e" + std::to_string(i);
  }
  for (const auto& t : cc.terms()) tm.class_of[t] = elem.at(cc.find(cc.id(t)));
  for (const auto& f : E.sig.funcs) {
    std::vector<int> tab(m.domain_size(f), 0);
    for (std::size_t idx = 0; idx < tab.size(); ++idx) {
      auto args = m.unindex(f, idx);
      std::vector<Term> targs;
      for (std::size_t i = 0; i < args.size(); ++i) targs.push_back(tm.reps[f.arity[i]][args[i]]);
      Term app = make_app(f, targs);
      tab[idx] = tm.class_of.at(app);
    }
    m.table[f] = tab;
  }
  for (const auto& l : E.sig.labels)
    for (const auto& s : E.sig.sorts) m.rel[l][s] = Relation(m.size(s));
  for (const auto& [l, a, b] : cc.trans_classes()) {
    const Term& ta = cc.terms()[a];
    m.rel[l][ta->sort].set(elem.at(a), elem.at(b));
  }
  return tm;
}

using Homomorphism = std::map<std::string, std::vector<int>>;

// The unique homomorphism from A^E into m, when m satisfies E.
inline std::optional<Homomorphism> check_initiality(const GroundTheory& E, const TermModel& tm, const FiniteModel& m) {
  for (const auto& a : E.atoms)
    if (!satisfies(m, a)) return std::nullopt;
  Homomorphism h;
  for (const auto& [s, reps] : tm.reps)
    for (const auto& r : reps) h[s].push_back(interpret_term(m, r));
  for (const auto& s : E.sig.sorts) h[s];
  for (const auto& [t, e] : tm.class_of)
    if (h[t->sort][e] != interpret_term(m, t)) return std::nullopt;
  const FiniteModel& q = tm.model;
  for (const auto& f : E.sig.funcs) {
    std::size_t dom = q.domain_size(f);
    for (std::size_t idx = 0; idx < dom; ++idx) {
      auto args = q.unindex(f, idx);
      std::vector<int> margs;
      for (std::size_t i = 0; i < args.size(); ++i) margs.push_back(h[f.arity[i]][args[i]]);
      if (h[f.result][q.apply(f, args)] != m.apply(f, margs)) return std::nullopt;
    }
  }
  for (const auto& l : E.sig.labels)
    for (const auto& s : E.sig.sorts) {
      Relation r = q.relation_or_empty(l, s), mr = m.relation_or_empty(l, s);
      for (int a = 0; a < r.n; ++a)
        for (int b = 0; b < r.n; ++b)
          if (r.get(a, b) && !mr.get(h[s][a], h[s][b])) return std::nullopt;
    }
  return h;
}

}  // namespace ta
