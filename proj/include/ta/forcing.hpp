#pragma once

// Forcing over finite posets of conditions, with bounded term universes.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "ta/basic.hpp"
#include "ta/calculus.hpp"
#include "ta/core.hpp"
#include "ta/lexer.hpp"
#include "ta/semantics.hpp"
#include "ta/syntax.hpp"
#include "ta/tap.hpp"

namespace ta {

struct Condition {
  std::string name;
  Signature sig;
  SentSet atoms;                      // f(p)
  std::vector<NamedSentence> gamma;   // syntactic conditions only
  std::vector<int> parents;
  std::vector<Variable> henkin;       // constants added here, not inherited
  std::string consistency;            // how consistency was established
  std::optional<FiniteModel> certificate;
};

struct ForcingProperty {
  std::string name;
  bool syntactic = false;
  Signature base;
  std::vector<Condition> conds;
  std::vector<std::vector<char>> le;
  int least = -1;

  int size() const { return static_cast<int>(conds.size()); }
  bool leq(int p, int q) const { return le[p][q] != 0; }

  std::vector<int> above(int p) const {
    std::vector<int> out;
    for (int q = 0; q < size(); ++q)
      if (leq(p, q)) out.push_back(q);
    return out;
  }

  int index(const std::string& n) const {
    for (int i = 0; i < size(); ++i)
      if (conds[i].name == n) return i;
    throw Error("unknown condition " + n);
  }

  SentSet gamma_set(int p) const {
    SentSet s;
    for (const auto& g : conds[p].gamma) s.insert(g.sentence);
    return s;
  }

  // Order from parent edges, or by inclusion for syntactic conditions.
  void finalize() {
    int n = size();
    le.assign(n, std::vector<char>(n, 0));
    for (int p = 0; p < n; ++p) le[p][p] = 1;
    if (syntactic) {
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          SentSet gp = gamma_set(p), gq = gamma_set(q);
          bool sub = std::includes(gq.begin(), gq.end(), gp.begin(), gp.end(), SentLess{});
          if (conds[p].sig.included_in(conds[q].sig) && sub) le[p][q] = 1;
        }
    } else {
      for (int q = 0; q < n; ++q)
        for (int p : conds[q].parents) le[p][q] = 1;
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          if (le[i][k])
            for (int j = 0; j < n; ++j)
              if (le[k][j]) le[i][j] = 1;
    }
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (p != q && le[p][q] && le[q][p])
          throw Error("conditions " + conds[p].name + " and " + conds[q].name + " are below each other");
    least = -1;
    for (int p = 0; p < n && least < 0; ++p) {
      bool all = true;
      for (int q = 0; q < n; ++q) all = all && le[p][q];
      if (all) least = p;
    }
  }
};

// ------------------------------------------------------------ universes

// Every atomic sentence over the ground terms of sig up to depth.
inline std::vector<Sentence> atom_universe(const Signature& sig, std::size_t depth) {
  TermUniverse U = enumerate_terms(sig, depth);
  std::vector<Sentence> out;
  for (const auto& [s, ts] : U.by_sort)
    for (const auto& a : ts)
      for (const auto& b : ts) {
        out.push_back(make_eq(a, b));
        for (const auto& l : sig.labels) out.push_back(make_trans(a, make_label(l), b));
      }
  return out;
}

// Canonical size-then-lexicographic order.
inline bool canonical_less(const Sentence& a, const Sentence& b, const Signature& sig) {
  if (a->size != b->size) return a->size < b->size;
  return print_sentence(a, sig) < print_sentence(b, sig);
}

// Sentences built from the given atoms: the atoms, their negations, binary
// disjunctions, and one more layer of negation; plus compound transitions
// and single-variable existentials derived from the transition atoms.
inline std::vector<Sentence> sentence_universe(const Signature& sig, const std::vector<Sentence>& atoms,
                                               std::size_t limit = 0) {
  SentSet pool;
  std::vector<Sentence> base(atoms.begin(), atoms.end());
  for (const auto& a : base) pool.insert(a);
  std::vector<Sentence> lvl1;
  for (const auto& a : base) lvl1.push_back(make_not(a));
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = i + 1; j < base.size(); ++j) lvl1.push_back(make_or({base[i], base[j]}));
  for (const auto& a : base) {
    if (a->kind != SentKind::Trans) continue;
    pool.insert(make_trans(a->l, make_star(a->act), a->r));
    for (const auto& b : base)
      if (b->kind == SentKind::Trans && term_equal(a->r, b->l)) {
        pool.insert(make_trans(a->l, make_seq(a->act, b->act), b->r));
        pool.insert(make_trans(a->l, make_star(a->act), b->r));
      }
    for (const auto& b : base)
      if (b->kind == SentKind::Trans && term_equal(a->l, b->l) && term_equal(a->r, b->r) && !action_equal(a->act, b->act))
        pool.insert(make_trans(a->l, make_union(a->act, b->act), a->r));
    Variable x{"x", a->r->sort, 0};
    pool.insert(make_exists({x}, make_trans(a->l, a->act, make_var(x))));
  }
  for (const auto& s : lvl1) pool.insert(s);
  for (const auto& s : lvl1) pool.insert(make_not(s));
  std::vector<Sentence> out(pool.begin(), pool.end());
  std::sort(out.begin(), out.end(), [&](const Sentence& a, const Sentence& b) { return canonical_less(a, b, sig); });
  if (limit && out.size() > limit) out.resize(limit);
  return out;
}

// psi_p: a finite prefix of the canonical enumeration of Sen(sig).
inline std::vector<Sentence> enumerate_sentences(const Signature& sig, std::size_t term_depth, std::size_t limit) {
  return sentence_universe(sig, atom_universe(sig, term_depth), limit);
}

// ------------------------------------------------------------ forcing

enum class Tri { False, True, Capped };

inline std::string tri_name(Tri t) { return t == Tri::True ? "true" : t == Tri::False ? "false" : "capped"; }

struct ForcingCapped : Error {
  explicit ForcingCapped(const std::string& what) : Error("bound exhausted: " + what) {}
};

class Forcer {
 public:
  Forcer(const ForcingProperty& fp, std::size_t term_depth) : fp_(fp), depth_(term_depth) {}

  Tri forces(int p, const Sentence& phi) {
    auto key = std::make_pair(p, phi);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Tri v = eval(p, phi);
    memo_[key] = v;
    return v;
  }

  Tri weakly_forces(int p, const Sentence& phi) { return forces(p, make_not(make_not(phi))); }

  bool forces_bool(int p, const Sentence& phi) { return decided(forces(p, phi), phi, p); }
  bool weakly_forces_bool(int p, const Sentence& phi) { return decided(weakly_forces(p, phi), phi, p); }

  std::size_t depth() const { return depth_; }

 private:
  struct KeyLess {
    bool operator()(const std::pair<int, Sentence>& a, const std::pair<int, Sentence>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return compare_sentences(a.second, b.second) < 0;
    }
  };
  struct Universe {
    std::map<std::string, std::vector<Term>> by_sort;
    bool complete = true;
  };

  const ForcingProperty& fp_;
  std::size_t depth_;
  std::map<std::pair<int, Sentence>, Tri, KeyLess> memo_;
  std::map<int, Universe> univ_;

  bool decided(Tri t, const Sentence& phi, int p) const {
    if (t == Tri::Capped)
      throw ForcingCapped(fp_.conds[p].name + " and " + print_sentence(phi, fp_.conds[p].sig));
    return t == Tri::True;
  }

  const Universe& universe(int p) {
    auto it = univ_.find(p);
    if (it != univ_.end()) return it->second;
    TermUniverse U = enumerate_terms(fp_.conds[p].sig, depth_);
    Universe u;
    u.complete = U.complete;
    std::map<std::string, std::set<Term, TermLess>> have;
    for (const auto& [s, ts] : U.by_sort) have[s].insert(ts.begin(), ts.end());
    for (const auto& a : fp_.conds[p].atoms) {
      collect_subterms(a->l, have[a->l->sort]);
      collect_subterms(a->r, have[a->r->sort]);
    }
    for (const auto& [s, ts] : have) u.by_sort[s].assign(ts.begin(), ts.end());
    return univ_[p] = u;
  }

  // Forced transitions for an action, over the universe plus extra terms.
  Relation action_rel(int p, const Action& a, const std::vector<Term>& terms,
                      const std::map<Term, int, TermLess>& idx) {
    int n = static_cast<int>(terms.size());
    const SentSet& f = fp_.conds[p].atoms;
    switch (a->kind) {
      case ActKind::Label: {
        Relation r(n);
        for (const auto& s : f) {
          if (s->kind != SentKind::Trans || s->act->kind != ActKind::Label || s->act->label != a->label) continue;
          auto i = idx.find(s->l), j = idx.find(s->r);
          if (i != idx.end() && j != idx.end()) r.set(i->second, j->second);
        }
        return r;
      }
      case ActKind::Seq:
        return rel_compose(action_rel(p, a->a, terms, idx), action_rel(p, a->b, terms, idx));
      case ActKind::Union:
        return rel_union(action_rel(p, a->a, terms, idx), action_rel(p, a->b, terms, idx));
      case ActKind::Star: {
        // a^0 is forced through the equation atoms, a^n for n > 0 through paths.
        Relation step = action_rel(p, a->a, terms, idx);
        Relation plus = rel_compose(step, rel_star(step));
        return rel_union(eq_rel(p, terms, idx), plus);
      }
      case ActKind::Pow:
        if (a->symbolic) throw Error("symbolic exponent in a forced sentence");
        if (a->exp == 0) return eq_rel(p, terms, idx);
        return action_rel(p, make_power(a->a, a->exp), terms, idx);
    }
    return Relation(n);
  }

  Relation eq_rel(int p, const std::vector<Term>&, const std::map<Term, int, TermLess>& idx) {
    Relation r(static_cast<int>(idx.size()));
    for (const auto& s : fp_.conds[p].atoms) {
      if (s->kind != SentKind::Eq) continue;
      auto i = idx.find(s->l), j = idx.find(s->r);
      if (i != idx.end() && j != idx.end()) r.set(i->second, j->second);
    }
    return r;
  }

  Tri eval(int p, const Sentence& phi) {
    const Condition& c = fp_.conds[p];
    switch (phi->kind) {
      case SentKind::Eq:
        return c.atoms.count(phi) ? Tri::True : Tri::False;
      case SentKind::Trans: {
        if (phi->act->kind == ActKind::Label) return c.atoms.count(phi) ? Tri::True : Tri::False;
        const Universe& u = universe(p);
        std::set<Term, TermLess> ts;
        auto it = u.by_sort.find(phi->l->sort);
        if (it != u.by_sort.end()) ts.insert(it->second.begin(), it->second.end());
        ts.insert(phi->l);
        ts.insert(phi->r);
        std::vector<Term> terms(ts.begin(), ts.end());
        std::map<Term, int, TermLess> idx;
        for (std::size_t i = 0; i < terms.size(); ++i) idx[terms[i]] = static_cast<int>(i);
        Relation r = action_rel(p, phi->act, terms, idx);
        if (r.get(idx.at(phi->l), idx.at(phi->r))) return Tri::True;
        return u.complete ? Tri::False : Tri::Capped;
      }
      case SentKind::Not: {
        bool capped = false;
        for (int q : fp_.above(p)) {
          Tri v = forces(q, phi->sub);
          if (v == Tri::True) return Tri::False;
          if (v == Tri::Capped) capped = true;
        }
        return capped ? Tri::Capped : Tri::True;
      }
      case SentKind::Or: {
        bool capped = false;
        for (const auto& o : phi->ops) {
          Tri v = forces(p, o);
          if (v == Tri::True) return Tri::True;
          if (v == Tri::Capped) capped = true;
        }
        return capped ? Tri::Capped : Tri::False;
      }
      case SentKind::Exists: {
        const Universe& u = universe(p);
        bool capped = !u.complete;
        std::vector<std::vector<Term>> choices;
        for (const auto& x : phi->vars) {
          auto it = u.by_sort.find(x.sort);
          choices.push_back(it == u.by_sort.end() ? std::vector<Term>{} : it->second);
          if (choices.back().empty()) return capped ? Tri::Capped : Tri::False;
        }
        std::vector<std::size_t> pos(choices.size(), 0);
        while (true) {
          Substitution th;
          for (std::size_t i = 0; i < choices.size(); ++i) th[phi->vars[i]] = choices[i][pos[i]];
          Tri v = forces(p, apply_substitution(th, phi->sub));
          if (v == Tri::True) return Tri::True;
          if (v == Tri::Capped) capped = true;
          std::size_t k = 0;
          while (k < pos.size()) {
            if (++pos[k] < choices[k].size()) break;
            pos[k] = 0;
            ++k;
          }
          if (k == pos.size()) break;
        }
        return capped ? Tri::Capped : Tri::False;
      }
    }
    return Tri::False;
  }
};

// ------------------------------------------------------------ axioms and lemma

struct AxiomReport {
  std::vector<std::string> violations;
  std::size_t atoms_checked = 0;
  bool ok() const { return violations.empty(); }
};

// Axioms (1)-(3) structurally, axiom (4) over the atoms of each condition's
// signature up to term_depth. Entailment f(p) |= phi is decided by decide_basic.
inline AxiomReport check_forcing_axioms(const ForcingProperty& fp, std::size_t term_depth) {
  AxiomReport rep;
  if (fp.least < 0) rep.violations.push_back("(1) no least condition");
  for (int p = 0; p < fp.size(); ++p)
    for (int q = 0; q < fp.size(); ++q) {
      if (!fp.leq(p, q)) continue;
      if (!fp.conds[p].sig.included_in(fp.conds[q].sig))
        rep.violations.push_back("(2) signature of " + fp.conds[p].name + " not included in " + fp.conds[q].name);
      const auto &fa = fp.conds[p].atoms, &fb = fp.conds[q].atoms;
      if (!std::includes(fb.begin(), fb.end(), fa.begin(), fa.end(), SentLess{}))
        rep.violations.push_back("(3b) atoms of " + fp.conds[p].name + " not included in " + fp.conds[q].name);
    }
  for (int p = 0; p < fp.size(); ++p) {
    const Condition& c = fp.conds[p];
    for (const auto& a : c.atoms) {
      bool ok = is_atomic(a);
      if (ok) {
        try {
          check_sentence(c.sig, a);
        } catch (const Error&) {
          ok = false;
        }
      }
      if (!ok) rep.violations.push_back("(3a) " + print_sentence(a, c.sig) + " at " + c.name + " is not an atom over its signature");
    }
    std::vector<Sentence> atoms(c.atoms.begin(), c.atoms.end());
    for (const auto& phi : atom_universe(c.sig, term_depth)) {
      ++rep.atoms_checked;
      if (!decide_basic(c.sig, atoms, phi)) continue;
      bool found = false;
      for (int q : fp.above(p)) found = found || fp.conds[q].atoms.count(phi) > 0;
      if (!found)
        rep.violations.push_back("(4) " + c.name + " entails " + print_sentence(phi, c.sig) + " but no extension contains it");
    }
  }
  return rep;
}

struct LemmaReport {
  std::size_t checked = 0;
  std::size_t capped = 0;
  std::vector<std::string> counterexamples;
  bool ok() const { return counterexamples.empty(); }
};

inline bool sentence_over(const Signature& sig, const Sentence& s) {
  try {
    check_sentence(sig, s);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// The four properties of forcing, exhaustively over conditions and universe.
inline LemmaReport validate_forcing_lemma(const ForcingProperty& fp, const std::vector<Sentence>& universe,
                                          std::size_t term_depth) {
  LemmaReport rep;
  Forcer F(fp, term_depth);
  auto bad = [&](const std::string& clause, int p, const Sentence& phi) {
    rep.counterexamples.push_back(clause + " at " + fp.conds[p].name + ": " + print_sentence(phi, fp.conds[p].sig));
  };
  for (int p = 0; p < fp.size(); ++p)
    for (const auto& phi : universe) {
      if (!sentence_over(fp.conds[p].sig, phi)) continue;
      Tri f = F.forces(p, phi);
      Tri nn = F.forces(p, make_not(make_not(phi)));
      Tri n = F.forces(p, make_not(phi));
      if (f == Tri::Capped || nn == Tri::Capped || n == Tri::Capped) {
        ++rep.capped;
        continue;
      }
      ++rep.checked;
      // (1)
      bool every = true, capped = false;
      for (int q : fp.above(p)) {
        bool some = false;
        for (int r : fp.above(q)) {
          Tri v = F.forces(r, phi);
          if (v == Tri::Capped) capped = true;
          some = some || v == Tri::True;
        }
        every = every && some;
      }
      if (!capped && every != (nn == Tri::True)) bad("(1)", p, phi);
      // (2)
      if (f == Tri::True)
        for (int q : fp.above(p))
          if (F.forces(q, phi) == Tri::False) bad("(2) towards " + fp.conds[q].name, p, phi);
      // (3)
      if (f == Tri::True && nn != Tri::True) bad("(3)", p, phi);
      // (4)
      if (f == Tri::True && n == Tri::True) bad("(4)", p, phi);
    }
  return rep;
}

// ------------------------------------------------------------ generic sets

inline std::uint64_t pair_code(std::uint64_t i, std::uint64_t j) { return ((i + j) * (i + j + 1) + 2 * j) / 2; }

inline std::pair<std::uint64_t, std::uint64_t> unpair_code(std::uint64_t n) {
  std::uint64_t w = 0;
  while ((w + 1) * (w + 2) / 2 <= n) ++w;
  std::uint64_t j = n - w * (w + 1) / 2;
  return {w - j, j};
}

struct GenericStep {
  std::uint64_t n = 0, i = 0, j = 0;
  std::optional<Sentence> sentence;  // psi_{p_i}(j), absent beyond the enumeration prefix
  int from = 0, to = 0;
  std::string decision;  // "forced", "negated", "capped", "beyond"
};

struct GenericSet {
  std::vector<int> chain;
  std::set<int> members;
  std::vector<GenericStep> ledger;
  std::size_t enum_limit = 0;
  std::size_t term_depth = 0;
};

// Chain construction of the existence proof, run for N steps. When several
// extensions force the target the first minimal one in file order is taken.
inline GenericSet build_generic(const ForcingProperty& fp, int p0, std::size_t N, std::size_t enum_limit,
                                std::size_t term_depth) {
  GenericSet G;
  G.enum_limit = enum_limit;
  G.term_depth = term_depth;
  Forcer F(fp, term_depth);
  std::map<int, std::vector<Sentence>> psi;
  auto psi_of = [&](int p) -> const std::vector<Sentence>& {
    auto it = psi.find(p);
    if (it != psi.end()) return it->second;
    return psi[p] = enumerate_sentences(fp.conds[p].sig, term_depth, enum_limit);
  };
  G.chain.push_back(p0);
  for (std::uint64_t n = 0; n < N; ++n) {
    auto [i, j] = unpair_code(n);
    int pn = G.chain.back();
    GenericStep st;
    st.n = n;
    st.i = i;
    st.j = j;
    st.from = pn;
    st.to = pn;
    const auto& en = psi_of(G.chain[i]);
    if (j >= en.size()) {
      st.decision = "beyond";
    } else {
      Sentence target = en[j];
      st.sentence = target;
      std::vector<int> cands;
      bool capped = false;
      for (int q : fp.above(pn)) {
        Tri v = F.forces(q, target);
        if (v == Tri::True) cands.push_back(q);
        if (v == Tri::Capped) capped = true;
      }
      int pick = -1;
      for (int q : cands) {
        bool minimal = true;
        for (int r : cands) minimal = minimal && !(r != q && fp.leq(r, q));
        if (minimal) {
          pick = q;
          break;
        }
      }
      if (pick >= 0) {
        st.to = pick;
        st.decision = "forced";
      } else {
        st.decision = capped ? "capped" : "negated";
      }
    }
    G.chain.push_back(st.to);
    G.ledger.push_back(st);
  }
  for (int q = 0; q < fp.size(); ++q)
    for (int c : G.chain)
      if (fp.leq(q, c)) G.members.insert(q);
  return G;
}

struct GenericCheck {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

// Ideal clauses exactly, decidedness over the ledger.
inline GenericCheck check_generic(const ForcingProperty& fp, const GenericSet& G) {
  GenericCheck rep;
  Forcer F(fp, G.term_depth);
  for (int p : G.members)
    for (int q = 0; q < fp.size(); ++q)
      if (fp.leq(q, p) && !G.members.count(q)) rep.problems.push_back("not downward closed at " + fp.conds[q].name);
  for (int p : G.members)
    for (int q : G.members) {
      bool join = false;
      for (int r : G.members) join = join || (fp.leq(p, r) && fp.leq(q, r));
      if (!join) rep.problems.push_back("no upper bound for " + fp.conds[p].name + " and " + fp.conds[q].name);
    }
  for (std::size_t k = 0; k + 1 < G.chain.size(); ++k)
    if (!fp.leq(G.chain[k], G.chain[k + 1])) rep.problems.push_back("chain decreases at step " + std::to_string(k));
  for (const auto& st : G.ledger) {
    if (!st.sentence) continue;
    if (st.decision == "forced" && F.forces(st.to, *st.sentence) != Tri::True)
      rep.problems.push_back("step " + std::to_string(st.n) + " does not force its target");
    if (st.decision == "negated" && F.forces(st.to, make_not(*st.sentence)) != Tri::True)
      rep.problems.push_back("step " + std::to_string(st.n) + " does not force the negation");
  }
  return rep;
}

inline Signature generic_signature(const ForcingProperty& fp, const GenericSet& G) {
  Signature s = fp.conds[G.chain.front()].sig;
  for (int p : G.members) s = signature_union(s, fp.conds[p].sig);
  return s;
}

// G forces phi when some member does.
inline Tri generic_forces(const ForcingProperty& fp, const GenericSet& G, const Sentence& phi, Forcer& F) {
  bool capped = false;
  for (int p : G.members) {
    if (!sentence_over(fp.conds[p].sig, phi)) continue;
    Tri v = F.forces(p, phi);
    if (v == Tri::True) return Tri::True;
    if (v == Tri::Capped) capped = true;
  }
  return capped ? Tri::Capped : Tri::False;
}

inline GroundTheory generic_atoms(const ForcingProperty& fp, const GenericSet& G) {
  GroundTheory B;
  B.sig = generic_signature(fp, G);
  SentSet all;
  for (int p : G.members) all.insert(fp.conds[p].atoms.begin(), fp.conds[p].atoms.end());
  B.atoms.assign(all.begin(), all.end());
  return B;
}

inline std::variant<TermModel, Unbounded> generic_model(const ForcingProperty& fp, const GenericSet& G,
                                                       std::size_t term_depth) {
  return build_term_model(generic_atoms(fp, G), term_depth);
}

// ------------------------------------------------------------ .taf text

struct CrossCheck {
  std::string condition;
  Sentence phi;
  std::optional<std::string> script;  // proof text, absent for NONE
  std::string script_path;
  int line = 0;
};

struct Rejection {
  std::string condition;
  std::string reason;
};

struct TafFile {
  ForcingProperty fp;
  std::vector<Sentence> universe;  // optional explicit sentence universe
  std::vector<CrossCheck> checks;
  std::vector<Rejection> rejected;
};

inline std::string henkin_name(const std::string& sort, int i) { return "h_" + sort + "_" + std::to_string(i); }

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Gamma_p for syntactic conditions, f(p) otherwise.
inline Theory condition_theory(const ForcingProperty& fp, int p) {
  Theory th;
  const Condition& c = fp.conds[p];
  th.sig = c.sig;
  if (fp.syntactic) {
    th.axioms = c.gamma;
  } else {
    int k = 0;
    for (const auto& a : c.atoms) th.axioms.push_back({"f" + std::to_string(++k), a});
  }
  return th;
}

// A proof of bot from Gamma over the condition's own signature.
inline Verdict check_refutation(const TapScript& sc, const Theory& th) {
  TapReport rep = check_tap(sc, th, CheckMode::schematic_mode());
  if (!rep.overall.ok()) return rep.overall;
  const auto& seq = sc.root->seq;
  if (!(seq.sig == th.sig) || !calc::same_set(seq.ant, th.axiom_set()))
    return Verdict::invalid("refutation does not start from the condition's sentences");
  if (seq.concl.size() != 1 || !is_bot(*seq.concl.begin())) return Verdict::invalid("refutation does not conclude bot");
  return rep.overall;
}

// Consistency by a bounded search for a model of Gamma.
inline std::optional<FiniteModel> search_certificate(const Signature& sig, const SentSet& gamma, int k,
                                                     long double ceiling = default_ceiling()) {
  std::optional<FiniteModel> found;
  enumerate_models(
      sig, uniform_bound(sig, k),
      [&](const FiniteModel& m) {
        if (!satisfies_all(m, gamma)) return true;
        found = m;
        return false;
      },
      ceiling);
  return found;
}

namespace tafdetail {

struct Pending {
  Condition cond;
  bool rejected = false;
  std::string reason;
  int line = 0;
};

inline void sync_gamma_atoms(Condition& c) {
  c.atoms.clear();
  for (const auto& g : c.gamma)
    if (is_atomic(g.sentence)) c.atoms.insert(g.sentence);
}

}  // namespace tafdetail

// Conditions inherit the signature and atoms (or Gamma) of their parents.
inline TafFile parse_taf(const std::string& text, const std::filesystem::path& base_dir = ".") {
  TokenStream ts(text);
  TafFile out;
  ForcingProperty& fp = out.fp;
  std::string head = ts.ident("'forcing' or 'syntactic'");
  if (head == "syntactic") fp.syntactic = true;
  else if (head != "forcing") ts.fail("file must start with 'forcing' or 'syntactic'");
  fp.name = ts.ident("name");
  std::vector<tafdetail::Pending> all;
  std::map<std::string, int> by_name;
  struct PendingCheck {
    std::string cond, sentence, script;
    bool none = false;
    SourcePos pos;
  };
  std::vector<PendingCheck> pending_checks;
  std::vector<std::pair<std::string, SourcePos>> universe_src;

  auto ctx_for = [](const Signature& sig) {
    ParseContext ctx;
    ctx.sig = sig;
    return ctx;
  };

  while (!ts.at_end()) {
    SourcePos p = ts.peek().pos;
    std::string kw = ts.ident("block keyword");
    if (kw == "sorts" || kw == "ops" || kw == "labels") {
      if (!all.empty()) throw ParseError("signature blocks must precede the conditions", p);
      parse_signature_block(ts, fp.base, kw);
      continue;
    }
    if (kw == "universe") {
      ts.expect("{");
      while (!ts.accept("}")) {
        SourcePos q = ts.peek().pos;
        universe_src.push_back({ts.string_lit("sentence"), q});
        ts.accept(";");
        ts.accept(",");
      }
      continue;
    }
    if (kw == "check") {
      PendingCheck pc;
      pc.pos = p;
      pc.cond = ts.ident("condition");
      pc.sentence = ts.string_lit("sentence");
      std::string how = ts.ident("'proof' or 'none'");
      if (how == "proof") pc.script = ts.string_lit("proof file");
      else if (how == "none") pc.none = true;
      else throw ParseError("expected 'proof' or 'none'", p);
      pending_checks.push_back(pc);
      continue;
    }
    if (kw != "condition") throw ParseError("unknown block " + kw, p);
    fp.base.validate();
    tafdetail::Pending pd;
    pd.line = p.line;
    Condition& c = pd.cond;
    c.name = ts.ident("condition name");
    if (by_name.count(c.name)) throw ParseError("condition " + c.name + " defined twice", p);
    c.sig = fp.base;
    std::vector<int> parents;
    if (ts.accept(":")) {
      do {
        SourcePos q = ts.peek().pos;
        std::string par = ts.ident("parent condition");
        auto it = by_name.find(par);
        if (it == by_name.end()) throw ParseError("unknown parent " + par, q);
        parents.push_back(it->second);
      } while (ts.accept(","));
    }
    for (int q : parents) {
      const Condition& pc = all[q].cond;
      c.sig = signature_union(c.sig, pc.sig);
      c.atoms.insert(pc.atoms.begin(), pc.atoms.end());
      for (const auto& g : pc.gamma) {
        bool dup = false;
        for (const auto& h : c.gamma) dup = dup || sentence_equal(h.sentence, g.sentence);
        if (!dup) c.gamma.push_back(g);
      }
    }
    c.parents = parents;
    ts.expect("{");
    std::optional<std::string> cert_file, refute_file;
    std::optional<int> search_k;
    while (!ts.accept("}")) {
      SourcePos q = ts.peek().pos;
      std::string sub = ts.ident("condition block");
      if (sub == "sorts" || sub == "ops" || sub == "labels") {
        parse_signature_block(ts, c.sig, sub);
      } else if (sub == "henkin") {
        ts.expect("{");
        while (!ts.accept("}")) {
          std::string s = ts.ident("sort");
          if (!c.sig.sorts.count(s)) throw ParseError("unknown sort " + s, q);
          int i = 0;
          while (c.sig.funcs.count(FuncDecl{henkin_name(s, i), {}, s})) ++i;
          Variable h{henkin_name(s, i), s, 0};
          c.sig.add_func(FuncDecl{h.name, {}, s});
          c.henkin.push_back(h);
          ts.accept(",");
        }
      } else if (sub == "atoms") {
        if (fp.syntactic) throw ParseError("syntactic conditions list gamma, not atoms", q);
        for (const auto& a : parse_axiom_block(ts, ctx_for(c.sig))) c.atoms.insert(a.sentence);
      } else if (sub == "gamma") {
        if (!fp.syntactic) throw ParseError("gamma blocks belong to syntactic files", q);
        for (auto a : parse_axiom_block(ts, ctx_for(c.sig))) {
          bool dup = false;
          for (const auto& h : c.gamma) dup = dup || sentence_equal(h.sentence, a.sentence);
          if (dup) continue;
          if (a.name.empty()) a.name = c.name + "_" + std::to_string(c.gamma.size() + 1);
          c.gamma.push_back(a);
        }
      } else if (sub == "certificate") {
        if (ts.accept("search")) search_k = ts.integer();
        else cert_file = ts.string_lit("model file");
      } else if (sub == "refuted") {
        refute_file = ts.string_lit("proof file");
      } else {
        throw ParseError("unknown condition block " + sub, q);
      }
    }
    c.sig.validate();
    if (fp.syntactic) {
      tafdetail::sync_gamma_atoms(c);
      Theory th;
      th.sig = c.sig;
      th.axioms = c.gamma;
      SentSet g = th.axiom_set();
      if (refute_file) {
        TapScript sc = parse_tap(read_text_file(base_dir / *refute_file), th);
        Verdict v = check_refutation(sc, th);
        if (v.status == Status::Valid) {
          pd.rejected = true;
          pd.reason = "inconsistent: " + *refute_file + " derives bot";
        } else {
          throw ParseError("refutation " + *refute_file + " of " + c.name + " does not check: " + v.reason, p);
        }
      } else if (cert_file) {
        FiniteModel m = parse_model(read_text_file(base_dir / *cert_file), c.sig);
        if (!satisfies_all(m, g)) throw ParseError("certificate " + *cert_file + " is not a model of " + c.name, p);
        c.certificate = m;
        c.consistency = "model " + *cert_file;
      } else if (search_k) {
        auto m = search_certificate(c.sig, g, *search_k);
        if (!m) {
          pd.rejected = true;
          pd.reason = "no model with at most " + std::to_string(*search_k) + " elements per sort";
        } else {
          c.certificate = *m;
          c.consistency = "bounded search " + std::to_string(*search_k);
        }
      } else {
        throw ParseError("syntactic condition " + c.name + " needs a certificate or a refutation", p);
      }
    } else {
      for (const auto& a : c.atoms)
        if (!is_atomic(a)) throw ParseError("f(" + c.name + ") holds a non-atomic sentence", p);
    }
    by_name[c.name] = static_cast<int>(all.size());
    all.push_back(std::move(pd));
  }

  // Accepted conditions keep their file order; parent edges skip rejected ones.
  std::map<int, int> kept;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].rejected) {
      out.rejected.push_back({all[i].cond.name, all[i].reason});
      continue;
    }
    kept[static_cast<int>(i)] = fp.size();
    fp.conds.push_back(all[i].cond);
  }
  std::function<void(int, std::vector<int>&)> lift = [&](int i, std::vector<int>& acc) {
    for (int q : all[i].cond.parents) {
      auto it = kept.find(q);
      if (it != kept.end()) acc.push_back(it->second);
      else lift(q, acc);
    }
  };
  for (const auto& [orig, idx] : kept) {
    std::vector<int> ps;
    lift(orig, ps);
    fp.conds[idx].parents = ps;
  }
  if (fp.conds.empty()) throw Error("no consistent conditions");
  fp.finalize();

  Signature usig = fp.base;
  for (const auto& c : fp.conds) usig = signature_union(usig, c.sig);
  for (const auto& [src, q] : universe_src) {
    try {
      out.universe.push_back(parse_sentence(src, usig));
    } catch (const Error& e) {
      throw ParseError(e.what(), q);
    }
  }
  for (const auto& pc : pending_checks) {
    CrossCheck cc;
    cc.condition = pc.cond;
    cc.line = pc.pos.line;
    int i = -1;
    for (int k = 0; k < fp.size(); ++k)
      if (fp.conds[k].name == pc.cond) i = k;
    if (i < 0) throw ParseError("check names an unknown or rejected condition " + pc.cond, pc.pos);
    try {
      cc.phi = parse_sentence(pc.sentence, fp.conds[i].sig);
    } catch (const Error& e) {
      throw ParseError(e.what(), pc.pos);
    }
    if (!pc.none) {
      cc.script_path = (base_dir / pc.script).string();
      cc.script = read_text_file(cc.script_path);
    }
    out.checks.push_back(cc);
  }
  return out;
}

inline TafFile load_taf(const std::filesystem::path& file) {
  return parse_taf(read_text_file(file), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

inline std::string print_condition(const ForcingProperty& fp, int p) {
  const Condition& c = fp.conds[p];
  std::ostringstream o;
  o << c.name;
  if (!c.henkin.empty()) {
    o << " [";
    for (std::size_t i = 0; i < c.henkin.size(); ++i) o << (i ? ", " : "") << c.henkin[i].name;
    o << "]";
  }
  o << " {";
  bool first = true;
  for (const auto& a : c.atoms) {
    o << (first ? " " : "; ") << print_sentence(a, c.sig);
    first = false;
  }
  o << " }";
  return o.str();
}

// ------------------------------------------------------------ cross-check

struct CrossResult {
  const CrossCheck* check = nullptr;
  bool provable = false;
  std::string proof_status;  // "valid", "none", or the checker's reason
  Tri weak = Tri::False;
  bool agree = false;
};

// Gamma_p proves phi iff p weakly forces phi, instance by instance.
inline std::vector<CrossResult> cross_check_weak_forcing(const TafFile& taf, std::size_t term_depth) {
  std::vector<CrossResult> out;
  Forcer F(taf.fp, term_depth);
  for (const auto& cc : taf.checks) {
    CrossResult r;
    r.check = &cc;
    int p = taf.fp.index(cc.condition);
    Theory th = condition_theory(taf.fp, p);
    if (cc.script) {
      TapScript sc = parse_tap(*cc.script, th);
      if (!sc.goal) sc.goal = cc.phi;
      if (!sentence_equal(*sc.goal, cc.phi)) {
        r.proof_status = "script proves a different goal";
      } else {
        TapReport rep = check_tap(sc, th, CheckMode::schematic_mode());
        r.provable = rep.overall.status == Status::Valid;
        r.proof_status = r.provable ? "valid" : (rep.overall.ok() ? "bounded" : rep.overall.reason);
      }
    } else {
      r.proof_status = "none";
    }
    r.weak = F.weakly_forces(p, cc.phi);
    r.agree = r.weak != Tri::Capped && (r.weak == Tri::True) == r.provable;
    out.push_back(r);
  }
  return out;
}

}  // namespace ta
