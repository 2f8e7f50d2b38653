// Shared helpers for the test binaries: fixtures, seeded generators and
// small reference implementations used as oracles.
#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "ta/ta.hpp"

namespace tt {

using namespace ta;

inline std::string data_path(const std::string& rel) { return std::string(TA_DATA) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Theory load_theory(const std::string& rel) { return parse_theory(slurp(data_path(rel))); }

// TA_SEED overrides the default; the value is printed so a failure can be replayed.
inline std::uint64_t seed(const char* suite, std::uint64_t fallback = 20261019) {
  std::uint64_t s = fallback;
  if (const char* e = std::getenv("TA_SEED")) s = std::strtoull(e, nullptr, 10);
  std::cout << "[" << suite << "] seed=" << s << std::endl;
  return s;
}

struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t s) : g(s) {}
  int below(int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(g)); }
  bool coin(int percent = 50) { return below(100) < percent; }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(below(static_cast<int>(v.size())))]; }
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------- random signatures

// Layered sorts keep the ground term universe finite: symbols only point upward.
inline Signature random_layered_signature(Rng& r) {
  Signature sig;
  for (const char* s : {"s0", "s1", "s2"}) sig.add_sort(s);
  int nconst = 1 + r.below(3);
  for (int i = 0; i < nconst; ++i) sig.add_func(FuncDecl{std::string(1, char('a' + i)), {}, "s0"});
  int nsym = r.below(3);
  std::vector<FuncDecl> menu = {{"f", {"s0"}, "s1"}, {"g", {"s0", "s0"}, "s1"}, {"h", {"s0", "s1"}, "s2"},
                                {"k", {"s1"}, "s2"}};
  for (int i = 0; i < nsym; ++i) {
    FuncDecl d = menu[static_cast<std::size_t>(r.below(4))];
    if (sig.has_func(d)) continue;
    sig.add_func(d, r.coin(50));
  }
  sig.add_label("l");
  if (r.coin()) sig.add_label("m");
  return sig;
}

inline std::vector<Term> all_ground_terms(const Signature& sig, std::size_t depth = 4) {
  std::vector<Term> out;
  auto U = enumerate_terms(sig, depth);
  for (const auto& [s, ts] : U.by_sort) out.insert(out.end(), ts.begin(), ts.end());
  return out;
}

inline std::vector<Sentence> all_atoms(const Signature& sig, const std::vector<Term>& terms) {
  std::vector<Sentence> out;
  for (const auto& a : terms)
    for (const auto& b : terms) {
      if (a->sort != b->sort) continue;
      out.push_back(make_eq(a, b));
      for (const auto& l : sig.labels) out.push_back(make_trans(a, make_label(l), b));
    }
  return out;
}

inline Sentence random_atom(Rng& r, const Signature& sig, const std::vector<Term>& terms) {
  while (true) {
    const Term& a = r.pick(terms);
    std::vector<Term> same;
    for (const auto& t : terms)
      if (t->sort == a->sort) same.push_back(t);
    const Term& b = r.pick(same);
    if (r.coin(55)) return make_eq(a, b);
    std::vector<std::string> labels(sig.labels.begin(), sig.labels.end());
    return make_trans(a, make_label(r.pick(labels)), b);
  }
}

// ------------------------------------------------------- random models

inline FiniteModel random_model(Rng& r, const Signature& sig, int max_size) {
  FiniteModel m;
  m.sig = sig;
  for (const auto& s : sig.sorts) m.carrier[s] = 1 + r.below(max_size);
  for (const auto& f : sig.funcs) {
    std::vector<int> tab(m.domain_size(f));
    for (auto& v : tab) v = r.below(m.size(f.result));
    m.table[f] = tab;
  }
  for (const auto& l : sig.labels)
    for (const auto& s : sig.sorts) {
      Relation rel(m.size(s));
      for (auto& c : rel.cell) c = r.coin(35) ? 1 : 0;
      m.rel[l][s] = rel;
    }
  // add steps until every mono symbol lifts them
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& f : sig.mono)
      for (std::size_t idx = 0; idx < m.domain_size(f); ++idx) {
        auto args = m.unindex(f, idx);
        for (std::size_t k = 0; k < args.size(); ++k)
          for (const auto& l : sig.labels) {
            const Relation& rk = m.rel[l][f.arity[k]];
            for (int b = 0; b < rk.n; ++b) {
              if (!rk.get(args[k], b)) continue;
              auto moved = args;
              moved[k] = b;
              Relation& out = m.rel[l][f.result];
              int fa = m.apply(f, args), fb = m.apply(f, moved);
              if (!out.get(fa, fb)) {
                out.set(fa, fb);
                grew = true;
              }
            }
          }
      }
  }
  return m;
}

// ------------------------------------------------------- random sentences

inline Action random_action(Rng& r, const std::vector<std::string>& labels, int depth) {
  if (depth <= 0 || r.coin(40)) return make_label(r.pick(labels));
  switch (r.below(4)) {
    case 0:
      return make_seq(random_action(r, labels, depth - 1), random_action(r, labels, depth - 1));
    case 1:
      return make_union(random_action(r, labels, depth - 1), random_action(r, labels, depth - 1));
    case 2:
      return make_star(random_action(r, labels, depth - 1));
    default:
      return make_power(random_action(r, labels, depth - 1), r.below(3));
  }
}

// Terms over the constants of `sig`, the variables in scope and unary symbols.
inline Term random_term(Rng& r, const Signature& sig, const std::string& sort, const std::vector<Variable>& scope,
                        int depth) {
  std::vector<Term> leaves;
  for (const auto& c : sig.constants_of(sort)) leaves.push_back(make_app(c, {}));
  for (const auto& v : scope)
    if (v.sort == sort) leaves.push_back(make_var(v));
  std::vector<FuncDecl> unary;
  for (const auto& f : sig.funcs)
    if (f.arity.size() == 1 && f.result == sort && f.arity[0] == sort) unary.push_back(f);
  if (!unary.empty() && (leaves.empty() || (depth > 0 && r.coin(30)))) {
    const auto& f = r.pick(unary);
    return make_app(f, {random_term(r, sig, sort, scope, depth - 1)});
  }
  return r.pick(leaves);
}

inline Sentence random_sentence(Rng& r, const Signature& sig, const std::string& sort, std::vector<Variable> scope,
                                int depth, int& fresh) {
  std::vector<std::string> labels(sig.labels.begin(), sig.labels.end());
  int pick = depth <= 0 ? r.below(2) : r.below(6);
  switch (pick) {
    case 0:
      return make_eq(random_term(r, sig, sort, scope, 1), random_term(r, sig, sort, scope, 1));
    case 1:
      return make_trans(random_term(r, sig, sort, scope, 1), random_action(r, labels, 2),
                        random_term(r, sig, sort, scope, 1));
    case 2:
      return make_not(random_sentence(r, sig, sort, scope, depth - 1, fresh));
    case 3:
      return make_or({random_sentence(r, sig, sort, scope, depth - 1, fresh),
                      random_sentence(r, sig, sort, scope, depth - 1, fresh)});
    default: {
      Variable x{"x" + std::to_string(fresh++), sort, 0};
      scope.push_back(x);
      return make_exists({x}, random_sentence(r, sig, sort, scope, depth - 1, fresh));
    }
  }
}

// ------------------------------------------------------- oracles

// Matrix-powering closure: union of R^0..R^n with R^k computed by boolean
// matrix products.
inline Relation closure_by_powers(const Relation& R) {
  int n = R.n;
  Relation acc = Relation::identity(n), power = Relation::identity(n);
  for (int k = 1; k <= n; ++k) {
    Relation next(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        bool v = false;
        for (int c = 0; c < n && !v; ++c) v = power.get(a, c) && R.get(c, b);
        next.set(a, b, v);
      }
    power = next;
    for (std::size_t i = 0; i < acc.cell.size(); ++i) acc.cell[i] = acc.cell[i] || power.cell[i];
  }
  return acc;
}

// Forward saturation of the basic rules over a fixed term set, at most
// `rounds` rounds (negative: to fixpoint). Each round applies every rule to
// the facts of the previous round.
struct Saturation {
  std::set<std::pair<int, int>> eq;
  std::set<std::tuple<std::string, int, int>> tr;
};

inline Saturation saturate_basic(const Signature& sig, const std::vector<Term>& terms,
                                 const std::vector<Sentence>& atoms, int rounds) {
  std::map<Term, int, TermLess> id;
  for (std::size_t i = 0; i < terms.size(); ++i) id[terms[i]] = static_cast<int>(i);
  Saturation S;
  for (const auto& a : atoms) {
    if (a->kind == SentKind::Eq) S.eq.insert({id.at(a->l), id.at(a->r)});
    else S.tr.insert({a->act->label, id.at(a->l), id.at(a->r)});
  }
  for (int round = 0; rounds < 0 || round < rounds; ++round) {
    Saturation N = S;
    for (std::size_t i = 0; i < terms.size(); ++i) N.eq.insert({static_cast<int>(i), static_cast<int>(i)});  // R
    for (auto [a, b] : S.eq) N.eq.insert({b, a});                                                              // S
    std::map<int, std::vector<int>> succ;
    for (auto [a, b] : S.eq) succ[a].push_back(b);
    for (auto [a, b] : S.eq)
      for (int d : succ[b]) N.eq.insert({a, d});  // T
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = 0; j < terms.size(); ++j) {
        const Term &t = terms[i], &u = terms[j];
        if (t->args.empty() || t->name != u->name || t->sort != u->sort || t->args.size() != u->args.size()) continue;
        bool all = true, one_step = true;
        int moved = -1;
        for (std::size_t k = 0; k < t->args.size(); ++k) {
          int x = id.at(t->args[k]), y = id.at(u->args[k]);
          all = all && S.eq.count({x, y});
          if (x != y) {
            if (moved >= 0) one_step = false;
            moved = static_cast<int>(k);
          }
        }
        if (all) N.eq.insert({static_cast<int>(i), static_cast<int>(j)});  // F
        if (one_step && sig.is_mono(decl_of(t)))
          for (std::size_t k = 0; k < t->args.size(); ++k) {
            if (moved >= 0 && static_cast<int>(k) != moved) continue;
            int x = id.at(t->args[k]), y = id.at(u->args[k]);
            for (const auto& l : sig.labels)
              if (S.tr.count({l, x, y})) N.tr.insert({l, static_cast<int>(i), static_cast<int>(j)});  // M
          }
      }
    for (const auto& [l, a, b] : S.tr)
      for (int a2 : succ[a])
        for (int b2 : succ[b]) N.tr.insert({l, a2, b2});  // P
    if (N.eq == S.eq && N.tr == S.tr) break;
    S = std::move(N);
  }
  return S;
}

inline bool saturation_has(const Saturation& S, const std::map<Term, int, TermLess>& id, const Sentence& a) {
  if (a->kind == SentKind::Eq) return S.eq.count({id.at(a->l), id.at(a->r)}) > 0;
  return S.tr.count({a->act->label, id.at(a->l), id.at(a->r)}) > 0;
}

// A cycle of length n under l, as a model of the finiteness sentence's signature.
inline FiniteModel cycle_model(const Signature& sig, int n) {
  FiniteModel m;
  m.sig = sig;
  m.carrier["s"] = n;
  Relation r(n);
  for (int i = 0; i < n; ++i) r.set(i, (i + 1) % n);
  m.rel["l"]["s"] = r;
  return m;
}

// Forcing evaluated straight from its inductive clauses, without the
// library's memo tables or capping. Only for fixtures whose ground term
// universes are complete at `depth`.
class ReferenceForcing {
 public:
  ReferenceForcing(const ForcingProperty& fp, std::size_t depth) : fp_(fp), depth_(depth) {}

  bool forces(int p, const Sentence& phi) {
    switch (phi->kind) {
      case SentKind::Eq:
        return fp_.conds[p].atoms.count(phi) > 0;
      case SentKind::Trans: {
        const auto& T = terms(p, phi->l->sort);
        auto rel = relation(p, phi->act, phi->l->sort);
        return rel.count({index_of(T, phi->l), index_of(T, phi->r)}) > 0;
      }
      case SentKind::Not:
        for (int q = 0; q < fp_.size(); ++q)
          if (fp_.leq(p, q) && forces(q, phi->sub)) return false;
        return true;
      case SentKind::Or:
        for (const auto& o : phi->ops)
          if (forces(p, o)) return true;
        return false;
      case SentKind::Exists:
        return witness(p, phi->vars, 0, Substitution{}, phi->sub);
    }
    return false;
  }

 private:
  using Rel = std::set<std::pair<std::size_t, std::size_t>>;

  const std::vector<Term>& terms(int p, const std::string& sort) {
    auto key = std::make_pair(p, sort);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto U = enumerate_terms(fp_.conds[p].sig, depth_);
    if (!U.complete) throw std::runtime_error("reference forcing needs a finite term universe");
    return cache_[key] = U.by_sort[sort];
  }

  static std::size_t index_of(const std::vector<Term>& T, const Term& t) {
    for (std::size_t i = 0; i < T.size(); ++i)
      if (term_equal(T[i], t)) return i;
    throw std::runtime_error("term outside the universe: " + print_term(t));
  }

  Rel atoms_of(int p, const std::string& sort, const std::function<bool(const Sentence&)>& keep) {
    const auto& T = terms(p, sort);
    Rel r;
    for (const auto& a : fp_.conds[p].atoms)
      if (a->l->sort == sort && keep(a)) r.insert({index_of(T, a->l), index_of(T, a->r)});
    return r;
  }

  static Rel compose(const Rel& x, const Rel& y) {
    Rel out;
    for (auto [a, b] : x)
      for (auto [c, d] : y)
        if (b == c) out.insert({a, d});
    return out;
  }

  Rel relation(int p, const Action& a, const std::string& sort) {
    switch (a->kind) {
      case ActKind::Label:
        return atoms_of(p, sort, [&](const Sentence& s) { return s->kind == SentKind::Trans && s->act->label == a->label; });
      case ActKind::Seq:
        return compose(relation(p, a->a, sort), relation(p, a->b, sort));
      case ActKind::Union: {
        Rel x = relation(p, a->a, sort), y = relation(p, a->b, sort);
        x.insert(y.begin(), y.end());
        return x;
      }
      case ActKind::Pow:
        if (a->symbolic || a->exp != 0) throw std::runtime_error("symbolic power in a ground sentence");
        return atoms_of(p, sort, [](const Sentence& s) { return s->kind == SentKind::Eq; });
      case ActKind::Star: {
        // a^0, a^1, a^2, ... until nothing new appears
        Rel step = relation(p, a->a, sort);
        Rel acc = atoms_of(p, sort, [](const Sentence& s) { return s->kind == SentKind::Eq; });
        Rel power = step;
        while (true) {
          std::size_t before = acc.size();
          acc.insert(power.begin(), power.end());
          Rel next = compose(power, step);
          if (acc.size() == before && std::includes(acc.begin(), acc.end(), next.begin(), next.end())) break;
          power = next;
        }
        return acc;
      }
    }
    return {};
  }

  bool witness(int p, const std::vector<Variable>& X, std::size_t k, Substitution theta, const Sentence& body) {
    if (k == X.size()) return forces(p, apply_substitution(theta, body));
    for (const auto& t : terms(p, X[k].sort)) {
      theta[X[k]] = t;
      if (witness(p, X, k + 1, theta, body)) return true;
    }
    return false;
  }

  const ForcingProperty& fp_;
  std::size_t depth_;
  std::map<std::pair<int, std::string>, std::vector<Term>> cache_;
};

// The sentence universe the CLI explores: canonical sentences over each
// condition's signature with constant-depth terms.
inline std::vector<Sentence> fixture_universe(const ForcingProperty& fp) {
  SentSet all;
  for (const auto& c : fp.conds)
    for (const auto& s : enumerate_sentences(c.sig, 1, 0)) all.insert(s);
  return std::vector<Sentence>(all.begin(), all.end());
}

}  // namespace tt
