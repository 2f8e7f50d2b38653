#pragma once

// Finite models, reducts, relational actions, satisfaction, bounded oracle.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ta/core.hpp"
#include "ta/lexer.hpp"
#include "ta/syntax.hpp"

namespace ta {

// Square boolean matrix over one carrier.
struct Relation {
  int n = 0;
  std::vector<char> cell;

  Relation() = default;
  explicit Relation(int size) : n(size), cell(static_cast<std::size_t>(size) * size, 0) {}

  bool get(int a, int b) const { return cell[static_cast<std::size_t>(a) * n + b] != 0; }
  void set(int a, int b, bool v = true) { cell[static_cast<std::size_t>(a) * n + b] = v ? 1 : 0; }
  bool operator==(const Relation& o) const { return n == o.n && cell == o.cell; }
  std::size_t count() const {
    std::size_t c = 0;
    for (char x : cell) c += x != 0;
    return c;
  }
  bool contains(const Relation& o) const {
    for (std::size_t i = 0; i < cell.size(); ++i)
      if (o.cell[i] && !cell[i]) return false;
    return true;
  }

  static Relation identity(int n) {
    Relation r(n);
    for (int i = 0; i < n; ++i) r.set(i, i);
    return r;
  }
};

inline Relation rel_compose(const Relation& x, const Relation& y) {
  Relation r(x.n);
  for (int a = 0; a < x.n; ++a)
    for (int b = 0; b < x.n; ++b)
      if (x.get(a, b))
        for (int c = 0; c < x.n; ++c)
          if (y.get(b, c)) r.set(a, c);
  return r;
}

inline Relation rel_union(const Relation& x, const Relation& y) {
  Relation r = x;
  for (std::size_t i = 0; i < r.cell.size(); ++i) r.cell[i] = r.cell[i] || y.cell[i];
  return r;
}

// Reflexive-transitive closure by semi-naive iteration: only pairs found in
// the previous round are extended.
inline Relation rel_star(const Relation& x) {
  Relation closure = Relation::identity(x.n);
  std::vector<std::pair<int, int>> delta;
  for (int i = 0; i < x.n; ++i) delta.push_back({i, i});
  std::size_t rounds = 0, limit = static_cast<std::size_t>(x.n) * x.n + 1;
  while (!delta.empty() && rounds++ <= limit) {
    std::vector<std::pair<int, int>> next;
    for (auto [a, b] : delta)
      for (int c = 0; c < x.n; ++c)
        if (x.get(b, c) && !closure.get(a, c)) {
          closure.set(a, c);
          next.push_back({a, c});
        }
    delta = std::move(next);
  }
  return closure;
}

struct FiniteModel {
  Signature sig;
  std::map<std::string, int> carrier;
  std::map<std::string, std::vector<std::string>> names;
  std::map<FuncDecl, std::vector<int>> table;
  std::map<std::string, std::map<std::string, Relation>> rel;

  int size(const std::string& sort) const {
    auto it = carrier.find(sort);
    return it == carrier.end() ? 0 : it->second;
  }

  std::string element_name(const std::string& sort, int e) const {
    auto it = names.find(sort);
    if (it != names.end() && e < static_cast<int>(it->second.size())) return it->second[e];
    return "e" + std::to_string(e);
  }

  std::size_t domain_size(const FuncDecl& f) const {
    std::size_t n = 1;
    for (const auto& a : f.arity) n *= static_cast<std::size_t>(size(a));
    return n;
  }

  std::size_t index(const FuncDecl& f, const std::vector<int>& args) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < args.size(); ++i) idx = idx * size(f.arity[i]) + args[i];
    return idx;
  }

  std::vector<int> unindex(const FuncDecl& f, std::size_t idx) const {
    std::vector<int> args(f.arity.size());
    for (std::size_t i = f.arity.size(); i-- > 0;) {
      int n = size(f.arity[i]);
      args[i] = static_cast<int>(idx % n);
      idx /= n;
    }
    return args;
  }

  int apply(const FuncDecl& f, const std::vector<int>& args) const {
    auto it = table.find(f);
    if (it == table.end()) throw Error("model has no table for " + decl_to_string(f));
    return it->second.at(index(f, args));
  }

  const Relation& relation(const std::string& label, const std::string& sort) const {
    static const Relation empty;
    auto it = rel.find(label);
    if (it != rel.end()) {
      auto jt = it->second.find(sort);
      if (jt != it->second.end()) return jt->second;
    }
    return empty;
  }

  Relation relation_or_empty(const std::string& label, const std::string& sort) const {
    const Relation& r = relation(label, sort);
    if (r.n == size(sort)) return r;
    return Relation(size(sort));
  }

  // Missing relations are treated as empty; missing tables are an error.
  void normalize() {
    for (const auto& l : sig.labels)
      for (const auto& s : sig.sorts) {
        auto& r = rel[l][s];
        if (r.n != size(s)) r = Relation(size(s));
      }
    for (const auto& s : sig.sorts) carrier.emplace(s, 0);
  }

  bool monotonic_violation(std::string* why = nullptr) const {
    for (const auto& f : sig.mono) {
      std::size_t dom = domain_size(f);
      for (std::size_t idx = 0; idx < dom; ++idx) {
        auto args = unindex(f, idx);
        int fa = apply(f, args);
        for (std::size_t k = 0; k < args.size(); ++k)
          for (const auto& l : sig.labels) {
            const Relation& rk = relation(l, f.arity[k]);
            if (rk.n == 0) continue;
            for (int b = 0; b < rk.n; ++b) {
              if (!rk.get(args[k], b)) continue;
              auto args2 = args;
              args2[k] = b;
              int fb = apply(f, args2);
              const Relation& rr = relation(l, f.result);
              if (rr.n == 0 || !rr.get(fa, fb)) {
                if (why)
                  *why = "monotonicity of " + f.name + " fails at argument " + std::to_string(k + 1) + " for label " + l;
                return true;
              }
            }
          }
      }
    }
    return false;
  }

  void validate() const {
    for (const auto& s : sig.sorts)
      if (!carrier.count(s)) throw Error("model has no carrier for sort " + s);
    for (const auto& f : sig.funcs) {
      auto it = table.find(f);
      if (it == table.end()) throw Error("model has no table for " + decl_to_string(f));
      if (it->second.size() != domain_size(f)) throw Error("table for " + f.name + " is not total");
      for (int v : it->second)
        if (v < 0 || v >= size(f.result)) throw Error("table for " + f.name + " leaves its carrier");
    }
    for (const auto& [l, m] : rel) {
      if (!sig.labels.count(l)) throw Error("relation for undeclared label " + l);
      for (const auto& [s, r] : m)
        if (r.n != size(s)) throw Error("relation " + l + " at " + s + " has wrong dimension");
    }
    std::string why;
    if (monotonic_violation(&why)) throw Error(why);
  }
};

using Valuation = std::map<Variable, int>;

inline int interpret_term(const FiniteModel& m, const Term& t, const Valuation& env = {}) {
  if (t->args.empty()) {
    auto it = env.find(Variable{t->name, t->sort, 0});
    if (it != env.end()) return it->second;
  }
  std::vector<int> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) args.push_back(interpret_term(m, a, env));
  return m.apply(decl_of(t), args);
}

inline Relation interpret_action(const FiniteModel& m, const Action& a, const std::string& sort) {
  switch (a->kind) {
    case ActKind::Label:
      return m.relation_or_empty(a->label, sort);
    case ActKind::Seq:
      return rel_compose(interpret_action(m, a->a, sort), interpret_action(m, a->b, sort));
    case ActKind::Union:
      return rel_union(interpret_action(m, a->a, sort), interpret_action(m, a->b, sort));
    case ActKind::Star:
      return rel_star(interpret_action(m, a->a, sort));
    case ActKind::Pow:
      if (a->symbolic) throw Error("cannot interpret a symbolic exponent");
      return Relation::identity(m.size(sort));
  }
  return Relation(m.size(sort));
}

namespace detail {

inline bool sat(const FiniteModel& m, const Sentence& s, Valuation& env) {
  switch (s->kind) {
    case SentKind::Eq:
      return interpret_term(m, s->l, env) == interpret_term(m, s->r, env);
    case SentKind::Trans: {
      int a = interpret_term(m, s->l, env), b = interpret_term(m, s->r, env);
      if (s->act->kind == ActKind::Label) {
        const Relation& r = m.relation(s->act->label, s->l->sort);
        return r.n > 0 && r.get(a, b);
      }
      return interpret_action(m, s->act, s->l->sort).get(a, b);
    }
    case SentKind::Not:
      return !sat(m, s->sub, env);
    case SentKind::Or:
      for (const auto& o : s->ops)
        if (sat(m, o, env)) return true;
      return false;
    case SentKind::Exists: {
      const auto& X = s->vars;
      for (const auto& x : X)
        if (m.size(x.sort) == 0) return false;
      std::vector<std::optional<int>> saved;
      for (const auto& x : X) {
        auto it = env.find(x);
        saved.push_back(it == env.end() ? std::nullopt : std::optional<int>(it->second));
        env[x] = 0;
      }
      bool found = false;
      while (true) {
        if (sat(m, s->sub, env)) {
          found = true;
          break;
        }
        std::size_t k = 0;
        while (k < X.size()) {
          int& v = env[X[k]];
          if (++v < m.size(X[k].sort)) break;
          v = 0;
          ++k;
        }
        if (k == X.size()) break;
      }
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (saved[i]) env[X[i]] = *saved[i];
        else env.erase(X[i]);
      }
      return found;
    }
  }
  return false;
}

}  // namespace detail

inline bool satisfies(const FiniteModel& m, const Sentence& phi, const Valuation& env = {}) {
  Valuation e = env;
  return detail::sat(m, phi, e);
}

inline bool satisfies_all(const FiniteModel& m, const SentSet& gamma) {
  for (const auto& g : gamma)
    if (!satisfies(m, g)) return false;
  return true;
}

inline FiniteModel reduct(const SignatureMorphism& chi, const FiniteModel& m) {
  FiniteModel r;
  r.sig = chi.source;
  for (const auto& s : chi.source.sorts) {
    std::string t = chi.map_sort(s);
    r.carrier[s] = m.size(t);
    auto it = m.names.find(t);
    if (it != m.names.end()) r.names[s] = it->second;
  }
  for (const auto& f : chi.source.funcs) {
    auto it = m.table.find(chi.map_func(f));
    if (it == m.table.end()) throw Error("model lacks table for image of " + f.name);
    r.table[f] = it->second;
  }
  for (const auto& l : chi.source.labels)
    for (const auto& s : chi.source.sorts) r.rel[l][s] = m.relation_or_empty(chi.map_label(l), chi.map_sort(s));
  return r;
}

// -------------------------------------------------------- enumeration

struct CeilingExceeded : Error {
  long double estimate;
  CeilingExceeded(long double est, long double ceiling)
      : Error("model enumeration would visit about " + std::to_string(static_cast<double>(est)) +
              " models, above the ceiling " + std::to_string(static_cast<double>(ceiling))),
        estimate(est) {}
};

using SizeBound = std::map<std::string, int>;

inline SizeBound uniform_bound(const Signature& sig, int k) {
  SizeBound b;
  for (const auto& s : sig.sorts) b[s] = k;
  return b;
}

inline long double default_ceiling() {
  if (const char* e = std::getenv("TA_CEILING")) {
    try {
      return std::stold(e);
    } catch (...) {
    }
  }
  return 5e7L;
}

inline long double estimate_models(const Signature& sig, const SizeBound& bound) {
  std::vector<std::string> sorts(sig.sorts.begin(), sig.sorts.end());
  std::map<std::string, int> size;
  for (const auto& s : sorts) size[s] = 0;
  long double total = 0;
  while (true) {
    long double c = 1;
    for (const auto& f : sig.funcs) {
      long double dom = 1;
      for (const auto& a : f.arity) dom *= size[a];
      c *= std::pow(static_cast<long double>(size[f.result]), dom);
    }
    for (std::size_t l = 0; l < sig.labels.size(); ++l)
      for (const auto& s : sorts) c *= std::pow(2.0L, static_cast<long double>(size[s]) * size[s]);
    total += c;
    std::size_t k = 0;
    while (k < sorts.size()) {
      int lim = bound.count(sorts[k]) ? bound.at(sorts[k]) : 0;
      if (++size[sorts[k]] <= lim) break;
      size[sorts[k]] = 0;
      ++k;
    }
    if (k == sorts.size()) break;
  }
  return total;
}

// Visits every model over carriers {0..k-1} with k <= bound per sort, every
// total function table and every monotonic label interpretation. The visitor
// returns false to stop early.
inline void enumerate_models(const Signature& sig, const SizeBound& bound,
                             const std::function<bool(const FiniteModel&)>& visit,
                             long double ceiling = default_ceiling()) {
  long double est = estimate_models(sig, bound);
  if (est > ceiling) throw CeilingExceeded(est, ceiling);
  std::vector<std::string> sorts(sig.sorts.begin(), sig.sorts.end());
  std::vector<FuncDecl> funcs(sig.funcs.begin(), sig.funcs.end());
  std::vector<std::string> labels(sig.labels.begin(), sig.labels.end());
  std::map<std::string, int> size;
  for (const auto& s : sorts) size[s] = 0;
  bool go = true;
  while (go) {
    FiniteModel m;
    m.sig = sig;
    for (const auto& s : sorts) m.carrier[s] = size[s];
    bool feasible = true;
    // One odometer over all table cells, then one over all relation cells.
    std::vector<std::pair<std::size_t, std::size_t>> cells;  // (func index, cell)
    for (std::size_t fi = 0; fi < funcs.size(); ++fi) {
      std::size_t dom = m.domain_size(funcs[fi]);
      m.table[funcs[fi]] = std::vector<int>(dom, 0);
      if (dom > 0 && size[funcs[fi].result] == 0) feasible = false;
      for (std::size_t c = 0; c < dom; ++c) cells.push_back({fi, c});
    }
    std::vector<std::pair<std::string, std::string>> relslots;
    std::size_t relbits = 0;
    for (const auto& l : labels)
      for (const auto& s : sorts) {
        m.rel[l][s] = Relation(size[s]);
        relslots.push_back({l, s});
        relbits += static_cast<std::size_t>(size[s]) * size[s];
      }
    if (relbits > 62) throw Error("relation space too large to enumerate");
    if (feasible) {
      bool more_tables = true;
      while (more_tables && go) {
        for (std::uint64_t mask = 0; mask < (1ull << relbits) && go; ++mask) {
          std::size_t bit = 0;
          for (const auto& [l, s] : relslots) {
            Relation& r = m.rel[l][s];
            for (auto& c : r.cell) c = ((mask >> bit++) & 1ull) ? 1 : 0;
          }
          if (!sig.mono.empty() && m.monotonic_violation()) continue;
          if (!visit(m)) go = false;
        }
        std::size_t k = 0;
        while (k < cells.size()) {
          auto& v = m.table[funcs[cells[k].first]][cells[k].second];
          if (++v < size[funcs[cells[k].first].result]) break;
          v = 0;
          ++k;
        }
        if (k == cells.size()) more_tables = false;
      }
    }
    std::size_t k = 0;
    while (k < sorts.size()) {
      int lim = bound.count(sorts[k]) ? bound.at(sorts[k]) : 0;
      if (++size[sorts[k]] <= lim) break;
      size[sorts[k]] = 0;
      ++k;
    }
    if (k == sorts.size()) break;
  }
}

struct OracleResult {
  bool entailed = true;
  std::optional<FiniteModel> countermodel;
  std::size_t models_visited = 0;
};

// What the oracle has to enumerate for a fixed sentence set. A relation that
// no transition can observe stays empty, an unused non-monotonic symbol keeps
// an all-zero table, and ground sentences over constants alone are checked
// while the constants are being assigned. None of this loses a countermodel.
struct SearchPlan {
  std::vector<FuncDecl> constants;                          // enumerated first
  std::vector<FuncDecl> tables;                             // enumerated after
  std::vector<std::pair<std::string, std::string>> live;    // (label, sort)
  std::vector<Sentence> guards;
};

namespace semdetail {

inline void used_symbols(const Term& t, std::set<FuncDecl>& out) {
  if (!t->is_var) {
    FuncDecl f{t->name, {}, t->sort};
    for (const auto& a : t->args) f.arity.push_back(a->sort);
    out.insert(f);
  }
  for (const auto& a : t->args) used_symbols(a, out);
}

inline void scan(const Sentence& s, std::set<FuncDecl>& funcs, std::set<std::pair<std::string, std::string>>& rels) {
  switch (s->kind) {
    case SentKind::Eq:
      used_symbols(s->l, funcs);
      used_symbols(s->r, funcs);
      return;
    case SentKind::Trans: {
      used_symbols(s->l, funcs);
      used_symbols(s->r, funcs);
      std::set<std::string> ls;
      collect_labels(s->act, ls);
      for (const auto& l : ls) rels.insert({l, s->l->sort});
      return;
    }
    case SentKind::Not:
    case SentKind::Exists:
      scan(s->sub, funcs, rels);
      return;
    case SentKind::Or:
      for (const auto& o : s->ops) scan(o, funcs, rels);
      return;
  }
}

inline bool constants_only(const Sentence& s) {
  switch (s->kind) {
    case SentKind::Eq:
      return !s->l->is_var && !s->r->is_var && s->l->args.empty() && s->r->args.empty();
    case SentKind::Trans:
    case SentKind::Exists:
      return false;
    case SentKind::Not:
      return constants_only(s->sub);
    case SentKind::Or:
      for (const auto& o : s->ops)
        if (!constants_only(o)) return false;
      return true;
  }
  return false;
}

}  // namespace semdetail

inline SearchPlan plan_search(const Signature& sig, const SentSet& gamma, const Sentence& phi) {
  SearchPlan plan;
  std::set<FuncDecl> used;
  std::set<std::pair<std::string, std::string>> rels;
  for (const auto& g : gamma) semdetail::scan(g, used, rels);
  semdetail::scan(phi, used, rels);
  // steps in an argument of a monotonic symbol show up in its result sort
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& f : sig.mono)
      for (const auto& a : f.arity)
        for (const auto& l : sig.labels)
          if (rels.count({l, a}) && rels.insert({l, f.result}).second) grew = true;
  }
  for (const auto& f : sig.funcs) {
    if (!used.count(f) && !sig.mono.count(f)) continue;
    (f.arity.empty() ? plan.constants : plan.tables).push_back(f);
  }
  for (const auto& l : sig.labels)
    for (const auto& s : sig.sorts)
      if (rels.count({l, s})) plan.live.push_back({l, s});
  for (const auto& g : gamma)
    if (semdetail::constants_only(g)) plan.guards.push_back(g);
  return plan;
}

// Visits the models of the plan; the count of models to visit is known
// before the first visit and checked against the ceiling.
inline void enumerate_planned(const Signature& sig, const SizeBound& bound, const SearchPlan& plan,
                              const std::function<bool(const FiniteModel&)>& visit,
                              long double ceiling = default_ceiling()) {
  std::vector<std::string> sorts(sig.sorts.begin(), sig.sorts.end());
  const std::size_t nc = plan.constants.size();
  // a guard is decided once the last constant it mentions is assigned
  std::vector<std::vector<std::size_t>> due(nc + 1);
  for (std::size_t g = 0; g < plan.guards.size(); ++g) {
    std::set<FuncDecl> fs;
    std::set<std::pair<std::string, std::string>> ignore;
    semdetail::scan(plan.guards[g], fs, ignore);
    std::size_t last = 0;
    for (std::size_t c = 0; c < nc; ++c)
      if (fs.count(plan.constants[c])) last = c + 1;
    due[last].push_back(g);
  }

  auto carriers = [&](const std::function<bool(const std::map<std::string, int>&)>& body) {
    std::map<std::string, int> size;
    for (const auto& s : sorts) size[s] = 0;
    while (true) {
      if (!body(size)) return;
      std::size_t k = 0;
      while (k < sorts.size()) {
        int lim = bound.count(sorts[k]) ? bound.at(sorts[k]) : 0;
        if (++size[sorts[k]] <= lim) break;
        size[sorts[k]] = 0;
        ++k;
      }
      if (k == sorts.size()) return;
    }
  };

  auto skeleton = [&](const std::map<std::string, int>& size, FiniteModel& m) {
    m = FiniteModel{};
    m.sig = sig;
    for (const auto& s : sorts) m.carrier[s] = size.at(s);
    bool feasible = true;
    for (const auto& f : sig.funcs) {
      std::size_t dom = m.domain_size(f);
      m.table[f] = std::vector<int>(dom, 0);
      if (dom > 0 && size.at(f.result) == 0) feasible = false;
    }
    for (const auto& l : sig.labels)
      for (const auto& s : sorts) m.rel[l][s] = Relation(size.at(s));
    return feasible;
  };

  // walks the constant assignments that pass the guards
  auto constants = [&](FiniteModel& m, const std::function<bool()>& leaf) {
    std::function<bool(std::size_t)> go = [&](std::size_t c) -> bool {
      for (std::size_t g : due[c])
        if (!satisfies(m, plan.guards[g])) return true;
      if (c == nc) return leaf();
      const FuncDecl& f = plan.constants[c];
      for (int v = 0; v < m.size(f.result); ++v) {
        m.table[f][0] = v;
        if (!go(c + 1)) return false;
      }
      m.table[f][0] = 0;
      return true;
    };
    return go(0);
  };

  auto rest_count = [&](const FiniteModel& m) {
    long double c = 1;
    for (const auto& f : plan.tables)
      c *= std::pow(static_cast<long double>(m.size(f.result)), static_cast<long double>(m.domain_size(f)));
    for (const auto& [l, s] : plan.live) c *= std::pow(2.0L, static_cast<long double>(m.size(s)) * m.size(s));
    return c;
  };

  long double total = 0;
  carriers([&](const std::map<std::string, int>& size) {
    FiniteModel m;
    if (!skeleton(size, m)) return true;
    long double rest = rest_count(m);
    constants(m, [&] {
      total += rest;
      return total <= ceiling;
    });
    return total <= ceiling;
  });
  if (total > ceiling) throw CeilingExceeded(total, ceiling);

  bool go = true;
  carriers([&](const std::map<std::string, int>& size) {
    FiniteModel m;
    if (!skeleton(size, m)) return true;
    std::size_t relbits = 0;
    for (const auto& [l, s] : plan.live) relbits += static_cast<std::size_t>(size.at(s)) * size.at(s);
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t fi = 0; fi < plan.tables.size(); ++fi)
      for (std::size_t c = 0; c < m.domain_size(plan.tables[fi]); ++c) cells.push_back({fi, c});
    constants(m, [&] {
      if (relbits > 62) throw Error("relation space too large to enumerate");
      for (const auto& f : plan.tables) std::fill(m.table[f].begin(), m.table[f].end(), 0);
      while (go) {
        for (std::uint64_t mask = 0; mask < (1ull << relbits) && go; ++mask) {
          std::size_t bit = 0;
          for (const auto& [l, s] : plan.live)
            for (auto& c : m.rel[l][s].cell) c = ((mask >> bit++) & 1ull) ? 1 : 0;
          if (!sig.mono.empty() && m.monotonic_violation()) continue;
          if (!visit(m)) go = false;
        }
        std::size_t k = 0;
        while (k < cells.size()) {
          const FuncDecl& f = plan.tables[cells[k].first];
          auto& v = m.table[f][cells[k].second];
          if (++v < m.size(f.result)) break;
          v = 0;
          ++k;
        }
        if (k == cells.size()) break;
      }
      return go;
    });
    return go;
  });
}

// Refutation oracle: false comes with a countermodel; true is only evidence.
inline OracleResult semantic_entails_bounded(const Signature& sig, const SentSet& gamma, const Sentence& phi,
                                             const SizeBound& bound, long double ceiling = default_ceiling()) {
  OracleResult res;
  enumerate_planned(
      sig, bound, plan_search(sig, gamma, phi),
      [&](const FiniteModel& m) {
        ++res.models_visited;
        if (!satisfies_all(m, gamma)) return true;
        if (satisfies(m, phi)) return true;
        res.entailed = false;
        res.countermodel = m;
        return false;
      },
      ceiling);
  return res;
}

// ------------------------------------------------------------ .tam text

inline std::string print_model(const FiniteModel& m) {
  std::ostringstream o;
  for (const auto& s : m.sig.sorts) {
    o << "carrier " << s << " = {";
    for (int e = 0; e < m.size(s); ++e) o << (e ? ", " : " ") << m.element_name(s, e);
    o << (m.size(s) ? " }" : "}") << "\n";
  }
  for (const auto& f : m.sig.funcs) {
    o << "fun " << print_op_name(f.name) << " :";
    for (const auto& a : f.arity) o << " " << a;
    o << " -> " << f.result << " {";
    std::size_t dom = m.domain_size(f);
    for (std::size_t idx = 0; idx < dom; ++idx) {
      auto args = m.unindex(f, idx);
      o << (idx ? " ;" : "");
      for (std::size_t i = 0; i < args.size(); ++i) o << " " << m.element_name(f.arity[i], args[i]);
      o << " -> " << m.element_name(f.result, m.apply(f, args));
    }
    o << (dom ? " }" : "}") << "\n";
  }
  for (const auto& l : m.sig.labels)
    for (const auto& s : m.sig.sorts) {
      Relation r = m.relation_or_empty(l, s);
      if (r.count() == 0) continue;
      o << "rel " << l << " : " << s << " {";
      bool first = true;
      for (int a = 0; a < r.n; ++a)
        for (int b = 0; b < r.n; ++b)
          if (r.get(a, b)) {
            o << (first ? " " : ", ") << "(" << m.element_name(s, a) << ", " << m.element_name(s, b) << ")";
            first = false;
          }
      o << " }\n";
    }
  return o.str();
}

inline FiniteModel parse_model(const std::string& text, const Signature& sig) {
  TokenStream ts(text);
  FiniteModel m;
  m.sig = sig;
  std::map<std::string, std::map<std::string, int>> elem;
  auto element = [&](const std::string& sort) {
    SourcePos p = ts.peek().pos;
    std::string n = ts.ident("element");
    auto it = elem[sort].find(n);
    if (it == elem[sort].end()) throw ParseError("unknown element " + n + " of sort " + sort, p);
    return it->second;
  };
  std::set<FuncDecl> seen;
  while (!ts.at_end()) {
    SourcePos p = ts.peek().pos;
    std::string kw = ts.ident("'carrier', 'fun' or 'rel'");
    if (kw == "model") {
      ts.ident("model name");
      continue;
    }
    if (kw == "carrier") {
      std::string s = ts.ident("sort");
      if (!sig.sorts.count(s)) throw ParseError("unknown sort " + s, p);
      if (m.carrier.count(s)) throw ParseError("carrier of " + s + " given twice", p);
      ts.expect("=");
      ts.expect("{");
      std::vector<std::string> names;
      while (!ts.accept("}")) {
        std::string n = ts.ident("element");
        if (elem[s].count(n)) throw ParseError("duplicate element " + n, p);
        elem[s][n] = static_cast<int>(names.size());
        names.push_back(n);
        ts.accept(",");
      }
      m.carrier[s] = static_cast<int>(names.size());
      m.names[s] = names;
      continue;
    }
    if (kw == "fun") {
      std::string name = parse_op_name(ts);
      ts.expect(":");
      FuncDecl f{name, {}, ""};
      while (!ts.is("->")) f.arity.push_back(ts.ident("sort"));
      ts.expect("->");
      f.result = ts.ident("sort");
      if (!sig.has_func(f)) throw ParseError("undeclared operation " + decl_to_string(f), p);
      for (const auto& a : f.arity)
        if (!m.carrier.count(a)) throw ParseError("carrier of " + a + " must precede " + f.name, p);
      if (!m.carrier.count(f.result)) throw ParseError("carrier of " + f.result + " must precede " + f.name, p);
      std::vector<int> tab(m.domain_size(f), -1);
      ts.expect("{");
      while (!ts.accept("}")) {
        std::vector<int> args;
        for (const auto& a : f.arity) args.push_back(element(a));
        ts.expect("->");
        int v = element(f.result);
        std::size_t idx = m.index(f, args);
        if (tab[idx] >= 0 && tab[idx] != v) throw ParseError("conflicting rows for " + f.name, p);
        tab[idx] = v;
        ts.accept(";");
      }
      for (int v : tab)
        if (v < 0) throw ParseError("table for " + f.name + " is not total", p);
      m.table[f] = tab;
      seen.insert(f);
      continue;
    }
    if (kw == "rel") {
      std::string l = ts.ident("label");
      if (!sig.labels.count(l)) throw ParseError("undeclared label " + l, p);
      ts.expect(":");
      std::string s = ts.ident("sort");
      if (!m.carrier.count(s)) throw ParseError("carrier of " + s + " must precede relations", p);
      Relation r = m.relation_or_empty(l, s);
      ts.expect("{");
      while (!ts.accept("}")) {
        ts.expect("(");
        int a = element(s);
        ts.expect(",");
        int b = element(s);
        ts.expect(")");
        r.set(a, b);
        ts.accept(",");
      }
      m.rel[l][s] = r;
      continue;
    }
    throw ParseError("unknown model item " + kw, p);
  }
  for (const auto& s : sig.sorts)
    if (!m.carrier.count(s)) throw Error("model has no carrier for sort " + s);
  for (const auto& f : sig.funcs)
    if (!seen.count(f) && !m.table.count(f)) throw Error("model has no table for " + decl_to_string(f));
  m.normalize();
  m.validate();
  return m;
}

}  // namespace ta
