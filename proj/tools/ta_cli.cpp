// ta: command-line front end for transition algebra theories, models, proofs,
// CCS programs and forcing fixtures.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ta/ta.hpp"

using namespace ta;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kRefuted = 1, kUsage = 2, kBounded = 3 };

struct Options {
  std::string format = "human";
  int max_size = 2;
  std::size_t term_depth = 2;
  int star_bound = -1;
  std::size_t steps = 20;
  std::uint64_t seed = 1;
  double ceiling = 0;
  std::string out;
};

// One report per command; both renderings come from it.
struct Report {
  ojson data = ojson::object();
  std::vector<std::string> lines;
  std::string payload;  // theory, model or script text
  int exit = kOk;
};

std::string read_file(const std::string& path) { return read_text_file(path); }

void render(const Report& r, const Options& o) {
  if (o.format == "structured") {
    ojson j = r.data;
    if (!r.payload.empty()) j["text"] = r.payload;
    j["exit"] = r.exit;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& l : r.lines) std::cout << l << "\n";
    if (!r.payload.empty() && o.out.empty()) std::cout << r.payload;
  }
  if (!o.out.empty() && !r.payload.empty()) {
    std::ofstream f(o.out);
    if (!f) throw Error("cannot write " + o.out);
    f << r.payload;
  }
}

long double ceiling_of(const Options& o) { return o.ceiling > 0 ? static_cast<long double>(o.ceiling) : default_ceiling(); }

int verdict_exit(const Verdict& v) {
  if (v.status == Status::Valid) return kOk;
  if (v.status == Status::BoundedValid) return kBounded;
  return kRefuted;
}

// ---------------------------------------------------------------- commands

Report check_model(const std::string& theory, const std::string& model, const std::vector<std::string>& goals) {
  Report r;
  Theory th = parse_theory(read_file(theory));
  FiniteModel m = parse_model(read_file(model), th.sig);
  m.validate();
  ojson rows = ojson::array();
  int failed = 0;
  for (const auto& a : th.axioms) {
    bool ok = satisfies(m, a.sentence);
    failed += !ok;
    rows.push_back({{"axiom", a.name}, {"sentence", print_sentence(a.sentence, th.sig)}, {"holds", ok}});
    r.lines.push_back(std::string(ok ? "true   " : "FALSE  ") + a.name + "  " + print_sentence(a.sentence, th.sig));
  }
  ojson grows = ojson::array();
  for (const auto& gs : goals) {
    Sentence g = parse_sentence(gs, th.sig);
    bool ok = satisfies(m, g);
    failed += !ok;
    grows.push_back({{"sentence", print_sentence(g, th.sig)}, {"holds", ok}});
    r.lines.push_back(std::string(ok ? "true   " : "FALSE  ") + "goal  " + print_sentence(g, th.sig));
  }
  r.data["command"] = "check-model";
  r.data["axioms"] = rows;
  r.data["goals"] = grows;
  r.data["failed"] = failed;
  r.lines.push_back(failed ? std::to_string(failed) + " sentence(s) false" : "all sentences hold");
  r.exit = failed ? kRefuted : kOk;
  return r;
}

Report check_goal(const std::string& theory, const std::string& goal) {
  Report r;
  Theory th = parse_theory(read_file(theory));
  Sentence g = parse_sentence(goal, th.sig);
  r.data["command"] = "entail-basic";
  GroundTheory E{th.sig, {}};
  for (const auto& a : th.axioms) {
    if (!is_atomic(a.sentence)) throw Error("axiom " + a.name + " is not atomic; basic entailment needs ground atoms");
    E.atoms.push_back(a.sentence);
  }
  BasicResult br = decide_basic(E, g);
  r.data["goal"] = print_sentence(g, th.sig);
  r.data["holds"] = br.holds;
  ojson used = ojson::array();
  for (auto i : br.used) used.push_back(th.axioms[i].name);
  r.data["used"] = used;
  r.lines.push_back(std::string(br.holds ? "entailed: " : "not entailed: ") + print_sentence(g, th.sig));
  for (const auto& st : br.trace) {
    std::string l = "  " + st.rule + "  " + st.derived;
    if (!st.premises.empty()) {
      l += "  from";
      for (const auto& p : st.premises) l += " " + p;
    }
    r.lines.push_back(l);
  }
  r.exit = br.holds ? kOk : kRefuted;
  return r;
}

void add_tap_report(Report& r, const TapReport& rep) {
  ojson steps = ojson::array();
  for (const auto& [name, v] : rep.steps) {
    steps.push_back({{"step", name}, {"status", status_name(v.status)}, {"reason", v.reason}});
    r.lines.push_back("  " + name + "  " + verdict_string(v));
  }
  r.data["steps"] = steps;
  r.data["verdict"] = status_name(rep.overall.status);
  if (rep.overall.status == Status::BoundedValid) r.data["bound"] = rep.overall.bound;
  if (!rep.overall.ok()) {
    r.data["reason"] = rep.overall.reason;
    r.data["path"] = rep.overall.path;
  }
  r.lines.push_back(verdict_string(rep.overall));
  r.exit = verdict_exit(rep.overall);
}

CheckMode mode_of(const Options& o) { return o.star_bound >= 0 ? CheckMode::bounded(o.star_bound) : CheckMode::schematic_mode(); }

Report prove(const std::string& theory, const std::string& script, const Options& o) {
  Report r;
  Theory th = parse_theory(read_file(theory));
  TapScript sc = parse_tap(read_file(script), th);
  r.data["command"] = "prove";
  add_tap_report(r, check_tap(sc, th, mode_of(o)));
  return r;
}

Report oracle(const std::string& theory, const std::string& goal, const Options& o) {
  Report r;
  Theory th = parse_theory(read_file(theory));
  Sentence g = parse_sentence(goal, th.sig);
  OracleResult res = semantic_entails_bounded(th.sig, th.axiom_set(), g, uniform_bound(th.sig, o.max_size), ceiling_of(o));
  r.data["command"] = "oracle";
  r.data["goal"] = print_sentence(g, th.sig);
  r.data["max_size"] = o.max_size;
  r.data["models_visited"] = res.models_visited;
  if (res.countermodel) {
    r.data["countermodel"] = true;
    r.payload = print_model(*res.countermodel);
    r.lines.push_back("countermodel found after " + std::to_string(res.models_visited) + " models:");
    r.exit = kRefuted;
  } else {
    r.data["countermodel"] = false;
    r.lines.push_back("no countermodel with at most " + std::to_string(o.max_size) + " elements per sort (" +
                      std::to_string(res.models_visited) + " models)");
    r.exit = kBounded;
  }
  return r;
}

Report term_model(const std::string& theory, const Options& o) {
  Report r;
  Theory th = parse_theory(read_file(theory));
  GroundTheory E{th.sig, {}};
  for (const auto& a : th.axioms) {
    if (!is_atomic(a.sentence)) throw Error("axiom " + a.name + " is not atomic");
    E.atoms.push_back(a.sentence);
  }
  r.data["command"] = "term-model";
  auto tm = build_term_model(E, o.term_depth);
  if (auto* u = std::get_if<Unbounded>(&tm)) {
    r.data["unbounded"] = u->sort;
    r.lines.push_back("UNBOUNDED: sort " + u->sort + " has infinitely many ground terms");
    r.exit = kBounded;
    return r;
  }
  r.payload = print_model(std::get<TermModel>(tm).model);
  return r;
}

// ---------------------------------------------------------------- ccs

std::vector<std::string> split_word(const std::string& w) {
  std::vector<std::string> out;
  std::stringstream ss(w);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Report ccs_compile(const std::string& file) {
  Report r;
  CcsProgram prog = parse_ccs(read_file(file));
  Theory th = compile_to_theory(prog);
  r.data["command"] = "ccs compile";
  r.data["axioms"] = th.axioms.size();
  r.data["actions"] = prog.actions();
  r.payload = "theory " + std::filesystem::path(file).stem().string() + "\n" + print_theory(th);
  return r;
}

Report ccs_search(const std::string& file, const std::string& from, int depth) {
  Report r;
  CcsProgram prog = parse_ccs(read_file(file));
  Term start = parse_process(prog, from);
  auto res = ccs_step_search(prog, start, depth);
  r.data["command"] = "ccs search";
  r.data["from"] = print_process(start, prog);
  r.data["depth"] = depth;
  ojson rows = ojson::array();
  for (const auto& x : res) {
    std::string w = join_names(x.word);
    rows.push_back({{"word", x.word}, {"term", print_process(x.term, prog)}, {"back", term_equal(x.term, start)}});
    r.lines.push_back(w + "  ->  " + print_process(x.term, prog) + (term_equal(x.term, start) ? "   (start)" : ""));
  }
  r.data["results"] = rows;
  r.lines.push_back(std::to_string(res.size()) + " derivative(s)");
  return r;
}

Report ccs_prove(const std::string& file, const std::string& script, const Options& o) {
  Report r;
  CcsProgram prog = parse_ccs(read_file(file));
  Theory th = compile_to_theory(prog);
  TapScript sc = parse_tap(read_file(script), th);
  r.data["command"] = "ccs prove";
  add_tap_report(r, check_tap(sc, th, mode_of(o)));
  return r;
}

Report ccs_certify(const std::string& file, const std::string& from, const std::string& word,
                   const std::string& to) {
  Report r;
  CcsProgram prog = parse_ccs(read_file(file));
  Theory th = compile_to_theory(prog);
  Term start = parse_process(prog, from);
  std::optional<Term> target;
  if (!to.empty()) target = parse_process(prog, to);
  auto w = split_word(word);
  auto path = find_path(prog, start, w, target);
  if (!path) throw Error("no derivation of " + word + " from " + from);
  CcsCertifier cert(prog, th);
  bool cyc = term_equal(path->term, start) && !w.empty();
  bool silent_prefix = true;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) silent_prefix = silent_prefix && w[i] == kTau;
  Proof p = cyc && silent_prefix ? cert.cycle(path->path) : cert.word(path->path);
  Verdict v = check_proof(p, CheckOptions{});
  std::map<std::string, Term> ab;
  for (const auto& [n, t] : prog.abbrevs) ab[n] = t;
  std::string goal;
  for (char c : print_sentence(p->seq.goal(), th.sig)) {
    if (c == '"' || c == '\\') goal += '\\';
    goal += c;
  }
  r.payload = "goal \"" + goal + "\"\n" + print_tap(p, th, ab);
  r.data["command"] = "ccs certify";
  r.data["goal"] = print_sentence(p->seq.goal(), th.sig);
  r.data["verdict"] = status_name(v.status);
  r.lines.push_back("# " + verdict_string(v));
  r.exit = verdict_exit(v);
  return r;
}

Report ccs_mutants(const std::string& file, const std::string& script) {
  Report r;
  CcsProgram prog = parse_ccs(read_file(file));
  Theory th = compile_to_theory(prog);
  TapScript sc = parse_tap(read_file(script), th);
  auto ms = proof_mutants(sc.root, th.sig);
  ojson rows = ojson::array();
  int caught = 0;
  for (const auto& m : ms) {
    Verdict v = check_proof(m.proof, CheckOptions{});
    caught += !v.ok();
    rows.push_back({{"mutation", m.what}, {"status", status_name(v.status)}});
    r.lines.push_back(std::string(v.ok() ? "SURVIVED " : "invalid  ") + m.what);
  }
  r.data["command"] = "ccs mutants";
  r.data["mutants"] = rows;
  r.data["caught"] = caught;
  r.lines.push_back(std::to_string(caught) + "/" + std::to_string(ms.size()) + " mutants rejected");
  r.exit = caught == static_cast<int>(ms.size()) ? kOk : kRefuted;
  return r;
}

// ---------------------------------------------------------------- forcing

std::vector<Sentence> forcing_universe(const TafFile& t, const Options& o) {
  if (!t.universe.empty()) return t.universe;
  SentSet all;
  for (const auto& c : t.fp.conds)
    for (const auto& s : enumerate_sentences(c.sig, o.term_depth > 1 ? 1 : o.term_depth, 0)) all.insert(s);
  return std::vector<Sentence>(all.begin(), all.end());
}

Report forcing_validate(const std::string& file, const Options& o) {
  Report r;
  TafFile t = load_taf(file);
  r.data["command"] = "forcing validate";
  r.data["conditions"] = t.fp.size();
  ojson rej = ojson::array();
  for (const auto& x : t.rejected) {
    rej.push_back({{"condition", x.condition}, {"reason", x.reason}});
    r.lines.push_back("rejected " + x.condition + ": " + x.reason);
  }
  r.data["rejected"] = rej;
  AxiomReport ax = check_forcing_axioms(t.fp, o.term_depth);
  r.data["axiom_atoms_checked"] = ax.atoms_checked;
  r.data["axiom_violations"] = ax.violations;
  for (const auto& v : ax.violations) r.lines.push_back("axiom " + v);
  auto U = forcing_universe(t, o);
  LemmaReport lr = validate_forcing_lemma(t.fp, U, o.term_depth);
  r.data["universe"] = U.size();
  r.data["checked"] = lr.checked;
  r.data["capped"] = lr.capped;
  r.data["counterexamples"] = lr.counterexamples;
  for (const auto& c : lr.counterexamples) r.lines.push_back("counterexample " + c);
  r.lines.push_back(std::to_string(t.fp.size()) + " conditions, " + std::to_string(U.size()) + " sentences, " +
                    std::to_string(lr.checked) + " pairs checked, " + std::to_string(lr.capped) + " capped, " +
                    std::to_string(lr.counterexamples.size() + ax.violations.size()) + " problem(s)");
  r.exit = lr.ok() && ax.ok() ? (lr.capped ? kBounded : kOk) : kRefuted;
  return r;
}

GenericSet run_generic(const TafFile& t, const std::string& from, const Options& o) {
  int p0 = from.empty() ? t.fp.least : t.fp.index(from);
  if (p0 < 0) throw Error("the poset has no least condition; pass --from");
  return build_generic(t.fp, p0, o.steps, o.max_size > 0 ? static_cast<std::size_t>(o.max_size) * 20 : 40,
                       o.term_depth > 1 ? 1 : o.term_depth);
}

void add_generic(Report& r, const TafFile& t, const GenericSet& G) {
  const auto& fp = t.fp;
  ojson ledger = ojson::array();
  for (const auto& st : G.ledger) {
    ojson e = {{"n", st.n}, {"i", st.i}, {"j", st.j}, {"from", fp.conds[st.from].name}, {"to", fp.conds[st.to].name},
               {"decision", st.decision}};
    std::string s = st.sentence ? print_sentence(*st.sentence, fp.conds[G.chain[st.i]].sig) : "";
    e["sentence"] = s;
    ledger.push_back(e);
    r.lines.push_back("n=" + std::to_string(st.n) + " (" + std::to_string(st.i) + "," + std::to_string(st.j) + ") " +
                      st.decision + " " + fp.conds[st.from].name + " -> " + fp.conds[st.to].name +
                      (s.empty() ? "" : "  " + s));
  }
  ojson chain = ojson::array(), members = ojson::array();
  std::string cl = "chain:";
  for (int c : G.chain) {
    chain.push_back(fp.conds[c].name);
    cl += " " + fp.conds[c].name;
  }
  for (int m : G.members) members.push_back(fp.conds[m].name);
  r.data["chain"] = chain;
  r.data["members"] = members;
  r.data["ledger"] = ledger;
  r.lines.push_back(cl);
}

Report forcing_generic(const std::string& file, const std::string& from, const Options& o) {
  Report r;
  TafFile t = load_taf(file);
  GenericSet G = run_generic(t, from, o);
  r.data["command"] = "forcing generic";
  add_generic(r, t, G);
  GenericCheck gc = check_generic(t.fp, G);
  r.data["problems"] = gc.problems;
  for (const auto& p : gc.problems) r.lines.push_back("problem: " + p);
  r.exit = gc.ok() ? kOk : kRefuted;
  return r;
}

Report forcing_model(const std::string& file, const std::string& from, const Options& o) {
  Report r;
  TafFile t = load_taf(file);
  GenericSet G = run_generic(t, from, o);
  r.data["command"] = "forcing model";
  auto gm = generic_model(t.fp, G, o.term_depth);
  if (auto* u = std::get_if<Unbounded>(&gm)) {
    r.data["unbounded"] = u->sort;
    r.lines.push_back("UNBOUNDED: sort " + u->sort + " has infinitely many ground terms");
    r.exit = kBounded;
    return r;
  }
  const FiniteModel& m = std::get<TermModel>(gm).model;
  Forcer F(t.fp, o.term_depth);
  int bad = 0;
  auto atoms = atom_universe(m.sig, o.term_depth);
  for (const auto& a : atoms) {
    bool sat = satisfies(m, a);
    Tri g = generic_forces(t.fp, G, a, F);
    if (g == Tri::Capped || sat != (g == Tri::True)) {
      ++bad;
      r.lines.push_back("# mismatch on " + print_sentence(a, m.sig));
    }
  }
  r.data["atoms_checked"] = atoms.size();
  r.data["mismatches"] = bad;
  r.lines.push_back("# " + std::to_string(atoms.size()) + " atoms checked, " + std::to_string(bad) + " mismatch(es)");
  r.payload = print_model(m);
  r.exit = bad ? kRefuted : kOk;
  return r;
}

Report forcing_crosscheck(const std::string& file, const Options& o) {
  Report r;
  TafFile t = load_taf(file);
  auto res = cross_check_weak_forcing(t, o.term_depth);
  r.data["command"] = "forcing crosscheck";
  ojson rows = ojson::array();
  int bad = 0;
  for (const auto& x : res) {
    const auto& c = *x.check;
    std::string s = print_sentence(c.phi, t.fp.conds[t.fp.index(c.condition)].sig);
    rows.push_back({{"condition", c.condition}, {"sentence", s}, {"proof", x.proof_status},
                    {"weakly_forces", tri_name(x.weak)}, {"agree", x.agree}});
    bad += !x.agree;
    r.lines.push_back(std::string(x.agree ? "agree     " : "DISAGREE  ") + c.condition + "  " + s + "  proof=" +
                      x.proof_status + " weak=" + tri_name(x.weak));
  }
  r.data["instances"] = rows;
  r.data["disagreements"] = bad;
  r.lines.push_back(std::to_string(res.size()) + " instance(s), " + std::to_string(bad) + " disagreement(s)");
  r.exit = bad ? kRefuted : kOk;
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition algebra toolkit"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--format", o.format, "human or structured")->check(CLI::IsMember({"human", "structured"}));
  app.add_option("--max-size", o.max_size, "carrier bound per sort")->check(CLI::NonNegativeNumber);
  app.add_option("--term-depth", o.term_depth, "ground term depth bound");
  app.add_option("--star-bound", o.star_bound, "check Star_E families for indices 0..B only");
  app.add_option("--steps", o.steps, "generic construction steps");
  app.add_option("--seed", o.seed, "seed, echoed in reports");
  app.add_option("--ceiling", o.ceiling, "model enumeration ceiling")->check(CLI::PositiveNumber);
  app.add_option("-o,--output", o.out, "write the emitted theory, model or script here");

  std::string a1, a2, from, word, to;
  int depth = 3;

  auto* cm = app.add_subcommand("check-model", "evaluate every axiom of a theory in a model");
  cm->add_option("theory", a1)->required();
  cm->add_option("model", a2)->required();
  std::vector<std::string> goals;
  cm->add_option("--goal", goals, "extra sentence to evaluate");

  auto* pr = app.add_subcommand("prove", "check a proof script against a theory");
  pr->add_option("theory", a1)->required();
  pr->add_option("script", a2)->required();

  auto* orc = app.add_subcommand("oracle", "search for a countermodel of theory |= goal");
  orc->add_option("theory", a1)->required();
  orc->add_option("goal", a2)->required();

  auto* eb = app.add_subcommand("entail-basic", "decide basic entailment from ground atoms");
  eb->add_option("theory", a1)->required();
  eb->add_option("goal", a2)->required();

  auto* tm = app.add_subcommand("term-model", "build the term model of a ground atomic theory");
  tm->add_option("theory", a1)->required();

  auto* ccs = app.add_subcommand("ccs", "CCS programs");
  ccs->require_subcommand(1);
  auto* cc_compile = ccs->add_subcommand("compile", "emit the transition algebra theory");
  cc_compile->add_option("program", a1)->required();
  auto* cc_search = ccs->add_subcommand("search", "derivatives up to a depth");
  cc_search->add_option("program", a1)->required();
  cc_search->add_option("--from", from)->required();
  cc_search->add_option("--depth", depth);
  auto* cc_prove = ccs->add_subcommand("prove", "check a script against the compiled theory");
  cc_prove->add_option("program", a1)->required();
  cc_prove->add_option("script", a2)->required();
  auto* cc_cert = ccs->add_subcommand("certify", "emit a proof script for a derivation");
  cc_cert->add_option("program", a1)->required();
  cc_cert->add_option("--from", from)->required();
  cc_cert->add_option("--word", word, "comma separated actions")->required();
  cc_cert->add_option("--to", to);
  auto* cc_mut = ccs->add_subcommand("mutants", "check single-leaf mutations of a script");
  cc_mut->add_option("program", a1)->required();
  cc_mut->add_option("script", a2)->required();

  auto* fo = app.add_subcommand("forcing", "forcing fixtures");
  fo->require_subcommand(1);
  auto* fv = fo->add_subcommand("validate", "check the axioms and the forcing lemma");
  fv->add_option("file", a1)->required();
  auto* fg = fo->add_subcommand("generic", "build a generic set and print its ledger");
  fg->add_option("file", a1)->required();
  fg->add_option("--from", from);
  auto* fm = fo->add_subcommand("model", "dump the generic model");
  fm->add_option("file", a1)->required();
  fm->add_option("--from", from);
  auto* fx = fo->add_subcommand("crosscheck", "weak forcing against supplied proofs");
  fx->add_option("file", a1)->required();

  for (auto* sub : {cm, pr, orc, eb, tm, ccs, cc_compile, cc_search, cc_prove, cc_cert, cc_mut, fo, fv, fg, fm, fx})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    Report r;
    if (*cm) r = check_model(a1, a2, goals);
    else if (*pr) r = prove(a1, a2, o);
    else if (*orc) r = oracle(a1, a2, o);
    else if (*eb) r = check_goal(a1, a2);
    else if (*tm) r = term_model(a1, o);
    else if (*cc_compile) r = ccs_compile(a1);
    else if (*cc_search) r = ccs_search(a1, from, depth);
    else if (*cc_prove) r = ccs_prove(a1, a2, o);
    else if (*cc_cert) r = ccs_certify(a1, from, word, to);
    else if (*cc_mut) r = ccs_mutants(a1, a2);
    else if (*fv) r = forcing_validate(a1, o);
    else if (*fg) r = forcing_generic(a1, from, o);
    else if (*fm) r = forcing_model(a1, from, o);
    else if (*fx) r = forcing_crosscheck(a1, o);
    r.data["seed"] = o.seed;
    render(r, o);
    return r.exit;
  } catch (const CeilingExceeded& e) {
    std::cerr << "bounded: " << e.what() << "\n";
    return kBounded;
  } catch (const ForcingCapped& e) {
    std::cerr << "bounded: " << e.what() << "\n";
    return kBounded;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
