// Acceptance suite. Prints one PASS/FAIL line per criterion; with a number
// argument runs only that criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "patlog/catalog.hpp"
#include "patlog/report.hpp"
#include "patlog/semantics.hpp"
#include "support.hpp"

using namespace patlog;
using namespace patlog::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1 and 2: checker against the brute-force oracle

constexpr int kOracleLen = 6;
constexpr int kAutomataPerKind = 200;
// Search-tree budget of one oracle run; past it the case is not compared.
constexpr size_t kOracleNodes = 5'000'000;

std::vector<std::string> hand_written(MonoidKind kind) {
  switch (kind) {
    case MonoidKind::Trivial:
      return {
          "exists p : q0 -[u]-> q1, r : q1 -[w]-> q2 . init(q0) & final(q2) & u in \"a(a|b)*\" & w notin \"b*\" & "
          "len(u) <= len(w)\n",
          "exists p : q0 -[u]-> q1, r : q2 -[w]-> q3 . init(q0) & init(q2) & u pref w & p != r & "
          "(final(q1) | q1 = q3)\n",
          "exists p : q0 -[u]-> q1, r : q0 -[u]-> q1 . init(q0) & !final(q1) & p != r & u notin \"eps\"\n",
          "exists p : q0 -[u]-> q1, r : q1 -[w]-> q0 . init(q0) & q0 != q1 & !(u = w) & (len(w) < len(u) | "
          "w in \"ab*\")\n",
      };
    case MonoidKind::FreeWord:
      return {
          "exists p : q0 -[u|v1]-> q1, r : q0 -[w|v2]-> q2 . init(q0) & final(q1) & final(q2) & u pref w & "
          "v1 notpref v2\n",
          "exists p : q0 -[u|v]-> q1 . init(q0) & final(q1) & v in \"a(a|b)*\" & u notin \"a*\"\n",
          "exists p : q0 -[u|v1]-> q1, r : q1 -[w|v2]-> q2 . init(q0) & final(q2) & len(v1) < len(v2) & "
          "!(len(u) <= len(w))\n",
          "exists p : q0 -[u|v1]-> q1, r : q2 -[u|v2]-> q3 . init(q0) & init(q2) & final(q1) & final(q3) & "
          "p != r & (v1 != v2 | v1 notin \"b*\")\n",
      };
    case MonoidKind::IntSum:
      return {
          "exists p : q0 -[u|x]-> q1, r : q0 -[u|y]-> q1 . init(q0) & final(q1) & x < y\n",
          "exists p : q0 -[u|x]-> q1, r : q1 -[w|y]-> q2 . init(q0) & final(q2) & x.y = y & u in \"a(a|b)*\"\n",
          "exists p : q0 -[u|x]-> q1, r : q0 -[w|y]-> q2 . init(q0) & final(q1) & final(q2) & x != y & "
          "len(u) <= len(w) & p != r\n",
          "exists p : q0 -[u|x]-> q1, r : q2 -[w|y]-> q3 . init(q0) & init(q2) & final(q1) & final(q3) & "
          "x <= y & y <= x & !(u = w)\n",
      };
  }
  return {};
}

std::vector<std::string> suite(MonoidKind kind) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  const std::vector<PropertySpec> props = {
      {"k-ambiguous", 1},      {"k-ambiguous", 2},   {"finitely-ambiguous", 1}, {"polynomially-ambiguous", 1},
      {"exponentially-ambiguous", 1}, {"functional", 1}, {"k-valued", 2},       {"determinisable", 1},
      {"multi-sequential", 1}, {"k-sequential", 1},  {"finite-valued", 1},
  };
  for (const auto& p : props) {
    if (!property_applies(p.name, kind)) continue;
    const auto texts = catalog_formula_texts(p, kind);
    for (size_t i = 0; i < texts.size(); ++i) {
      // The third finite-valued pattern has eleven bindings: out of the
      // oracle's reach at length 6. Covered by unit_catalog instead.
      if (p.name == "finite-valued" && i == 2) continue;
      if (seen.insert(texts[i]).second) out.push_back(texts[i]);
    }
  }
  for (const auto& t : hand_written(kind)) out.push_back(t);
  return out;
}

struct OracleStats {
  size_t cases = 0, sat = 0, unsat = 0, unknown = 0, errors = 0;
  size_t disagreements = 0, compared = 0, oracle_exhausted = 0;
  size_t witnesses = 0, witness_failures = 0;
  double seconds = 0, check_seconds = 0, worst = 0;
  std::vector<std::string> notes;
  // (kind, formula index) -> seconds in the checker and in the oracle
  std::map<std::pair<int, size_t>, std::pair<double, double>> time_of;
};

int samples_per_kind() {
  const char* env = std::getenv("ACCEPTANCE_SAMPLES");
  return env ? std::atoi(env) : kAutomataPerKind;
}

size_t longest(const PatternValuation& v) {
  size_t m = 0;
  for (const auto& [name, p] : v.paths) m = std::max(m, p.size());
  return m;
}

const OracleStats& oracle_run() {
  static OracleStats st;
  static bool done = false;
  if (done) return st;
  done = true;
  const auto t0 = Clock::now();
  int kind_index = 0;
  for (MonoidKind kind : {MonoidKind::Trivial, MonoidKind::FreeWord, MonoidKind::IntSum}) {
    Rng rng(1000 + kind_index++);
    const auto texts = suite(kind);
    for (int n = 0; n < samples_per_kind(); ++n) {
      const Automaton a = random_automaton(rng, kind);
      const FormulaContext ctx = FormulaContext::of(a);
      for (size_t fi = 0; fi < texts.size(); ++fi) {
        const PatternFormula f = parse_formula(texts[fi], ctx);
        ++st.cases;
        const auto c0 = Clock::now();
        CheckResult r;
        bool error = false;
        std::string error_text;
        try {
          r = check_formula(a, f);
        } catch (const Error& e) {
          error = true;
          error_text = e.what();
        }
        const double dt = seconds_since(c0);
        st.worst = std::max(st.worst, dt);
        std::string tag = std::string(monoid_name(kind)) + " automaton " + std::to_string(n) + " formula " +
                          std::to_string(fi);
        if (error) {
          ++st.errors;
          if (st.notes.size() < 12) st.notes.push_back(tag + ": " + error_text);
          continue;
        }
        st.check_seconds += dt;
        const auto o0 = Clock::now();
        OracleResult o;
        bool oracle_done = true;
        try {
          o = oracle_check(a, f, kOracleLen, kDefaultEnumerationCap, kOracleNodes);
        } catch (const ResourceError&) {
          oracle_done = false;
          ++st.oracle_exhausted;
        }
        if (std::getenv("ACCEPTANCE_TRACE") && dt + seconds_since(o0) > 1.0)
          std::cerr << tag << ": check " << dt << " s, oracle " << seconds_since(o0) << " s\n";
        auto& spent = st.time_of[{kind_index, fi}];
        spent.first += dt;
        spent.second += seconds_since(o0);
        if (r.kind == Verdict::Unknown) {
          ++st.unknown;
          if (st.notes.size() < 12) st.notes.push_back(tag + ": UNKNOWN");
          continue;
        }
        if (r.kind == Verdict::Sat) {
          ++st.sat;
          ++st.witnesses;
          bool ok = r.has_witness && valuation_consistent(a, f, r.witness) && eval_pattern(a, f, r.witness);
          if (ok) {
            // JSON round trip of the witness.
            const auto j = nlohmann::json::parse(valuation_json(a, r.witness).dump());
            ok = eval_pattern(a, f, valuation_from_json(a, j));
          }
          if (!ok) {
            ++st.witness_failures;
            if (st.notes.size() < 12) st.notes.push_back(tag + ": witness fails re-verification");
          }
        } else {
          ++st.unsat;
        }
        if (!oracle_done) continue;
        // The oracle is definite for SAT; a SAT verdict is only comparable
        // when its witness fits in the oracle's length.
        if (r.kind == Verdict::Sat && longest(r.witness) > static_cast<size_t>(kOracleLen)) continue;
        ++st.compared;
        if ((r.kind == Verdict::Sat) != o.sat) {
          ++st.disagreements;
          if (st.notes.size() < 12)
            st.notes.push_back(tag + (o.sat ? ": UNSAT but oracle has a witness" : ": SAT but oracle finds no witness"));
        }
      }
    }
  }
  st.seconds = seconds_since(t0);
  return st;
}

Outcome criterion_1() {
  const OracleStats& st = oracle_run();
  const double undecided = static_cast<double>(st.unknown + st.errors) / static_cast<double>(st.cases);
  std::ostringstream d;
  d << st.cases << " cases, " << st.sat << " SAT, " << st.unsat << " UNSAT, " << st.unknown << " UNKNOWN, "
    << st.errors << " errors; " << st.disagreements << " disagreements in " << st.compared << " comparisons; "
    << st.oracle_exhausted << " cases past the oracle budget; undecided rate " << 100.0 * undecided << "%; "
    << st.seconds << " s total, " << st.check_seconds << " s in the checker (slowest check " << st.worst << " s)";
  for (const auto& n : st.notes) d << "\n    " << n;
  if (std::getenv("ACCEPTANCE_TIMES"))
    for (const auto& [key, t] : st.time_of)
      d << "\n    kind " << key.first << " formula " << key.second << ": check " << t.first << " s, oracle " << t.second
        << " s";
  return {st.disagreements == 0 && undecided < 0.05 && st.seconds < 300.0, d.str()};
}

Outcome criterion_2() {
  const OracleStats& st = oracle_run();
  std::ostringstream d;
  d << st.witnesses << " SAT witnesses re-verified, " << st.witness_failures << " failures";
  return {st.witness_failures == 0 && st.witnesses > 0, d.str()};
}

// ---------------------------------------------------------------------------
// 3: base predicate acceptors against direct semantics

struct BaseKind {
  const char* name;
  AKind kind;
  Side si, sj;
};

Outcome criterion_3() {
  const std::vector<BaseKind> kinds = {
      {"pref", AKind::Pref, Side::Src, Side::Src},
      {"member", AKind::Member, Side::Src, Side::Src},
      {"len", AKind::LenLe, Side::Src, Side::Src},
      {"init-src", AKind::Init, Side::Src, Side::Src},
      {"init-dst", AKind::Init, Side::Dst, Side::Src},
      {"final-src", AKind::Final, Side::Src, Side::Src},
      {"final-dst", AKind::Final, Side::Dst, Side::Src},
      {"state-eq", AKind::StateEq, Side::Src, Side::Dst},
      {"path-eq", AKind::PathEq, Side::Src, Side::Src},
  };
  constexpr int kTuples = 500;
  constexpr int kAutomata = 10;
  Rng rng(3);
  size_t checked = 0, mismatches = 0, overlaps = 0;
  std::vector<std::string> notes;
  RandomShape shape;
  shape.max_states = 3;
  shape.max_output_len = 1;
  for (const auto& bk : kinds) {
    for (int n = 0; n < kAutomata; ++n) {
      const MonoidKind mk = static_cast<MonoidKind>(n % 3);
      const Automaton a = random_automaton(rng, mk, shape);
      const auto pool = paths_upto(a, 4);
      const int arity = std::uniform_int_distribution<int>(1, 3)(rng);
      Atom atom;
      atom.kind = bk.kind;
      atom.i = std::uniform_int_distribution<int>(0, arity - 1)(rng);
      atom.j = std::uniform_int_distribution<int>(0, arity - 1)(rng);
      atom.si = bk.si;
      atom.sj = n % 2 ? bk.sj : (bk.sj == Side::Src ? Side::Dst : Side::Src);
      if (bk.kind == AKind::Member)
        atom.lang = std::make_shared<Nfa>(compile_regex(n % 2 ? "a(a|b)*" : "(ab)*|b", a.symbols()));
      TupleAcceptor m[2];
      for (int neg = 0; neg < 2; ++neg) {
        auto alts = literal_alternatives(Literal{atom, neg == 1});
        std::vector<TupleAcceptor> parts;
        for (const auto& s : alts) parts.push_back(build_conjunction({s}, a, arity));
        m[neg] = parts.empty() ? TupleAcceptor{&a, arity, {}} : parts[0];
        for (size_t k = 1; k < parts.size(); ++k) m[neg] = acceptor_union(m[neg], parts[k]);
      }
      for (int t = 0; t < kTuples / kAutomata; ++t) {
        const auto tuple = sample_tuple(rng, pool, arity);
        const ConvWord w = convolve(a, tuple);
        const bool truth = eval_atom(a, atom, tuple);
        const bool pos = acceptor_accepts(m[0], w), neg = acceptor_accepts(m[1], w);
        checked += 2;
        if (pos != truth) ++mismatches;
        if (neg != !truth) ++mismatches;
        if (pos == neg) ++overlaps;
        if ((pos != truth || neg == truth) && notes.size() < 6)
          notes.push_back(std::string(bk.name) + " on automaton " + std::to_string(n) + ": semantics " +
                          (truth ? "true" : "false"));
      }
    }
  }
  std::ostringstream d;
  d << checked << " memberships over 9 kinds and their negations, " << mismatches << " mismatches, " << overlaps
    << " tuples not partitioned";
  for (const auto& n : notes) d << "\n    " << n;
  return {mismatches == 0 && overlaps == 0, d.str()};
}

// ---------------------------------------------------------------------------
// 4: Parikh predicate acceptors

std::vector<int> random_term(Rng& rng, int arity) {
  // Up to three occurrences, repeats allowed for multiplicities.
  std::vector<int> t(std::uniform_int_distribution<int>(1, 3)(rng));
  for (int& x : t) x = std::uniform_int_distribution<int>(0, arity - 1)(rng);
  return t;
}

std::vector<int> term_word(const Automaton& a, const std::vector<int>& t, const std::vector<Path>& tuple) {
  std::vector<int> w;
  for (int i : t) {
    const Value v = path_output(a, tuple[i]);
    w.insert(w.end(), v.word.begin(), v.word.end());
  }
  return w;
}

int64_t term_sum(const Automaton& a, const std::vector<int>& t, const std::vector<Path>& tuple) {
  int64_t s = 0;
  for (int i : t) s += path_output(a, tuple[i]).num;
  return s;
}

bool word_prefix(const std::vector<int>& x, const std::vector<int>& y) {
  return x.size() <= y.size() && std::equal(x.begin(), x.end(), y.begin());
}

bool word_mismatch(const std::vector<int>& x, const std::vector<int>& y) {
  for (size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] != y[i]) return true;
  return false;
}

bool in_language(const std::string& regex, const std::vector<int>& w) {
  // a(a|b)* over {a=0, b=1}, or (ab)*
  if (regex == "a(a|b)*") return !w.empty() && w[0] == 0;
  if (w.size() % 2) return false;
  for (size_t i = 0; i < w.size(); ++i)
    if (w[i] != static_cast<int>(i % 2)) return false;
  return true;
}

Outcome criterion_4() {
  constexpr int kTuples = 500;
  constexpr int kAutomata = 10;
  Rng rng(4);
  RandomShape shape;
  shape.max_states = 3;
  std::map<std::string, std::pair<size_t, size_t>> tally;  // family -> (checked, wrong)
  size_t multiplicity = 0;
  auto record = [&](const std::string& fam, bool ok) {
    auto& e = tally[fam];
    ++e.first;
    if (!ok) ++e.second;
  };
  for (int n = 0; n < kAutomata; ++n) {
    const Automaton tr = random_automaton(rng, MonoidKind::FreeWord, shape);
    const Automaton sum = random_automaton(rng, MonoidKind::IntSum, shape);
    const auto tr_pool = paths_upto(tr, 4);
    const auto sum_pool = paths_upto(sum, 4);
    const int arity = std::uniform_int_distribution<int>(1, 3)(rng);
    std::vector<int> t1 = random_term(rng, arity), t2 = random_term(rng, arity);
    if (n % 2 == 0) t1 = {0, 0};  // explicit multiplicity 2
    for (const auto* t : {&t1, &t2})
      if (std::set<int>(t->begin(), t->end()).size() < t->size()) ++multiplicity;

    Spec len;
    len.kind = Spec::LenCmp;
    len.t1 = t1;
    len.t2 = t2;
    len.strict = n % 3 == 0;
    Spec longer = len;
    longer.t1 = t2;
    longer.t2 = t1;
    longer.strict = true;
    Spec mm;
    mm.kind = Spec::Mismatch;
    mm.t1 = t1;
    mm.t2 = t2;
    const std::string regex = n % 2 ? "a(a|b)*" : "(ab)*";
    Spec om;
    om.kind = Spec::OutMember;
    om.t1 = t1;
    om.lang = std::make_shared<Nfa>(compile_regex(regex, tr.monoid().gamma));
    om.negated = n % 4 == 1;
    const TupleAcceptor m_len = build_acceptor(len, tr, arity);
    const TupleAcceptor m_longer = build_acceptor(longer, tr, arity);
    const TupleAcceptor m_mm = build_acceptor(mm, tr, arity);
    const TupleAcceptor m_np = build_parikh_not_prefix(t1, t2, tr, arity);
    const TupleAcceptor m_om = build_acceptor(om, tr, arity);
    for (int t = 0; t < kTuples / kAutomata; ++t) {
      const auto tuple = sample_tuple(rng, tr_pool, arity);
      const ConvWord w = convolve(tr, tuple);
      const auto w1 = term_word(tr, t1, tuple), w2 = term_word(tr, t2, tuple);
      record("length", acceptor_accepts(m_len, w) == (len.strict ? w1.size() < w2.size() : w1.size() <= w2.size()));
      record("notpref-length", acceptor_accepts(m_longer, w) == (w2.size() < w1.size()));
      record("notpref-mismatch", acceptor_accepts(m_mm, w) == word_mismatch(w1, w2));
      record("notpref", acceptor_accepts(m_np, w) == !word_prefix(w1, w2));
      record("output-membership", acceptor_accepts(m_om, w) == (in_language(regex, w1) != om.negated));
    }
    for (Rel rel : {Rel::Le, Rel::Lt, Rel::Eq, Rel::Ne}) {
      const TupleAcceptor m = build_sum_cmp(t1, t2, rel, sum, arity);
      for (int t = 0; t < kTuples / kAutomata / 4 + 1; ++t) {
        const auto tuple = sample_tuple(rng, sum_pool, arity);
        const int64_t s1 = term_sum(sum, t1, tuple), s2 = term_sum(sum, t2, tuple);
        const bool truth = rel == Rel::Le ? s1 <= s2 : rel == Rel::Lt ? s1 < s2 : rel == Rel::Eq ? s1 == s2 : s1 != s2;
        record("sum-comparison", acceptor_accepts(m, convolve(sum, tuple)) == truth);
      }
    }
  }
  bool ok = multiplicity > 0;
  std::ostringstream d;
  for (const auto& [fam, e] : tally) {
    d << fam << " " << e.first - e.second << "/" << e.first << "; ";
    ok = ok && e.second == 0 && e.first >= static_cast<size_t>(kTuples);
  }
  d << multiplicity << " terms with repeated variables";
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 5: Set Partition

Outcome criterion_5() {
  size_t total = 0, wrong = 0, sat = 0;
  std::vector<int> ms;
  std::vector<std::string> notes;
  const auto t0 = Clock::now();
  std::function<void(int)> rec = [&](int from) {
    const Automaton a = set_partition_automaton(ms);
    const PatternFormula f = parse_formula(kSetPartitionFormula, FormulaContext::of(a));
    const CheckResult r = check_formula(a, f);
    const bool expect = has_equal_split(ms);
    ++total;
    if (r.kind == Verdict::Sat) ++sat;
    if ((r.kind == Verdict::Sat) != expect || r.kind == Verdict::Unknown) {
      ++wrong;
      if (notes.size() < 5) {
        std::string s;
        for (int x : ms) s += std::to_string(x) + " ";
        notes.push_back("{ " + s + "}: " + verdict_name(r.kind));
      }
    }
    if (ms.size() == 5) return;
    for (int x = from; x <= 6; ++x) {
      ms.push_back(x);
      rec(x);
      ms.pop_back();
    }
  };
  rec(1);
  std::ostringstream d;
  d << total << " multisets, " << sat << " partitionable, " << wrong << " disagreements, " << seconds_since(t0)
    << " s";
  for (const auto& n : notes) d << "\n    " << n;
  return {wrong == 0 && total == 462, d.str()};
}

// ---------------------------------------------------------------------------
// 6: DFA intersection

Outcome criterion_6() {
  Rng rng(6);
  size_t wrong = 0, nonempty = 0;
  const std::string text = intersection_formula(3);
  for (int n = 0; n < 50; ++n) {
    std::vector<Dfa> ds;
    for (int i = 0; i < 3; ++i) ds.push_back(random_dfa(rng, 3));
    const Automaton a = dfa_union(ds);
    const CheckResult r = check_formula(a, parse_formula(text, FormulaContext::of(a)));
    const bool expect = intersection_nonempty(ds);
    if (expect) ++nonempty;
    if ((r.kind == Verdict::Sat) != expect || r.kind == Verdict::Unknown) ++wrong;
  }
  std::ostringstream d;
  d << "50 triples, " << nonempty << " with a common word, " << wrong << " disagreements";
  return {wrong == 0, d.str()};
}

// ---------------------------------------------------------------------------
// 7: twinning

Automaton two_loops(bool twin) {
  std::string text =
      "automaton trans\nout-alphabet a b\nalphabet a\nstates p1 p2 f\ninitial p1 p2\nfinal f\n"
      "trans p1 a a p1\ntrans p2 a ";
  text += twin ? "a" : "b";
  text += " p2\ntrans p1 a a f\ntrans p2 a a f\n";
  return parse_automaton(text);
}

// Delay between the two runs after n loop iterations, by hand.
size_t loop_delay(bool twin, int n) {
  std::vector<int> top(n, 0), bottom(n, twin ? 0 : 1);
  const auto [x, y] = delay(top, bottom);
  return x.size() + y.size();
}

Outcome criterion_7() {
  std::ostringstream d;
  bool ok = true;
  for (bool twin : {false, true}) {
    const Automaton a = two_loops(twin);
    const Membership m = check_property(a, {"determinisable", 1});
    const bool growing = loop_delay(twin, 4) > loop_delay(twin, 1);
    const bool expect_in = !growing;
    d << (twin ? "a|a / a|a: " : "a|a / a|b: ") << membership_name(m.kind) << " (delay after 1 and 4 loops: "
      << loop_delay(twin, 1) << ", " << loop_delay(twin, 4) << ")";
    ok = ok && (m.kind == Membership::InClass) == expect_in && m.kind != Membership::Unknown;
    if (m.kind == Membership::NotInClass) {
      const CheckResult& r = m.results.at(m.formula);
      const auto& out = r.witness.outputs;
      bool witness_ok = m.formula == 0 && r.has_witness && out.count("v1") && out.count("x1");
      if (witness_ok)
        witness_ok = sdel_neq_words(out.at("v1").word, out.at("x1").word, out.at("v2").word, out.at("x2").word);
      d << ", SDel witness " << (witness_ok ? "valid" : "INVALID");
      ok = ok && witness_ok;
    }
    d << "; ";
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 8: extrema against bounded search on d = 1 graphs

ExplicitGraph random_graph(Rng& rng) {
  const int n = std::uniform_int_distribution<int>(2, 7)(rng);
  ExplicitGraph g(n, 1);
  std::uniform_int_distribution<int> node(0, n - 1), w(-3, 3);
  const int edges = std::uniform_int_distribution<int>(n, 3 * n)(rng);
  for (int e = 0; e < edges; ++e) g.add_edge(node(rng), node(rng), {w(rng)});
  g.set_initial(0);
  g.set_accepting(node(rng));
  if (rng() % 2) g.set_accepting(node(rng));
  LinearConstraint c;
  c.coef = {1};
  const Rel rels[] = {Rel::Le, Rel::Lt, Rel::Ne};
  c.rel = rels[rng() % 3];
  c.rhs = std::uniform_int_distribution<int>(-4, 4)(rng);
  if (rng() % 2) c.coef = {-1};
  g.add_constraint(c);
  return g;
}

Outcome criterion_8() {
  Rng rng(8);
  size_t definite = 0, disagreements = 0, monotonicity = 0;
  for (int n = 0; n < 100; ++n) {
    const ExplicitGraph g = random_graph(rng);
    SearchConfig cfg;
    const Verdict exact = parikh_emptiness(g, cfg, Strategy::Extrema);
    Verdict::Kind prev = Verdict::Unknown;
    bool seen_sat = false;
    for (uint64_t b : {4, 8, 16, 32}) {
      SearchConfig bc;
      bc.witness_bound = b;
      bc.bound_policy = BoundPolicy::Explicit;
      const Verdict v = parikh_emptiness(g, bc, Strategy::Bounded);
      if (!v.unknown() && !exact.unknown()) {
        ++definite;
        if (v.kind != exact.kind) ++disagreements;
      }
      if (seen_sat && !v.sat()) ++monotonicity;
      if (prev == Verdict::Unsat && !v.unsat()) ++monotonicity;
      seen_sat = seen_sat || v.sat();
      prev = v.kind;
    }
  }
  std::ostringstream d;
  d << "100 graphs, " << definite << " definite comparisons, " << disagreements << " disagreements, "
    << monotonicity << " monotonicity violations";
  return {disagreements == 0 && monotonicity == 0 && definite > 0, d.str()};
}

// ---------------------------------------------------------------------------
// 9: undecidability guard

Outcome criterion_9() {
  const Automaton a = pcp_transducer({{"a", "ab"}, {"ba", "a"}, {"b", "bb"}});
  const PatternFormula f = parse_formula(kPcpFormula, FormulaContext::of(a));
  try {
    check_formula(a, f);
  } catch (const FragmentError& e) {
    return {true, std::string("rejected: ") + e.what()};
  }
  return {false, "formula was executed"};
}

// ---------------------------------------------------------------------------
// 10: all states reachable

Outcome criterion_10() {
  Rng rng(10);
  size_t trim = 0, wrong = 0;
  RandomShape shape;
  shape.density = 0.2;
  for (int n = 0; n < 50; ++n) {
    const Automaton a = random_automaton(rng, MonoidKind::Trivial, shape);
    const PatternFormula f = parse_formula("forall q . exists p : q0 -[u]-> q . init(q0)\n", FormulaContext::of(a));
    const CheckResult r = check_formula(a, f);
    const auto seen = reachable(a);
    int first_unreachable = -1;
    for (int q = 0; q < a.num_states() && first_unreachable < 0; ++q)
      if (!seen[q]) first_unreachable = q;
    if (first_unreachable < 0) {
      ++trim;
      if (r.kind != Verdict::Sat) ++wrong;
    } else if (r.kind != Verdict::Unsat || r.failing_tuple != std::vector<int>{first_unreachable}) {
      ++wrong;
    }
  }
  std::ostringstream d;
  d << "50 automata, " << trim << " fully reachable, " << wrong << " wrong verdicts or tuples";
  return {wrong == 0 && trim > 0 && trim < 50, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                           criterion_5, criterion_6, criterion_7, criterion_8,
                                                           criterion_9, criterion_10};
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  bool all = true;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
