#include <doctest.h>

#include "patlog/formula.hpp"
#include "patlog/semantics.hpp"

using namespace patlog;

namespace {

Automaton transducer() {
  return parse_automaton(
      "automaton trans\nout-alphabet a b\nalphabet a b\nstates s t\ninitial s\nfinal t\n"
      "trans s a a t\ntrans s a b t\ntrans t b ab t\n");
}

Automaton weighted() {
  return parse_automaton("automaton sum\nalphabet a\nstates s\ninitial s\nfinal s\ntrans s a 2 s\ntrans s a -1 s\n");
}

PatternFormula parse(const std::string& text, const Automaton& a) { return parse_formula(text, FormulaContext::of(a)); }

}  // namespace

TEST_CASE("prefix and sorts") {
  const Automaton a = transducer();
  const auto f = parse("forall q . exists p : q0 -[u|v]-> q, r : q -[w|x]-> q1 . init(q0) & len(u) <= len(w)", a);
  CHECK(f.universals == std::vector<std::string>{"q"});
  REQUIRE(f.bindings.size() == 2);
  CHECK(f.sort_of("p") == Sort::Path);
  CHECK(f.sort_of("q1") == Sort::State);
  CHECK(f.sort_of("w") == Sort::Input);
  CHECK(f.sort_of("x") == Sort::Output);
  CHECK_THROWS(f.sort_of("nope"));
}

TEST_CASE("text survives printing") {
  const Automaton a = transducer();
  const auto f = parse("exists p : q0 -[u|v]-> q1 . init(q0) & (v notpref v | !final(q1)) & u in \"a*\"", a);
  const auto g = parse(formula_text(f), a);
  CHECK(formula_text(g) == formula_text(f));
}

TEST_CASE("malformed formulas") {
  const Automaton a = transducer();
  CHECK_THROWS_AS(parse("exists p : q0 -[u|v]-> q1 . init(z)", a), ParseError);
  CHECK_THROWS_AS(parse("exists p : q0 -[u|v]-> q1 . init(q0) &", a), ParseError);
  CHECK_THROWS_AS(parse("exists p : q0 -[u|v]-> q1, p : q1 -[w|x]-> q1 . true", a), ParseError);
  CHECK_THROWS_AS(parse("exists p : q0 -[u|v]-> q1 . u in \"c\"", a), ParseError);
  // Sorts must match.
  CHECK_THROWS_AS(parse("exists p : q0 -[u|v]-> q1 . q0 = u", a), ParseError);
}

TEST_CASE("fragments") {
  const Automaton t = transducer();
  const Automaton w = weighted();
  const auto nfa_only = parse("exists p : q0 -[u|v]-> q1 . init(q0)", t);
  CHECK(check_fragment(nfa_only, t.monoid()).tag == Fragment::PL_NFA);
  const auto trans = parse("exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . v != x", t);
  CHECK(check_fragment(trans, t.monoid()).tag == Fragment::PL_Trans);
  const auto ne = parse("exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . v != x", w);
  CHECK(check_fragment(ne, w.monoid()).tag == Fragment::PL_SumNe);
  const auto sum = parse("exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . v < x", w);
  CHECK(check_fragment(sum, w.monoid()).tag == Fragment::PL_Sum);
}

TEST_CASE("fragment rejections") {
  const Automaton t = transducer();
  // Positive output equality and prefix over words.
  CHECK_THROWS_AS(check_fragment(parse("exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . v = x", t), t.monoid()),
                  FragmentError);
  CHECK_THROWS_AS(check_fragment(parse("exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . v pref x", t), t.monoid()),
                  FragmentError);
  CHECK_THROWS_AS(
      check_fragment(parse("exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . !(v notpref x)", t), t.monoid()),
      FragmentError);
  // Shared output variable.
  CHECK_THROWS_AS(check_fragment(parse("exists p : q0 -[u|v]-> q1, r : q0 -[w|v]-> q1 . true", t), t.monoid()),
                  FragmentError);
  // Integer order on words.
  CHECK_THROWS_AS(check_fragment(parse("exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . v < x", t), t.monoid()),
                  FragmentError);
}

TEST_CASE("epsilon warning only with input comparisons") {
  const Automaton a = parse_automaton(
      "automaton nfa\nalphabet a\nstates s t\ninitial s\nfinal t\ntrans s a t\ntrans s eps t\n");
  const auto plain = parse("exists p : q0 -[u]-> q1 . init(q0)", a);
  CHECK(check_fragment(plain, a.monoid(), &a).warnings.empty());
  const auto shared = parse("exists p : q0 -[u]-> q1, r : q0 -[u]-> q1 . p != r", a);
  CHECK(check_fragment(shared, a.monoid(), &a).warnings.size() == 1);
}

TEST_CASE("path formula translation and normal forms") {
  const Automaton a = transducer();
  const auto f = parse("exists p : q0 -[u|v]-> q1, r : q1 -[u|x]-> q2 . init(q0) & !(final(q2) | len(v) <= len(x))", a);
  auto [pf, maps] = to_path_formula(f, a);
  CHECK(pf.arity == 2);
  CHECK(maps.path_names == std::vector<std::string>{"p", "r"});
  const PathFormula n = nnf(pf);
  CHECK(n.nnf);
  // The shared u and q1 add equalities; the negated disjunction yields a
  // single clause.
  const auto clauses = dnf_clauses(n);
  REQUIRE(clauses.size() >= 1);
  bool saw_final = false;
  for (const auto& l : clauses[0])
    if (l.atom.kind == AKind::Final) saw_final = l.negated;
  CHECK(saw_final);
}

TEST_CASE("direct semantics") {
  const Automaton a = transducer();
  const auto f = parse("exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . init(q0) & final(q1) & v != x", a);
  const OracleResult r = oracle_check(a, f, 3);
  REQUIRE(r.sat);
  CHECK(valuation_consistent(a, f, r.witness));
  CHECK(eval_pattern(a, f, r.witness));
  CHECK(r.witness.outputs.at("v") != r.witness.outputs.at("x"));

  const auto g = parse("exists p : q0 -[u|v]-> q1 . init(q0) & final(q1) & v in \"bb(a|b)*\"", a);
  CHECK_FALSE(oracle_check(a, g, 4).sat);
}

TEST_CASE("integer terms") {
  const Automaton a = weighted();
  const auto f = parse("exists p : q0 -[u|x]-> q1, r : q0 -[u|y]-> q1 . x.x = y & x != y", a);
  const OracleResult r = oracle_check(a, f, 3);
  REQUIRE(r.sat);
  CHECK(2 * r.witness.outputs.at("x").num == r.witness.outputs.at("y").num);
}

TEST_CASE("universal prefix reports the failing tuple") {
  const Automaton a = parse_automaton(
      "automaton nfa\nalphabet a\nstates s t dead\ninitial s\nfinal t\ntrans s a t\n");
  const auto f = parse("forall q . exists p : q0 -[u]-> q . init(q0)", a);
  const OracleResult r = oracle_check(a, f, 3);
  CHECK_FALSE(r.sat);
  CHECK(r.failing_tuple == std::vector<int>{2});
}
