#include <doctest.h>

#include "patlog/checker.hpp"
#include "patlog/emptiness.hpp"
#include "patlog/semantics.hpp"

using namespace patlog;

namespace {

LinearConstraint single(Rel rel, int64_t rhs, int64_t coef = 1) { return LinearConstraint{{coef}, rel, rhs}; }

CheckResult run(const Automaton& a, const std::string& text, const CheckOptions& o = {}) {
  return check_formula(a, parse_formula(text, FormulaContext::of(a)), o);
}

}  // namespace

TEST_CASE("linear constraints") {
  LinearConstraint c{{2, -1}, Rel::Le, 3};
  CHECK(c.holds({1, 0}));
  CHECK_FALSE(c.holds({3, 2}));
  CHECK(single(Rel::Ne, 0).holds_value(1));
  CHECK_FALSE(single(Rel::Lt, 0).holds_value(0));
}

TEST_CASE("extrema on a positive cycle") {
  // 0 -(+1)-> 1, 1 -(+2)-> 1; reach 1 with x >= 5 needs the cycle.
  ExplicitGraph g(2, 1);
  g.add_edge(0, 1, {1});
  g.add_edge(1, 1, {2});
  g.set_initial(0);
  g.set_accepting(1);
  g.add_constraint(single(Rel::Le, -5, -1));
  const auto ext = bellman_ford_extrema(g, {});
  REQUIRE(ext.size() == 1);
  CHECK(ext[0].min == kMinusInf);
  CHECK(ext[0].max == -1);
  CHECK(parikh_emptiness(g, {}, Strategy::Extrema).sat());
}

TEST_CASE("single equality decided exactly without a cycle") {
  ExplicitGraph g(3, 1);
  g.add_edge(0, 1, {-1});
  g.add_edge(1, 2, {-1});
  g.set_initial(0);
  g.set_accepting(2);
  g.add_constraint(single(Rel::Eq, 0));
  const Verdict v = parikh_emptiness(g, {}, Strategy::Auto);
  CHECK(v.unsat());
  CHECK(v.method == Method::BellmanFord);
}

TEST_CASE("parity needs the exact value, not just extrema") {
  // Only even sums are reachable; x = 3 lies between the extrema.
  ExplicitGraph g(1, 1);
  g.add_edge(0, 0, {2});
  g.add_edge(0, 0, {-2});
  g.set_initial(0);
  g.set_accepting(0);
  g.add_constraint(single(Rel::Eq, 3));
  const Verdict v = parikh_emptiness(g, {}, Strategy::Auto);
  CHECK_FALSE(v.sat());
}

TEST_CASE("bounded search with an explicit bound") {
  ExplicitGraph g(2, 1);
  g.add_edge(0, 1, {0});
  g.add_edge(1, 1, {1});
  g.set_initial(0);
  g.set_accepting(1);
  g.add_constraint(single(Rel::Le, -10, -1));
  SearchConfig short_bound;
  short_bound.witness_bound = 5;
  short_bound.bound_policy = BoundPolicy::Explicit;
  CHECK(parikh_emptiness(g, short_bound, Strategy::Bounded).unknown());
  SearchConfig long_bound = short_bound;
  long_bound.witness_bound = 20;
  CHECK(parikh_emptiness(g, long_bound, Strategy::Bounded).sat());
}

TEST_CASE("memo cap is a resource error") {
  ExplicitGraph g(50, 0);
  for (int i = 0; i + 1 < 50; ++i) g.add_edge(i, i + 1, {});
  g.set_initial(0);
  g.set_accepting(49);
  SearchConfig cfg;
  cfg.memo_cap = 10;
  CHECK_THROWS_AS(nfa_emptiness(g, cfg), ResourceError);
  cfg.memo_cap = 100;
  CHECK(nfa_emptiness(g, cfg).sat());
}

TEST_CASE("checker witnesses re-verify") {
  const Automaton a = parse_automaton(
      "automaton trans\nout-alphabet a b\nalphabet a\nstates s t\ninitial s\nfinal t\n"
      "trans s a a t\ntrans s a b t\ntrans t a a t\n");
  const auto r = run(a, "exists p : q0 -[u|v]-> q1, r : q0 -[u|x]-> q1 . init(q0) & final(q1) & v != x");
  REQUIRE(r.kind == Verdict::Sat);
  REQUIRE(r.has_witness);
  CHECK(r.witness.outputs.at("v") != r.witness.outputs.at("x"));
  const auto u = run(a, "exists p : q0 -[u|v]-> q1 . init(q0) & final(q1) & v in \"bb(a|b)*\"");
  CHECK(u.kind == Verdict::Unsat);
}

TEST_CASE("integer sums compared across runs") {
  const Automaton a = parse_automaton(
      "automaton sum\nalphabet a\nstates s\ninitial s\nfinal s\ntrans s a 3 s\ntrans s a -2 s\n");
  const auto r = run(a, "exists p : q0 -[u|x]-> q1, r : q0 -[u|y]-> q1 . init(q0) & x.x < y");
  REQUIRE(r.kind == Verdict::Sat);
  CHECK(2 * r.witness.outputs.at("x").num < r.witness.outputs.at("y").num);
  const Automaton unit = parse_automaton(
      "automaton sum\nalphabet a\nstates s\ninitial s\nfinal s\ntrans s a 1 s\n");
  CHECK(run(unit, "exists p : q0 -[u|x]-> q1, r : q0 -[u|y]-> q1 . x < y").kind == Verdict::Unsat);
  CHECK(run(unit, "exists p : q0 -[u|x]-> q1, r : q0 -[w|y]-> q1 . x < y").kind == Verdict::Sat);
}

TEST_CASE("explicit bound does not affect counter-free formulas") {
  const Automaton a = parse_automaton(
      "automaton sum\nalphabet a\nstates s t\ninitial s\nfinal t\ntrans s a 1 t\n");
  CheckOptions o;
  o.search.witness_bound = 0;
  o.search.bound_policy = BoundPolicy::Explicit;
  CHECK(run(a, "exists p : q0 -[u|x]-> q1 . init(q0) & final(q1)", o).kind == Verdict::Sat);
}
