#include <doctest.h>

#include "patlog/automaton.hpp"
#include "patlog/nfa.hpp"

using namespace patlog;

namespace {

const char* kTrans =
    "automaton trans\n"
    "out-alphabet a b\n"
    "alphabet x y\n"
    "states p q\n"
    "initial p\n"
    "final q\n"
    "colors p red\n"
    "trans p x ab q\n"
    "trans p x b q\n"
    "trans q y eps q\n"
    "trans q eps a p\n";

}  // namespace

TEST_CASE("transducer text round trip") {
  const Automaton a = parse_automaton(kTrans);
  CHECK(a.kind() == MonoidKind::FreeWord);
  CHECK(a.num_states() == 2);
  CHECK(a.num_symbols() == 2);
  CHECK(a.transitions().size() == 4);
  CHECK(a.is_initial(0));
  CHECK(a.is_final(1));
  CHECK(a.has_colour(0, a.colour_index("red")));
  CHECK(a.has_epsilon());
  CHECK(a.value(a.transition(0).value) == Value::of_word({0, 1}));
  CHECK(a.value(a.transition(2).value) == Value::unit());
}

TEST_CASE("parallel edges with distinct outputs are kept, duplicates merged") {
  Automaton a(OutputMonoid{MonoidKind::IntSum, {}});
  a.add_symbol("a");
  a.add_state("s");
  const int t1 = a.add_transition(0, 0, Value::integer(1), 0);
  const int t2 = a.add_transition(0, 0, Value::integer(2), 0);
  const int t3 = a.add_transition(0, 0, Value::integer(1), 0);
  CHECK(t1 != t2);
  CHECK(t1 == t3);
  CHECK(a.transitions().size() == 2);
}

TEST_CASE("parse errors carry the line") {
  const std::string bad_header = "automaton dfa\n";
  CHECK_THROWS_AS(parse_automaton(bad_header), ParseError);
  try {
    parse_automaton("automaton nfa\nalphabet a\nstates s\ninitial s\nfinal s\ntrans s b s\n");
    FAIL("accepted an unknown symbol");
  } catch (const ParseError& e) {
    CHECK(e.line() == 6);
  }
  CHECK_THROWS_AS(parse_automaton("automaton trans\nalphabet a\n"), ParseError);
  CHECK_THROWS_AS(parse_automaton("automaton sum\nalphabet a\nstates s\ninitial s\nfinal s\ntrans s a x s\n"),
                  ParseError);
}

TEST_CASE("paths, labels and outputs") {
  const Automaton a = parse_automaton(kTrans);
  Path p{0, {0, 2, 3}};
  CHECK(check_path(a, p).empty());
  CHECK(path_end(a, p) == 0);
  CHECK(path_labels(a, p) == std::vector<int>{0, 1, kEps});
  CHECK(path_input(a, p) == std::vector<int>{0, 1});
  CHECK(path_output(a, p) == Value::of_word({0, 1, 0}));
  CHECK_FALSE(check_path(a, Path{0, {2}}).empty());
}

TEST_CASE("paths_upto counts every path") {
  const Automaton a = parse_automaton(kTrans);
  // length 0: 2; length 1: 4 (two from p, two from q); length 2 from each.
  const auto ps = paths_upto(a, 1);
  CHECK(ps.size() == 6);
  CHECK_THROWS_AS(paths_upto(a, 30, 100), ResourceError);
}

TEST_CASE("convolution decodes back to the same paths") {
  const Automaton a = parse_automaton(kTrans);
  for (const auto& p1 : paths_upto(a, 3))
    for (const auto& p2 : paths_upto(a, 2)) {
      const ConvWord w = convolve(a, {p1, p2});
      CHECK(w.arity == 2);
      const auto back = deconvolve(a, w);
      REQUIRE(back.size() == 2);
      CHECK(back[0] == p1);
      CHECK(back[1] == p2);
    }
}

TEST_CASE("integer outputs overflow loudly") {
  CHECK_THROWS_AS(checked_add(INT64_MAX, 1), OverflowError);
  CHECK(checked_add(-5, 3) == -2);
  CHECK_THROWS_AS(checked_mul(INT64_MAX, 2), OverflowError);
}

TEST_CASE("regex compilation") {
  const std::vector<std::string> syms = {"a", "b"};
  const Nfa n = compile_regex("a(a|b)*", syms);
  CHECK(n.accepts({0}));
  CHECK(n.accepts({0, 1, 1}));
  CHECK_FALSE(n.accepts({1}));
  CHECK_FALSE(n.accepts({}));
  const Nfa e = compile_regex("eps", syms);
  CHECK(e.accepts_epsilon());
  CHECK_FALSE(e.accepts({0}));
  const Nfa c = complement(n);
  CHECK(c.accepts({}));
  CHECK(c.accepts({1, 0}));
  CHECK_FALSE(c.accepts({0, 0}));
  CHECK_THROWS_AS(compile_regex("a(b", syms), ParseError);
  CHECK_THROWS_AS(compile_regex("c", syms), ParseError);
}

TEST_CASE("longest symbol match") {
  const Nfa n = compile_regex("ab", {"a", "ab"});
  CHECK(n.accepts({1}));
  CHECK_FALSE(n.accepts({0, 1}));
}
