#pragma once

#include <map>
#include <string>
#include <vector>

#include "patlog/formula.hpp"

namespace patlog {

// Direct semantics. Input variables denote label words (epsilon kept), so
// pref / len / shared inputs compare position by position; `in L` reads the
// word with epsilon erased.

// True when ν agrees with every binding of the prefix (endpoints, label word,
// output of the bound path). `universal` gives values to the ∀ variables.
bool valuation_consistent(const Automaton& a, const PatternFormula& f, const PatternValuation& v);
bool eval_pattern(const Automaton& a, const PatternFormula& f, const PatternValuation& v);

bool eval_atom(const Automaton& a, const Atom& atom, const std::vector<Path>& paths);
bool eval_path_formula(const Automaton& a, const PathFormula& f, const std::vector<Path>& paths);

// Output words of a term concatenated / summed in term order.
Value term_value(const Automaton& a, const std::vector<int>& term, const std::vector<Path>& paths);

// Brute-force evaluation over all valuations with |π| <= max_len. `node_cap`
// bounds the search tree (0: unbounded); past it, ResourceError.
struct OracleResult {
  bool sat = false;  // definite; false means "no witness up to max_len"
  PatternValuation witness;
  // For ∀ formulas: the first state tuple without a witness.
  std::vector<int> failing_tuple;
  size_t paths = 0;
  size_t nodes = 0;
};

OracleResult oracle_check(const Automaton& a, const PatternFormula& f, int max_len,
                          size_t cap = kDefaultEnumerationCap, size_t node_cap = 0);

}  // namespace patlog
