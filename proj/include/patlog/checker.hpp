#pragma once

#include <string>
#include <vector>

#include "patlog/emptiness.hpp"
#include "patlog/formula.hpp"

namespace patlog {

struct CheckOptions {
  SearchConfig search;
  BuildOptions build;
};

struct CheckResult {
  Verdict::Kind kind = Verdict::Unknown;
  Method method = Method::None;
  uint64_t bound_used = 0;
  FragmentInfo fragment;

  bool has_witness = false;
  PatternValuation witness;
  std::vector<Path> paths;
  ConvWord word;
  VarMaps maps;
  // ∀ formulas: the first state tuple whose body is not satisfied (UNSAT), or
  // the first one left undecided (UNKNOWN).
  std::vector<int> failing_tuple;
  size_t tuples = 0;

  size_t clauses = 0;
  size_t spec_sets = 0;
  size_t sets_tried = 0;
  size_t configurations = 0;
  size_t control_states = 0;
  std::vector<std::string> explain;  // one line per acceptor built
};

// Spec sets of every DNF clause of an NNF path formula, deduplicated, with
// sets implied by a smaller one dropped.
std::vector<std::vector<Spec>> formula_spec_sets(const PathFormula& f, size_t* clauses = nullptr);

// Full pipeline. Formulas with a ∀ prefix go through check_universal. A SAT
// witness is re-checked against the pattern semantics; a failure throws
// SoundnessError.
CheckResult check_formula(const Automaton& a, const PatternFormula& f, const CheckOptions& o = {});
CheckResult check_universal(const Automaton& a, const PatternFormula& f, const CheckOptions& o = {});

}  // namespace patlog
