#pragma once

#include <random>
#include <string>
#include <vector>

#include "patlog/automaton.hpp"
#include "patlog/formula.hpp"

namespace patlog::testing {

using Rng = std::mt19937_64;

struct RandomShape {
  int max_states = 4;
  int letters = 2;
  int max_output_len = 2;  // FreeWord
  int max_weight = 3;      // IntSum, weights in [-max_weight, max_weight]
  double epsilon_share = 0.2;  // Trivial only
  double density = 0.25;       // chance of each (src, letter, dst) edge
  double parallel = 0.15;      // chance of a second output on an edge
  int colours = 0;
};

Automaton random_automaton(Rng& rng, MonoidKind kind, const RandomShape& shape = {});

// Chain q0 .. qk reading `a`, step i outputs +x_i or -x_i; qk is final with a
// zero self-loop.
Automaton set_partition_automaton(const std::vector<int>& xs);
extern const char* const kSetPartitionFormula;
bool has_equal_split(const std::vector<int>& xs);

// Complete or partial DFA over {a, b}.
struct Dfa {
  int states = 1;
  int initial = 0;
  std::vector<bool> final;
  std::vector<std::vector<int>> next;  // [state][letter], -1 when missing
};
Dfa random_dfa(Rng& rng, int max_states);
Automaton dfa_union(const std::vector<Dfa>& ds);
std::string intersection_formula(int k);
bool intersection_nonempty(const std::vector<Dfa>& ds);

// Two accepting initial states, each looping on index i with output u_i / v_i.
Automaton pcp_transducer(const std::vector<std::pair<std::string, std::string>>& dominos);
extern const char* const kPcpFormula;

extern const char* const kAllReachableFormula;
std::vector<bool> reachable(const Automaton& a);

std::string automaton_text(const Automaton& a);

// Random valuation-free sampling of path tuples.
std::vector<Path> sample_tuple(Rng& rng, const std::vector<Path>& pool, int arity);

}  // namespace patlog::testing
