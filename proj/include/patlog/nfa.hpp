#pragma once

#include <string>
#include <utility>
#include <vector>

#include "patlog/error.hpp"

namespace patlog {

class Automaton;

// Epsilon-free NFA over symbols 0..alphabet-1. Used for the regular
// constants of formulas (input languages L and output languages N).
struct Nfa {
  int alphabet = 0;
  std::vector<bool> initial, final;
  std::vector<std::vector<std::pair<int, int>>> delta;  // per state: (symbol, dst)
  bool deterministic = false;  // complete DFA with a single initial state
  std::string source;          // text it was built from, for printing

  int size() const { return static_cast<int>(delta.size()); }
  int add_state();
  bool accepts(const std::vector<int>& word) const;
  bool is_empty() const;
  bool accepts_epsilon() const;
};

inline constexpr int kDefaultSubsetCap = 4096;

// Regular expression over the given symbol names: juxtaposition, `|`, `*`,
// parentheses, `eps`. Symbols are matched longest first, so with symbols
// {a, ab} the text `ab` reads as one symbol.
Nfa compile_regex(const std::string& text, const std::vector<std::string>& symbols);

// `@file` loads an nfa-kind automaton file whose alphabet symbols are mapped
// by name onto `symbols`; anything else is a regex.
Nfa compile_language(const std::string& text, const std::vector<std::string>& symbols,
                     const std::string& base_dir = "");

Nfa nfa_from_automaton(const Automaton& a, const std::vector<std::string>& symbols);

// Complete DFA recognising the complement. Throws ResourceError when the
// subset construction needs more than `cap` states.
Nfa complement(const Nfa& n, int cap = kDefaultSubsetCap);

}  // namespace patlog
