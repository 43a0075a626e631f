#pragma once

#include <string>
#include <utility>
#include <vector>

#include "patlog/checker.hpp"
#include "patlog/formula.hpp"

namespace patlog {

// Output macros, expanded at parse time.
// mismatch(t, t'): t notpref t' and t' notpref t.
PTree mismatch_tree(const Term& a, const Term& b);
// |t1'| != |t2'|  or  (t1'.t2' nonempty and mismatch(t1, t2)).
PTree sdel_neq(const Term& t1, const Term& t1p, const Term& t2, const Term& t2p);

// Suffixes left after stripping the longest common prefix.
std::pair<std::vector<int>, std::vector<int>> delay(const std::vector<int>& v1, const std::vector<int>& v2);
// The macro evaluated on concrete words.
bool sdel_neq_words(const std::vector<int>& v1, const std::vector<int>& v1p, const std::vector<int>& v2,
                    const std::vector<int>& v2p);

constexpr int kMaxSequentialOrder = 3;

struct PropertySpec {
  std::string name;
  int k = 1;  // for k-ambiguous, k-valued, k-sequential
};

struct PropertyInfo {
  std::string name;
  bool takes_k;
  std::vector<MonoidKind> monoids;
};

const std::vector<PropertyInfo>& property_table();
const PropertyInfo& property_info(const std::string& name);  // throws on unknown names
bool property_applies(const std::string& name, MonoidKind m);

// Formulas whose satisfaction each witnesses that the automaton is NOT in the
// class; the class is the complement of their disjunction.
std::vector<std::string> catalog_formula_texts(const PropertySpec& p, MonoidKind m);
std::vector<PatternFormula> catalog_formulas(const PropertySpec& p, const Automaton& a);

struct Membership {
  enum Kind { InClass, NotInClass, Unknown };
  Kind kind = Unknown;
  int formula = -1;  // index of the formula that decided (SAT or UNKNOWN)
  std::vector<CheckResult> results;
};
const char* membership_name(Membership::Kind k);

Membership check_property(const Automaton& a, const PropertySpec& p, const CheckOptions& o = {});

// Two sub-automata told apart by colours: is some input mapped to a common
// value by both? Rejected by the fragment check for transducers.
PatternFormula cross_check_formula(const Automaton& a, const std::string& colour1, const std::string& colour2);

}  // namespace patlog
