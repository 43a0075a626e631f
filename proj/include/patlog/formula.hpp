#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "patlog/automaton.hpp"
#include "patlog/nfa.hpp"

namespace patlog {

template <class A>
struct BoolTree {
  enum Kind { True, False, Leaf, Not, And, Or };
  Kind kind = True;
  A atom{};
  std::vector<BoolTree> kids;

  static BoolTree constant(bool b) { return BoolTree{b ? True : False, {}, {}}; }
  static BoolTree leaf(A a) { return BoolTree{Leaf, std::move(a), {}}; }
  static BoolTree negate(BoolTree t) { return BoolTree{Not, {}, {std::move(t)}}; }
  static BoolTree all(std::vector<BoolTree> ts) {
    if (ts.size() == 1) return std::move(ts[0]);
    if (ts.empty()) return constant(true);
    return BoolTree{And, {}, std::move(ts)};
  }
  static BoolTree any(std::vector<BoolTree> ts) {
    if (ts.size() == 1) return std::move(ts[0]);
    if (ts.empty()) return constant(false);
    return BoolTree{Or, {}, std::move(ts)};
  }

  template <class F>
  void for_each_leaf(F&& f, bool negated = false) const {
    if (kind == Leaf) f(atom, negated);
    for (const auto& k : kids) k.for_each_leaf(f, kind == Not ? !negated : negated);
  }
};

// ---------------------------------------------------------------------------
// Pattern formulas (four-sorted)

enum class Sort { Path, State, Input, Output };

// Concatenation (FreeWord) or sum (IntSum) of output variables; empty = unit.
struct Term {
  std::vector<std::string> vars;
};

enum class PKind {
  InPref,      // u1 pref u2
  InMember,    // u in L
  InLenLe,     // len(u1) <= len(u2)
  Init,        // init(q)
  Final,       // final(q)
  StateEq,     // q1 = q2
  PathEq,      // pi1 = pi2
  Colour,      // color(q, c)
  OutNotPref,  // t notpref t'
  OutMember,   // t in N
  OutLenLe,    // len(t) <= len(t')
  OutLe,       // t <= t'
  OutLt,       // t < t'
  OutEq,       // t = t'
  OutNe,       // t != t'
};

struct PAtom {
  PKind kind = PKind::Init;
  std::string x, y;  // variable operands
  Term t1, t2;       // output operands
  std::string colour;
  std::shared_ptr<const Nfa> lang;
};

using PTree = BoolTree<PAtom>;

struct Binding {
  std::string path, src, in, out, dst;  // out empty in the NFA form
};

struct PatternFormula {
  std::vector<std::string> universals;
  std::vector<Binding> bindings;
  PTree constraint;

  // Sort of a bound name; throws when unknown.
  Sort sort_of(const std::string& name) const;
  bool binds(const std::string& name) const;
};

// Alphabets the regular constants are compiled against.
struct FormulaContext {
  std::vector<std::string> input_symbols;
  std::vector<std::string> output_symbols;
  std::string base_dir;  // for @file languages

  static FormulaContext of(const Automaton& a, const std::string& base_dir = "");
};

PatternFormula parse_formula(const std::string& text, const FormulaContext& ctx);

std::string formula_text(const PatternFormula& f);

// ---------------------------------------------------------------------------
// Fragments

enum class Fragment { PL_NFA, PL_Trans, PL_Sum, PL_SumNe };
const char* fragment_name(Fragment f);

struct FragmentInfo {
  Fragment tag = Fragment::PL_NFA;
  std::vector<std::string> warnings;
};

// Throws FragmentError with the violated rule. Passing the automaton enables
// the epsilon warning for input comparisons.
FragmentInfo check_fragment(const PatternFormula& f, const OutputMonoid& m, const Automaton* a = nullptr);

// ---------------------------------------------------------------------------
// Path formulas (single-sorted over path indices)

enum class Side { Src, Dst };

enum class AKind {
  Pref,
  Member,
  LenLe,
  Init,
  Final,
  Colour,
  StateEq,
  PathEq,
  NotPref,
  OutMember,
  OutLenLe,
  OutLenLt,
  SumLe,
  SumLt,
  SumEq,
  SumNe,
};

bool is_output_kind(AKind k);

struct Atom {
  AKind kind = AKind::Init;
  int i = -1, j = -1;
  Side si = Side::Src, sj = Side::Src;
  int colour = -1;
  std::shared_ptr<const Nfa> lang;
  std::vector<int> t1, t2;  // output terms as path indices in term order
};

using ATree = BoolTree<Atom>;

struct PathFormula {
  int arity = 0;
  ATree tree;
  bool nnf = false;
};

struct VarMaps {
  std::vector<std::string> path_names;  // index -> path variable
  std::map<std::string, std::pair<int, Side>> state;  // f_Q
  std::map<std::string, int> input;                   // f_I
  std::map<std::string, int> output;                  // f_O
  // Duplicated occurrences renamed away: (binding index, role, variable).
  std::vector<std::string> renamed;
};

std::string atom_text(const Atom& a, const VarMaps* maps = nullptr);
std::string tree_text(const ATree& t, const VarMaps* maps = nullptr);

// Colours are resolved against `a`; FreeWord inequalities are expanded into
// notpref atoms here.
std::pair<PathFormula, VarMaps> to_path_formula(const PatternFormula& f, const Automaton& a);

PathFormula nnf(const PathFormula& f);

struct Literal {
  Atom atom;
  bool negated = false;
};
using Clause = std::vector<Literal>;

// Calls `visit` for each disjunct selection in order; stops early when it
// returns false. Returns false if stopped.
bool for_each_clause(const PathFormula& f, const std::function<bool(const Clause&)>& visit);
std::vector<Clause> dnf_clauses(const PathFormula& f);

// ---------------------------------------------------------------------------
// Valuations

struct PatternValuation {
  std::map<std::string, Path> paths;
  std::map<std::string, int> states;
  std::map<std::string, std::vector<int>> inputs;  // label words, epsilon kept as kEps
  std::map<std::string, Value> outputs;
};

PatternValuation recover_valuation(const Automaton& a, const std::vector<Path>& paths, const VarMaps& maps);

}  // namespace patlog
