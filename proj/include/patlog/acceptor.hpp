#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "patlog/formula.hpp"

namespace patlog {

// Σ coef_i · x_i  rel  rhs
enum class Rel { Le, Lt, Eq, Ne };
const char* rel_text(Rel r);

struct LinearConstraint {
  std::vector<int64_t> coef;
  Rel rel = Rel::Le;
  int64_t rhs = 0;

  bool holds(const std::vector<int64_t>& x) const;
  bool holds_value(int64_t v) const;  // on Σ coef_i·x_i already computed
};

// One predicate of a conjunctive clause, ready to be compiled.
struct Spec {
  enum Kind {
    Const,      // negated = false: true, negated = true: false
    Pref,       // lab(i) is a prefix of lab(j)
    LenLe,      // |i| <= |j|
    PathEq,     // i = j
    Member,     // in(i) ∈ lang
    Init,       // endpoint (i, si) initial
    Final,      // endpoint (i, si) final
    Colour,     // endpoint (i, si) has colour
    StateEq,    // (i, si) = (j, sj)
    LenCmp,     // |t1| <= |t2|, < when strict
    SumCmp,     // t1 rel t2 on integer outputs
    Mismatch,   // t1 and t2 differ at a common position
    OutMember,  // t1 ∈ lang
    NonEmpty,   // |t1| > 0
  };
  Kind kind = Const;
  bool negated = false;
  int i = -1, j = -1;
  Side si = Side::Src, sj = Side::Src;
  int colour = -1;
  std::shared_ptr<const Nfa> lang;
  std::vector<int> t1, t2;
  bool strict = false;
  Rel rel = Rel::Le;

  std::string key() const;
  bool synchronising() const { return kind == Pref || kind == LenLe || kind == PathEq; }
};

// Alternatives for one literal (notpref splits into a length branch and a
// mismatch branch). Constant specs are folded.
std::vector<Spec> literal_alternatives(const Literal& l);

// Canonical, deduplicated spec set; returns false when the set is
// contradictory on its face.
bool normalise_specs(std::vector<Spec>& specs);

// Spec sets for a clause, already normalised, contradictions dropped, sorted
// by size with supersets of earlier sets removed.
std::vector<std::vector<Spec>> clause_spec_sets(const Clause& c);

// ---------------------------------------------------------------------------
// Machines

class Emit {
 public:
  Emit(int width, int dims) : width_(width), dims_(dims) {}
  void push(const int32_t* s, const int64_t* inc) {
    states_.insert(states_.end(), s, s + width_);
    if (dims_) incs_.insert(incs_.end(), inc, inc + dims_);
    ++count_;
  }
  void clear() {
    states_.clear();
    incs_.clear();
    count_ = 0;
  }
  size_t size() const { return count_; }
  const int32_t* state(size_t k) const { return states_.data() + k * width_; }
  const int64_t* inc(size_t k) const { return incs_.data() + k * dims_; }

 private:
  int width_, dims_;
  std::vector<int32_t> states_;
  std::vector<int64_t> incs_;
  size_t count_ = 0;
};

// Control of one predicate. Its state is `width()` ints; Idle letters are
// ignored by every machine.
class AtomMachine {
 public:
  virtual ~AtomMachine() = default;
  virtual int width() const = 0;
  virtual int dims() const { return 0; }
  virtual void initial(Emit& out) const = 0;
  virtual void step(const int32_t* state, const Letter* letters, Emit& out) const = 0;
  virtual bool accepting(const int32_t* state) const = 0;
  // Constraints over this machine's counters, placed at `offset` of `total`.
  virtual std::vector<LinearConstraint> constraints(int offset, int total) const {
    (void)offset;
    (void)total;
    return {};
  }
  virtual std::vector<int> sync_components() const { return {}; }
  virtual std::string describe() const = 0;
};

// Conjunctive product of machines over the base paths acceptor.
struct Conjunct {
  std::vector<std::shared_ptr<const AtomMachine>> atoms;
  int dims = 0;
  std::vector<LinearConstraint> zeta;
};

// A union of conjunctive branches; zero branches is the empty acceptor and
// one branch without atoms is the base acceptor of all path tuples.
struct TupleAcceptor {
  const Automaton* aut = nullptr;
  int arity = 0;
  std::vector<Conjunct> branches;

  int dims() const;
  int atom_count() const;
};

struct BuildOptions {
  int subset_cap = kDefaultSubsetCap;
};

TupleAcceptor base_paths_acceptor(const Automaton& a, int arity);
TupleAcceptor build_base_acceptor(const Spec& spec, const Automaton& a, int arity, const BuildOptions& o = {});
TupleAcceptor build_parikh_len_cmp(const std::vector<int>& t1, const std::vector<int>& t2, bool strict,
                                   const Automaton& a, int arity);
TupleAcceptor build_parikh_not_prefix(const std::vector<int>& t1, const std::vector<int>& t2, const Automaton& a,
                                      int arity);
TupleAcceptor build_output_membership(const std::vector<int>& t, std::shared_ptr<const Nfa> lang, bool negated,
                                      const Automaton& a, int arity, const BuildOptions& o = {});
TupleAcceptor build_sum_cmp(const std::vector<int>& t1, const std::vector<int>& t2, Rel rel, const Automaton& a,
                            int arity);
// Any spec kind.
TupleAcceptor build_acceptor(const Spec& spec, const Automaton& a, int arity, const BuildOptions& o = {});
TupleAcceptor build_conjunction(const std::vector<Spec>& specs, const Automaton& a, int arity,
                                const BuildOptions& o = {});

TupleAcceptor acceptor_product(const std::vector<TupleAcceptor>& ms);
TupleAcceptor acceptor_union(const TupleAcceptor& m1, const TupleAcceptor& m2);

// Membership by direct simulation with exact counters. Words outside the base
// language (not a convolution of paths of the automaton) are rejected.
bool acceptor_accepts(const TupleAcceptor& m, const ConvWord& w);

std::string acceptor_text(const TupleAcceptor& m);

// Component -> group. Components tied by pref / len / path equality share a
// group; lockstep puts everything in one group.
std::vector<int> sync_groups(const Conjunct& c, int arity, bool lockstep);

}  // namespace patlog
