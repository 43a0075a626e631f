#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "patlog/acceptor.hpp"

namespace patlog {

enum class BoundPolicy { PaperDefault, Explicit, UnboundedRefuse };

constexpr size_t kDefaultMemoCap = 1'000'000;

struct SearchConfig {
  std::optional<uint64_t> witness_bound;
  BoundPolicy bound_policy = BoundPolicy::PaperDefault;
  size_t memo_cap = kDefaultMemoCap;
  double safety_factor = 4.0;
  bool lockstep = false;  // one synchronisation group for all components
};

enum class Method { None, BfsExhausted, BellmanFord, BoundComplete };
const char* method_name(Method m);

struct Verdict {
  enum Kind { Sat, Unsat, Unknown };
  Kind kind = Unknown;
  Method method = Method::None;
  uint64_t bound_used = 0;
  ConvWord witness;         // Sat only
  std::vector<Path> paths;  // Sat only, decoded components
  size_t configurations = 0;
  size_t control_states = 0;

  bool sat() const { return kind == Sat; }
  bool unsat() const { return kind == Unsat; }
  bool unknown() const { return kind == Unknown; }
};

const char* verdict_name(Verdict::Kind k);

// ---------------------------------------------------------------------------
// Control graphs: finite control plus counter increments on edges.

class ControlGraph {
 public:
  virtual ~ControlGraph() = default;
  virtual int width() const = 0;  // ints per node
  virtual int dims() const = 0;
  virtual const std::vector<LinearConstraint>& zeta() const = 0;
  // Initial nodes with their starting counter values.
  virtual void initial(Emit& out) const = 0;
  virtual void successors(const int32_t* node, Emit& out) const = 0;
  virtual bool accepting(const int32_t* node) const = 0;
};

// A small explicit graph with one counter per constraint; used by tests.
class ExplicitGraph : public ControlGraph {
 public:
  struct Edge {
    int from, to;
    std::vector<int64_t> inc;
  };
  ExplicitGraph(int nodes, int dims) : nodes_(nodes), dims_(dims), out_(nodes), accepting_(nodes, false) {}
  void add_edge(int from, int to, std::vector<int64_t> inc);
  void set_initial(int node) { initial_.push_back(node); }
  void set_accepting(int node) { accepting_[node] = true; }
  void add_constraint(LinearConstraint c) { zeta_.push_back(std::move(c)); }

  int width() const override { return 1; }
  int dims() const override { return dims_; }
  const std::vector<LinearConstraint>& zeta() const override { return zeta_; }
  void initial(Emit& out) const override;
  void successors(const int32_t* node, Emit& out) const override;
  bool accepting(const int32_t* node) const override { return accepting_[node[0]]; }
  int size() const { return nodes_; }

 private:
  int nodes_, dims_;
  std::vector<std::vector<Edge>> out_;
  std::vector<int> initial_;
  std::vector<bool> accepting_;
  std::vector<LinearConstraint> zeta_;
};

// On-the-fly product of the base paths acceptor with the atoms of a conjunct.
class ProductGraph : public ControlGraph {
 public:
  ProductGraph(const TupleAcceptor& m, size_t branch, bool lockstep);
  int width() const override { return width_; }
  int dims() const override { return conj_.dims; }
  const std::vector<LinearConstraint>& zeta() const override { return conj_.zeta; }
  void initial(Emit& out) const override;
  void successors(const int32_t* node, Emit& out) const override { expand(node, out, nullptr); }
  bool accepting(const int32_t* node) const override;

  // Same successors in the same order, with the letter vector of each move
  // (empty for a group switch, which reads nothing).
  void expand(const int32_t* node, Emit& out, std::vector<std::vector<Letter>>* moves) const;
  // Decode a node sequence, with the index of the move taken at each step,
  // back into paths.
  std::vector<Path> decode(const std::vector<std::vector<int32_t>>& nodes, const std::vector<int>& choices) const;
  int groups() const { return groups_; }

 private:
  struct Move {
    Letter letter;
    int32_t code;
  };
  void component_moves(int32_t code, std::vector<Move>& out) const;

  const Automaton& aut_;
  const Conjunct& conj_;
  int arity_;
  int groups_;
  std::vector<int> group_of_;
  std::vector<int> atom_offset_;
  int width_;
  // Component codes: [0, n) AtState; then AfterLabel, then AfterValue.
  int n_;
  std::vector<std::vector<int32_t>> labels_of_;       // state -> AfterLabel codes
  std::vector<std::pair<int, int>> after_label_;      // code - n -> (state, label)
  std::vector<std::vector<int32_t>> values_of_;       // AfterLabel index -> AfterValue codes
  std::vector<std::tuple<int, int, int>> after_value_;  // index -> (state, label, value)
  std::vector<std::vector<int>> dsts_;                // AfterValue index -> destinations
};

constexpr int32_t kIdle = -3, kStart = -2, kDone = -1;

// ---------------------------------------------------------------------------
// Deciders

// Emptiness of a d = 0 graph by breadth-first search; throws ResourceError
// past memo_cap.
Verdict nfa_emptiness(const ControlGraph& g, const SearchConfig& cfg);
Verdict nfa_emptiness(const TupleAcceptor& m, const SearchConfig& cfg);

constexpr int64_t kMinusInf = std::numeric_limits<int64_t>::min();
constexpr int64_t kPlusInf = std::numeric_limits<int64_t>::max();

struct Extremum {
  int node;  // node index in discovery order
  int64_t min, max;
};

// Per accepting node: the smallest and largest value of Σ coef·x reachable,
// with kMinusInf / kPlusInf for unbounded directions. Requires one constraint.
std::vector<Extremum> bellman_ford_extrema(const ControlGraph& g, const SearchConfig& cfg);

enum class Strategy { Auto, Extrema, Bounded };

Verdict parikh_emptiness(const ControlGraph& g, const SearchConfig& cfg, Strategy s = Strategy::Auto);
// All branches; first SAT wins.
Verdict parikh_emptiness(const TupleAcceptor& m, const SearchConfig& cfg);

// The bound the paper-default policy yields for a graph; saturates.
uint64_t default_bound(const ControlGraph& g, const SearchConfig& cfg);

// Re-check a decoded witness; throws SoundnessError when the acceptor
// rejects it.
void verify_acceptance(const TupleAcceptor& m, const std::vector<Path>& paths);

}  // namespace patlog
