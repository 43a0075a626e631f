#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "patlog/error.hpp"

namespace patlog {

enum class MonoidKind { Trivial, FreeWord, IntSum };

const char* monoid_name(MonoidKind k);

struct OutputMonoid {
  MonoidKind kind = MonoidKind::Trivial;
  std::vector<std::string> gamma;  // output alphabet, FreeWord only
};

// Element of the output monoid. Words hold indices into the output alphabet.
struct Value {
  std::vector<int> word;
  int64_t num = 0;

  static Value unit() { return {}; }
  static Value integer(int64_t n) { return Value{{}, n}; }
  static Value of_word(std::vector<int> w) { return Value{std::move(w), 0}; }

  bool operator==(const Value& o) const { return num == o.num && word == o.word; }
  bool operator!=(const Value& o) const { return !(*this == o); }
  bool operator<(const Value& o) const { return num != o.num ? num < o.num : word < o.word; }
};

Value combine(MonoidKind k, const Value& x, const Value& y);
int64_t checked_add(int64_t a, int64_t b);
int64_t checked_mul(int64_t a, int64_t b);

inline constexpr int kEps = -1;  // label of an epsilon transition

struct Transition {
  int src = 0;
  int label = kEps;
  int value = 0;  // index into Automaton::values
  int dst = 0;
};

struct Diagnostic {
  enum class Level { Error, Warning } level = Level::Error;
  std::string message;
};

class Automaton {
 public:
  Automaton() = default;
  explicit Automaton(OutputMonoid m) : monoid_(std::move(m)) {}

  // Building. Names must be unique; returns the new index.
  int add_symbol(const std::string& name);
  int add_state(const std::string& name);
  int add_colour(const std::string& name);
  void set_initial(int q, bool on = true);
  void set_final(int q, bool on = true);
  void add_state_colour(int q, int colour);
  // Interns the value. Identical (src, label, value, dst) edges are merged;
  // returns the transition index.
  int add_transition(int src, int label, const Value& v, int dst);

  const OutputMonoid& monoid() const { return monoid_; }
  MonoidKind kind() const { return monoid_.kind; }
  int num_states() const { return static_cast<int>(state_names_.size()); }
  int num_symbols() const { return static_cast<int>(symbols_.size()); }
  int num_colours() const { return static_cast<int>(colour_names_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& colour_names() const { return colour_names_; }
  const std::string& state_name(int q) const { return state_names_.at(q); }
  int state_index(const std::string& name) const;   // -1 if absent
  int symbol_index(const std::string& name) const;  // -1 if absent
  int colour_index(const std::string& name) const;  // -1 if absent
  bool is_initial(int q) const { return initial_.at(q); }
  bool is_final(int q) const { return final_.at(q); }
  bool has_colour(int q, int colour) const;
  const std::vector<Transition>& transitions() const { return transitions_; }
  const Transition& transition(int t) const { return transitions_.at(t); }
  const std::vector<int>& out(int q) const { return out_.at(q); }
  const std::vector<Value>& values() const { return values_; }
  const Value& value(int id) const { return values_.at(id); }
  int intern_value(const Value& v);
  int find_value(const Value& v) const;  // -1 if not interned
  bool has_epsilon() const;

  std::string label_text(int label) const;
  std::string value_text(const Value& v) const;
  std::string word_text(const std::vector<int>& input) const;
  // Output-alphabet symbol name.
  std::string gamma_text(int sym) const { return monoid_.gamma.at(sym); }

 private:
  OutputMonoid monoid_;
  std::vector<std::string> symbols_;
  std::vector<std::string> state_names_;
  std::vector<std::string> colour_names_;
  std::map<std::string, int> symbol_ids_, state_ids_, colour_ids_;
  std::vector<bool> initial_, final_;
  std::vector<std::vector<bool>> colours_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<int>> out_;
  std::vector<Value> values_;
  std::map<Value, int> value_ids_;

  friend std::vector<Diagnostic> validate(const Automaton& a);
};

Automaton parse_automaton(const std::string& text);
Automaton load_automaton(const std::string& path);
std::string read_file(const std::string& path);

// Parses an output word (symbols concatenated without separators) or `eps`.
std::vector<int> parse_output_word(const std::vector<std::string>& gamma, const std::string& text);

std::vector<Diagnostic> validate(const Automaton& a);

// q0 a1 d1 q1 ... an dn qn, stored as the start state and transition indices.
struct Path {
  int start = 0;
  std::vector<int> trans;

  size_t size() const { return trans.size(); }
  bool operator==(const Path& o) const { return start == o.start && trans == o.trans; }
  bool operator!=(const Path& o) const { return !(*this == o); }
  bool operator<(const Path& o) const { return start != o.start ? start < o.start : trans < o.trans; }
};

int path_end(const Automaton& a, const Path& p);
// Labels including epsilon markers (kEps).
std::vector<int> path_labels(const Automaton& a, const Path& p);
// in(p): labels with epsilon erased.
std::vector<int> path_input(const Automaton& a, const Path& p);
Value path_output(const Automaton& a, const Path& p);
// Empty string when the path is well formed, otherwise the reason.
std::string check_path(const Automaton& a, const Path& p);
std::string path_text(const Automaton& a, const Path& p);

inline constexpr size_t kDefaultEnumerationCap = 2'000'000;

std::vector<Path> paths_upto(const Automaton& a, int max_transitions,
                             size_t cap = kDefaultEnumerationCap);
std::vector<Value> eval_relation(const Automaton& a, const std::vector<int>& input,
                                 int max_transitions, size_t cap = kDefaultEnumerationCap);

// Letter of the convolution alphabet. Idle marks a component that has not
// started yet; it only appears in grouped exploration, never in a ConvWord.
struct Letter {
  enum Kind : uint8_t { State, Label, Eps, Val, Bot, Idle };
  Kind kind = Bot;
  int id = 0;

  static Letter state(int q) { return {State, q}; }
  static Letter label(int a) { return a == kEps ? Letter{Eps, 0} : Letter{Label, a}; }
  static Letter val(int v) { return {Val, v}; }
  static Letter bot() { return {Bot, 0}; }
  static Letter idle() { return {Idle, 0}; }

  bool operator==(const Letter& o) const { return kind == o.kind && id == o.id; }
  bool operator!=(const Letter& o) const { return !(*this == o); }
};

std::vector<Letter> encode_path(const Automaton& a, const Path& p);
std::string letter_text(const Automaton& a, const Letter& l);

struct ConvWord {
  int arity = 0;
  std::vector<Letter> letters;  // position-major, arity letters per position

  size_t length() const { return arity == 0 ? 0 : letters.size() / arity; }
  const Letter* at(size_t pos) const { return letters.data() + pos * arity; }
  Letter& at(size_t pos, int comp) { return letters[pos * arity + comp]; }
  const Letter& at(size_t pos, int comp) const { return letters[pos * arity + comp]; }
  bool operator==(const ConvWord& o) const { return arity == o.arity && letters == o.letters; }
};

ConvWord convolve(const Automaton& a, const std::vector<Path>& paths);
std::vector<Path> deconvolve(const Automaton& a, const ConvWord& w);
// Decodes one component's letter sequence (Idle and Bot padding allowed only
// before and after the encoded path respectively).
Path decode_component(const Automaton& a, const std::vector<Letter>& letters);

}  // namespace patlog
