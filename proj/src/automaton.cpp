#include "patlog/automaton.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace patlog {

const char* monoid_name(MonoidKind k) {
  switch (k) {
    case MonoidKind::Trivial: return "nfa";
    case MonoidKind::FreeWord: return "trans";
    case MonoidKind::IntSum: return "sum";
  }
  return "?";
}

int64_t checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer output overflow");
  return r;
}

int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer output overflow");
  return r;
}

Value combine(MonoidKind k, const Value& x, const Value& y) {
  switch (k) {
    case MonoidKind::Trivial: return Value::unit();
    case MonoidKind::IntSum: return Value::integer(checked_add(x.num, y.num));
    case MonoidKind::FreeWord: {
      Value r = x;
      r.word.insert(r.word.end(), y.word.begin(), y.word.end());
      return r;
    }
  }
  return Value::unit();
}

// ---------------------------------------------------------------------------
// Automaton

static int add_name(std::vector<std::string>& names, std::map<std::string, int>& ids,
                    const std::string& name, const char* what) {
  if (ids.count(name)) throw Error(std::string("duplicate ") + what + " '" + name + "'");
  int id = static_cast<int>(names.size());
  names.push_back(name);
  ids.emplace(name, id);
  return id;
}

static int lookup(const std::map<std::string, int>& ids, const std::string& name) {
  auto it = ids.find(name);
  return it == ids.end() ? -1 : it->second;
}

int Automaton::add_symbol(const std::string& name) { return add_name(symbols_, symbol_ids_, name, "symbol"); }

int Automaton::add_state(const std::string& name) {
  int q = add_name(state_names_, state_ids_, name, "state");
  initial_.push_back(false);
  final_.push_back(false);
  colours_.emplace_back(colour_names_.size(), false);
  out_.emplace_back();
  return q;
}

int Automaton::add_colour(const std::string& name) {
  int c = add_name(colour_names_, colour_ids_, name, "colour");
  for (auto& row : colours_) row.push_back(false);
  return c;
}

void Automaton::set_initial(int q, bool on) { initial_.at(q) = on; }
void Automaton::set_final(int q, bool on) { final_.at(q) = on; }
void Automaton::add_state_colour(int q, int colour) { colours_.at(q).at(colour) = true; }

bool Automaton::has_colour(int q, int colour) const {
  return colour >= 0 && colour < num_colours() && colours_.at(q)[colour];
}

int Automaton::state_index(const std::string& name) const { return lookup(state_ids_, name); }
int Automaton::symbol_index(const std::string& name) const { return lookup(symbol_ids_, name); }
int Automaton::colour_index(const std::string& name) const { return lookup(colour_ids_, name); }

int Automaton::intern_value(const Value& v) {
  auto it = value_ids_.find(v);
  if (it != value_ids_.end()) return it->second;
  int id = static_cast<int>(values_.size());
  values_.push_back(v);
  value_ids_.emplace(v, id);
  return id;
}

int Automaton::find_value(const Value& v) const {
  auto it = value_ids_.find(v);
  return it == value_ids_.end() ? -1 : it->second;
}

int Automaton::add_transition(int src, int label, const Value& v, int dst) {
  int vid = intern_value(v);
  if (src >= 0 && src < num_states()) {
    for (int t : out_[src]) {
      const Transition& e = transitions_[t];
      if (e.label == label && e.value == vid && e.dst == dst) return t;
    }
  }
  int t = static_cast<int>(transitions_.size());
  transitions_.push_back({src, label, vid, dst});
  if (src >= 0 && src < num_states()) out_[src].push_back(t);
  return t;
}

bool Automaton::has_epsilon() const {
  return std::any_of(transitions_.begin(), transitions_.end(),
                     [](const Transition& t) { return t.label == kEps; });
}

std::string Automaton::label_text(int label) const {
  if (label == kEps) return "eps";
  return symbols_.at(label);
}

std::string Automaton::value_text(const Value& v) const {
  switch (monoid_.kind) {
    case MonoidKind::Trivial: return "()";
    case MonoidKind::IntSum: return std::to_string(v.num);
    case MonoidKind::FreeWord: {
      if (v.word.empty()) return "eps";
      std::string s;
      for (int c : v.word) s += monoid_.gamma.at(c);
      return s;
    }
  }
  return "?";
}

std::string Automaton::word_text(const std::vector<int>& input) const {
  if (input.empty()) return "eps";
  std::string s;
  for (size_t i = 0; i < input.size(); ++i) {
    if (i) s += ' ';
    s += label_text(input[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// File format

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<int> parse_output_word(const std::vector<std::string>& gamma, const std::string& text) {
  if (text == "eps") return {};
  // Segment into output symbols; reject ambiguous or impossible splits.
  const size_t n = text.size();
  std::vector<long> ways(n + 1, 0);
  std::vector<int> choice(n + 1, -1);
  ways[n] = 1;
  for (size_t i = n; i-- > 0;) {
    for (size_t s = 0; s < gamma.size(); ++s) {
      const std::string& g = gamma[s];
      if (!g.empty() && text.compare(i, g.size(), g) == 0 && ways[i + g.size()] > 0) {
        ways[i] = std::min<long>(2, ways[i] + ways[i + g.size()]);
        choice[i] = static_cast<int>(s);
      }
    }
  }
  if (ways[0] == 0) throw Error("'" + text + "' is not a word over the output alphabet");
  if (ways[0] > 1) throw Error("'" + text + "' splits into output symbols in more than one way");
  std::vector<int> word;
  for (size_t i = 0; i < n;) {
    int s = choice[i];
    word.push_back(s);
    i += gamma[s].size();
  }
  return word;
}

static bool parse_int64(const std::string& s, int64_t& out) {
  if (s.empty()) return false;
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (size_t j = i; j < s.size(); ++j)
    if (s[j] < '0' || s[j] > '9') return false;
  try {
    size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) return false;
    out = v;
  } catch (const std::out_of_range&) {
    throw OverflowError("integer output '" + s + "' does not fit in 64 bits");
  }
  return true;
}

Automaton parse_automaton(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool have_header = false;
  bool need_gamma = false;
  Automaton a;

  auto state_of = [&](const std::string& name, int line) {
    int q = a.state_index(name);
    if (q < 0) throw ParseError("undeclared state '" + name + "'", line);
    return q;
  };

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];

    try {
      if (!have_header) {
        if (kw != "automaton" || tok.size() != 2)
          throw ParseError("expected 'automaton <nfa|trans|sum>'", lineno);
        OutputMonoid m;
        if (tok[1] == "nfa") m.kind = MonoidKind::Trivial;
        else if (tok[1] == "trans") m.kind = MonoidKind::FreeWord;
        else if (tok[1] == "sum") m.kind = MonoidKind::IntSum;
        else throw ParseError("unknown automaton kind '" + tok[1] + "'", lineno);
        need_gamma = m.kind == MonoidKind::FreeWord;
        a = Automaton(m);
        have_header = true;
        continue;
      }
      if (kw == "out-alphabet") {
        if (a.kind() != MonoidKind::FreeWord)
          throw ParseError("out-alphabet only allowed for trans automata", lineno);
        if (!need_gamma) throw ParseError("duplicate out-alphabet", lineno);
        if (tok.size() < 2) throw ParseError("empty output alphabet", lineno);
        OutputMonoid m{MonoidKind::FreeWord, {tok.begin() + 1, tok.end()}};
        std::set<std::string> seen;
        for (auto& g : m.gamma) {
          if (g == "eps") throw ParseError("'eps' is reserved", lineno);
          if (!seen.insert(g).second) throw ParseError("duplicate output symbol '" + g + "'", lineno);
        }
        a = Automaton(m);
        need_gamma = false;
        continue;
      }
      if (need_gamma) throw ParseError("trans automaton needs 'out-alphabet' after the header", lineno);
      if (kw == "alphabet") {
        for (size_t i = 1; i < tok.size(); ++i) {
          if (tok[i] == "eps") throw ParseError("'eps' is reserved", lineno);
          a.add_symbol(tok[i]);
        }
      } else if (kw == "states") {
        for (size_t i = 1; i < tok.size(); ++i) a.add_state(tok[i]);
      } else if (kw == "initial") {
        for (size_t i = 1; i < tok.size(); ++i) a.set_initial(state_of(tok[i], lineno));
      } else if (kw == "final") {
        for (size_t i = 1; i < tok.size(); ++i) a.set_final(state_of(tok[i], lineno));
      } else if (kw == "colors" || kw == "colours") {
        if (tok.size() < 2) throw ParseError("expected 'colors <state> <colours...>'", lineno);
        int q = state_of(tok[1], lineno);
        for (size_t i = 2; i < tok.size(); ++i) {
          int c = a.colour_index(tok[i]);
          if (c < 0) c = a.add_colour(tok[i]);
          a.add_state_colour(q, c);
        }
      } else if (kw == "trans") {
        const size_t want = a.kind() == MonoidKind::Trivial ? 4 : 5;
        if (tok.size() != want) {
          if (a.kind() == MonoidKind::Trivial && tok.size() == 5)
            throw ParseError("output value incompatible with monoid: nfa transitions carry no output", lineno);
          throw ParseError("expected " + std::to_string(want) + " fields in transition", lineno);
        }
        int src = state_of(tok[1], lineno);
        int dst = state_of(tok[want - 1], lineno);
        int label = kEps;
        if (tok[2] != "eps") {
          label = a.symbol_index(tok[2]);
          if (label < 0) throw ParseError("undeclared symbol '" + tok[2] + "'", lineno);
        }
        Value v;
        if (a.kind() == MonoidKind::IntSum) {
          if (!parse_int64(tok[3], v.num))
            throw ParseError("output value incompatible with monoid: '" + tok[3] + "' is not an integer", lineno);
        } else if (a.kind() == MonoidKind::FreeWord) {
          int64_t ignored;
          if (tok[3] != "eps" && parse_int64(tok[3], ignored) &&
              std::none_of(a.monoid().gamma.begin(), a.monoid().gamma.end(),
                           [&](const std::string& g) { return tok[3].find(g) != std::string::npos; }))
            throw ParseError("output value incompatible with monoid: '" + tok[3] + "' is an integer", lineno);
          try {
            v.word = parse_output_word(a.monoid().gamma, tok[3]);
          } catch (const Error& e) {
            throw ParseError(std::string("output value incompatible with monoid: ") + e.what(), lineno);
          }
        }
        a.add_transition(src, label, v, dst);
      } else {
        throw ParseError("unknown directive '" + kw + "'", lineno);
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!have_header) throw ParseError("missing 'automaton' header", lineno ? lineno : 1);
  if (need_gamma) throw ParseError("trans automaton needs 'out-alphabet'", lineno);
  for (const auto& d : validate(a))
    if (d.level == Diagnostic::Level::Error) throw ParseError(d.message);
  return a;
}

Automaton load_automaton(const std::string& path) {
  try {
    return parse_automaton(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<Diagnostic> validate(const Automaton& a) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string m) { out.push_back({Diagnostic::Level::Error, std::move(m)}); };
  const int n = a.num_states();
  if (a.kind() == MonoidKind::FreeWord && a.monoid().gamma.empty()) err("output alphabet is empty");
  for (size_t i = 0; i < a.transitions_.size(); ++i) {
    const Transition& t = a.transitions_[i];
    const std::string where = "transition " + std::to_string(i);
    if (t.src < 0 || t.src >= n) err(where + " references undeclared state #" + std::to_string(t.src));
    if (t.dst < 0 || t.dst >= n) err(where + " references undeclared state #" + std::to_string(t.dst));
    if (t.label != kEps && (t.label < 0 || t.label >= a.num_symbols()))
      err(where + " uses undeclared symbol #" + std::to_string(t.label));
    if (t.value < 0 || t.value >= static_cast<int>(a.values_.size())) {
      err(where + " has no output value");
      continue;
    }
    const Value& v = a.values_[t.value];
    switch (a.kind()) {
      case MonoidKind::Trivial:
        if (!v.word.empty() || v.num != 0) err(where + ": output value incompatible with monoid");
        break;
      case MonoidKind::IntSum:
        if (!v.word.empty()) err(where + ": output value incompatible with monoid");
        break;
      case MonoidKind::FreeWord:
        if (v.num != 0) err(where + ": output value incompatible with monoid");
        for (int c : v.word)
          if (c < 0 || c >= static_cast<int>(a.monoid().gamma.size()))
            err(where + ": output symbol outside the output alphabet");
        break;
    }
  }
  bool any_initial = false;
  for (int q = 0; q < n; ++q) any_initial = any_initial || a.initial_[q];
  if (!any_initial) out.push_back({Diagnostic::Level::Warning, "no initial state: Paths_acc empty"});
  return out;
}

// ---------------------------------------------------------------------------
// Paths

int path_end(const Automaton& a, const Path& p) {
  return p.trans.empty() ? p.start : a.transition(p.trans.back()).dst;
}

std::vector<int> path_labels(const Automaton& a, const Path& p) {
  std::vector<int> r;
  r.reserve(p.trans.size());
  for (int t : p.trans) r.push_back(a.transition(t).label);
  return r;
}

std::vector<int> path_input(const Automaton& a, const Path& p) {
  std::vector<int> r;
  for (int t : p.trans)
    if (a.transition(t).label != kEps) r.push_back(a.transition(t).label);
  return r;
}

Value path_output(const Automaton& a, const Path& p) {
  Value r;
  for (int t : p.trans) r = combine(a.kind(), r, a.value(a.transition(t).value));
  return r;
}

std::string check_path(const Automaton& a, const Path& p) {
  if (p.start < 0 || p.start >= a.num_states()) return "start state out of range";
  int cur = p.start;
  for (size_t i = 0; i < p.trans.size(); ++i) {
    int t = p.trans[i];
    if (t < 0 || t >= static_cast<int>(a.transitions().size())) return "unknown transition";
    if (a.transition(t).src != cur) return "transition " + std::to_string(i) + " does not chain";
    cur = a.transition(t).dst;
  }
  return {};
}

std::string path_text(const Automaton& a, const Path& p) {
  std::string s = a.state_name(p.start);
  for (int t : p.trans) {
    const Transition& e = a.transition(t);
    s += " -" + a.label_text(e.label);
    if (a.kind() != MonoidKind::Trivial) s += "|" + a.value_text(a.value(e.value));
    s += "-> " + a.state_name(e.dst);
  }
  return s;
}

std::vector<Path> paths_upto(const Automaton& a, int max_transitions, size_t cap) {
  if (max_transitions < 0) throw Error("max_transitions must be non-negative");
  std::vector<Path> result;
  Path cur;
  // Depth-first in state order then transition declaration order.
  auto rec = [&](auto&& self, int q) -> void {
    if (result.size() >= cap) throw ResourceError("path enumeration exceeds cap of " + std::to_string(cap));
    result.push_back(cur);
    if (static_cast<int>(cur.trans.size()) == max_transitions) return;
    for (int t : a.out(q)) {
      cur.trans.push_back(t);
      self(self, a.transition(t).dst);
      cur.trans.pop_back();
    }
  };
  for (int q = 0; q < a.num_states(); ++q) {
    cur.start = q;
    cur.trans.clear();
    rec(rec, q);
  }
  return result;
}

std::vector<Value> eval_relation(const Automaton& a, const std::vector<int>& input, int max_transitions,
                                 size_t cap) {
  std::set<Value> vals;
  size_t visited = 0;
  std::vector<int> stack;
  // Walk only along prefixes of the input.
  auto rec = [&](auto&& self, int q, size_t pos, int depth, const Value& acc) -> void {
    if (++visited > cap) throw ResourceError("relation evaluation exceeds cap of " + std::to_string(cap));
    if (pos == input.size() && a.is_final(q)) vals.insert(acc);
    if (depth == max_transitions) return;
    for (int t : a.out(q)) {
      const Transition& e = a.transition(t);
      if (e.label != kEps && (pos == input.size() || input[pos] != e.label)) continue;
      self(self, e.dst, pos + (e.label == kEps ? 0 : 1), depth + 1, combine(a.kind(), acc, a.value(e.value)));
    }
  };
  for (int q = 0; q < a.num_states(); ++q)
    if (a.is_initial(q)) rec(rec, q, 0, 0, Value::unit());
  return {vals.begin(), vals.end()};
}

// ---------------------------------------------------------------------------
// Convolution

std::vector<Letter> encode_path(const Automaton& a, const Path& p) {
  std::vector<Letter> r;
  r.reserve(1 + 3 * p.trans.size());
  r.push_back(Letter::state(p.start));
  for (int t : p.trans) {
    const Transition& e = a.transition(t);
    r.push_back(Letter::label(e.label));
    r.push_back(Letter::val(e.value));
    r.push_back(Letter::state(e.dst));
  }
  return r;
}

std::string letter_text(const Automaton& a, const Letter& l) {
  switch (l.kind) {
    case Letter::State: return a.state_name(l.id);
    case Letter::Label: return a.label_text(l.id);
    case Letter::Eps: return "^eps";
    case Letter::Val: return a.value_text(a.value(l.id));
    case Letter::Bot: return "_";
    case Letter::Idle: return ".";
  }
  return "?";
}

ConvWord convolve(const Automaton& a, const std::vector<Path>& paths) {
  ConvWord w;
  w.arity = static_cast<int>(paths.size());
  if (paths.empty()) return w;
  std::vector<std::vector<Letter>> enc;
  size_t len = 0;
  for (const Path& p : paths) {
    enc.push_back(encode_path(a, p));
    len = std::max(len, enc.back().size());
  }
  w.letters.assign(len * w.arity, Letter::bot());
  for (int c = 0; c < w.arity; ++c)
    for (size_t i = 0; i < enc[c].size(); ++i) w.at(i, c) = enc[c][i];
  return w;
}

Path decode_component(const Automaton& a, const std::vector<Letter>& letters) {
  size_t i = 0;
  while (i < letters.size() && letters[i].kind == Letter::Idle) ++i;
  size_t end = letters.size();
  while (end > i && letters[end - 1].kind == Letter::Bot) --end;
  if (i == end) throw Error("component encodes no path");
  for (size_t j = i; j < end; ++j)
    if (letters[j].kind == Letter::Bot || letters[j].kind == Letter::Idle)
      throw Error("padding letter inside an encoded path");
  if ((end - i) % 3 != 1) throw Error("encoded path has wrong length");
  if (letters[i].kind != Letter::State || letters[i].id < 0 || letters[i].id >= a.num_states())
    throw Error("encoded path must start with a state");
  Path p;
  p.start = letters[i].id;
  int cur = p.start;
  for (size_t j = i + 1; j < end; j += 3) {
    const Letter& lab = letters[j];
    const Letter& val = letters[j + 1];
    const Letter& dst = letters[j + 2];
    if ((lab.kind != Letter::Label && lab.kind != Letter::Eps) || val.kind != Letter::Val ||
        dst.kind != Letter::State)
      throw Error("malformed transition in encoded path");
    int label = lab.kind == Letter::Eps ? kEps : lab.id;
    int found = -1;
    for (int t : a.out(cur)) {
      const Transition& e = a.transition(t);
      if (e.label == label && e.value == val.id && e.dst == dst.id) {
        found = t;
        break;
      }
    }
    if (found < 0) throw Error("encoded transition not in the automaton (broken chaining or value mismatch)");
    p.trans.push_back(found);
    cur = dst.id;
  }
  return p;
}

std::vector<Path> deconvolve(const Automaton& a, const ConvWord& w) {
  std::vector<Path> out;
  const size_t len = w.length();
  for (int c = 0; c < w.arity; ++c) {
    std::vector<Letter> comp;
    comp.reserve(len);
    for (size_t i = 0; i < len; ++i) {
      if (w.at(i, c).kind == Letter::Idle) throw Error("idle letter in a convolution");
      comp.push_back(w.at(i, c));
    }
    out.push_back(decode_component(a, comp));
  }
  return out;
}

}  // namespace patlog
