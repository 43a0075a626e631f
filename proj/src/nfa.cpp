#include "patlog/nfa.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "patlog/automaton.hpp"

namespace patlog {

int Nfa::add_state() {
  initial.push_back(false);
  final.push_back(false);
  delta.emplace_back();
  return size() - 1;
}

bool Nfa::accepts(const std::vector<int>& word) const {
  std::vector<bool> cur = initial, next(size());
  for (int s : word) {
    std::fill(next.begin(), next.end(), false);
    for (int q = 0; q < size(); ++q)
      if (cur[q])
        for (auto [sym, dst] : delta[q])
          if (sym == s) next[dst] = true;
    cur.swap(next);
  }
  for (int q = 0; q < size(); ++q)
    if (cur[q] && final[q]) return true;
  return false;
}

bool Nfa::accepts_epsilon() const {
  for (int q = 0; q < size(); ++q)
    if (initial[q] && final[q]) return true;
  return false;
}

bool Nfa::is_empty() const {
  std::vector<bool> seen = initial;
  std::vector<int> stack;
  for (int q = 0; q < size(); ++q)
    if (seen[q]) stack.push_back(q);
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    if (final[q]) return false;
    for (auto [sym, dst] : delta[q])
      if (!seen[dst]) seen[dst] = true, stack.push_back(dst);
  }
  return true;
}

namespace {

// Thompson fragments with explicit epsilon edges, removed at the end.
struct EpsNfa {
  std::vector<std::vector<std::pair<int, int>>> edges;  // symbol -1 = epsilon
  int add() {
    edges.emplace_back();
    return static_cast<int>(edges.size()) - 1;
  }
  void link(int a, int sym, int b) { edges[a].push_back({sym, b}); }
};

struct Frag {
  int in, out;
};

class RegexParser {
 public:
  RegexParser(const std::string& text, const std::vector<std::string>& symbols)
      : text_(text), symbols_(symbols) {
    order_.resize(symbols.size());
    for (size_t i = 0; i < symbols.size(); ++i) order_[i] = static_cast<int>(i);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return symbols_[a].size() > symbols_[b].size(); });
  }

  Frag parse() {
    Frag f = alt();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

  EpsNfa g;

 private:
  const std::string& text_;
  const std::vector<std::string>& symbols_;
  std::vector<int> order_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& m) {
    throw ParseError("regex '" + text_ + "' at offset " + std::to_string(pos_) + ": " + m);
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_atom_start() {
    skip();
    return pos_ < text_.size() && text_[pos_] != '|' && text_[pos_] != ')' && text_[pos_] != '*';
  }
  Frag empty() {
    int a = g.add(), b = g.add();
    g.link(a, -1, b);
    return {a, b};
  }
  Frag alt() {
    Frag f = concat();
    skip();
    while (pos_ < text_.size() && text_[pos_] == '|') {
      ++pos_;
      Frag r = concat();
      int a = g.add(), b = g.add();
      g.link(a, -1, f.in);
      g.link(a, -1, r.in);
      g.link(f.out, -1, b);
      g.link(r.out, -1, b);
      f = {a, b};
      skip();
    }
    return f;
  }
  Frag concat() {
    if (!at_atom_start()) return empty();
    Frag f = star();
    while (at_atom_start()) {
      Frag r = star();
      g.link(f.out, -1, r.in);
      f.out = r.out;
    }
    return f;
  }
  Frag star() {
    Frag f = atom();
    skip();
    while (pos_ < text_.size() && text_[pos_] == '*') {
      ++pos_;
      int a = g.add(), b = g.add();
      g.link(a, -1, f.in);
      g.link(a, -1, b);
      g.link(f.out, -1, f.in);
      g.link(f.out, -1, b);
      f = {a, b};
      skip();
    }
    return f;
  }
  Frag atom() {
    skip();
    if (text_[pos_] == '(') {
      ++pos_;
      Frag f = alt();
      skip();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("missing ')'");
      ++pos_;
      return f;
    }
    if (text_.compare(pos_, 3, "eps") == 0) {
      bool shadowed = false;
      for (int s : order_)
        if (symbols_[s].size() > 3 && text_.compare(pos_, symbols_[s].size(), symbols_[s]) == 0) shadowed = true;
      if (!shadowed) {
        pos_ += 3;
        return empty();
      }
    }
    for (int s : order_) {
      const std::string& name = symbols_[s];
      if (!name.empty() && text_.compare(pos_, name.size(), name) == 0) {
        pos_ += name.size();
        int a = g.add(), b = g.add();
        g.link(a, s, b);
        return {a, b};
      }
    }
    fail("no symbol of the alphabet matches here");
  }
};

std::vector<int> eps_closure(const EpsNfa& g, int q) {
  std::vector<bool> seen(g.edges.size());
  std::vector<int> out, stack{q};
  seen[q] = true;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    out.push_back(x);
    for (auto [sym, dst] : g.edges[x])
      if (sym < 0 && !seen[dst]) seen[dst] = true, stack.push_back(dst);
  }
  return out;
}

Nfa remove_eps(const EpsNfa& g, const std::vector<int>& starts, const std::vector<bool>& finals, int alphabet) {
  const int n = static_cast<int>(g.edges.size());
  Nfa r;
  r.alphabet = alphabet;
  for (int q = 0; q < n; ++q) r.add_state();
  for (int q = 0; q < n; ++q) {
    std::set<std::pair<int, int>> seen;
    for (int x : eps_closure(g, q)) {
      if (finals[x]) r.final[q] = true;
      for (auto [sym, dst] : g.edges[x])
        if (sym >= 0 && seen.insert({sym, dst}).second) r.delta[q].push_back({sym, dst});
    }
  }
  for (int s : starts) r.initial[s] = true;
  // Keep only states reachable from the initial ones.
  std::vector<int> remap(n, -1);
  std::vector<int> order;
  for (int s : starts)
    if (remap[s] < 0) remap[s] = static_cast<int>(order.size()), order.push_back(s);
  for (size_t i = 0; i < order.size(); ++i)
    for (auto [sym, dst] : r.delta[order[i]])
      if (remap[dst] < 0) remap[dst] = static_cast<int>(order.size()), order.push_back(dst);
  Nfa t;
  t.alphabet = alphabet;
  for (int q : order) {
    int nq = t.add_state();
    t.initial[nq] = r.initial[q];
    t.final[nq] = r.final[q];
  }
  for (int q : order)
    for (auto [sym, dst] : r.delta[q]) t.delta[remap[q]].push_back({sym, remap[dst]});
  return t;
}

}  // namespace

Nfa compile_regex(const std::string& text, const std::vector<std::string>& symbols) {
  RegexParser p(text, symbols);
  Frag f = p.parse();
  std::vector<bool> finals(p.g.edges.size(), false);
  finals[f.out] = true;
  Nfa n = remove_eps(p.g, {f.in}, finals, static_cast<int>(symbols.size()));
  n.source = text;
  return n;
}

Nfa nfa_from_automaton(const Automaton& a, const std::vector<std::string>& symbols) {
  if (a.kind() != MonoidKind::Trivial) throw Error("language file must be an nfa automaton");
  std::vector<int> map(a.num_symbols());
  for (int s = 0; s < a.num_symbols(); ++s) {
    auto it = std::find(symbols.begin(), symbols.end(), a.symbols()[s]);
    if (it == symbols.end()) throw Error("language symbol '" + a.symbols()[s] + "' is not in the alphabet");
    map[s] = static_cast<int>(it - symbols.begin());
  }
  EpsNfa g;
  std::vector<int> starts;
  std::vector<bool> finals;
  for (int q = 0; q < a.num_states(); ++q) {
    g.add();
    if (a.is_initial(q)) starts.push_back(q);
    finals.push_back(a.is_final(q));
  }
  for (const Transition& t : a.transitions()) g.link(t.src, t.label == kEps ? -1 : map[t.label], t.dst);
  return remove_eps(g, starts, finals, static_cast<int>(symbols.size()));
}

Nfa compile_language(const std::string& text, const std::vector<std::string>& symbols,
                     const std::string& base_dir) {
  if (!text.empty() && text[0] == '@') {
    std::string path = text.substr(1);
    if (!base_dir.empty() && !path.empty() && path[0] != '/') path = base_dir + "/" + path;
    Nfa n = nfa_from_automaton(load_automaton(path), symbols);
    n.source = text;
    return n;
  }
  return compile_regex(text, symbols);
}

Nfa complement(const Nfa& n, int cap) {
  std::map<std::vector<bool>, int> ids;
  std::vector<std::vector<bool>> sets;
  Nfa d;
  d.alphabet = n.alphabet;
  d.deterministic = true;
  d.source = "complement(" + n.source + ")";
  auto id_of = [&](const std::vector<bool>& s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    if (static_cast<int>(sets.size()) >= cap)
      throw ResourceError("complementing '" + n.source + "' needs more than " + std::to_string(cap) +
                          " subset states");
    int q = d.add_state();
    ids.emplace(s, q);
    sets.push_back(s);
    bool fin = false;
    for (int x = 0; x < n.size(); ++x) fin = fin || (s[x] && n.final[x]);
    d.final[q] = !fin;
    return q;
  };
  int start = id_of(n.initial);
  for (size_t i = 0; i < sets.size(); ++i) {
    for (int sym = 0; sym < n.alphabet; ++sym) {
      std::vector<bool> next(n.size(), false);
      for (int x = 0; x < n.size(); ++x)
        if (sets[i][x])
          for (auto [s, dst] : n.delta[x])
            if (s == sym) next[dst] = true;
      int to = id_of(next);
      d.delta[i].push_back({sym, to});
    }
  }
  d.initial.assign(d.size(), false);
  d.initial[start] = true;
  return d;
}

}  // namespace patlog
