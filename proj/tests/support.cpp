#include "support.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace patlog::testing {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Value random_value(Rng& rng, MonoidKind kind, const RandomShape& shape) {
  switch (kind) {
    case MonoidKind::Trivial: return Value::unit();
    case MonoidKind::IntSum: return Value::integer(uniform(rng, -shape.max_weight, shape.max_weight));
    case MonoidKind::FreeWord: {
      std::vector<int> w(uniform(rng, 0, shape.max_output_len));
      for (int& c : w) c = uniform(rng, 0, 1);
      return Value::of_word(w);
    }
  }
  return Value::unit();
}

}  // namespace

Automaton random_automaton(Rng& rng, MonoidKind kind, const RandomShape& shape) {
  OutputMonoid m;
  m.kind = kind;
  if (kind == MonoidKind::FreeWord) m.gamma = {"a", "b"};
  Automaton a(m);
  for (int l = 0; l < shape.letters; ++l) a.add_symbol(std::string(1, static_cast<char>('a' + l)));
  const int n = uniform(rng, 1, shape.max_states);
  for (int q = 0; q < n; ++q) a.add_state("s" + std::to_string(q));
  for (int c = 0; c < shape.colours; ++c) a.add_colour("c" + std::to_string(c));
  bool any_init = false, any_final = false;
  for (int q = 0; q < n; ++q) {
    if (coin(rng, 0.4)) a.set_initial(q), any_init = true;
    if (coin(rng, 0.4)) a.set_final(q), any_final = true;
    for (int c = 0; c < shape.colours; ++c)
      if (coin(rng, 0.5)) a.add_state_colour(q, c);
  }
  if (!any_init) a.set_initial(uniform(rng, 0, n - 1));
  if (!any_final) a.set_final(uniform(rng, 0, n - 1));

  struct Edge {
    int src, label, dst;
  };
  std::vector<Edge> edges;
  for (int p = 0; p < n; ++p)
    for (int l = 0; l < shape.letters; ++l)
      for (int q = 0; q < n; ++q)
        if (coin(rng, shape.density)) edges.push_back({p, l, q});
  if (edges.empty()) edges.push_back({uniform(rng, 0, n - 1), 0, uniform(rng, 0, n - 1)});
  if (kind == MonoidKind::Trivial && shape.epsilon_share > 0) {
    // Turn some edges into epsilon edges, at most the allowed share.
    const int budget = static_cast<int>(shape.epsilon_share * static_cast<double>(edges.size()));
    int used = 0;
    for (auto& e : edges)
      if (used < budget && coin(rng, shape.epsilon_share)) {
        e.label = kEps;
        ++used;
      }
  }
  for (const auto& e : edges) {
    a.add_transition(e.src, e.label, random_value(rng, kind, shape), e.dst);
    if (kind != MonoidKind::Trivial && coin(rng, shape.parallel))
      a.add_transition(e.src, e.label, random_value(rng, kind, shape), e.dst);
  }
  return a;
}

// ---------------------------------------------------------------------------

Automaton set_partition_automaton(const std::vector<int>& xs) {
  OutputMonoid m;
  m.kind = MonoidKind::IntSum;
  Automaton a(m);
  const int letter = a.add_symbol("a");
  const int k = static_cast<int>(xs.size());
  for (int i = 0; i <= k; ++i) a.add_state("q" + std::to_string(i));
  a.set_initial(0);
  a.set_final(k);
  for (int i = 0; i < k; ++i) {
    a.add_transition(i, letter, Value::integer(xs[i]), i + 1);
    a.add_transition(i, letter, Value::integer(-xs[i]), i + 1);
  }
  a.add_transition(k, letter, Value::integer(0), k);
  return a;
}

const char* const kSetPartitionFormula =
    "exists p1 : q0 -[u1|v1]-> qf, p2 : qf -[u2|v2]-> qf . init(q0) & final(qf) & v1 = v2\n";

bool has_equal_split(const std::vector<int>& xs) {
  std::set<int> sums{0};
  for (int x : xs) {
    std::set<int> next;
    for (int s : sums) {
      next.insert(s + x);
      next.insert(s - x);
    }
    sums = std::move(next);
  }
  return sums.count(0) > 0;
}

Dfa random_dfa(Rng& rng, int max_states) {
  Dfa d;
  d.states = uniform(rng, 1, max_states);
  d.final.assign(d.states, false);
  d.next.assign(d.states, std::vector<int>(2, -1));
  for (int q = 0; q < d.states; ++q) {
    d.final[q] = coin(rng, 0.5);
    for (int l = 0; l < 2; ++l)
      if (coin(rng, 0.85)) d.next[q][l] = uniform(rng, 0, d.states - 1);
  }
  return d;
}

Automaton dfa_union(const std::vector<Dfa>& ds) {
  Automaton a;
  a.add_symbol("a");
  a.add_symbol("b");
  std::vector<int> base;
  for (size_t i = 0; i < ds.size(); ++i) {
    base.push_back(a.num_states());
    for (int q = 0; q < ds[i].states; ++q) a.add_state("d" + std::to_string(i) + "_" + std::to_string(q));
  }
  for (size_t i = 0; i < ds.size(); ++i) {
    const Dfa& d = ds[i];
    a.set_initial(base[i] + d.initial);
    for (int q = 0; q < d.states; ++q) {
      if (d.final[q]) a.set_final(base[i] + q);
      for (int l = 0; l < 2; ++l)
        if (d.next[q][l] >= 0) a.add_transition(base[i] + q, l, Value::unit(), base[i] + d.next[q][l]);
    }
  }
  return a;
}

std::string intersection_formula(int k) {
  std::string s = "exists ";
  for (int i = 0; i < k; ++i)
    s += (i ? ", " : "") + ("r" + std::to_string(i)) + " : p" + std::to_string(i) + " -[u]-> f" + std::to_string(i);
  s += " .";
  for (int i = 0; i < k; ++i) s += (i ? " &" : "") + (" init(p" + std::to_string(i) + ") & final(f" + std::to_string(i) + ")");
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) s += " & p" + std::to_string(i) + " != p" + std::to_string(j);
  return s + "\n";
}

bool intersection_nonempty(const std::vector<Dfa>& ds) {
  std::vector<int> start;
  for (const auto& d : ds) start.push_back(d.initial);
  std::set<std::vector<int>> seen{start};
  std::deque<std::vector<int>> todo{start};
  while (!todo.empty()) {
    auto cur = todo.front();
    todo.pop_front();
    bool all_final = true;
    for (size_t i = 0; i < ds.size(); ++i) all_final = all_final && ds[i].final[cur[i]];
    if (all_final) return true;
    for (int l = 0; l < 2; ++l) {
      std::vector<int> nxt;
      for (size_t i = 0; i < ds.size(); ++i) {
        const int t = ds[i].next[cur[i]][l];
        if (t < 0) break;
        nxt.push_back(t);
      }
      if (nxt.size() == ds.size() && seen.insert(nxt).second) todo.push_back(nxt);
    }
  }
  return false;
}

Automaton pcp_transducer(const std::vector<std::pair<std::string, std::string>>& dominos) {
  OutputMonoid m;
  m.kind = MonoidKind::FreeWord;
  std::set<char> letters;
  for (const auto& [u, v] : dominos) {
    letters.insert(u.begin(), u.end());
    letters.insert(v.begin(), v.end());
  }
  for (char c : letters) m.gamma.push_back(std::string(1, c));
  Automaton a(m);
  for (size_t i = 0; i < dominos.size(); ++i) a.add_symbol("i" + std::to_string(i + 1));
  const int top = a.add_state("top");
  const int bottom = a.add_state("bottom");
  for (int q : {top, bottom}) {
    a.set_initial(q);
    a.set_final(q);
  }
  for (size_t i = 0; i < dominos.size(); ++i) {
    a.add_transition(top, static_cast<int>(i), Value::of_word(parse_output_word(m.gamma, dominos[i].first)), top);
    a.add_transition(bottom, static_cast<int>(i), Value::of_word(parse_output_word(m.gamma, dominos[i].second)),
                     bottom);
  }
  return a;
}

const char* const kPcpFormula = "exists p : q -[u|v]-> q, r : s -[u|v]-> s . q != s\n";

const char* const kAllReachableFormula = "forall q . exists p : q0 -[u|v]-> q . init(q0)\n";

std::vector<bool> reachable(const Automaton& a) {
  std::vector<bool> seen(a.num_states(), false);
  std::deque<int> todo;
  for (int q = 0; q < a.num_states(); ++q)
    if (a.is_initial(q)) seen[q] = true, todo.push_back(q);
  while (!todo.empty()) {
    const int q = todo.front();
    todo.pop_front();
    for (int t : a.out(q)) {
      const int d = a.transition(t).dst;
      if (!seen[d]) seen[d] = true, todo.push_back(d);
    }
  }
  return seen;
}

std::string automaton_text(const Automaton& a) {
  std::ostringstream s;
  s << "automaton " << (a.kind() == MonoidKind::Trivial ? "nfa" : a.kind() == MonoidKind::FreeWord ? "trans" : "sum")
    << "\n";
  if (a.kind() == MonoidKind::FreeWord) {
    s << "out-alphabet";
    for (const auto& g : a.monoid().gamma) s << " " << g;
    s << "\n";
  }
  s << "alphabet";
  for (const auto& x : a.symbols()) s << " " << x;
  s << "\nstates";
  for (const auto& q : a.state_names()) s << " " << q;
  s << "\ninitial";
  for (int q = 0; q < a.num_states(); ++q)
    if (a.is_initial(q)) s << " " << a.state_name(q);
  s << "\nfinal";
  for (int q = 0; q < a.num_states(); ++q)
    if (a.is_final(q)) s << " " << a.state_name(q);
  s << "\n";
  for (int q = 0; q < a.num_states(); ++q) {
    std::string cs;
    for (int c = 0; c < a.num_colours(); ++c)
      if (a.has_colour(q, c)) cs += " " + a.colour_names()[c];
    if (!cs.empty()) s << "colors " << a.state_name(q) << cs << "\n";
  }
  for (const auto& t : a.transitions()) {
    s << "trans " << a.state_name(t.src) << " " << a.label_text(t.label);
    if (a.kind() != MonoidKind::Trivial) s << " " << a.value_text(a.value(t.value));
    s << " " << a.state_name(t.dst) << "\n";
  }
  return s.str();
}

std::vector<Path> sample_tuple(Rng& rng, const std::vector<Path>& pool, int arity) {
  std::vector<Path> t;
  for (int i = 0; i < arity; ++i) t.push_back(pool[uniform(rng, 0, static_cast<int>(pool.size()) - 1)]);
  return t;
}

}  // namespace patlog::testing
