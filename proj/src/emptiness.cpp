#include "patlog/emptiness.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <tuple>

namespace patlog {

const char* method_name(Method m) {
  switch (m) {
    case Method::None: return "none";
    case Method::BfsExhausted: return "bfs_exhausted";
    case Method::BellmanFord: return "bellman_ford";
    case Method::BoundComplete: return "bound_complete";
  }
  return "?";
}

const char* verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Sat: return "SAT";
    case Verdict::Unsat: return "UNSAT";
    case Verdict::Unknown: return "UNKNOWN";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Explicit test graphs

void ExplicitGraph::add_edge(int from, int to, std::vector<int64_t> inc) {
  inc.resize(dims_, 0);
  out_.at(from).push_back({from, to, std::move(inc)});
}

void ExplicitGraph::initial(Emit& out) const {
  std::vector<int64_t> zero(dims_, 0);
  for (int32_t q : initial_) out.push(&q, zero.data());
}

void ExplicitGraph::successors(const int32_t* node, Emit& out) const {
  for (const Edge& e : out_[node[0]]) {
    int32_t to = e.to;
    out.push(&to, e.inc.data());
  }
}

// ---------------------------------------------------------------------------
// Product graph

ProductGraph::ProductGraph(const TupleAcceptor& m, size_t branch, bool lockstep)
    : aut_(*m.aut), conj_(m.branches.at(branch)), arity_(m.arity) {
  group_of_ = sync_groups(conj_, arity_, lockstep);
  groups_ = 0;
  for (int g : group_of_) groups_ = std::max(groups_, g + 1);
  int off = arity_ + 1;
  for (const auto& at : conj_.atoms) {
    atom_offset_.push_back(off);
    off += at->width();
  }
  width_ = off;
  n_ = aut_.num_states();
  labels_of_.resize(n_);
  const int32_t label_space = static_cast<int32_t>(aut_.transitions().size());
  for (int q = 0; q < n_; ++q) {
    std::map<int, std::map<int, std::vector<int>>> by_label;
    for (int t : aut_.out(q)) {
      const Transition& tr = aut_.transition(t);
      by_label[tr.label][tr.value].push_back(tr.dst);
    }
    for (auto& [label, vals] : by_label) {
      const int32_t li = static_cast<int32_t>(after_label_.size());
      labels_of_[q].push_back(n_ + li);
      after_label_.push_back({q, label});
      values_of_.emplace_back();
      for (auto& [val, dsts] : vals) {
        const int32_t vi = static_cast<int32_t>(after_value_.size());
        values_of_[li].push_back(n_ + label_space + vi);
        after_value_.push_back({q, label, val});
        std::sort(dsts.begin(), dsts.end());
        dsts.erase(std::unique(dsts.begin(), dsts.end()), dsts.end());
        dsts_.push_back(dsts);
      }
    }
  }
}

void ProductGraph::component_moves(int32_t code, std::vector<Move>& out) const {
  out.clear();
  const int32_t label_space = static_cast<int32_t>(aut_.transitions().size());
  if (code == kIdle) {
    out.push_back({Letter::idle(), kIdle});
  } else if (code == kStart) {
    for (int q = 0; q < n_; ++q) out.push_back({Letter::state(q), q});
  } else if (code == kDone) {
    out.push_back({Letter::bot(), kDone});
  } else if (code < n_) {
    for (int32_t c : labels_of_[code]) out.push_back({Letter::label(after_label_[c - n_].second), c});
    out.push_back({Letter::bot(), kDone});
  } else if (code < n_ + label_space) {
    for (int32_t c : values_of_[code - n_])
      out.push_back({Letter::val(std::get<2>(after_value_[c - n_ - label_space])), c});
  } else {
    for (int d : dsts_[code - n_ - label_space]) out.push_back({Letter::state(d), d});
  }
}

void ProductGraph::initial(Emit& out) const {
  std::vector<int32_t> key(width_, 0);
  for (int i = 0; i < arity_; ++i) key[i] = group_of_[i] == 0 ? kStart : kIdle;
  key[arity_] = 0;
  std::vector<std::pair<std::vector<int32_t>, std::vector<int64_t>>> cur{{key, std::vector<int64_t>(dims(), 0)}};
  int doff = 0;
  for (size_t k = 0; k < conj_.atoms.size(); ++k) {
    const auto& at = conj_.atoms[k];
    Emit e(at->width(), at->dims());
    at->initial(e);
    std::vector<std::pair<std::vector<int32_t>, std::vector<int64_t>>> next;
    for (const auto& [s, inc] : cur)
      for (size_t x = 0; x < e.size(); ++x) {
        auto ns = s;
        auto ni = inc;
        std::copy(e.state(x), e.state(x) + at->width(), ns.begin() + atom_offset_[k]);
        for (int d = 0; d < at->dims(); ++d) ni[doff + d] = e.inc(x)[d];
        next.push_back({std::move(ns), std::move(ni)});
      }
    cur.swap(next);
    doff += at->dims();
  }
  for (const auto& [s, inc] : cur) out.push(s.data(), inc.data());
}

bool ProductGraph::accepting(const int32_t* node) const {
  if (node[arity_] != groups_) return false;
  for (size_t k = 0; k < conj_.atoms.size(); ++k)
    if (!conj_.atoms[k]->accepting(node + atom_offset_[k])) return false;
  return true;
}

void ProductGraph::expand(const int32_t* node, Emit& out, std::vector<std::vector<Letter>>* moves) const {
  const int g = node[arity_];
  if (g >= groups_) return;
  const int dims = conj_.dims;
  std::vector<int64_t> zero(dims, 0);

  // Group switch: every unfinished component of the group sits at a state.
  bool can_close = true;
  for (int i = 0; i < arity_ && can_close; ++i) {
    if (group_of_[i] != g || node[i] == kDone) continue;
    if (node[i] < 0 || node[i] >= n_) can_close = false;
  }
  if (can_close) {
    std::vector<int32_t> key(node, node + width_);
    for (int i = 0; i < arity_; ++i) {
      if (group_of_[i] == g) key[i] = kDone;
      if (group_of_[i] == g + 1) key[i] = kStart;
    }
    key[arity_] = g + 1;
    out.push(key.data(), zero.data());
    if (moves) moves->emplace_back();
  }

  // Letter moves of the active group.
  std::vector<std::vector<Move>> opts(arity_);
  for (int i = 0; i < arity_; ++i) {
    if (group_of_[i] == g) {
      component_moves(node[i], opts[i]);
    } else {
      opts[i] = {{group_of_[i] < g ? Letter::bot() : Letter::idle(), node[i]}};
    }
    if (opts[i].empty()) return;
  }
  std::vector<size_t> pick(arity_, 0);
  std::vector<Letter> letters(arity_);
  std::vector<int32_t> key(width_);
  std::vector<Emit> emits;
  emits.reserve(conj_.atoms.size());
  for (const auto& at : conj_.atoms) emits.emplace_back(at->width(), at->dims());
  std::vector<size_t> apick(conj_.atoms.size());
  std::vector<int64_t> inc(dims);
  while (true) {
    bool all_bot = true;
    for (int i = 0; i < arity_; ++i) {
      letters[i] = opts[i][pick[i]].letter;
      key[i] = opts[i][pick[i]].code;
      if (group_of_[i] == g && letters[i].kind != Letter::Bot) all_bot = false;
    }
    if (!all_bot) {
      key[arity_] = g;
      bool dead = false;
      for (size_t k = 0; k < conj_.atoms.size() && !dead; ++k) {
        emits[k].clear();
        conj_.atoms[k]->step(node + atom_offset_[k], letters.data(), emits[k]);
        dead = emits[k].size() == 0;
      }
      if (!dead) {
        std::fill(apick.begin(), apick.end(), 0);
        while (true) {
          int doff = 0;
          for (size_t k = 0; k < conj_.atoms.size(); ++k) {
            const auto& at = conj_.atoms[k];
            std::copy(emits[k].state(apick[k]), emits[k].state(apick[k]) + at->width(),
                      key.begin() + atom_offset_[k]);
            for (int d = 0; d < at->dims(); ++d) inc[doff + d] = emits[k].inc(apick[k])[d];
            doff += at->dims();
          }
          out.push(key.data(), inc.data());
          if (moves) moves->push_back(letters);
          size_t k = conj_.atoms.size();
          while (k > 0 && ++apick[k - 1] == emits[k - 1].size()) apick[--k] = 0;
          if (k == 0) break;
        }
      }
    }
    int i = arity_;
    while (i > 0 && ++pick[i - 1] == opts[i - 1].size()) pick[--i] = 0;
    if (i == 0) break;
  }
}

std::vector<Path> ProductGraph::decode(const std::vector<std::vector<int32_t>>& nodes,
                                       const std::vector<int>& choices) const {
  std::vector<std::vector<Letter>> seq(arity_);
  Emit e(width_, conj_.dims);
  std::vector<std::vector<Letter>> moves;
  for (size_t s = 0; s < choices.size(); ++s) {
    e.clear();
    moves.clear();
    expand(nodes[s].data(), e, &moves);
    const auto& mv = moves.at(choices[s]);
    if (!std::equal(nodes[s + 1].begin(), nodes[s + 1].end(), e.state(choices[s])))
      throw SoundnessError("witness trail does not follow the product graph");
    for (size_t i = 0; i < mv.size(); ++i) seq[i].push_back(mv[i]);
  }
  std::vector<Path> paths;
  for (int i = 0; i < arity_; ++i) paths.push_back(decode_component(aut_, seq[i]));
  return paths;
}

// ---------------------------------------------------------------------------
// Search internals

namespace {

class NodeTable {
 public:
  explicit NodeTable(int width) : width_(width), slots_(1024, -1) {}

  std::pair<int, bool> insert(const int32_t* key) {
    if ((count_ + 1) * 2 > slots_.size()) grow();
    const size_t mask = slots_.size() - 1;
    size_t h = hash(key) & mask;
    while (slots_[h] >= 0) {
      if (std::equal(key, key + width_, keys_.data() + static_cast<size_t>(slots_[h]) * width_))
        return {slots_[h], false};
      h = (h + 1) & mask;
    }
    const int id = static_cast<int>(count_++);
    slots_[h] = id;
    keys_.insert(keys_.end(), key, key + width_);
    return {id, true};
  }
  const int32_t* key(int id) const { return keys_.data() + static_cast<size_t>(id) * width_; }
  std::vector<int32_t> copy(int id) const { return std::vector<int32_t>(key(id), key(id) + width_); }
  size_t size() const { return count_; }
  int width() const { return width_; }

 private:
  uint64_t hash(const int32_t* k) const {
    uint64_t h = 1469598103934665603ull;
    for (int i = 0; i < width_; ++i) {
      h ^= static_cast<uint32_t>(k[i]);
      h *= 1099511628211ull;
    }
    return h ^ (h >> 31);
  }
  void grow() {
    std::vector<int32_t> slots(slots_.size() * 2, -1);
    const size_t mask = slots.size() - 1;
    for (size_t id = 0; id < count_; ++id) {
      size_t h = hash(key(static_cast<int>(id))) & mask;
      while (slots[h] >= 0) h = (h + 1) & mask;
      slots[h] = static_cast<int32_t>(id);
    }
    slots_.swap(slots);
  }

  int width_;
  std::vector<int32_t> keys_;
  std::vector<int32_t> slots_;
  size_t count_ = 0;
};

[[noreturn]] void memo_exceeded(size_t cap, const char* what) {
  throw ResourceError(std::string("memo cap of ") + std::to_string(cap) + " configurations exceeded (" + what + ")");
}

// Node keys plus the successor index taken at each step.
struct Trail {
  std::vector<std::vector<int32_t>> nodes;
  std::vector<int> choices;
};

struct Outcome {
  Verdict verdict;
  Trail trail;
};

Outcome plain_bfs(const ControlGraph& g, const SearchConfig& cfg) {
  const int w = g.width();
  NodeTable t(w);
  std::vector<int> parent, choice;
  Emit e(w, g.dims());
  g.initial(e);
  int found = -1;
  for (size_t k = 0; k < e.size(); ++k) {
    auto [id, added] = t.insert(e.state(k));
    if (!added) continue;
    parent.push_back(-1);
    choice.push_back(-1);
    if (found < 0 && g.accepting(e.state(k))) found = id;
  }
  for (size_t cur = 0; found < 0 && cur < t.size(); ++cur) {
    auto key = t.copy(static_cast<int>(cur));
    e.clear();
    g.successors(key.data(), e);
    for (size_t k = 0; k < e.size(); ++k) {
      auto [id, added] = t.insert(e.state(k));
      if (!added) continue;
      parent.push_back(static_cast<int>(cur));
      choice.push_back(static_cast<int>(k));
      if (t.size() > cfg.memo_cap) memo_exceeded(cfg.memo_cap, "control-state search");
      if (g.accepting(e.state(k))) {
        found = id;
        break;
      }
    }
  }
  Outcome o;
  o.verdict.configurations = o.verdict.control_states = t.size();
  if (found < 0) {
    o.verdict.kind = Verdict::Unsat;
    o.verdict.method = Method::BfsExhausted;
    return o;
  }
  o.verdict.kind = Verdict::Sat;
  std::vector<int> ids;
  for (int x = found; x >= 0; x = parent[x]) ids.push_back(x);
  std::reverse(ids.begin(), ids.end());
  for (size_t s = 0; s < ids.size(); ++s) {
    o.trail.nodes.push_back(t.copy(ids[s]));
    if (s > 0) o.trail.choices.push_back(choice[ids[s]]);
  }
  return o;
}

// The control graph materialised, with increments projected onto the
// constraint forms (one weight per constraint).
struct Explicit {
  struct Edge {
    int to;
    int w;       // index into weights
    int choice;  // successor index in the graph's enumeration
  };
  NodeTable nodes;
  int K = 0;
  std::vector<LinearConstraint> zeta;
  std::vector<std::vector<Edge>> out;  // index size() is the root
  std::vector<std::vector<int64_t>> weights;
  std::vector<char> accepting;
  int root = 0;
  int64_t ell = 0;

  explicit Explicit(int width) : nodes(width) {}
  int V() const { return root + 1; }
  int64_t weight(const Edge& e, int k) const { return weights[e.w][k]; }
};

Explicit materialise(const ControlGraph& g, size_t cap) {
  Explicit x(g.width());
  x.zeta = g.zeta();
  x.K = static_cast<int>(x.zeta.size());
  std::map<std::vector<int64_t>, int> wid;
  std::vector<int64_t> proj(x.K);
  auto project = [&](const int64_t* inc) {
    for (int k = 0; k < x.K; ++k) {
      int64_t s = 0;
      for (int i = 0; i < g.dims(); ++i)
        if (x.zeta[k].coef[i]) s = checked_add(s, checked_mul(x.zeta[k].coef[i], inc[i]));
      proj[k] = s;
    }
    auto it = wid.find(proj);
    if (it != wid.end()) return it->second;
    const int id = static_cast<int>(x.weights.size());
    wid.emplace(proj, id);
    x.weights.push_back(proj);
    for (int64_t v : proj) x.ell = std::max(x.ell, v < 0 ? -v : v);
    return id;
  };
  std::vector<Explicit::Edge> root_edges;
  Emit e(g.width(), g.dims());
  g.initial(e);
  for (size_t k = 0; k < e.size(); ++k) {
    auto [id, added] = x.nodes.insert(e.state(k));
    (void)added;
    root_edges.push_back({id, project(e.inc(k)), static_cast<int>(k)});
  }
  for (size_t cur = 0; cur < x.nodes.size(); ++cur) {
    auto key = x.nodes.copy(static_cast<int>(cur));
    x.accepting.push_back(g.accepting(key.data()));
    e.clear();
    g.successors(key.data(), e);
    std::vector<Explicit::Edge> edges;
    for (size_t k = 0; k < e.size(); ++k) {
      auto [id, added] = x.nodes.insert(e.state(k));
      (void)added;
      if (x.nodes.size() > cap) memo_exceeded(cap, "control graph");
      edges.push_back({id, project(e.inc(k)), static_cast<int>(k)});
    }
    // Parallel edges with the same weight are one edge for the analysis.
    std::stable_sort(edges.begin(), edges.end(),
                     [](const auto& a, const auto& b) { return std::tie(a.to, a.w) < std::tie(b.to, b.w); });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [](const auto& a, const auto& b) { return a.to == b.to && a.w == b.w; }),
                edges.end());
    x.out.push_back(std::move(edges));
  }
  x.root = static_cast<int>(x.nodes.size());
  x.out.push_back(std::move(root_edges));
  x.accepting.push_back(false);
  return x;
}

// Nodes reachable from the root and co-reachable to an accepting node.
std::vector<char> useful_nodes(const Explicit& x) {
  const int V = x.V();
  std::vector<std::vector<int>> rev(V);
  for (int u = 0; u < V; ++u)
    for (const auto& e : x.out[u]) rev[e.to].push_back(u);
  std::vector<char> co(V, 0);
  std::vector<int> stack;
  for (int v = 0; v < V; ++v)
    if (x.accepting[v]) co[v] = 1, stack.push_back(v);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : rev[v])
      if (!co[u]) co[u] = 1, stack.push_back(u);
  }
  return co;  // every materialised node is reachable
}

// Strongly connected components over alive nodes (Tarjan, iterative).
struct Sccs {
  std::vector<int> comp;  // -1 for dead nodes
  std::vector<std::vector<int>> members;
  std::vector<char> cyclic;  // has an internal edge
};

Sccs strongly_connected(const Explicit& x, const std::vector<char>& alive) {
  const int V = x.V();
  Sccs s;
  s.comp.assign(V, -1);
  std::vector<int> index(V, -1), low(V, 0), stack;
  std::vector<char> on(V, 0);
  int counter = 0;
  for (int r = 0; r < V; ++r) {
    if (!alive[r] || index[r] >= 0) continue;
    std::vector<std::pair<int, size_t>> call{{r, 0}};
    index[r] = low[r] = counter++;
    stack.push_back(r);
    on[r] = 1;
    while (!call.empty()) {
      auto& [v, i] = call.back();
      if (i < x.out[v].size()) {
        const int w = x.out[v][i++].to;
        if (!alive[w]) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        const int c = static_cast<int>(s.members.size());
        s.members.emplace_back();
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on[w] = 0;
          s.comp[w] = c;
          s.members[c].push_back(w);
          if (w == v) break;
        }
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  s.cyclic.assign(s.members.size(), 0);
  for (int u = 0; u < V; ++u)
    if (s.comp[u] >= 0)
      for (const auto& e : x.out[u])
        if (s.comp[e.to] == s.comp[u]) s.cyclic[s.comp[u]] = 1;
  return s;
}

// Cycle structure of each component for one constraint's weight.
struct CycleInfo {
  std::vector<int64_t> gcd;  // of cycle weights; 0 when all cycles weigh 0
  std::vector<char> neg, pos;
};

bool negative_cycle(const Explicit& x, const Sccs& s, int c, int k, int sign) {
  const auto& mem = s.members[c];
  const int n = static_cast<int>(mem.size());
  std::map<int, int> local;
  for (int i = 0; i < n; ++i) local[mem[i]] = i;
  std::vector<int64_t> dist(n, 0);
  std::vector<int> parent(n, -1), relax(n, 0);
  std::vector<char> queued(n, 1);
  std::deque<int> q;
  for (int i = 0; i < n; ++i) q.push_back(i);
  long long since_check = 0;
  auto parent_cycle = [&]() {
    std::vector<int> mark(n, -1);
    for (int i = 0; i < n; ++i) {
      int v = i;
      while (v >= 0 && mark[v] < 0) {
        mark[v] = i;
        v = parent[v];
      }
      if (v >= 0 && mark[v] == i) return true;
    }
    return false;
  };
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    queued[u] = 0;
    for (const auto& e : x.out[mem[u]]) {
      if (s.comp[e.to] != c) continue;
      const int v = local[e.to];
      const int64_t nd = checked_add(dist[u], sign * x.weight(e, k));
      if (nd >= dist[v]) continue;
      dist[v] = nd;
      parent[v] = u;
      if (++relax[v] > n) return true;
      if (++since_check >= n) {
        since_check = 0;
        if (parent_cycle()) return true;
      }
      if (!queued[v]) queued[v] = 1, q.push_back(v);
    }
  }
  return false;
}

CycleInfo cycle_info(const Explicit& x, const Sccs& s, int k) {
  const size_t C = s.members.size();
  CycleInfo ci;
  ci.gcd.assign(C, 0);
  ci.neg.assign(C, 0);
  ci.pos.assign(C, 0);
  std::vector<int64_t> pot(x.V(), 0);
  std::vector<char> seen(x.V(), 0);
  for (size_t c = 0; c < C; ++c) {
    if (!s.cyclic[c]) continue;
    const int r = s.members[c][0];
    std::vector<int> queue{r};
    seen[r] = 1;
    for (size_t i = 0; i < queue.size(); ++i) {
      const int u = queue[i];
      for (const auto& e : x.out[u])
        if (s.comp[e.to] == static_cast<int>(c) && !seen[e.to]) {
          seen[e.to] = 1;
          pot[e.to] = checked_add(pot[u], x.weight(e, k));
          queue.push_back(e.to);
        }
    }
    int64_t g = 0;
    bool any_pos = false, any_neg = false;
    for (int u : s.members[c])
      for (const auto& e : x.out[u]) {
        if (s.comp[e.to] != static_cast<int>(c)) continue;
        const int64_t d = checked_add(checked_add(pot[u], x.weight(e, k)), -pot[e.to]);
        if (d > 0) any_pos = true;
        if (d < 0) any_neg = true;
        g = std::gcd(g, d < 0 ? -d : d);
      }
    ci.gcd[c] = g;
    if (g == 0) continue;
    if (!any_neg) {
      ci.pos[c] = 1;
    } else if (!any_pos) {
      ci.neg[c] = 1;
    } else {
      ci.neg[c] = negative_cycle(x, s, static_cast<int>(c), k, 1);
      ci.pos[c] = negative_cycle(x, s, static_cast<int>(c), k, -1);
    }
  }
  return ci;
}

// Shortest distances from `from` (forward) or to the accepting nodes
// (backward) over `alive`, with weight sign·w_k. No negative cycle may be
// present in `alive`.
std::vector<int64_t> shortest(const Explicit& x, const std::vector<char>& alive, int k, int sign, bool backward) {
  const int V = x.V();
  std::vector<std::vector<std::pair<int, int64_t>>> adj(V);
  for (int u = 0; u < V; ++u) {
    if (!alive[u]) continue;
    for (const auto& e : x.out[u]) {
      if (!alive[e.to]) continue;
      const int64_t w = sign * x.weight(e, k);
      if (backward) {
        adj[e.to].push_back({u, w});
      } else {
        adj[u].push_back({e.to, w});
      }
    }
  }
  std::vector<int64_t> dist(V, kPlusInf);
  std::vector<int> relax(V, 0);
  std::vector<char> queued(V, 0);
  std::deque<int> q;
  if (backward) {
    for (int v = 0; v < V; ++v)
      if (alive[v] && x.accepting[v]) dist[v] = 0, q.push_back(v), queued[v] = 1;
  } else if (alive[x.root]) {
    dist[x.root] = 0;
    q.push_back(x.root);
    queued[x.root] = 1;
  }
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    queued[u] = 0;
    for (auto [v, w] : adj[u]) {
      const int64_t nd = checked_add(dist[u], w);
      if (nd >= dist[v]) continue;
      dist[v] = nd;
      if (++relax[v] > V + 1) throw SoundnessError("unexpected negative cycle in shortest-path region");
      if (!queued[v]) queued[v] = 1, q.push_back(v);
    }
  }
  return dist;
}

std::vector<char> forward_closure(const Explicit& x, const std::vector<char>& alive, std::vector<char> seed) {
  std::vector<int> stack;
  for (int v = 0; v < x.V(); ++v)
    if (seed[v]) stack.push_back(v);
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (const auto& e : x.out[u])
      if (alive[e.to] && !seed[e.to]) seed[e.to] = 1, stack.push_back(e.to);
  }
  return seed;
}

struct NodeExtremum {
  int node;
  int64_t min, max;
};

std::vector<NodeExtremum> extrema(const Explicit& x, const std::vector<char>& alive, const Sccs& s,
                                  const CycleInfo& ci, int k) {
  const int V = x.V();
  std::vector<NodeExtremum> out;
  std::vector<char> neg_seed(V, 0), pos_seed(V, 0);
  for (int v = 0; v < V; ++v) {
    if (!alive[v]) continue;
    if (ci.neg[s.comp[v]]) neg_seed[v] = 1;
    if (ci.pos[s.comp[v]]) pos_seed[v] = 1;
  }
  auto minus_inf = forward_closure(x, alive, neg_seed);
  auto plus_inf = forward_closure(x, alive, pos_seed);
  std::vector<char> lo_alive(V), hi_alive(V);
  for (int v = 0; v < V; ++v) {
    lo_alive[v] = alive[v] && !minus_inf[v];
    hi_alive[v] = alive[v] && !plus_inf[v];
  }
  auto lo = shortest(x, lo_alive, k, 1, false);
  auto hi = shortest(x, hi_alive, k, -1, false);
  for (int v = 0; v < V; ++v) {
    if (!alive[v] || !x.accepting[v]) continue;
    NodeExtremum e{v, minus_inf[v] ? kMinusInf : lo[v], plus_inf[v] ? kPlusInf : (hi[v] == kPlusInf ? kMinusInf : -hi[v])};
    out.push_back(e);
  }
  return out;
}

bool extremum_meets(const LinearConstraint& z, const NodeExtremum& e) {
  switch (z.rel) {
    case Rel::Le: return e.min == kMinusInf || e.min <= z.rhs;
    case Rel::Lt: return e.min == kMinusInf || e.min < z.rhs;
    case Rel::Ne:
      return e.min == kMinusInf || e.max == kPlusInf || e.min < z.rhs || e.max > z.rhs || e.min != e.max;
    case Rel::Eq: break;
  }
  throw Error("equality constraint has no interval test");
}

// Per node and constraint, the range of increments still collectable on the
// way to an accepting node (±inf past a reachable cycle of that sign).
struct FutureRange {
  std::vector<std::vector<int64_t>> lo, hi;  // [k][node]

  bool viable(const LinearConstraint& z, int k, int v, int64_t c) const {
    const int64_t a = lo[k][v], b = hi[k][v];
    if (a == kPlusInf) return false;
    const int64_t min = a == kMinusInf ? kMinusInf : checked_add(c, a);
    const int64_t max = b == kPlusInf ? kPlusInf : checked_add(c, b);
    switch (z.rel) {
      case Rel::Le: return min == kMinusInf || min <= z.rhs;
      case Rel::Lt: return min == kMinusInf || min < z.rhs;
      case Rel::Eq: return (min == kMinusInf || min <= z.rhs) && (max == kPlusInf || max >= z.rhs);
      case Rel::Ne: return min != max || min != z.rhs;
    }
    return true;
  }
};

std::vector<char> backward_closure(const Explicit& x, const std::vector<char>& alive, std::vector<char> seed) {
  const int V = x.V();
  std::vector<std::vector<int>> rev(V);
  for (int u = 0; u < V; ++u)
    if (alive[u])
      for (const auto& e : x.out[u])
        if (alive[e.to]) rev[e.to].push_back(u);
  std::vector<int> stack;
  for (int v = 0; v < V; ++v)
    if (seed[v]) stack.push_back(v);
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int p : rev[u])
      if (!seed[p]) seed[p] = 1, stack.push_back(p);
  }
  return seed;
}

FutureRange future_ranges(const Explicit& x, const std::vector<char>& alive) {
  const int V = x.V();
  Sccs s = strongly_connected(x, alive);
  FutureRange f;
  for (int k = 0; k < x.K; ++k) {
    CycleInfo ci = cycle_info(x, s, k);
    std::vector<char> neg_seed(V, 0), pos_seed(V, 0);
    for (int v = 0; v < V; ++v) {
      if (!alive[v]) continue;
      if (ci.neg[s.comp[v]]) neg_seed[v] = 1;
      if (ci.pos[s.comp[v]]) pos_seed[v] = 1;
    }
    auto minus_inf = backward_closure(x, alive, neg_seed);
    auto plus_inf = backward_closure(x, alive, pos_seed);
    std::vector<char> lo_alive(V), hi_alive(V);
    for (int v = 0; v < V; ++v) {
      lo_alive[v] = alive[v] && !minus_inf[v];
      hi_alive[v] = alive[v] && !plus_inf[v];
    }
    auto lo = shortest(x, lo_alive, k, 1, true);
    auto hi = shortest(x, hi_alive, k, -1, true);
    std::vector<int64_t> l(V, kPlusInf), h(V, kMinusInf);
    for (int v = 0; v < V; ++v) {
      if (!alive[v]) continue;
      l[v] = minus_inf[v] ? kMinusInf : lo[v];
      h[v] = plus_inf[v] ? kPlusInf : (hi[v] == kPlusInf ? kMinusInf : -hi[v]);
    }
    f.lo.push_back(std::move(l));
    f.hi.push_back(std::move(h));
  }
  return f;
}

// Key helpers for configurations with 64-bit payloads.
void put64(std::vector<int32_t>& key, size_t at, int64_t v) {
  const uint64_t u = static_cast<uint64_t>(v);
  key[at] = static_cast<int32_t>(static_cast<uint32_t>(u & 0xffffffffu));
  key[at + 1] = static_cast<int32_t>(static_cast<uint32_t>(u >> 32));
}

int64_t floor_mod(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Exact decision for one equality c = c0 (1-D). Routes avoiding negative
// cycles are searched in bounded windows, likewise for positive cycles; routes
// meeting both signs reach a whole residue class.
bool equality_sat(const Explicit& x, const std::vector<char>& alive, const Sccs& s, const CycleInfo& ci, int k,
                  size_t cap) {
  const int V = x.V();
  const int64_t c0 = x.zeta[k].rhs;
  for (int sign : {1, -1}) {
    // sign = 1: drop components with negative cycles; sign = -1: positive.
    std::vector<char> sub(V, 0);
    for (int v = 0; v < V; ++v)
      sub[v] = alive[v] && !(sign == 1 ? ci.neg[s.comp[v]] : ci.pos[s.comp[v]]);
    auto ds = shortest(x, sub, k, sign, false);
    auto dt = shortest(x, sub, k, sign, true);
    const int64_t target = sign * c0;
    // Walk values h (in sign-scaled units) satisfy ds(v) <= h <= target - dt(v).
    NodeTable t(3);
    std::vector<int32_t> key(3);
    std::vector<std::pair<int, int64_t>> queue;
    auto push = [&](int v, int64_t h) {
      if (!sub[v] || ds[v] == kPlusInf || dt[v] == kPlusInf) return false;
      if (h < ds[v] || h > target - dt[v]) return false;
      key[0] = v;
      put64(key, 1, h);
      if (!t.insert(key.data()).second) return false;
      if (t.size() > cap) memo_exceeded(cap, "equality window search");
      queue.push_back({v, h});
      return x.accepting[v] && h == target;
    };
    if (push(x.root, 0)) return true;
    for (size_t i = 0; i < queue.size(); ++i) {
      auto [u, h] = queue[i];
      for (const auto& e : x.out[u])
        if (push(e.to, checked_add(h, sign * x.weight(e, k)))) return true;
    }
  }
  // Mixed routes: (node, signs met, gcd so far, value or residue).
  NodeTable t(6);
  std::vector<int32_t> key(6);
  struct St {
    int v;
    int flags;
    int64_t g, r;
  };
  std::vector<St> queue;
  auto push = [&](int v, int flags, int64_t g, int64_t r, int from_comp) {
    if (!alive[v]) return false;
    const int c = s.comp[v];
    if (c != from_comp) {
      flags |= (ci.neg[c] ? 1 : 0) | (ci.pos[c] ? 2 : 0);
      g = std::gcd(g, ci.gcd[c]);
    }
    if (g > 0) r = floor_mod(r, g);
    key[0] = v;
    key[1] = flags;
    put64(key, 2, g);
    put64(key, 4, r);
    if (!t.insert(key.data()).second) return false;
    if (t.size() > cap) memo_exceeded(cap, "residue search");
    queue.push_back({v, flags, g, r});
    return x.accepting[v] && flags == 3 && floor_mod(c0 - r, g) == 0;
  };
  if (push(x.root, 0, 0, 0, -1)) return true;
  for (size_t i = 0; i < queue.size(); ++i) {
    const St st = queue[i];
    for (const auto& e : x.out[st.v]) {
      const int64_t r = checked_add(st.r, x.weight(e, k));
      if (push(e.to, st.flags, st.g, st.g > 0 ? floor_mod(r, st.g) : r, s.comp[st.v])) return true;
    }
  }
  return false;
}

bool single_sat(const Explicit& x, const std::vector<char>& alive, const Sccs& s, const CycleInfo& ci, int k,
                size_t cap) {
  if (x.zeta[k].rel == Rel::Eq) return equality_sat(x, alive, s, ci, k, cap);
  for (const auto& e : extrema(x, alive, s, ci, k))
    if (extremum_meets(x.zeta[k], e)) return true;
  return false;
}

// Conjunction of disequalities: a coordinate crossing a component with a
// nonzero cycle can be moved off any single value, the others stay exact.
bool disequalities_sat(const Explicit& x, const std::vector<char>& alive, const Sccs& s,
                       const std::vector<CycleInfo>& ci, size_t cap) {
  const int K = x.K;
  const int64_t kFree = kMinusInf;
  NodeTable t(1 + 2 * K);
  std::vector<int32_t> key(1 + 2 * K);
  std::vector<std::vector<int64_t>> vals;
  std::vector<int> at;
  auto push = [&](int v, std::vector<int64_t> val, int from_comp) {
    if (!alive[v]) return false;
    const int c = s.comp[v];
    if (c != from_comp)
      for (int k = 0; k < K; ++k)
        if (ci[k].gcd[c] != 0) val[k] = kFree;
    key[0] = v;
    for (int k = 0; k < K; ++k) put64(key, 1 + 2 * k, val[k]);
    if (!t.insert(key.data()).second) return false;
    if (t.size() > cap) memo_exceeded(cap, "disequality search");
    bool ok = x.accepting[v];
    for (int k = 0; k < K && ok; ++k) ok = val[k] == kFree || val[k] != x.zeta[k].rhs;
    vals.push_back(std::move(val));
    at.push_back(v);
    return ok;
  };
  if (push(x.root, std::vector<int64_t>(K, 0), -1)) return true;
  for (size_t i = 0; i < at.size(); ++i) {
    const int u = at[i];
    for (const auto& e : x.out[u]) {
      std::vector<int64_t> val = vals[i];
      for (int k = 0; k < K; ++k)
        if (val[k] != kFree) val[k] = checked_add(val[k], x.weight(e, k));
      if (push(e.to, std::move(val), s.comp[u])) return true;
    }
  }
  return false;
}

// Breadth-first search over (node, projected counters). `window` prunes
// configurations with a coordinate beyond it; `depth` limits the number of
// steps. A configuration whose constraint can no longer be met on any
// continuation is dropped too.
struct CounterSearch {
  enum Status { Found, Exhausted, DepthLimited } status = Exhausted;
  std::vector<int> nodes;  // explicit node ids, first is an initial node
  std::vector<int> choices;
  int initial_choice = -1;
  size_t configurations = 0;
};

CounterSearch counter_bfs(const Explicit& x, const std::vector<char>& alive, std::optional<int64_t> window,
                          std::optional<uint64_t> depth, size_t cap) {
  const int K = x.K;
  NodeTable t(1 + 2 * K);
  std::vector<int32_t> key(1 + 2 * K);
  std::vector<int> node, parent, choice;
  std::vector<int64_t> vals;  // K per configuration
  CounterSearch r;
  int found = -1;
  std::vector<int64_t> val(K);
  const FutureRange future = future_ranges(x, alive);
  auto push = [&](int v, int par, int ch) {
    if (!alive[v]) return;
    if (window)
      for (int k = 0; k < K; ++k)
        if (val[k] > *window || val[k] < -*window) return;
    for (int k = 0; k < K; ++k)
      if (!future.viable(x.zeta[k], k, v, val[k])) return;
    key[0] = v;
    for (int k = 0; k < K; ++k) put64(key, 1 + 2 * k, val[k]);
    if (!t.insert(key.data()).second) return;
    if (t.size() > cap) memo_exceeded(cap, window ? "witness search" : "bounded search");
    node.push_back(v);
    parent.push_back(par);
    choice.push_back(ch);
    vals.insert(vals.end(), val.begin(), val.end());
    if (found >= 0 || !x.accepting[v]) return;
    for (int k = 0; k < K; ++k)
      if (!x.zeta[k].holds_value(val[k])) return;
    found = static_cast<int>(node.size()) - 1;
  };
  for (const auto& e : x.out[x.root]) {
    for (int k = 0; k < K; ++k) val[k] = x.weight(e, k);
    push(e.to, -1, e.choice);
  }
  size_t layer_begin = 0, layer_end = node.size();
  uint64_t d = 0;
  while (found < 0 && layer_begin < layer_end) {
    if (depth && d >= *depth) {
      r.status = CounterSearch::DepthLimited;
      break;
    }
    for (size_t i = layer_begin; i < layer_end && found < 0; ++i) {
      const int u = node[i];
      for (const auto& e : x.out[u]) {
        for (int k = 0; k < K; ++k) val[k] = checked_add(vals[i * K + k], x.weight(e, k));
        push(e.to, static_cast<int>(i), e.choice);
        if (found >= 0) break;
      }
    }
    layer_begin = layer_end;
    layer_end = node.size();
    ++d;
  }
  r.configurations = t.size();
  if (found < 0) return r;
  r.status = CounterSearch::Found;
  std::vector<int> ids;
  for (int c = found; c >= 0; c = parent[c]) ids.push_back(c);
  std::reverse(ids.begin(), ids.end());
  r.initial_choice = choice[ids[0]];
  for (size_t s = 0; s < ids.size(); ++s) {
    r.nodes.push_back(node[ids[s]]);
    if (s > 0) r.choices.push_back(choice[ids[s]]);
  }
  return r;
}

Trail to_trail(const Explicit& x, const CounterSearch& c) {
  Trail t;
  for (int v : c.nodes) t.nodes.push_back(x.nodes.copy(v));
  t.choices = c.choices;
  return t;
}

Outcome witness_by_window(const Explicit& x, const std::vector<char>& alive, size_t cap, Outcome o) {
  int64_t w = 8;
  for (const auto& z : x.zeta) w = std::max(w, 2 * std::abs(z.rhs) + 2 * x.ell);
  while (true) {
    CounterSearch c = counter_bfs(x, alive, w, std::nullopt, cap);
    o.verdict.configurations += c.configurations;
    if (c.status == CounterSearch::Found) {
      o.trail = to_trail(x, c);
      return o;
    }
    if (w > (int64_t{1} << 40)) throw ResourceError("witness extraction did not converge");
    w *= 2;
  }
}

uint64_t saturating_bound(double sf, uint64_t S, int64_t ell, size_t alpha, int d) {
  const double cap = 4.0e18;
  double b = sf * static_cast<double>(S) * static_cast<double>(S) * static_cast<double>(ell + 1);
  const double e = static_cast<double>(d) + static_cast<double>(alpha);
  b *= e > 62 ? cap : std::pow(2.0, e);
  if (!(b < cap)) return static_cast<uint64_t>(cap);
  return static_cast<uint64_t>(std::ceil(b));
}

uint64_t bound_for(const Explicit& x, const std::vector<char>& alive, int dims, const SearchConfig& cfg) {
  if (cfg.bound_policy == BoundPolicy::Explicit || cfg.witness_bound) {
    if (!cfg.witness_bound) throw Error("explicit bound policy without a bound");
    return *cfg.witness_bound;
  }
  uint64_t S = 0;
  for (char a : alive) S += a != 0;
  return saturating_bound(cfg.safety_factor, S, x.ell, x.weights.size(), dims);
}

Outcome decide(const ControlGraph& g, const SearchConfig& cfg, Strategy strategy) {
  if (strategy == Strategy::Auto && (g.dims() == 0 || g.zeta().empty())) return plain_bfs(g, cfg);
  Explicit x = materialise(g, cfg.memo_cap);
  auto alive = useful_nodes(x);
  Outcome o;
  o.verdict.control_states = x.nodes.size();
  o.verdict.configurations = x.nodes.size();
  if (!alive[x.root]) {
    o.verdict.kind = Verdict::Unsat;
    o.verdict.method = Method::BfsExhausted;
    return o;
  }
  auto bounded = [&]() {
    if (cfg.bound_policy == BoundPolicy::UnboundedRefuse)
      throw Error("bounded search needed but the bound policy refuses unbounded witnesses");
    const uint64_t B = bound_for(x, alive, g.dims(), cfg);
    CounterSearch c = counter_bfs(x, alive, std::nullopt, B, cfg.memo_cap);
    o.verdict.configurations += c.configurations;
    o.verdict.bound_used = B;
    if (c.status == CounterSearch::Found) {
      o.verdict.kind = Verdict::Sat;
      o.trail = to_trail(x, c);
    } else if (c.status == CounterSearch::Exhausted) {
      o.verdict.kind = Verdict::Unsat;
      o.verdict.method = Method::BoundComplete;
    } else {
      o.verdict.kind = Verdict::Unknown;
    }
    return o;
  };
  auto exact = [&](bool sat) {
    if (!sat) {
      o.verdict.kind = Verdict::Unsat;
      o.verdict.method = Method::BellmanFord;
      return o;
    }
    o.verdict.kind = Verdict::Sat;
    return witness_by_window(x, alive, cfg.memo_cap, o);
  };
  if (strategy == Strategy::Bounded) return bounded();
  Sccs s = strongly_connected(x, alive);
  const int K = x.K;
  if (strategy == Strategy::Extrema) {
    if (K != 1 || x.zeta[0].rel == Rel::Eq) throw Error("extrema strategy needs one inequality or disequality");
    return exact(single_sat(x, alive, s, cycle_info(x, s, 0), 0, cfg.memo_cap));
  }
  if (K == 0) return exact(true);
  if (K == 1 && x.zeta[0].rel != Rel::Eq) return exact(single_sat(x, alive, s, cycle_info(x, s, 0), 0, cfg.memo_cap));
  if (cfg.bound_policy == BoundPolicy::Explicit) return bounded();
  std::vector<CycleInfo> ci;
  for (int k = 0; k < K; ++k) ci.push_back(cycle_info(x, s, k));
  for (int k = 0; k < K; ++k)
    if (!single_sat(x, alive, s, ci[k], k, cfg.memo_cap)) return exact(false);
  if (K == 1) return exact(true);
  bool all_ne = true;
  for (const auto& z : x.zeta) all_ne = all_ne && z.rel == Rel::Ne;
  if (all_ne) return exact(disequalities_sat(x, alive, s, ci, cfg.memo_cap));
  return bounded();
}

}  // namespace

// ---------------------------------------------------------------------------
// Public deciders

Verdict nfa_emptiness(const ControlGraph& g, const SearchConfig& cfg) {
  if (g.dims() != 0) throw Error("nfa_emptiness needs a graph without counters");
  return plain_bfs(g, cfg).verdict;
}

std::vector<Extremum> bellman_ford_extrema(const ControlGraph& g, const SearchConfig& cfg) {
  if (g.zeta().size() != 1) throw Error("extrema need exactly one constraint");
  Explicit x = materialise(g, cfg.memo_cap);
  auto alive = useful_nodes(x);
  Sccs s = strongly_connected(x, alive);
  std::vector<Extremum> out;
  for (const auto& e : extrema(x, alive, s, cycle_info(x, s, 0), 0)) out.push_back({e.node, e.min, e.max});
  return out;
}

Verdict parikh_emptiness(const ControlGraph& g, const SearchConfig& cfg, Strategy s) {
  return decide(g, cfg, s).verdict;
}

uint64_t default_bound(const ControlGraph& g, const SearchConfig& cfg) {
  Explicit x = materialise(g, cfg.memo_cap);
  auto alive = useful_nodes(x);
  uint64_t S = 0;
  for (char a : alive) S += a != 0;
  return saturating_bound(cfg.safety_factor, S, x.ell, x.weights.size(), g.dims());
}

void verify_acceptance(const TupleAcceptor& m, const std::vector<Path>& paths) {
  if (!acceptor_accepts(m, convolve(*m.aut, paths)))
    throw SoundnessError("witness rejected by its own acceptor");
}

namespace {

Verdict run_branches(const TupleAcceptor& m, const SearchConfig& cfg) {
  Verdict total;
  total.kind = Verdict::Unsat;
  total.method = Method::BfsExhausted;
  bool unknown = false;
  for (size_t b = 0; b < m.branches.size(); ++b) {
    ProductGraph g(m, b, cfg.lockstep);
    Outcome o = decide(g, cfg, Strategy::Auto);
    total.configurations += o.verdict.configurations;
    total.control_states += o.verdict.control_states;
    total.bound_used = std::max(total.bound_used, o.verdict.bound_used);
    if (o.verdict.sat()) {
      Verdict v = o.verdict;
      v.configurations = total.configurations;
      v.control_states = total.control_states;
      v.paths = g.decode(o.trail.nodes, o.trail.choices);
      verify_acceptance(m, v.paths);
      v.witness = convolve(*m.aut, v.paths);
      return v;
    }
    if (o.verdict.unknown()) {
      unknown = true;
    } else if (o.verdict.method == Method::BoundComplete ||
               (o.verdict.method == Method::BellmanFord && total.method == Method::BfsExhausted)) {
      total.method = o.verdict.method;
    }
  }
  if (unknown) {
    total.kind = Verdict::Unknown;
    total.method = Method::None;
  }
  return total;
}

}  // namespace

Verdict nfa_emptiness(const TupleAcceptor& m, const SearchConfig& cfg) {
  if (m.dims() != 0) throw Error("nfa_emptiness needs an acceptor without counters");
  return run_branches(m, cfg);
}

Verdict parikh_emptiness(const TupleAcceptor& m, const SearchConfig& cfg) { return run_branches(m, cfg); }

}  // namespace patlog
