#include "patlog/semantics.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace patlog {

namespace {

bool is_prefix(const std::vector<int>& x, const std::vector<int>& y) {
  return x.size() <= y.size() && std::equal(x.begin(), x.end(), y.begin());
}

std::vector<int> erase_eps(const std::vector<int>& labels) {
  std::vector<int> r;
  for (int l : labels)
    if (l != kEps) r.push_back(l);
  return r;
}

// Semantics of the output predicates on already evaluated term values.
bool output_relation(MonoidKind m, PKind k, const Value& x, const Value& y, const Nfa* lang) {
  switch (k) {
    case PKind::OutNotPref: return !is_prefix(x.word, y.word);
    case PKind::OutMember: return lang->accepts(x.word);
    case PKind::OutLenLe: return x.word.size() <= y.word.size();
    case PKind::OutLe: return x.num <= y.num;
    case PKind::OutLt: return x.num < y.num;
    case PKind::OutEq: return m == MonoidKind::IntSum ? x.num == y.num : x == y;
    case PKind::OutNe: return m == MonoidKind::IntSum ? x.num != y.num : x != y;
    default: break;
  }
  throw Error("not an output predicate");
}

Value pattern_term(const Automaton& a, const Term& t, const PatternValuation& v) {
  Value r;
  for (const auto& name : t.vars) r = combine(a.kind(), r, v.outputs.at(name));
  return r;
}

bool eval_patom(const Automaton& a, const PAtom& at, const PatternValuation& v) {
  switch (at.kind) {
    case PKind::InPref: return is_prefix(v.inputs.at(at.x), v.inputs.at(at.y));
    case PKind::InMember: return at.lang->accepts(erase_eps(v.inputs.at(at.x)));
    case PKind::InLenLe: return v.inputs.at(at.x).size() <= v.inputs.at(at.y).size();
    case PKind::Init: return a.is_initial(v.states.at(at.x));
    case PKind::Final: return a.is_final(v.states.at(at.x));
    case PKind::StateEq: return v.states.at(at.x) == v.states.at(at.y);
    case PKind::PathEq: return v.paths.at(at.x) == v.paths.at(at.y);
    case PKind::Colour: return a.has_colour(v.states.at(at.x), a.colour_index(at.colour));
    default: break;
  }
  return output_relation(a.kind(), at.kind, pattern_term(a, at.t1, v), pattern_term(a, at.t2, v), at.lang.get());
}

template <class A, class F>
bool eval_tree(const BoolTree<A>& t, F&& leaf) {
  using T = BoolTree<A>;
  switch (t.kind) {
    case T::True: return true;
    case T::False: return false;
    case T::Leaf: return leaf(t.atom);
    case T::Not: return !eval_tree(t.kids[0], leaf);
    case T::And:
      for (const auto& k : t.kids)
        if (!eval_tree(k, leaf)) return false;
      return true;
    case T::Or:
      for (const auto& k : t.kids)
        if (eval_tree(k, leaf)) return true;
      return false;
  }
  return false;
}

}  // namespace

bool valuation_consistent(const Automaton& a, const PatternFormula& f, const PatternValuation& v) {
  for (const auto& b : f.bindings) {
    auto p = v.paths.find(b.path);
    if (p == v.paths.end() || !check_path(a, p->second).empty()) return false;
    auto st = [&](const std::string& q) { auto it = v.states.find(q); return it == v.states.end() ? -1 : it->second; };
    if (st(b.src) != p->second.start || st(b.dst) != path_end(a, p->second)) return false;
    auto in = v.inputs.find(b.in);
    if (in == v.inputs.end() || in->second != path_labels(a, p->second)) return false;
    if (!b.out.empty()) {
      auto out = v.outputs.find(b.out);
      if (out == v.outputs.end() || out->second != path_output(a, p->second)) return false;
    }
  }
  for (const auto& u : f.universals)
    if (!v.states.count(u)) return false;
  return true;
}

bool eval_pattern(const Automaton& a, const PatternFormula& f, const PatternValuation& v) {
  if (!valuation_consistent(a, f, v)) return false;
  return eval_tree(f.constraint, [&](const PAtom& at) { return eval_patom(a, at, v); });
}

Value term_value(const Automaton& a, const std::vector<int>& term, const std::vector<Path>& paths) {
  Value r;
  for (int i : term) r = combine(a.kind(), r, path_output(a, paths.at(i)));
  return r;
}

bool eval_atom(const Automaton& a, const Atom& at, const std::vector<Path>& ps) {
  auto end = [&](int i, Side s) { return s == Side::Src ? ps.at(i).start : path_end(a, ps.at(i)); };
  switch (at.kind) {
    case AKind::Pref: return is_prefix(path_labels(a, ps.at(at.i)), path_labels(a, ps.at(at.j)));
    case AKind::Member: return at.lang->accepts(path_input(a, ps.at(at.i)));
    case AKind::LenLe: return ps.at(at.i).size() <= ps.at(at.j).size();
    case AKind::Init: return a.is_initial(end(at.i, at.si));
    case AKind::Final: return a.is_final(end(at.i, at.si));
    case AKind::Colour: return a.has_colour(end(at.i, at.si), at.colour);
    case AKind::StateEq: return end(at.i, at.si) == end(at.j, at.sj);
    case AKind::PathEq: return ps.at(at.i) == ps.at(at.j);
    default: break;
  }
  const Value x = term_value(a, at.t1, ps), y = term_value(a, at.t2, ps);
  switch (at.kind) {
    case AKind::NotPref: return !is_prefix(x.word, y.word);
    case AKind::OutMember: return at.lang->accepts(x.word);
    case AKind::OutLenLe: return x.word.size() <= y.word.size();
    case AKind::OutLenLt: return x.word.size() < y.word.size();
    case AKind::SumLe: return x.num <= y.num;
    case AKind::SumLt: return x.num < y.num;
    case AKind::SumEq: return x.num == y.num;
    case AKind::SumNe: return x.num != y.num;
    default: break;
  }
  return false;
}

bool eval_path_formula(const Automaton& a, const PathFormula& f, const std::vector<Path>& paths) {
  return eval_tree(f.tree, [&](const Atom& at) { return eval_atom(a, at, paths); });
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

enum class K3 { F, T, U };

struct PathInfo {
  int start, end;
  std::vector<int> labels, input;
  Value out;
};

// Variables are identified by the binding that first mentions them; the
// universal ones are read from the current tuple instead.
struct VarRef {
  int binding = -1;  // -1: universal
  int role = 0;      // 0 src, 1 dst, 2 in, 3 out, 4 path; universal index when binding = -1
};

struct CAtom {
  const PAtom* atom;
  VarRef x, y;
  std::vector<VarRef> t1, t2;
  int colour = -1;
  int ready = -1;  // deepest binding it needs
};

struct CTree {
  PTree::Kind kind;
  int atom = -1;
  std::vector<CTree> kids;
};

class Oracle {
 public:
  Oracle(const Automaton& a, const PatternFormula& f, int max_len, size_t cap, size_t node_cap)
      : a_(a), f_(f), node_cap_(node_cap) {
    for (const Path& p : paths_upto(a, max_len, cap)) {
      PathInfo info{p.start, path_end(a, p), path_labels(a, p), path_input(a, p), path_output(a, p)};
      int id = static_cast<int>(info_.size());
      info_.push_back(std::move(info));
      by_start_[info_.back().start].push_back(id);
      by_start_labels_[{info_.back().start, info_.back().labels}].push_back(id);
      by_labels_[info_.back().labels].push_back(id);
      raw_.push_back(p);
    }
    const int m = static_cast<int>(f.bindings.size());
    for (size_t k = 0; k < f.universals.size(); ++k) vars_[f.universals[k]] = {-1, static_cast<int>(k)};
    for (int i = 0; i < m; ++i) {
      const Binding& b = f.bindings[i];
      vars_.emplace(b.path, VarRef{i, 4});
      vars_.emplace(b.src, VarRef{i, 0});
      vars_.emplace(b.dst, VarRef{i, 1});
      vars_.emplace(b.in, VarRef{i, 2});
      if (!b.out.empty()) vars_.emplace(b.out, VarRef{i, 3});
    }
    tree_ = compile(f.constraint);
    chosen_.assign(m, -1);

    // A binding whose path, input and output are mentioned nowhere else only
    // contributes its endpoints; one path per endpoint pair is enough.
    std::map<std::string, int> uses;
    f.constraint.for_each_leaf([&](const PAtom& at, bool) {
      for (const auto* name : {&at.x, &at.y}) ++uses[*name];
      for (const auto& v : at.t1.vars) ++uses[v];
      for (const auto& v : at.t2.vars) ++uses[v];
    });
    for (const auto& b : f.bindings) {
      ++uses[b.in];
      if (!b.out.empty()) ++uses[b.out];
    }
    // Equalities the whole constraint depends on narrow the candidates: an
    // input equal to an earlier one, a source equal to an earlier state.
    std::vector<const PAtom*> top;
    conjuncts(f.constraint, top);
    std::set<std::pair<std::string, std::string>> pref;
    for (const PAtom* at : top) {
      if (at->kind == PKind::InPref) pref.insert({at->x, at->y});
      if (at->kind == PKind::StateEq) {
        same_state_[at->x].push_back(at->y);
        same_state_[at->y].push_back(at->x);
      }
    }
    for (const auto& [x, y] : pref)
      if (pref.count({y, x})) same_input_[x].push_back(y);
    endpoints_only_.assign(m, false);
    for (int i = 0; i < m; ++i) {
      const Binding& b = f.bindings[i];
      endpoints_only_[i] = !uses.count(b.path) && uses[b.in] == 1 && (b.out.empty() || uses[b.out] == 1);
    }
  }

  OracleResult run() {
    OracleResult r;
    r.paths = info_.size();
    const int k = static_cast<int>(f_.universals.size());
    std::vector<int> tuple(k, 0);
    const int n = a_.num_states();
    if (k > 0 && n == 0) {
      r.sat = true;
      return r;
    }
    while (true) {
      tuple_ = tuple;
      nodes_ = 0;
      bool found = dfs(0);
      r.nodes += nodes_;
      if (!found) {
        r.sat = false;
        r.failing_tuple = tuple;
        return r;
      }
      if (k == 0) break;
      int pos = k - 1;
      while (pos >= 0 && ++tuple[pos] == n) tuple[pos--] = 0;
      if (pos < 0) break;
    }
    r.sat = true;
    r.witness = valuation();
    return r;
  }

 private:
  const Automaton& a_;
  const PatternFormula& f_;
  std::vector<PathInfo> info_;
  std::vector<Path> raw_;
  std::map<int, std::vector<int>> by_start_;
  std::map<std::pair<int, std::vector<int>>, std::vector<int>> by_start_labels_;
  std::map<std::vector<int>, std::vector<int>> by_labels_;
  std::map<std::string, VarRef> vars_;
  std::vector<CAtom> atoms_;
  CTree tree_;
  std::vector<int> chosen_, tuple_;
  std::vector<bool> endpoints_only_;
  std::map<std::string, std::vector<std::string>> same_input_, same_state_;
  size_t nodes_ = 0, total_nodes_ = 0;
  size_t node_cap_;

  static void conjuncts(const PTree& t, std::vector<const PAtom*>& out) {
    if (t.kind == PTree::Leaf) out.push_back(&t.atom);
    if (t.kind == PTree::And)
      for (const auto& k : t.kids) conjuncts(k, out);
  }

  // A variable of the given sort known equal to `name` and fixed before
  // binding i, or `name` itself when fixed; empty when there is none.
  std::string fixed_alias(const std::string& name, int i, int role,
                          const std::map<std::string, std::vector<std::string>>& same) const {
    if (fixed_before(name, i, role)) return name;
    auto it = same.find(name);
    if (it == same.end()) return {};
    for (const auto& other : it->second)
      if (ref(other).binding < i && ref(other).role != 4) return other;
    return {};
  }

  VarRef ref(const std::string& name) const { return vars_.at(name); }

  CTree compile(const PTree& t) {
    CTree c{t.kind, -1, {}};
    for (const auto& k : t.kids) c.kids.push_back(compile(k));
    if (t.kind != PTree::Leaf) return c;
    CAtom ca;
    ca.atom = &t.atom;
    auto need = [&](const VarRef& v) { ca.ready = std::max(ca.ready, v.binding); };
    if (!t.atom.x.empty()) need(ca.x = ref(t.atom.x));
    if (!t.atom.y.empty()) need(ca.y = ref(t.atom.y));
    for (const auto& v : t.atom.t1.vars) ca.t1.push_back(ref(v)), need(ca.t1.back());
    for (const auto& v : t.atom.t2.vars) ca.t2.push_back(ref(v)), need(ca.t2.back());
    if (t.atom.kind == PKind::Colour) ca.colour = a_.colour_index(t.atom.colour);
    c.atom = static_cast<int>(atoms_.size());
    atoms_.push_back(std::move(ca));
    return c;
  }

  int state(const VarRef& v) const {
    if (v.binding < 0) return tuple_[v.role];
    const PathInfo& p = info_[chosen_[v.binding]];
    return v.role == 0 ? p.start : p.end;
  }
  const PathInfo& path(const VarRef& v) const { return info_[chosen_[v.binding]]; }
  Value term(const std::vector<VarRef>& t) const {
    Value r;
    for (const auto& v : t) r = combine(a_.kind(), r, path(v).out);
    return r;
  }

  bool atom_value(const CAtom& c) const {
    const PAtom& at = *c.atom;
    switch (at.kind) {
      case PKind::InPref: return is_prefix(path(c.x).labels, path(c.y).labels);
      case PKind::InMember: return at.lang->accepts(path(c.x).input);
      case PKind::InLenLe: return path(c.x).labels.size() <= path(c.y).labels.size();
      case PKind::Init: return a_.is_initial(state(c.x));
      case PKind::Final: return a_.is_final(state(c.x));
      case PKind::StateEq: return state(c.x) == state(c.y);
      case PKind::PathEq: return chosen_[c.x.binding] == chosen_[c.y.binding];
      case PKind::Colour: return a_.has_colour(state(c.x), c.colour);
      default: break;
    }
    return output_relation(a_.kind(), at.kind, term(c.t1), term(c.t2), at.lang.get());
  }

  K3 eval(const CTree& t, int depth) const {
    switch (t.kind) {
      case PTree::True: return K3::T;
      case PTree::False: return K3::F;
      case PTree::Leaf: {
        const CAtom& c = atoms_[t.atom];
        if (c.ready > depth) return K3::U;
        return atom_value(c) ? K3::T : K3::F;
      }
      case PTree::Not: {
        K3 x = eval(t.kids[0], depth);
        return x == K3::U ? K3::U : (x == K3::T ? K3::F : K3::T);
      }
      case PTree::And:
      case PTree::Or: {
        const K3 absorb = t.kind == PTree::And ? K3::F : K3::T;
        bool unknown = false;
        for (const auto& k : t.kids) {
          K3 x = eval(k, depth);
          if (x == absorb) return absorb;
          unknown = unknown || x == K3::U;
        }
        if (unknown) return K3::U;
        return absorb == K3::F ? K3::T : K3::F;
      }
    }
    return K3::U;
  }

  // The value of a variable is fixed by an earlier binding (or the tuple).
  bool fixed_before(const std::string& name, int i, int role) const {
    const VarRef v = ref(name);
    return v.binding < i || (v.binding == i && v.role < role && v.role != 4);
  }

  bool dfs(int i) {
    ++nodes_;
    if (node_cap_ && ++total_nodes_ > node_cap_)
      throw ResourceError("oracle search exceeded " + std::to_string(node_cap_) + " nodes");
    if (i == static_cast<int>(f_.bindings.size())) return eval(tree_, i - 1) == K3::T;
    const Binding& b = f_.bindings[i];
    const std::string src_alias = fixed_alias(b.src, i, 0, same_state_);
    const std::string in_alias = fixed_alias(b.in, i, 2, same_input_);
    const bool src_fixed = !src_alias.empty();
    const bool in_fixed = !in_alias.empty();
    const std::vector<int>* cand = nullptr;
    std::vector<int> all;
    static const std::vector<int> none;
    if (src_fixed && in_fixed) {
      auto it = by_start_labels_.find({state(ref(src_alias)), path(ref(in_alias)).labels});
      cand = it == by_start_labels_.end() ? &none : &it->second;
    } else if (src_fixed) {
      auto it = by_start_.find(state(ref(src_alias)));
      cand = it == by_start_.end() ? &none : &it->second;
    } else if (in_fixed) {
      auto it = by_labels_.find(path(ref(in_alias)).labels);
      cand = it == by_labels_.end() ? &none : &it->second;
    } else {
      all.resize(info_.size());
      for (size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
      cand = &all;
    }
    const VarRef dst = ref(b.dst);
    const bool dst_fixed = fixed_before(b.dst, i, 1);
    const bool out_fixed = !b.out.empty() && fixed_before(b.out, i, 3);
    std::set<std::pair<int, int>> tried;
    for (int p : *cand) {
      chosen_[i] = p;
      const PathInfo& info = info_[p];
      if (endpoints_only_[i] && !tried.insert({info.start, info.end}).second) continue;
      if (dst_fixed) {
        // dst may coincide with this binding's own source.
        if (dst.binding == i && dst.role == 0 ? info.end != info.start : info.end != state(dst)) continue;
      }
      if (out_fixed && path(ref(b.out)).out != info.out) continue;
      if (eval(tree_, i) == K3::F) continue;
      if (dfs(i + 1)) return true;
    }
    chosen_[i] = -1;
    return false;
  }

  PatternValuation valuation() const {
    PatternValuation v;
    for (size_t k = 0; k < f_.universals.size(); ++k) v.states[f_.universals[k]] = tuple_[k];
    for (size_t i = 0; i < f_.bindings.size(); ++i) {
      const Binding& b = f_.bindings[i];
      const Path& p = raw_[chosen_[i]];
      v.paths[b.path] = p;
      v.states[b.src] = p.start;
      v.states[b.dst] = path_end(a_, p);
      v.inputs[b.in] = path_labels(a_, p);
      if (!b.out.empty()) v.outputs[b.out] = path_output(a_, p);
    }
    return v;
  }
};

}  // namespace

OracleResult oracle_check(const Automaton& a, const PatternFormula& f, int max_len, size_t cap, size_t node_cap) {
  for (const auto& b : f.bindings)
    for (const auto& u : f.universals)
      if (b.path == u || b.in == u || b.out == u) throw Error("universal '" + u + "' must be a state variable");
  Oracle o(a, f, max_len, cap, node_cap);
  return o.run();
}

}  // namespace patlog
