#include "patlog/checker.hpp"

#include <algorithm>
#include <set>

#include "patlog/semantics.hpp"

namespace patlog {

std::vector<std::vector<Spec>> formula_spec_sets(const PathFormula& f, size_t* clauses) {
  std::vector<std::vector<Spec>> sets;
  size_t count = 0;
  for_each_clause(f, [&](const Clause& c) {
    ++count;
    for (auto& s : clause_spec_sets(c)) sets.push_back(std::move(s));
    return true;
  });
  if (clauses) *clauses = count;
  std::stable_sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  std::vector<std::vector<Spec>> out;
  std::vector<std::set<std::string>> keys;
  for (auto& s : sets) {
    std::set<std::string> ks;
    for (const auto& x : s) ks.insert(x.key());
    bool redundant = false;
    for (const auto& prev : keys)
      if (prev.size() <= ks.size() && std::includes(ks.begin(), ks.end(), prev.begin(), prev.end())) {
        redundant = true;
        break;
      }
    if (redundant) continue;
    keys.push_back(std::move(ks));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

std::string set_text(const std::vector<Spec>& s) {
  if (s.empty()) return "true";
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) out += (i ? " & " : "") + s[i].key();
  return out;
}

CheckResult check_existential(const Automaton& a, const PatternFormula& f, const CheckOptions& o) {
  CheckResult r;
  r.fragment = check_fragment(f, a.monoid(), &a);
  auto [pf, maps] = to_path_formula(f, a);
  r.maps = maps;
  PathFormula n = nnf(pf);
  auto sets = formula_spec_sets(n, &r.clauses);
  r.spec_sets = sets.size();
  bool unknown = false;
  r.method = Method::BfsExhausted;
  for (const auto& s : sets) {
    ++r.sets_tried;
    TupleAcceptor m = build_conjunction(s, a, n.arity, o.build);
    Verdict v = parikh_emptiness(m, o.search);
    r.configurations += v.configurations;
    r.control_states += v.control_states;
    r.bound_used = std::max(r.bound_used, v.bound_used);
    r.explain.push_back("[" + set_text(s) + "] dims " + std::to_string(m.dims()) + ", " +
                        std::to_string(v.control_states) + " control states, " + std::to_string(v.configurations) +
                        " configurations: " + verdict_name(v.kind) +
                        (v.unsat() ? std::string(" (") + method_name(v.method) + ")" : ""));
    if (v.sat()) {
      r.kind = Verdict::Sat;
      r.method = Method::None;
      r.paths = v.paths;
      r.word = v.witness;
      r.witness = recover_valuation(a, v.paths, maps);
      if (!eval_pattern(a, f, r.witness)) throw SoundnessError("witness does not satisfy the formula");
      r.has_witness = true;
      return r;
    }
    if (v.unknown()) {
      unknown = true;
    } else if (v.method == Method::BoundComplete ||
               (v.method == Method::BellmanFord && r.method == Method::BfsExhausted)) {
      r.method = v.method;
    }
  }
  r.kind = unknown ? Verdict::Unknown : Verdict::Unsat;
  if (unknown) r.method = Method::None;
  return r;
}

}  // namespace

CheckResult check_universal(const Automaton& a, const PatternFormula& f, const CheckOptions& o) {
  if (f.universals.empty()) throw Error("no universal variables");
  const int m = static_cast<int>(f.universals.size());
  CheckResult total;
  total.fragment = check_fragment(f, a.monoid(), &a);
  total.kind = Verdict::Sat;
  total.method = Method::None;
  if (a.num_states() == 0) return total;

  // Body with each universal pinned by a fresh colour.
  Automaton marked = a;
  std::vector<int> colour(m);
  std::vector<std::string> colour_name(m);
  for (int k = 0; k < m; ++k) {
    std::string name = "forall_" + f.universals[k];
    while (marked.colour_index(name) >= 0) name += "'";
    colour_name[k] = name;
    colour[k] = marked.add_colour(name);
  }
  PatternFormula body = f;
  body.universals.clear();
  std::vector<PTree> pins{f.constraint};
  int fresh = 0;
  auto fresh_name = [&](const std::string& stem) {
    std::string s;
    do {
      s = stem + std::to_string(fresh++);
    } while (f.binds(s) || std::find(f.universals.begin(), f.universals.end(), s) != f.universals.end());
    return s;
  };
  for (int k = 0; k < m; ++k) {
    const std::string& q = f.universals[k];
    bool bound = false;
    for (const auto& b : f.bindings) bound = bound || b.src == q || b.dst == q;
    if (!bound) {
      // Anchor the state with a path starting there; the empty path always exists.
      Binding b;
      b.path = fresh_name("pin_path");
      b.src = q;
      b.in = fresh_name("pin_in");
      if (a.kind() != MonoidKind::Trivial) b.out = fresh_name("pin_out");
      b.dst = fresh_name("pin_end");
      body.bindings.push_back(b);
    }
    PAtom at;
    at.kind = PKind::Colour;
    at.x = q;
    at.colour = colour_name[k];
    pins.push_back(PTree::leaf(at));
  }
  body.constraint = PTree::all(std::move(pins));

  std::vector<int> tuple(m, 0);
  bool undecided = false;
  while (true) {
    Automaton a2 = marked;
    for (int k = 0; k < m; ++k) a2.add_state_colour(tuple[k], colour[k]);
    CheckResult r = check_existential(a2, body, o);
    ++total.tuples;
    total.clauses += r.clauses;
    total.spec_sets += r.spec_sets;
    total.sets_tried += r.sets_tried;
    total.configurations += r.configurations;
    total.control_states += r.control_states;
    total.bound_used = std::max(total.bound_used, r.bound_used);
    for (auto& line : r.explain) {
      std::string t;
      for (int k = 0; k < m; ++k) t += (k ? "," : "") + f.universals[k] + "=" + a.state_name(tuple[k]);
      total.explain.push_back("(" + t + ") " + line);
    }
    if (r.kind == Verdict::Unsat) {
      total.kind = Verdict::Unsat;
      total.method = r.method;
      total.failing_tuple = tuple;
      total.has_witness = false;
      return total;
    }
    if (r.kind == Verdict::Unknown && !undecided) {
      undecided = true;
      total.failing_tuple = tuple;
    }
    if (r.kind == Verdict::Sat && !total.has_witness && !undecided) {
      // Keep the first tuple's witness, with the pinned states spelled out.
      total.has_witness = true;
      total.witness = r.witness;
      for (int k = 0; k < m; ++k) total.witness.states[f.universals[k]] = tuple[k];
      total.paths = r.paths;
      total.word = r.word;
      total.maps = r.maps;
    }
    int k = m;
    while (k > 0 && ++tuple[k - 1] == a.num_states()) tuple[--k] = 0;
    if (k == 0) break;
  }
  if (undecided) {
    total.kind = Verdict::Unknown;
    total.has_witness = false;
  }
  return total;
}

CheckResult check_formula(const Automaton& a, const PatternFormula& f, const CheckOptions& o) {
  if (!f.universals.empty()) return check_universal(a, f, o);
  return check_existential(a, f, o);
}

}  // namespace patlog
