#include "patlog/catalog.hpp"

#include <algorithm>

namespace patlog {

namespace {

PTree out_atom(PKind k, const Term& a, const Term& b) {
  PAtom x;
  x.kind = k;
  x.t1 = a;
  x.t2 = b;
  return PTree::leaf(std::move(x));
}

Term concat(const Term& a, const Term& b) {
  Term t = a;
  t.vars.insert(t.vars.end(), b.vars.begin(), b.vars.end());
  return t;
}

}  // namespace

PTree mismatch_tree(const Term& a, const Term& b) {
  return PTree::all({out_atom(PKind::OutNotPref, a, b), out_atom(PKind::OutNotPref, b, a)});
}

PTree sdel_neq(const Term& t1, const Term& t1p, const Term& t2, const Term& t2p) {
  PTree len_ne = PTree::any({PTree::negate(out_atom(PKind::OutLenLe, t1p, t2p)),
                             PTree::negate(out_atom(PKind::OutLenLe, t2p, t1p))});
  PTree nonempty = PTree::negate(out_atom(PKind::OutLenLe, concat(t1p, t2p), Term{}));
  return PTree::any({std::move(len_ne), PTree::all({std::move(nonempty), mismatch_tree(t1, t2)})});
}

std::pair<std::vector<int>, std::vector<int>> delay(const std::vector<int>& v1, const std::vector<int>& v2) {
  size_t l = 0;
  while (l < v1.size() && l < v2.size() && v1[l] == v2[l]) ++l;
  return {std::vector<int>(v1.begin() + l, v1.end()), std::vector<int>(v2.begin() + l, v2.end())};
}

bool sdel_neq_words(const std::vector<int>& v1, const std::vector<int>& v1p, const std::vector<int>& v2,
                    const std::vector<int>& v2p) {
  if (v1p.size() != v2p.size()) return true;
  if (v1p.empty() && v2p.empty()) return false;
  for (size_t i = 0; i < v1.size() && i < v2.size(); ++i)
    if (v1[i] != v2[i]) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Property formulas

const std::vector<PropertyInfo>& property_table() {
  static const std::vector<PropertyInfo> table = {
      {"k-ambiguous", true, {MonoidKind::Trivial, MonoidKind::FreeWord, MonoidKind::IntSum}},
      {"finitely-ambiguous", false, {MonoidKind::Trivial, MonoidKind::FreeWord, MonoidKind::IntSum}},
      {"polynomially-ambiguous", false, {MonoidKind::Trivial, MonoidKind::FreeWord, MonoidKind::IntSum}},
      {"exponentially-ambiguous", false, {MonoidKind::Trivial, MonoidKind::FreeWord, MonoidKind::IntSum}},
      {"functional", false, {MonoidKind::FreeWord, MonoidKind::IntSum}},
      {"k-valued", true, {MonoidKind::FreeWord, MonoidKind::IntSum}},
      {"determinisable", false, {MonoidKind::FreeWord, MonoidKind::IntSum}},
      {"multi-sequential", false, {MonoidKind::FreeWord}},
      {"k-sequential", true, {MonoidKind::FreeWord, MonoidKind::IntSum}},
      {"finite-valued", false, {MonoidKind::FreeWord}},
  };
  return table;
}

const PropertyInfo& property_info(const std::string& name) {
  for (const auto& p : property_table())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : property_table()) known += (known.empty() ? "" : ", ") + p.name;
  throw Error("unknown property '" + name + "' (known: " + known + ")");
}

bool property_applies(const std::string& name, MonoidKind m) {
  const auto& ms = property_info(name).monoids;
  return std::find(ms.begin(), ms.end(), m) != ms.end();
}

namespace {

std::string binding(const std::string& path, const std::string& src, const std::string& in, const std::string& out,
                 const std::string& dst) {
  return path + " : " + src + " -[" + in + (out.empty() ? "" : "|" + out) + "]-> " + dst;
}

std::string formula(const std::vector<std::string>& bindings, const std::vector<std::string>& conj) {
  std::string s = "exists ";
  for (size_t i = 0; i < bindings.size(); ++i) s += (i ? ",\n  " : "") + bindings[i];
  s += " .\n  ";
  for (size_t i = 0; i < conj.size(); ++i) s += (i ? " & " : "") + conj[i];
  return s + "\n";
}

std::string n(const std::string& stem, int i) { return stem + std::to_string(i); }
std::string n(const std::string& stem, int i, int j) { return stem + std::to_string(i) + "_" + std::to_string(j); }

std::string runs(int count, bool outputs, bool distinct_paths) {
  std::vector<std::string> b, c;
  for (int i = 0; i < count; ++i) {
    b.push_back(binding(n("r", i), n("p", i), "u", outputs ? n("v", i) : "", n("q", i)));
    c.push_back("init(" + n("p", i) + ")");
    c.push_back("final(" + n("q", i) + ")");
  }
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j)
      c.push_back(distinct_paths ? n("r", i) + " != " + n("r", j) : n("v", i) + " != " + n("v", j));
  return formula(b, c);
}

std::string epsilon_cycle() {
  return formula({binding("a", "q0", "x", "", "q1"), binding("c", "q1", "u", "", "q1"), binding("d", "q1", "w", "", "q1"),
                  binding("b", "q1", "y", "", "q2")},
                 {"init(q0)", "final(q2)", "u in \"eps\"", "w in \"eps\"", "c != d"});
}

std::string two_cycles() {
  return formula({binding("a", "q0", "x", "", "p"), binding("c", "p", "u", "", "p"), binding("d", "p", "u", "", "p"),
                  binding("b", "p", "y", "", "q")},
                 {"init(q0)", "c != d", "final(q)"});
}

std::string two_linked_cycles() {
  return formula({binding("a", "q0", "x", "", "q1"), binding("c", "q1", "u", "", "q1"), binding("m", "q1", "u", "", "q2"),
                  binding("d", "q2", "u", "", "q2"), binding("b", "q2", "y", "", "q3")},
                 {"init(q0)", "final(q3)", "q1 != q2", "u notin \"eps\""});
}

std::string twinning(bool words) {
  return formula({binding("a1", "q1", "u", "v1", "p1"), binding("b1", "p1", "w", "x1", "p1"), binding("c1", "p1", "z1", "", "r1"),
                  binding("a2", "q2", "u", "v2", "p2"), binding("b2", "p2", "w", "x2", "p2"), binding("c2", "p2", "z2", "", "r2")},
                 {"init(q1)", "init(q2)", "final(r1)", "final(r2)", words ? "sdel(v1, x1, v2, x2)" : "x1 != x2"});
}

std::string fork() {
  return formula({binding("a", "q0", "x", "", "q1"), binding("l1", "q1", "u1", "v1", "q1"), binding("l2", "q1", "u2", "v2", "q1"),
                  binding("m", "q1", "u1", "w1", "q2"), binding("l3", "q2", "u2", "w2", "q2"), binding("b", "q2", "y", "", "q3")},
                 {"init(q0)", "final(q3)", "sdel(v1, v2, w1, w2)"});
}

// Branching twinning of order k: k + 1 branches of k steps, each step
// followed by a loop.
std::string branching_twinning(int k, bool words) {
  std::vector<std::string> b, c;
  for (int j = 0; j <= k; ++j) {
    for (int i = 1; i <= k; ++i) {
      b.push_back(binding(n("p", i, j), n("q", i - 1, j), n("u", i, j), n("v", i, j), n("q", i, j)));
      b.push_back(binding(n("l", i, j), n("q", i, j), n("w", i, j), n("x", i, j), n("q", i, j)));
    }
    b.push_back(binding(n("s", j), n("q", k, j), n("z", j), "", n("f", j)));
    c.push_back("init(" + n("q", 0, j) + ")");
    c.push_back("final(" + n("f", j) + ")");
  }
  for (int j = 0; j <= k; ++j)
    for (int jj = j + 1; jj <= k; ++jj) {
      std::string any;
      for (int i = 1; i <= k; ++i) {
        std::string all;
        for (int ii = 1; ii <= i; ++ii)
          all += n("u", ii, j) + " = " + n("u", ii, jj) + " & " + n("w", ii, j) + " = " + n("w", ii, jj) + " & ";
        if (words) {
          std::string t1, t2;
          for (int ii = 1; ii <= i; ++ii) {
            t1 += (ii > 1 ? "." : "") + n("v", ii, j);
            t2 += (ii > 1 ? "." : "") + n("v", ii, jj);
          }
          all += "sdel(" + t1 + ", " + n("x", i, j) + ", " + t2 + ", " + n("x", i, jj) + ")";
        } else {
          all += n("x", i, j) + " != " + n("x", i, jj);
        }
        any += (i > 1 ? " | " : "") + std::string("(") + all + ")";
      }
      c.push_back("(" + any + ")");
    }
  return formula(b, c);
}

// Both circuits sit at the same state.
std::string coterminal_circuits() {
  return formula({binding("a", "q0", "x", "", "q1"), binding("c", "q1", "u", "v1", "q1"),
                  binding("e", "q1", "u", "v2", "q1"), binding("b", "q1", "y", "", "q3")},
                 {"init(q0)", "final(q3)", "v1 != v2"});
}

std::string dumbbell() {
  return formula({binding("a", "s0", "x", "", "s1"), binding("c", "s1", "u", "v1", "s1"), binding("m", "s1", "u", "v2", "s2"),
                  binding("d", "s2", "u", "v3", "s2"), binding("b", "s2", "y", "", "s3")},
                 {"init(s0)", "final(s3)", "s1 != s2", "v1.v2 != v2.v3"});
}

std::string w_computation() {
  return formula({binding("a", "r0", "x", "", "r1"), binding("b", "r1", "u1", "", "r2"), binding("c", "r2", "u2", "v1", "r2"),
                  binding("d", "r2", "u3", "", "r1"), binding("e", "r1", "u1", "", "r3"), binding("f", "r3", "u2", "v2", "r3"),
                  binding("g", "r3", "u3", "", "r4"), binding("h", "r4", "u1", "", "r5"), binding("i", "r5", "u2", "", "r5"),
                  binding("j", "r5", "u3", "", "r4"), binding("k", "r4", "y", "", "r6")},
                 {"init(r0)", "final(r6)", "len(v1) != len(v2)"});
}

}  // namespace

std::vector<std::string> catalog_formula_texts(const PropertySpec& p, MonoidKind m) {
  const PropertyInfo& info = property_info(p.name);
  if (info.takes_k && p.k < 1) throw Error("k must be at least 1");
  if (!property_applies(p.name, m))
    throw Error("property '" + p.name + "' does not apply to " + monoid_name(m) + " automata");
  const bool words = m == MonoidKind::FreeWord;
  if (p.name == "k-ambiguous") return {runs(p.k + 1, false, true)};
  if (p.name == "exponentially-ambiguous") return {epsilon_cycle()};
  if (p.name == "polynomially-ambiguous") return {two_cycles(), epsilon_cycle()};
  if (p.name == "finitely-ambiguous") return {two_linked_cycles(), two_cycles(), epsilon_cycle()};
  if (p.name == "functional") return {runs(2, true, false)};
  if (p.name == "k-valued") return {runs(p.k + 1, true, false)};
  if (p.name == "determinisable") return {twinning(words), runs(2, true, false)};
  if (p.name == "multi-sequential") return {fork()};
  if (p.name == "k-sequential") {
    if (p.k > kMaxSequentialOrder)
      throw Error("k-sequential supports k up to " + std::to_string(kMaxSequentialOrder));
    return {branching_twinning(p.k, words)};
  }
  if (p.name == "finite-valued") return {coterminal_circuits(), dumbbell(), w_computation()};
  throw Error("no formula for '" + p.name + "'");
}

std::vector<PatternFormula> catalog_formulas(const PropertySpec& p, const Automaton& a) {
  std::vector<PatternFormula> out;
  const FormulaContext ctx = FormulaContext::of(a);
  for (const auto& text : catalog_formula_texts(p, a.kind())) out.push_back(parse_formula(text, ctx));
  return out;
}

const char* membership_name(Membership::Kind k) {
  switch (k) {
    case Membership::InClass: return "in-class";
    case Membership::NotInClass: return "not-in-class";
    case Membership::Unknown: return "unknown";
  }
  return "?";
}

Membership check_property(const Automaton& a, const PropertySpec& p, const CheckOptions& o) {
  Membership m;
  m.kind = Membership::InClass;
  const auto formulas = catalog_formulas(p, a);
  for (size_t i = 0; i < formulas.size(); ++i) {
    m.results.push_back(check_formula(a, formulas[i], o));
    const CheckResult& r = m.results.back();
    if (r.kind == Verdict::Sat) {
      m.kind = Membership::NotInClass;
      m.formula = static_cast<int>(i);
      return m;
    }
    if (r.kind == Verdict::Unknown && m.kind == Membership::InClass) {
      m.kind = Membership::Unknown;
      m.formula = static_cast<int>(i);
    }
  }
  return m;
}

PatternFormula cross_check_formula(const Automaton& a, const std::string& colour1, const std::string& colour2) {
  for (const auto& c : {colour1, colour2})
    if (a.colour_index(c) < 0) throw Error("automaton has no colour '" + c + "'");
  const std::string text = formula(
      {binding("a1", "p1", "u", "v", "q1"), binding("a2", "p2", "u", "v", "q2")},
      {"init(p1)", "init(p2)", "final(q1)", "final(q2)", "color(p1, " + colour1 + ")", "color(q1, " + colour1 + ")",
       "color(p2, " + colour2 + ")", "color(q2, " + colour2 + ")"});
  return parse_formula(text, FormulaContext::of(a));
}

}  // namespace patlog
