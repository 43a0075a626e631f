#include "patlog/acceptor.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace patlog {

const char* rel_text(Rel r) {
  switch (r) {
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
  }
  return "?";
}

bool LinearConstraint::holds_value(int64_t v) const {
  switch (rel) {
    case Rel::Le: return v <= rhs;
    case Rel::Lt: return v < rhs;
    case Rel::Eq: return v == rhs;
    case Rel::Ne: return v != rhs;
  }
  return false;
}

bool LinearConstraint::holds(const std::vector<int64_t>& x) const {
  int64_t v = 0;
  for (size_t i = 0; i < coef.size(); ++i)
    if (coef[i]) v = checked_add(v, checked_mul(coef[i], x.at(i)));
  return holds_value(v);
}

// ---------------------------------------------------------------------------
// Specs

namespace {

std::string seq(const std::vector<int>& t) {
  std::string s = "[";
  for (size_t k = 0; k < t.size(); ++k) s += (k ? "," : "") + std::to_string(t[k]);
  return s + "]";
}

// Same source text over the same alphabet is the same language.
std::string lang_key(const std::shared_ptr<const Nfa>& l) {
  if (!l->source.empty()) return "\"" + l->source + "\"";
  std::ostringstream o;
  o << static_cast<const void*>(l.get());
  return o.str();
}

const char* side_char(Side s) { return s == Side::Src ? "<" : ">"; }

// k1_j - k2_j per component.
std::map<int, int64_t> diff(const std::vector<int>& t1, const std::vector<int>& t2) {
  std::map<int, int64_t> d;
  for (int j : t1) ++d[j];
  for (int j : t2) --d[j];
  for (auto it = d.begin(); it != d.end();) it = it->second == 0 ? d.erase(it) : std::next(it);
  return d;
}

bool seq_prefix(const std::vector<int>& a, const std::vector<int>& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

Spec constant(bool b) {
  Spec s;
  s.kind = Spec::Const;
  s.negated = !b;
  return s;
}

Spec fold(Spec s) {
  switch (s.kind) {
    case Spec::Pref:
    case Spec::LenLe:
    case Spec::PathEq:
      if (s.i == s.j) return constant(!s.negated);
      if (s.kind == Spec::PathEq && s.i > s.j) std::swap(s.i, s.j);
      return s;
    case Spec::StateEq:
      if (s.i == s.j && s.si == s.sj) return constant(!s.negated);
      if (std::make_pair(s.i, s.si) > std::make_pair(s.j, s.sj)) std::swap(s.i, s.j), std::swap(s.si, s.sj);
      return s;
    case Spec::LenCmp: {
      auto d = diff(s.t1, s.t2);
      bool pos = false, neg = false;
      for (auto [j, c] : d) (c > 0 ? pos : neg) = true;
      if (!pos && !neg) return constant(!s.strict);
      if (pos && !neg) {
        // Σ c|v| <= 0 forces the positive components empty; < 0 is impossible.
        if (s.strict) return constant(false);
        Spec e;
        e.kind = Spec::NonEmpty;
        e.negated = true;
        for (auto [j, c] : d) e.t1.push_back(j);
        return e;
      }
      if (!pos && neg) {
        if (!s.strict) return constant(true);
        Spec e;
        e.kind = Spec::NonEmpty;
        for (auto [j, c] : d) e.t1.push_back(j);
        return e;
      }
      return s;
    }
    case Spec::SumCmp: {
      if (!diff(s.t1, s.t2).empty()) return s;
      return constant(s.rel == Rel::Le || s.rel == Rel::Eq);
    }
    case Spec::Mismatch:
      if (seq_prefix(s.t1, s.t2) || seq_prefix(s.t2, s.t1)) return constant(false);
      if (s.t2 < s.t1) std::swap(s.t1, s.t2);
      return s;
    case Spec::OutMember:
      if (s.t1.empty()) return constant(s.lang->accepts_epsilon() != s.negated);
      return s;
    case Spec::NonEmpty: {
      std::sort(s.t1.begin(), s.t1.end());
      s.t1.erase(std::unique(s.t1.begin(), s.t1.end()), s.t1.end());
      if (s.t1.empty()) return constant(s.negated);
      return s;
    }
    default: return s;
  }
}

}  // namespace

std::string Spec::key() const {
  std::string n = negated ? "!" : "";
  switch (kind) {
    case Const: return negated ? "false" : "true";
    case Pref: return n + "Pref(" + std::to_string(i) + "," + std::to_string(j) + ")";
    case LenLe: return n + "LenLe(" + std::to_string(i) + "," + std::to_string(j) + ")";
    case PathEq: return n + "PathEq(" + std::to_string(i) + "," + std::to_string(j) + ")";
    case Member: return n + "Member(" + std::to_string(i) + "," + lang_key(lang) + ")";
    case Init: return n + "Init(" + std::to_string(i) + side_char(si) + ")";
    case Final: return n + "Final(" + std::to_string(i) + side_char(si) + ")";
    case Colour: return n + "Colour(" + std::to_string(i) + side_char(si) + "," + std::to_string(colour) + ")";
    case StateEq:
      return n + "StateEq(" + std::to_string(i) + side_char(si) + "," + std::to_string(j) + side_char(sj) + ")";
    case LenCmp: return std::string("LenCmp(") + seq(t1) + (strict ? "<" : "<=") + seq(t2) + ")";
    case SumCmp: return std::string("SumCmp(") + seq(t1) + rel_text(rel) + seq(t2) + ")";
    case Mismatch: return "Mismatch(" + seq(t1) + "," + seq(t2) + ")";
    case OutMember: return n + "OutMember(" + seq(t1) + "," + lang_key(lang) + ")";
    case NonEmpty: return n + "NonEmpty(" + seq(t1) + ")";
  }
  return "?";
}

std::vector<Spec> literal_alternatives(const Literal& l) {
  const Atom& a = l.atom;
  Spec s;
  s.negated = l.negated;
  s.i = a.i;
  s.j = a.j;
  s.si = a.si;
  s.sj = a.sj;
  s.colour = a.colour;
  s.lang = a.lang;
  s.t1 = a.t1;
  s.t2 = a.t2;
  auto out_flip = [&](Spec x) {
    // Output literals reach here positive after NNF; flip defensively.
    if (!l.negated) return x;
    x.negated = false;
    if (x.kind == Spec::LenCmp) {
      std::swap(x.t1, x.t2);
      x.strict = !x.strict;
    } else if (x.kind == Spec::SumCmp) {
      switch (x.rel) {
        case Rel::Le: x.rel = Rel::Lt; std::swap(x.t1, x.t2); break;
        case Rel::Lt: x.rel = Rel::Le; std::swap(x.t1, x.t2); break;
        case Rel::Eq: x.rel = Rel::Ne; break;
        case Rel::Ne: x.rel = Rel::Eq; break;
      }
    }
    return x;
  };
  switch (a.kind) {
    case AKind::Pref: s.kind = Spec::Pref; break;
    case AKind::Member: s.kind = Spec::Member; break;
    case AKind::LenLe: s.kind = Spec::LenLe; break;
    case AKind::Init: s.kind = Spec::Init; break;
    case AKind::Final: s.kind = Spec::Final; break;
    case AKind::Colour: s.kind = Spec::Colour; break;
    case AKind::StateEq: s.kind = Spec::StateEq; break;
    case AKind::PathEq: s.kind = Spec::PathEq; break;
    case AKind::OutMember: s.kind = Spec::OutMember; break;
    case AKind::NotPref: {
      if (l.negated) throw FragmentError("negated notpref cannot be compiled");
      Spec len;
      len.kind = Spec::LenCmp;
      len.t1 = a.t2;
      len.t2 = a.t1;
      len.strict = true;
      Spec mis;
      mis.kind = Spec::Mismatch;
      mis.t1 = a.t1;
      mis.t2 = a.t2;
      return {fold(len), fold(mis)};
    }
    case AKind::OutLenLe:
    case AKind::OutLenLt:
      s.kind = Spec::LenCmp;
      s.strict = a.kind == AKind::OutLenLt;
      return {fold(out_flip(s))};
    case AKind::SumLe:
    case AKind::SumLt:
    case AKind::SumEq:
    case AKind::SumNe:
      s.kind = Spec::SumCmp;
      s.rel = a.kind == AKind::SumLe ? Rel::Le : a.kind == AKind::SumLt ? Rel::Lt : a.kind == AKind::SumEq ? Rel::Eq : Rel::Ne;
      return {fold(out_flip(s))};
  }
  return {fold(s)};
}

namespace {

// Integer comparisons as (direction vector, relation) for contradiction tests.
struct Cmp {
  bool length;  // LenCmp (output lengths) or SumCmp (sums)
  std::map<int, int64_t> d;
  Rel rel;
};

std::map<int, int64_t> negate(std::map<int, int64_t> d) {
  for (auto& [j, c] : d) c = -c;
  return d;
}

bool clash(const Cmp& a, const Cmp& b) {
  if (a.length != b.length) return false;
  const bool same = a.d == b.d, opposite = a.d == negate(b.d);
  auto pair = [&](Rel x, Rel y) { return (a.rel == x && b.rel == y) || (a.rel == y && b.rel == x); };
  if (same && (pair(Rel::Eq, Rel::Ne) || pair(Rel::Eq, Rel::Lt))) return true;
  if (opposite && (pair(Rel::Lt, Rel::Lt) || pair(Rel::Lt, Rel::Le) || pair(Rel::Eq, Rel::Ne) || pair(Rel::Eq, Rel::Lt)))
    return true;
  return false;
}

}  // namespace

bool normalise_specs(std::vector<Spec>& specs) {
  std::map<std::string, Spec> uniq;
  for (auto& s0 : specs) {
    Spec s = fold(s0);
    if (s.kind == Spec::Const) {
      if (s.negated) return false;
      continue;
    }
    uniq.emplace(s.key(), s);
  }
  specs.clear();
  std::vector<Cmp> cmps;
  for (auto& [k, s] : uniq) {
    if (s.negated) {
      Spec pos = s;
      pos.negated = false;
      if (uniq.count(pos.key())) return false;
    }
    if (s.kind == Spec::LenCmp) cmps.push_back({true, diff(s.t1, s.t2), s.strict ? Rel::Lt : Rel::Le});
    if (s.kind == Spec::SumCmp) cmps.push_back({false, diff(s.t1, s.t2), s.rel});
    specs.push_back(s);
  }
  for (size_t x = 0; x < cmps.size(); ++x)
    for (size_t y = x + 1; y < cmps.size(); ++y)
      if (clash(cmps[x], cmps[y])) return false;
  // Ne on the same direction twice is one test.
  return true;
}

std::vector<std::vector<Spec>> clause_spec_sets(const Clause& c) {
  std::vector<std::vector<Spec>> alts;
  for (const auto& l : c) alts.push_back(literal_alternatives(l));
  std::vector<std::vector<Spec>> sets;
  std::vector<size_t> pick(alts.size(), 0);
  while (true) {
    std::vector<Spec> s;
    for (size_t k = 0; k < alts.size(); ++k) s.push_back(alts[k][pick[k]]);
    if (normalise_specs(s)) sets.push_back(std::move(s));
    size_t k = alts.size();
    while (k > 0 && ++pick[k - 1] == alts[k - 1].size()) pick[--k] = 0;
    if (k == 0) break;
  }
  // Drop duplicates and sets implied redundant by a subset.
  std::stable_sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  std::vector<std::vector<Spec>> out;
  std::vector<std::set<std::string>> keys;
  for (auto& s : sets) {
    std::set<std::string> ks;
    for (const auto& x : s) ks.insert(x.key());
    bool redundant = false;
    for (const auto& prev : keys)
      if (std::includes(ks.begin(), ks.end(), prev.begin(), prev.end())) redundant = true;
    if (redundant) continue;
    keys.push_back(ks);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Machines

namespace {

bool is_label(const Letter& l) { return l.kind == Letter::Label || l.kind == Letter::Eps; }

class GuardMachine : public AtomMachine {
 public:
  enum Kind { Pref, LenLe, PathEq };
  GuardMachine(Kind k, int i, int j, bool neg) : k_(k), i_(i), j_(j), neg_(neg) {}
  int width() const override { return neg_ ? 1 : 0; }
  void initial(Emit& out) const override {
    int32_t s = 0;
    out.push(&s, nullptr);
  }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    const Letter& a = l[i_];
    const Letter& b = l[j_];
    if (a.kind == Letter::Idle || b.kind == Letter::Idle) {
      out.push(st, nullptr);
      return;
    }
    bool bad = false;
    switch (k_) {
      case Pref: bad = is_label(a) && a != b; break;
      case LenLe: bad = b.kind == Letter::Bot && a.kind != Letter::Bot; break;
      case PathEq: bad = a != b; break;
    }
    if (!neg_) {
      if (!bad) out.push(st, nullptr);
      return;
    }
    int32_t s = st[0] | (bad ? 1 : 0);
    out.push(&s, nullptr);
  }
  bool accepting(const int32_t* st) const override { return !neg_ || st[0] == 1; }
  std::vector<int> sync_components() const override { return {i_, j_}; }
  std::string describe() const override {
    static const char* names[] = {"pref", "len<=", "path="};
    return std::string(neg_ ? "not " : "") + names[k_] + "(" + std::to_string(i_) + "," + std::to_string(j_) + ")";
  }

 private:
  Kind k_;
  int i_, j_;
  bool neg_;
};

class MemberMachine : public AtomMachine {
 public:
  MemberMachine(int i, std::shared_ptr<const Nfa> lang, std::string what)
      : i_(i), lang_(std::move(lang)), what_(std::move(what)) {}
  int width() const override { return 1; }
  void initial(Emit& out) const override {
    for (int32_t q = 0; q < lang_->size(); ++q)
      if (lang_->initial[q]) out.push(&q, nullptr);
  }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    if (l[i_].kind != Letter::Label) {
      out.push(st, nullptr);
      return;
    }
    for (auto [sym, dst] : lang_->delta[st[0]])
      if (sym == l[i_].id) {
        int32_t d = dst;
        out.push(&d, nullptr);
      }
  }
  bool accepting(const int32_t* st) const override { return lang_->final[st[0]]; }
  std::string describe() const override {
    return "input(" + std::to_string(i_) + ") in " + what_ + " [" + std::to_string(lang_->size()) + " states]";
  }

 private:
  int i_;
  std::shared_ptr<const Nfa> lang_;
  std::string what_;
};

class EndpointMachine : public AtomMachine {
 public:
  EndpointMachine(int i, Side side, std::vector<bool> set, bool neg, std::string what)
      : i_(i), side_(side), set_(std::move(set)), neg_(neg), what_(std::move(what)) {}
  int width() const override { return 1; }
  void initial(Emit& out) const override {
    int32_t s = 0;
    out.push(&s, nullptr);
  }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    if (l[i_].kind != Letter::State) {
      out.push(st, nullptr);
      return;
    }
    const bool in = set_[l[i_].id];
    if (side_ == Side::Src) {
      if (st[0] == 1) {
        out.push(st, nullptr);
      } else if (in != neg_) {
        int32_t s = 1;
        out.push(&s, nullptr);
      }
      return;
    }
    int32_t s = in ? 1 : 2;
    out.push(&s, nullptr);
  }
  bool accepting(const int32_t* st) const override {
    if (side_ == Side::Src) return st[0] == 1;
    return st[0] == (neg_ ? 2 : 1);
  }
  std::string describe() const override {
    return std::string(neg_ ? "not " : "") + what_ + "(" + std::to_string(i_) + side_char(side_) + ")";
  }

 private:
  int i_;
  Side side_;
  std::vector<bool> set_;
  bool neg_;
  std::string what_;
};

class StateEqMachine : public AtomMachine {
 public:
  StateEqMachine(int i, Side si, int j, Side sj, bool neg) : i_(i), j_(j), si_(si), sj_(sj), neg_(neg) {}
  int width() const override { return 4; }
  void initial(Emit& out) const override {
    int32_t s[4] = {-1, -1, 0, 0};
    out.push(s, nullptr);
  }
  static void update(int32_t& v, int32_t& fixed, Side side, const Letter& l) {
    if (l.kind == Letter::State) {
      if (side == Side::Src) {
        if (v < 0) v = l.id, fixed = 1;
      } else {
        v = l.id;
      }
    } else if (l.kind == Letter::Bot && side == Side::Dst && v >= 0) {
      fixed = 1;
    }
  }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    int32_t s[4] = {st[0], st[1], st[2], st[3]};
    update(s[0], s[2], si_, l[i_]);
    update(s[1], s[3], sj_, l[j_]);
    if (s[2] && s[3] && (s[0] == s[1]) == neg_) return;
    out.push(s, nullptr);
  }
  bool accepting(const int32_t* st) const override { return st[0] >= 0 && st[1] >= 0 && (st[0] == st[1]) != neg_; }
  std::string describe() const override {
    return std::to_string(i_) + side_char(si_) + (neg_ ? " != " : " = ") + std::to_string(j_) + side_char(sj_);
  }

 private:
  int i_, j_;
  Side si_, sj_;
  bool neg_;
};

// Per-component multiplicities of a term pair.
struct TermCounts {
  std::vector<int64_t> k1, k2;
  TermCounts(const std::vector<int>& t1, const std::vector<int>& t2, int arity) : k1(arity), k2(arity) {
    for (int j : t1) ++k1.at(j);
    for (int j : t2) ++k2.at(j);
  }
};

class LenCmpMachine : public AtomMachine {
 public:
  LenCmpMachine(const Automaton& a, int arity, std::vector<int> t1, std::vector<int> t2, bool strict)
      : counts_(t1, t2, arity), t1_(std::move(t1)), t2_(std::move(t2)), strict_(strict), arity_(arity) {
    for (const Value& v : a.values()) len_.push_back(static_cast<int64_t>(v.word.size()));
  }
  int width() const override { return 0; }
  int dims() const override { return 2; }
  void initial(Emit& out) const override { out.push(nullptr, zero_); }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    int64_t inc[2] = {0, 0};
    for (int j = 0; j < arity_; ++j) {
      if (l[j].kind != Letter::Val) continue;
      inc[0] += len_[l[j].id] * counts_.k1[j];
      inc[1] += len_[l[j].id] * counts_.k2[j];
    }
    out.push(st, inc);
  }
  bool accepting(const int32_t*) const override { return true; }
  std::vector<LinearConstraint> constraints(int offset, int total) const override {
    LinearConstraint c;
    c.coef.assign(total, 0);
    c.coef[offset] = 1;
    c.coef[offset + 1] = -1;
    c.rel = strict_ ? Rel::Lt : Rel::Le;
    return {c};
  }
  std::string describe() const override {
    return "|" + seq(t1_) + "| " + (strict_ ? "<" : "<=") + " |" + seq(t2_) + "|";
  }

 private:
  TermCounts counts_;
  std::vector<int> t1_, t2_;
  bool strict_;
  int arity_;
  std::vector<int64_t> len_;
  static constexpr int64_t zero_[2] = {0, 0};
};

class SumCmpMachine : public AtomMachine {
 public:
  SumCmpMachine(const Automaton& a, int arity, std::vector<int> t1, std::vector<int> t2, Rel rel)
      : counts_(t1, t2, arity), t1_(std::move(t1)), t2_(std::move(t2)), rel_(rel), arity_(arity) {
    for (const Value& v : a.values()) num_.push_back(v.num);
  }
  int width() const override { return 0; }
  int dims() const override { return 1; }
  void initial(Emit& out) const override {
    int64_t z = 0;
    out.push(nullptr, &z);
  }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    int64_t inc = 0;
    for (int j = 0; j < arity_; ++j) {
      if (l[j].kind != Letter::Val) continue;
      const int64_t k = counts_.k1[j] - counts_.k2[j];
      if (k) inc = checked_add(inc, checked_mul(num_[l[j].id], k));
    }
    out.push(st, &inc);
  }
  bool accepting(const int32_t*) const override { return true; }
  std::vector<LinearConstraint> constraints(int offset, int total) const override {
    LinearConstraint c;
    c.coef.assign(total, 0);
    c.coef[offset] = 1;
    c.rel = rel_;
    return {c};
  }
  std::string describe() const override { return "sum" + seq(t1_) + " " + rel_text(rel_) + " sum" + seq(t2_); }

 private:
  TermCounts counts_;
  std::vector<int> t1_, t2_;
  Rel rel_;
  int arity_;
  std::vector<int64_t> num_;
};

class MismatchMachine : public AtomMachine {
 public:
  MismatchMachine(const Automaton& a, std::vector<int> t1, std::vector<int> t2)
      : t_{std::move(t1), std::move(t2)}, a_(a) {}
  int width() const override { return 4; }  // segment1, segment2, letter1, letter2
  int dims() const override { return 2; }
  void initial(Emit& out) const override {
    int64_t z[2] = {0, 0};
    for (int32_t s1 = 0; s1 < static_cast<int>(t_[0].size()); ++s1)
      for (int32_t s2 = 0; s2 < static_cast<int>(t_[1].size()); ++s2) {
        int32_t s[4] = {s1, s2, -1, -1};
        out.push(s, z);
      }
  }
  // Options for one side on output word d of component j.
  void options(int side, int32_t seg, int32_t letter, int j, const std::vector<int>& d,
               std::vector<std::pair<int64_t, int32_t>>& opts) const {
    const auto& t = t_[side];
    int64_t before = 0;
    for (int32_t k = 0; k < seg; ++k) before += t[k] == j;
    const int64_t base = before * static_cast<int64_t>(d.size());
    opts.clear();
    if (t[seg] == j && letter < 0) {
      opts.push_back({base + static_cast<int64_t>(d.size()), -1});
      for (size_t x = 0; x < d.size(); ++x) opts.push_back({base + static_cast<int64_t>(x), d[x]});
    } else {
      opts.push_back({base, letter});
    }
  }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    // Several components may carry values in one position; fold them in.
    std::vector<std::pair<std::array<int32_t, 4>, std::array<int64_t, 2>>> cur{{{st[0], st[1], st[2], st[3]}, {0, 0}}};
    std::vector<std::pair<int64_t, int32_t>> o1, o2;
    for (size_t j = 0; j < comps_.size(); ++j) {
      const int c = comps_[j];
      if (l[c].kind != Letter::Val) continue;
      const std::vector<int>& d = a_.value(l[c].id).word;
      std::vector<std::pair<std::array<int32_t, 4>, std::array<int64_t, 2>>> next;
      for (const auto& [s, inc] : cur) {
        options(0, s[0], s[2], c, d, o1);
        options(1, s[1], s[3], c, d, o2);
        for (auto [b1, x1] : o1)
          for (auto [b2, x2] : o2) next.push_back({{s[0], s[1], x1, x2}, {inc[0] + b1, inc[1] + b2}});
      }
      cur.swap(next);
    }
    for (const auto& [s, inc] : cur) out.push(s.data(), inc.data());
  }
  bool accepting(const int32_t* st) const override { return st[2] >= 0 && st[3] >= 0 && st[2] != st[3]; }
  std::vector<LinearConstraint> constraints(int offset, int total) const override {
    LinearConstraint c;
    c.coef.assign(total, 0);
    c.coef[offset] = 1;
    c.coef[offset + 1] = -1;
    c.rel = Rel::Eq;
    return {c};
  }
  std::string describe() const override { return "mismatch(" + seq(t_[0]) + "," + seq(t_[1]) + ")"; }
  void set_components() {
    std::set<int> s(t_[0].begin(), t_[0].end());
    s.insert(t_[1].begin(), t_[1].end());
    comps_.assign(s.begin(), s.end());
  }

 private:
  std::vector<int> t_[2];
  std::vector<int> comps_;
  const Automaton& a_;
};

class OutMemberMachine : public AtomMachine {
 public:
  OutMemberMachine(const Automaton& a, std::vector<int> t, std::shared_ptr<const Nfa> lang, std::string what)
      : t_(std::move(t)), lang_(std::move(lang)), what_(std::move(what)) {
    // Runs of every output value from every language state.
    const int n = lang_->size();
    runs_.assign(static_cast<size_t>(n) * a.values().size(), {});
    for (size_t v = 0; v < a.values().size(); ++v)
      for (int q = 0; q < n; ++q) {
        std::vector<bool> cur(n, false), next(n);
        cur[q] = true;
        for (int sym : a.value(static_cast<int>(v)).word) {
          std::fill(next.begin(), next.end(), false);
          for (int x = 0; x < n; ++x)
            if (cur[x])
              for (auto [s, d] : lang_->delta[x])
                if (s == sym) next[d] = true;
          cur.swap(next);
        }
        for (int x = 0; x < n; ++x)
          if (cur[x]) runs_[q * a.values().size() + v].push_back(x);
      }
    values_ = static_cast<int>(a.values().size());
  }
  int width() const override { return 2 * static_cast<int>(t_.size()); }
  void initial(Emit& out) const override {
    const int m = static_cast<int>(t_.size());
    const int n = lang_->size();
    std::vector<int32_t> s(2 * m, 0);
    // start_0 initial, later starts guessed.
    std::vector<int> pick(m, 0);
    while (true) {
      bool ok = lang_->initial[pick[0]];
      if (ok) {
        for (int k = 0; k < m; ++k) s[2 * k] = s[2 * k + 1] = pick[k];
        out.push(s.data(), nullptr);
      }
      int k = m;
      while (k > 0 && ++pick[k - 1] == n) pick[--k] = 0;
      if (k == 0) break;
    }
  }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    std::vector<std::vector<int32_t>> cur{std::vector<int32_t>(st, st + width())};
    for (size_t k = 0; k < t_.size(); ++k) {
      const Letter& x = l[t_[k]];
      if (x.kind != Letter::Val) continue;
      std::vector<std::vector<int32_t>> next;
      for (const auto& s : cur)
        for (int d : runs_[s[2 * k + 1] * values_ + x.id]) {
          auto y = s;
          y[2 * k + 1] = d;
          next.push_back(std::move(y));
        }
      cur.swap(next);
    }
    for (const auto& s : cur) out.push(s.data(), nullptr);
  }
  bool accepting(const int32_t* st) const override {
    const int m = static_cast<int>(t_.size());
    for (int k = 0; k + 1 < m; ++k)
      if (st[2 * k + 1] != st[2 * (k + 1)]) return false;
    return lang_->final[st[2 * (m - 1) + 1]];
  }
  std::string describe() const override {
    return "out" + seq(t_) + " in " + what_ + " [" + std::to_string(lang_->size()) + " states]";
  }

 private:
  std::vector<int> t_;
  std::shared_ptr<const Nfa> lang_;
  std::string what_;
  std::vector<std::vector<int>> runs_;
  int values_ = 0;
};

class NonEmptyMachine : public AtomMachine {
 public:
  NonEmptyMachine(const Automaton& a, std::vector<int> t, bool neg) : t_(std::move(t)), neg_(neg) {
    for (const Value& v : a.values()) empty_.push_back(v.word.empty());
  }
  int width() const override { return 1; }
  void initial(Emit& out) const override {
    int32_t s = 0;
    out.push(&s, nullptr);
  }
  void step(const int32_t* st, const Letter* l, Emit& out) const override {
    bool produced = false;
    for (int j : t_)
      if (l[j].kind == Letter::Val && !empty_[l[j].id]) produced = true;
    if (neg_ && produced) return;
    int32_t s = st[0] | (produced ? 1 : 0);
    out.push(&s, nullptr);
  }
  bool accepting(const int32_t* st) const override { return neg_ || st[0] == 1; }
  std::string describe() const override { return (neg_ ? "|" : "0 < |") + seq(t_) + (neg_ ? "| = 0" : "|"); }

 private:
  std::vector<int> t_;
  bool neg_;
  std::vector<bool> empty_;
};

class FalseMachine : public AtomMachine {
 public:
  int width() const override { return 0; }
  void initial(Emit&) const override {}
  void step(const int32_t*, const Letter*, Emit&) const override {}
  bool accepting(const int32_t*) const override { return false; }
  std::string describe() const override { return "false"; }
};

void check_index(int i, int arity) {
  if (i < 0 || i >= arity) throw Error("component index " + std::to_string(i) + " out of range");
}

void check_term(const std::vector<int>& t, int arity) {
  for (int j : t) check_index(j, arity);
}

TupleAcceptor single(const Automaton& a, int arity, std::shared_ptr<const AtomMachine> m) {
  TupleAcceptor t;
  t.aut = &a;
  t.arity = arity;
  Conjunct c;
  c.dims = m->dims();
  c.zeta = m->constraints(0, c.dims);
  c.atoms.push_back(std::move(m));
  t.branches.push_back(std::move(c));
  return t;
}

}  // namespace

int TupleAcceptor::dims() const {
  int d = 0;
  for (const auto& b : branches) d = std::max(d, b.dims);
  return d;
}

int TupleAcceptor::atom_count() const {
  int n = 0;
  for (const auto& b : branches) n += static_cast<int>(b.atoms.size());
  return n;
}

TupleAcceptor base_paths_acceptor(const Automaton& a, int arity) {
  if (arity < 1) throw Error("arity must be at least 1");
  TupleAcceptor t;
  t.aut = &a;
  t.arity = arity;
  t.branches.emplace_back();
  return t;
}

TupleAcceptor build_base_acceptor(const Spec& s, const Automaton& a, int arity, const BuildOptions& o) {
  check_index(s.i, arity);
  switch (s.kind) {
    case Spec::Pref:
    case Spec::LenLe:
    case Spec::PathEq: {
      check_index(s.j, arity);
      auto k = s.kind == Spec::Pref ? GuardMachine::Pref : s.kind == Spec::LenLe ? GuardMachine::LenLe : GuardMachine::PathEq;
      return single(a, arity, std::make_shared<GuardMachine>(k, s.i, s.j, s.negated));
    }
    case Spec::Member: {
      auto lang = s.negated ? std::make_shared<Nfa>(complement(*s.lang, o.subset_cap)) : s.lang;
      return single(a, arity, std::make_shared<MemberMachine>(s.i, lang, (s.negated ? "complement of " : "") + s.lang->source));
    }
    case Spec::Init:
    case Spec::Final:
    case Spec::Colour: {
      std::vector<bool> set(a.num_states());
      for (int q = 0; q < a.num_states(); ++q)
        set[q] = s.kind == Spec::Init ? a.is_initial(q) : s.kind == Spec::Final ? a.is_final(q) : a.has_colour(q, s.colour);
      const char* what = s.kind == Spec::Init ? "init" : s.kind == Spec::Final ? "final" : "colour";
      return single(a, arity, std::make_shared<EndpointMachine>(s.i, s.si, std::move(set), s.negated, what));
    }
    case Spec::StateEq:
      check_index(s.j, arity);
      return single(a, arity, std::make_shared<StateEqMachine>(s.i, s.si, s.j, s.sj, s.negated));
    default: break;
  }
  throw Error("not a base predicate: " + s.key());
}

TupleAcceptor build_parikh_len_cmp(const std::vector<int>& t1, const std::vector<int>& t2, bool strict,
                                   const Automaton& a, int arity) {
  check_term(t1, arity);
  check_term(t2, arity);
  if (a.kind() == MonoidKind::IntSum) {
    return single(a, arity, std::make_shared<SumCmpMachine>(a, arity, t1, t2, strict ? Rel::Lt : Rel::Le));
  }
  if (a.kind() != MonoidKind::FreeWord) throw Error("length comparison needs output words or integers");
  return single(a, arity, std::make_shared<LenCmpMachine>(a, arity, t1, t2, strict));
}

TupleAcceptor build_parikh_not_prefix(const std::vector<int>& t1, const std::vector<int>& t2, const Automaton& a,
                                      int arity) {
  if (a.kind() != MonoidKind::FreeWord) throw Error("notpref needs a transducer");
  check_term(t1, arity);
  check_term(t2, arity);
  Literal l;
  l.atom.kind = AKind::NotPref;
  l.atom.t1 = t1;
  l.atom.t2 = t2;
  TupleAcceptor r;
  r.aut = &a;
  r.arity = arity;
  for (const Spec& s : literal_alternatives(l)) {
    TupleAcceptor b = build_acceptor(s, a, arity);
    for (auto& c : b.branches) r.branches.push_back(std::move(c));
  }
  return r;
}

TupleAcceptor build_output_membership(const std::vector<int>& t, std::shared_ptr<const Nfa> lang, bool negated,
                                      const Automaton& a, int arity, const BuildOptions& o) {
  if (a.kind() != MonoidKind::FreeWord) throw Error("output membership needs a transducer");
  check_term(t, arity);
  std::string what = (negated ? "complement of " : "") + lang->source;
  if (negated) lang = std::make_shared<Nfa>(complement(*lang, o.subset_cap));
  if (t.empty()) {
    if (lang->accepts_epsilon()) return base_paths_acceptor(a, arity);
    return single(a, arity, std::make_shared<FalseMachine>());
  }
  return single(a, arity, std::make_shared<OutMemberMachine>(a, t, lang, what));
}

TupleAcceptor build_sum_cmp(const std::vector<int>& t1, const std::vector<int>& t2, Rel rel, const Automaton& a,
                            int arity) {
  if (a.kind() != MonoidKind::IntSum) throw Error("sum comparison needs a sum-automaton");
  check_term(t1, arity);
  check_term(t2, arity);
  return single(a, arity, std::make_shared<SumCmpMachine>(a, arity, t1, t2, rel));
}

TupleAcceptor build_acceptor(const Spec& s, const Automaton& a, int arity, const BuildOptions& o) {
  switch (s.kind) {
    case Spec::Const:
      if (!s.negated) return base_paths_acceptor(a, arity);
      return single(a, arity, std::make_shared<FalseMachine>());
    case Spec::LenCmp:
      if (a.kind() != MonoidKind::FreeWord) throw Error("length comparison needs a transducer");
      check_term(s.t1, arity);
      check_term(s.t2, arity);
      return single(a, arity, std::make_shared<LenCmpMachine>(a, arity, s.t1, s.t2, s.strict));
    case Spec::SumCmp: return build_sum_cmp(s.t1, s.t2, s.rel, a, arity);
    case Spec::Mismatch: {
      if (a.kind() != MonoidKind::FreeWord) throw Error("mismatch needs a transducer");
      check_term(s.t1, arity);
      check_term(s.t2, arity);
      auto m = std::make_shared<MismatchMachine>(a, s.t1, s.t2);
      m->set_components();
      return single(a, arity, m);
    }
    case Spec::OutMember: return build_output_membership(s.t1, s.lang, s.negated, a, arity, o);
    case Spec::NonEmpty:
      if (a.kind() != MonoidKind::FreeWord) throw Error("output length test needs a transducer");
      check_term(s.t1, arity);
      return single(a, arity, std::make_shared<NonEmptyMachine>(a, s.t1, s.negated));
    default: return build_base_acceptor(s, a, arity, o);
  }
}

TupleAcceptor acceptor_product(const std::vector<TupleAcceptor>& ms) {
  if (ms.empty()) throw Error("product of no acceptors");
  TupleAcceptor r;
  r.aut = ms[0].aut;
  r.arity = ms[0].arity;
  r.branches.emplace_back();
  for (const auto& m : ms) {
    if (m.arity != r.arity) throw Error("arity mismatch in product");
    std::vector<Conjunct> next;
    for (const auto& x : r.branches)
      for (const auto& y : m.branches) {
        Conjunct c = x;
        for (const auto& at : y.atoms) c.atoms.push_back(at);
        const int shift = c.dims;
        c.dims += y.dims;
        for (auto& z : c.zeta) z.coef.resize(c.dims, 0);
        for (const auto& z : y.zeta) {
          LinearConstraint s = z;
          s.coef.assign(c.dims, 0);
          for (size_t k = 0; k < z.coef.size(); ++k) s.coef[shift + k] = z.coef[k];
          c.zeta.push_back(std::move(s));
        }
        next.push_back(std::move(c));
      }
    r.branches = std::move(next);
  }
  return r;
}

TupleAcceptor acceptor_union(const TupleAcceptor& m1, const TupleAcceptor& m2) {
  if (m1.arity != m2.arity) throw Error("arity mismatch in union");
  TupleAcceptor r = m1;
  for (const auto& b : m2.branches) r.branches.push_back(b);
  return r;
}

TupleAcceptor build_conjunction(const std::vector<Spec>& specs, const Automaton& a, int arity, const BuildOptions& o) {
  std::vector<TupleAcceptor> parts{base_paths_acceptor(a, arity)};
  for (const auto& s : specs) parts.push_back(build_acceptor(s, a, arity, o));
  return acceptor_product(parts);
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

bool conjunct_accepts(const Conjunct& c, const ConvWord& w) {
  // Configurations: concatenated atom states + counters.
  struct Config {
    std::vector<int32_t> st;
    std::vector<int64_t> cnt;
    bool operator<(const Config& o) const { return st != o.st ? st < o.st : cnt < o.cnt; }
  };
  std::vector<int> off{0}, doff{0};
  for (const auto& m : c.atoms) {
    off.push_back(off.back() + m->width());
    doff.push_back(doff.back() + m->dims());
  }
  std::set<Config> cur{{{}, std::vector<int64_t>(c.dims, 0)}};
  // initial states: cartesian product of each machine's initial list
  for (size_t k = 0; k < c.atoms.size(); ++k) {
    Emit e(c.atoms[k]->width(), c.atoms[k]->dims());
    c.atoms[k]->initial(e);
    std::set<Config> next;
    for (const auto& cf : cur)
      for (size_t x = 0; x < e.size(); ++x) {
        Config n = cf;
        n.st.insert(n.st.end(), e.state(x), e.state(x) + c.atoms[k]->width());
        for (int d = 0; d < c.atoms[k]->dims(); ++d) n.cnt[doff[k] + d] += e.inc(x)[d];
        next.insert(std::move(n));
      }
    cur.swap(next);
  }
  for (size_t pos = 0; pos < w.length(); ++pos) {
    const Letter* l = w.at(pos);
    std::set<Config> next;
    for (const auto& cf : cur) {
      std::vector<Config> part{cf};
      for (size_t k = 0; k < c.atoms.size() && !part.empty(); ++k) {
        Emit e(c.atoms[k]->width(), c.atoms[k]->dims());
        std::vector<Config> np;
        for (const auto& p : part) {
          e.clear();
          c.atoms[k]->step(p.st.data() + off[k], l, e);
          for (size_t x = 0; x < e.size(); ++x) {
            Config n = p;
            std::copy(e.state(x), e.state(x) + c.atoms[k]->width(), n.st.begin() + off[k]);
            for (int d = 0; d < c.atoms[k]->dims(); ++d)
              n.cnt[doff[k] + d] = checked_add(n.cnt[doff[k] + d], e.inc(x)[d]);
            np.push_back(std::move(n));
          }
        }
        part.swap(np);
      }
      for (auto& p : part) next.insert(std::move(p));
    }
    cur.swap(next);
  }
  for (const auto& cf : cur) {
    bool ok = true;
    for (size_t k = 0; k < c.atoms.size() && ok; ++k) ok = c.atoms[k]->accepting(cf.st.data() + off[k]);
    for (const auto& z : c.zeta)
      if (ok) ok = z.holds(cf.cnt);
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool acceptor_accepts(const TupleAcceptor& m, const ConvWord& w) {
  if (w.arity != m.arity) return false;
  try {
    if (convolve(*m.aut, deconvolve(*m.aut, w)) != w) return false;
  } catch (const Error&) {
    return false;
  }
  for (const auto& b : m.branches)
    if (conjunct_accepts(b, w)) return true;
  return false;
}

std::string acceptor_text(const TupleAcceptor& m) {
  std::ostringstream o;
  o << "tuple acceptor: arity " << m.arity << ", " << m.branches.size() << " branch(es)\n";
  for (size_t b = 0; b < m.branches.size(); ++b) {
    const Conjunct& c = m.branches[b];
    o << " branch " << b << ": dimension " << c.dims << "\n";
    for (const auto& at : c.atoms)
      o << "  " << at->describe() << " (width " << at->width() << ", dims " << at->dims() << ")\n";
    for (const auto& z : c.zeta) {
      o << "  zeta:";
      for (size_t k = 0; k < z.coef.size(); ++k)
        if (z.coef[k]) o << " " << (z.coef[k] > 0 ? "+" : "") << z.coef[k] << "*x" << k;
      o << " " << rel_text(z.rel) << " " << z.rhs << "\n";
    }
  }
  return o.str();
}

std::vector<int> sync_groups(const Conjunct& c, int arity, bool lockstep) {
  std::vector<int> parent(arity);
  for (int i = 0; i < arity; ++i) parent[i] = lockstep ? 0 : i;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& m : c.atoms) {
    auto comps = m->sync_components();
    for (size_t k = 1; k < comps.size(); ++k) {
      int a = find(comps[0]), b = find(comps[k]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> group(arity), id(arity, -1);
  int next = 0;
  for (int i = 0; i < arity; ++i) {
    int r = find(i);
    if (id[r] < 0) id[r] = next++;
    group[i] = id[r];
  }
  return group;
}

}  // namespace patlog
