#include "patlog/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "patlog/catalog.hpp"

namespace patlog {

Sort PatternFormula::sort_of(const std::string& name) const {
  for (const auto& b : bindings) {
    if (b.path == name) return Sort::Path;
    if (b.src == name || b.dst == name) return Sort::State;
    if (b.in == name) return Sort::Input;
    if (!b.out.empty() && b.out == name) return Sort::Output;
  }
  for (const auto& u : universals)
    if (u == name) return Sort::State;
  throw Error("unbound variable '" + name + "'");
}

bool PatternFormula::binds(const std::string& name) const {
  for (const auto& b : bindings)
    if (b.path == name || b.src == name || b.dst == name || b.in == name || (!b.out.empty() && b.out == name))
      return true;
  return std::find(universals.begin(), universals.end(), name) != universals.end();
}

FormulaContext FormulaContext::of(const Automaton& a, const std::string& base_dir) {
  FormulaContext c;
  c.input_symbols = a.symbols();
  c.output_symbols = a.monoid().gamma;
  c.base_dir = base_dir;
  return c;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Path: return "path";
    case Sort::State: return "state";
    case Sort::Input: return "input";
    case Sort::Output: return "output";
  }
  return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

class FormulaParser {
 public:
  FormulaParser(const std::string& text, const FormulaContext& ctx) : src_(text), ctx_(ctx) {}

  PatternFormula run() {
    if (accept_word("forall")) {
      while (true) {
        f_.universals.push_back(ident("universal state variable"));
        accept(",");
        if (accept(".")) break;
      }
    }
    expect_word("exists");
    while (true) {
      parse_binding();
      if (accept(",")) {
        accept_word("exists");
        continue;
      }
      expect(".");
      break;
    }
    register_sorts();
    f_.constraint = parse_or();
    skip();
    if (pos_ < src_.size()) fail("unexpected trailing text");
    return std::move(f_);
  }

 private:
  const std::string& src_;
  const FormulaContext& ctx_;
  size_t pos_ = 0;
  PatternFormula f_;
  std::map<std::string, Sort> sorts_;

  int line_at(size_t p) const { return 1 + static_cast<int>(std::count(src_.begin(), src_.begin() + p, '\n')); }
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(m, line_at(pos_)); }

  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }
  bool peek(const std::string& s) {
    skip();
    return src_.compare(pos_, s.size(), s) == 0;
  }
  bool accept(const std::string& s) {
    if (!peek(s)) return false;
    // `!` must not swallow `!=`, `<` must not swallow `<=`.
    if ((s == "!" || s == "<" || s == ">") && src_.compare(pos_, 2, s + "=") == 0) return false;
    if (s == "-" && src_.compare(pos_, 2, "-[") != 0) return false;
    pos_ += s.size();
    return true;
  }
  void expect(const std::string& s) {
    if (!accept(s)) fail("expected '" + s + "'");
  }
  bool peek_word(const std::string& w) {
    skip();
    return src_.compare(pos_, w.size(), w) == 0 &&
           (pos_ + w.size() >= src_.size() || !ident_char(src_[pos_ + w.size()]));
  }
  bool accept_word(const std::string& w) {
    if (!peek_word(w)) return false;
    pos_ += w.size();
    return true;
  }
  void expect_word(const std::string& w) {
    if (!accept_word(w)) fail("expected '" + w + "'");
  }
  std::string ident(const char* what) {
    skip();
    if (pos_ >= src_.size() || !ident_start(src_[pos_])) fail(std::string("expected ") + what);
    size_t b = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    return src_.substr(b, pos_ - b);
  }
  std::string name_token(const char* what) {
    skip();
    size_t b = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    if (b == pos_) fail(std::string("expected ") + what);
    return src_.substr(b, pos_ - b);
  }

  void parse_binding() {
    Binding b;
    b.path = ident("path variable");
    expect(":");
    b.src = ident("source state variable");
    expect("-[");
    b.in = ident("input variable");
    if (accept("|")) b.out = ident("output variable");
    expect("]->");
    b.dst = ident("target state variable");
    for (const auto& o : f_.bindings)
      if (o.path == b.path) fail("path variable '" + b.path + "' bound twice");
    f_.bindings.push_back(b);
  }

  void bind_sort(const std::string& name, Sort s) {
    auto [it, fresh] = sorts_.emplace(name, s);
    if (!fresh && it->second != s)
      fail("variable '" + name + "' used both as " + sort_name(it->second) + " and " + sort_name(s));
  }

  void register_sorts() {
    for (const auto& u : f_.universals) bind_sort(u, Sort::State);
    for (const auto& b : f_.bindings) {
      bind_sort(b.path, Sort::Path);
      bind_sort(b.src, Sort::State);
      bind_sort(b.dst, Sort::State);
      bind_sort(b.in, Sort::Input);
      if (!b.out.empty()) bind_sort(b.out, Sort::Output);
    }
  }

  Sort sort(const std::string& name) {
    auto it = sorts_.find(name);
    if (it == sorts_.end()) fail("unbound variable '" + name + "'");
    return it->second;
  }
  std::string var_of(Sort s, const char* what) {
    std::string v = ident(what);
    if (sort(v) != s) fail("'" + v + "' is not a " + sort_name(s) + " variable");
    return v;
  }

  PTree parse_or() {
    std::vector<PTree> ts{parse_and()};
    while (accept("|")) ts.push_back(parse_and());
    return PTree::any(std::move(ts));
  }
  PTree parse_and() {
    std::vector<PTree> ts{parse_unary()};
    while (accept("&")) ts.push_back(parse_unary());
    return PTree::all(std::move(ts));
  }
  PTree parse_unary() {
    if (accept("!")) return PTree::negate(parse_unary());
    if (accept("(")) {
      PTree t = parse_or();
      expect(")");
      return t;
    }
    return parse_atom();
  }

  static PTree leaf(PKind k, std::string x = {}, std::string y = {}) {
    PAtom a;
    a.kind = k;
    a.x = std::move(x);
    a.y = std::move(y);
    return PTree::leaf(std::move(a));
  }
  static PTree out_leaf(PKind k, Term t1, Term t2 = {}) {
    PAtom a;
    a.kind = k;
    a.t1 = std::move(t1);
    a.t2 = std::move(t2);
    return PTree::leaf(std::move(a));
  }

  // A term, or a single variable of any sort (returned in `single`).
  Term parse_term(std::string* single) {
    Term t;
    int factors = 0;
    bool only_var = true;
    std::string first;
    do {
      skip();
      ++factors;
      if (accept_word("eps") || (peek("0") && !(pos_ + 1 < src_.size() && ident_char(src_[pos_ + 1])) && accept("0"))) {
        only_var = false;
        continue;
      }
      std::string v = ident("term");
      if (factors == 1) first = v;
      t.vars.push_back(v);
    } while (accept(".") || accept("+"));
    if (single) *single = (factors == 1 && only_var) ? first : std::string();
    return t;
  }
  void check_output_term(const Term& t) {
    for (const auto& v : t.vars)
      if (sort(v) != Sort::Output) fail("'" + v + "' is not an output variable");
  }
  Term output_term() {
    Term t = parse_term(nullptr);
    check_output_term(t);
    return t;
  }

  std::shared_ptr<const Nfa> language(bool output) {
    skip();
    std::string text;
    if (pos_ < src_.size() && src_[pos_] == '"') {
      size_t e = src_.find('"', pos_ + 1);
      if (e == std::string::npos) fail("unterminated language string");
      text = src_.substr(pos_ + 1, e - pos_ - 1);
      pos_ = e + 1;
    } else if (pos_ < src_.size() && src_[pos_] == '@') {
      size_t b = pos_;
      while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
             std::string(")&|,").find(src_[pos_]) == std::string::npos)
        ++pos_;
      text = src_.substr(b, pos_ - b);
    } else {
      size_t b = pos_;
      while (pos_ < src_.size() && (ident_char(src_[pos_]) || src_[pos_] == '*')) ++pos_;
      text = src_.substr(b, pos_ - b);
      if (text.empty()) fail("expected a language");
    }
    try {
      return std::make_shared<Nfa>(
          compile_language(text, output ? ctx_.output_symbols : ctx_.input_symbols, ctx_.base_dir));
    } catch (const ParseError& e) {
      fail(e.what());
    } catch (const ResourceError&) {
      throw;
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  std::string relop() {
    for (const char* op : {"<=", ">=", "!=", "<", ">", "="})
      if (accept(op)) return op;
    fail("expected a comparison");
  }

  // a <= b style comparisons built from a `le(a, b)` leaf maker.
  static PTree compare(const std::string& op, const std::function<PTree(bool)>& le) {
    // le(false) is a<=b, le(true) is b<=a
    if (op == "<=") return le(false);
    if (op == ">=") return le(true);
    if (op == "<") return PTree::negate(le(true));
    if (op == ">") return PTree::negate(le(false));
    if (op == "=") return PTree::all({le(false), le(true)});
    return PTree::any({PTree::negate(le(true)), PTree::negate(le(false))});
  }

  PTree parse_len() {
    expect("(");
    std::string single;
    Term a = parse_term(&single);
    expect(")");
    bool input = !single.empty() && sort(single) == Sort::Input;
    std::string op = relop();
    expect_word("len");
    expect("(");
    if (input) {
      std::string u2 = var_of(Sort::Input, "input variable");
      expect(")");
      return compare(op, [&](bool swap) {
        return swap ? leaf(PKind::InLenLe, u2, single) : leaf(PKind::InLenLe, single, u2);
      });
    }
    check_output_term(a);
    Term b = output_term();
    expect(")");
    return compare(op, [&](bool swap) { return swap ? out_leaf(PKind::OutLenLe, b, a) : out_leaf(PKind::OutLenLe, a, b); });
  }

  PTree parse_atom() {
    if (accept_word("true")) return PTree::constant(true);
    if (accept_word("false")) return PTree::constant(false);
    for (const char* kw : {"init", "final"}) {
      if (accept_word(kw)) {
        expect("(");
        std::string q = var_of(Sort::State, "state variable");
        expect(")");
        return leaf(std::string(kw) == "init" ? PKind::Init : PKind::Final, q);
      }
    }
    if (accept_word("color") || accept_word("colour")) {
      expect("(");
      std::string q = var_of(Sort::State, "state variable");
      expect(",");
      PAtom a;
      a.kind = PKind::Colour;
      a.x = q;
      a.colour = name_token("colour name");
      expect(")");
      return PTree::leaf(std::move(a));
    }
    if (accept_word("mismatch")) {
      expect("(");
      Term a = output_term();
      expect(",");
      Term b = output_term();
      expect(")");
      return mismatch_tree(a, b);
    }
    if (accept_word("sdel")) {
      expect("(");
      Term t[4];
      for (int i = 0; i < 4; ++i) {
        if (i) expect(",");
        t[i] = output_term();
      }
      expect(")");
      return sdel_neq(t[0], t[1], t[2], t[3]);
    }
    if (accept_word("len")) return parse_len();

    std::string single;
    Term lhs = parse_term(&single);
    Sort s = single.empty() ? Sort::Output : sort(single);
    if (s == Sort::Output) check_output_term(lhs);
    skip();

    if (s == Sort::State || s == Sort::Path) {
      bool neq = accept("!=");
      if (!neq) expect("=");
      std::string rhs = var_of(s, sort_name(s));
      PTree t = leaf(s == Sort::State ? PKind::StateEq : PKind::PathEq, single, rhs);
      return neq ? PTree::negate(t) : t;
    }
    if (s == Sort::Input) {
      if (accept_word("pref")) return leaf(PKind::InPref, single, var_of(Sort::Input, "input variable"));
      if (accept_word("notpref"))
        return PTree::negate(leaf(PKind::InPref, single, var_of(Sort::Input, "input variable")));
      bool notin = accept_word("notin");
      if (notin || accept_word("in")) {
        PAtom a;
        a.kind = PKind::InMember;
        a.x = single;
        a.lang = language(false);
        PTree t = PTree::leaf(std::move(a));
        return notin ? PTree::negate(t) : t;
      }
      bool neq = accept("!=");
      if (!neq) expect("=");
      std::string rhs = var_of(Sort::Input, "input variable");
      PTree t = PTree::all({leaf(PKind::InPref, single, rhs), leaf(PKind::InPref, rhs, single)});
      return neq ? PTree::negate(t) : t;
    }
    // Output terms.
    if (accept_word("notpref")) return out_leaf(PKind::OutNotPref, lhs, output_term());
    if (accept_word("pref")) return PTree::negate(out_leaf(PKind::OutNotPref, lhs, output_term()));
    bool notin = accept_word("notin");
    if (notin || accept_word("in")) {
      PAtom a;
      a.kind = PKind::OutMember;
      a.t1 = lhs;
      a.lang = language(true);
      PTree t = PTree::leaf(std::move(a));
      return notin ? PTree::negate(t) : t;
    }
    std::string op = relop();
    Term rhs = output_term();
    if (op == "=") return out_leaf(PKind::OutEq, lhs, rhs);
    if (op == "!=") return out_leaf(PKind::OutNe, lhs, rhs);
    if (op == "<=") return out_leaf(PKind::OutLe, lhs, rhs);
    if (op == "<") return out_leaf(PKind::OutLt, lhs, rhs);
    if (op == ">=") return out_leaf(PKind::OutLe, rhs, lhs);
    return out_leaf(PKind::OutLt, rhs, lhs);
  }
};

}  // namespace

PatternFormula parse_formula(const std::string& text, const FormulaContext& ctx) {
  return FormulaParser(text, ctx).run();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string term_str(const Term& t, const char* sep) {
  if (t.vars.empty()) return std::string(sep) == "." ? "eps" : "0";
  std::string s;
  for (size_t i = 0; i < t.vars.size(); ++i) s += (i ? sep : "") + t.vars[i];
  return s;
}

std::string lang_str(const std::shared_ptr<const Nfa>& l) {
  if (!l) return "?";
  const std::string& s = l->source;
  if (!s.empty() && s[0] == '@') return s;
  return "\"" + s + "\"";
}

std::string patom_text(const PAtom& a) {
  const char* sep = ".";
  switch (a.kind) {
    case PKind::InPref: return a.x + " pref " + a.y;
    case PKind::InMember: return a.x + " in " + lang_str(a.lang);
    case PKind::InLenLe: return "len(" + a.x + ") <= len(" + a.y + ")";
    case PKind::Init: return "init(" + a.x + ")";
    case PKind::Final: return "final(" + a.x + ")";
    case PKind::StateEq:
    case PKind::PathEq: return a.x + " = " + a.y;
    case PKind::Colour: return "color(" + a.x + ", " + a.colour + ")";
    case PKind::OutNotPref: return term_str(a.t1, sep) + " notpref " + term_str(a.t2, sep);
    case PKind::OutMember: return term_str(a.t1, sep) + " in " + lang_str(a.lang);
    case PKind::OutLenLe: return "len(" + term_str(a.t1, sep) + ") <= len(" + term_str(a.t2, sep) + ")";
    case PKind::OutLe: return term_str(a.t1, "+") + " <= " + term_str(a.t2, "+");
    case PKind::OutLt: return term_str(a.t1, "+") + " < " + term_str(a.t2, "+");
    case PKind::OutEq: return term_str(a.t1, "+") + " = " + term_str(a.t2, "+");
    case PKind::OutNe: return term_str(a.t1, "+") + " != " + term_str(a.t2, "+");
  }
  return "?";
}

template <class A, class F>
std::string tree_str(const BoolTree<A>& t, F&& leaf) {
  using T = BoolTree<A>;
  switch (t.kind) {
    case T::True: return "true";
    case T::False: return "false";
    case T::Leaf: return leaf(t.atom);
    case T::Not: return "!(" + tree_str(t.kids[0], leaf) + ")";
    case T::And:
    case T::Or: {
      std::string s = "(";
      for (size_t i = 0; i < t.kids.size(); ++i) {
        if (i) s += t.kind == T::And ? " & " : " | ";
        s += tree_str(t.kids[i], leaf);
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace

std::string formula_text(const PatternFormula& f) {
  std::string s;
  if (!f.universals.empty()) {
    s = "forall";
    for (const auto& u : f.universals) s += " " + u;
    s += " . ";
  }
  for (size_t i = 0; i < f.bindings.size(); ++i) {
    const Binding& b = f.bindings[i];
    s += (i ? ", exists " : "exists ") + b.path + " : " + b.src + " -[" + b.in;
    if (!b.out.empty()) s += "|" + b.out;
    s += "]-> " + b.dst;
  }
  return s + " . " + tree_str(f.constraint, patom_text);
}

// ---------------------------------------------------------------------------
// Fragments

const char* fragment_name(Fragment f) {
  switch (f) {
    case Fragment::PL_NFA: return "PL_NFA";
    case Fragment::PL_Trans: return "PL_Trans";
    case Fragment::PL_Sum: return "PL_Sum";
    case Fragment::PL_SumNe: return "PL_Sum!=";
  }
  return "?";
}

FragmentInfo check_fragment(const PatternFormula& f, const OutputMonoid& m, const Automaton* a) {
  FragmentInfo info;
  bool any_output = false, input_cmp = false, sum_ne_only = true;
  std::string violation;
  f.constraint.for_each_leaf([&](const PAtom& at, bool neg) {
    switch (at.kind) {
      case PKind::InPref:
      case PKind::InLenLe: input_cmp = true; break;
      case PKind::InMember:
      case PKind::Init:
      case PKind::Final:
      case PKind::StateEq:
      case PKind::PathEq:
      case PKind::Colour: break;
      default: any_output = true;
    }
    if (!violation.empty()) return;
    const bool word_atom = at.kind == PKind::OutNotPref || at.kind == PKind::OutMember || at.kind == PKind::OutLenLe;
    const bool sum_atom = at.kind == PKind::OutLe || at.kind == PKind::OutLt || at.kind == PKind::OutEq;
    switch (m.kind) {
      case MonoidKind::Trivial:
        if (word_atom || sum_atom || at.kind == PKind::OutNe)
          violation = "output atom '" + patom_text(at) + "' over the trivial monoid of an nfa";
        break;
      case MonoidKind::FreeWord:
        if (sum_atom && at.kind != PKind::OutEq)
          violation = "order comparison '" + patom_text(at) + "' is not a transducer predicate";
        else if (at.kind == PKind::OutNotPref && neg)
          violation = "notpref under an odd number of negations";
        else if (at.kind == PKind::OutNe && neg)
          violation = "output equality (negated !=) over a free monoid is undecidable";
        else if (at.kind == PKind::OutEq && !neg)
          violation = "output equality '" + patom_text(at) + "' over a free monoid is undecidable";
        else if (at.kind == PKind::OutEq && neg)
          violation = "write output disequality as '!=' rather than a negated '='";
        break;
      case MonoidKind::IntSum:
        if (word_atom) violation = "word predicate '" + patom_text(at) + "' over the integer sum monoid";
        if (sum_atom || (at.kind == PKind::OutNe && neg)) sum_ne_only = false;
        break;
    }
  });
  if (!violation.empty()) throw FragmentError(violation);

  // Repeated output variables are implicit output equality tests.
  std::map<std::string, int> out_uses;
  for (const auto& b : f.bindings)
    if (!b.out.empty()) ++out_uses[b.out];
  bool repeated = false;
  for (const auto& [v, n] : out_uses) {
    if (n < 2) continue;
    repeated = true;
    if (m.kind == MonoidKind::FreeWord)
      throw FragmentError("output variable '" + v +
                          "' repeated in the prefix: implicit output equality over a free monoid is undecidable");
  }

  switch (m.kind) {
    case MonoidKind::Trivial: info.tag = Fragment::PL_NFA; break;
    case MonoidKind::FreeWord: info.tag = any_output ? Fragment::PL_Trans : Fragment::PL_NFA; break;
    case MonoidKind::IntSum:
      if (!any_output && !repeated) info.tag = Fragment::PL_NFA;
      else info.tag = (sum_ne_only && !repeated) ? Fragment::PL_SumNe : Fragment::PL_Sum;
      break;
  }
  std::map<std::string, int> in_uses;
  for (const auto& b : f.bindings) ++in_uses[b.in];
  for (const auto& [u, n] : in_uses) input_cmp = input_cmp || n > 1;
  if (a && input_cmp && a->has_epsilon())
    info.warnings.push_back(
        "automaton has epsilon transitions: input comparisons are evaluated position by position on label words "
        "(epsilon matches only epsilon)");
  return info;
}

// ---------------------------------------------------------------------------
// Path formulas

bool is_output_kind(AKind k) { return k >= AKind::NotPref; }

namespace {

Atom make_atom(AKind k, int i = -1, int j = -1) {
  Atom a;
  a.kind = k;
  a.i = i;
  a.j = j;
  return a;
}

std::string pname(int i, const VarMaps* maps) {
  if (maps && i >= 0 && i < static_cast<int>(maps->path_names.size())) return maps->path_names[i];
  return "pi" + std::to_string(i);
}

std::string side_str(Side s) { return s == Side::Src ? "<" : ">"; }

std::string pterm(const std::vector<int>& t, const VarMaps* maps, const char* sep) {
  if (t.empty()) return std::string(sep) == "." ? "eps" : "0";
  std::string s;
  for (size_t k = 0; k < t.size(); ++k) s += (k ? sep : "") + std::string("out(") + pname(t[k], maps) + ")";
  return s;
}

}  // namespace

std::string atom_text(const Atom& a, const VarMaps* m) {
  auto p = [&](int i) { return pname(i, m); };
  switch (a.kind) {
    case AKind::Pref: return p(a.i) + " pref_I " + p(a.j);
    case AKind::Member: return p(a.i) + " in_I " + lang_str(a.lang);
    case AKind::LenLe: return p(a.i) + " <=len_I " + p(a.j);
    case AKind::Init: return "init(" + p(a.i) + side_str(a.si) + ")";
    case AKind::Final: return "final(" + p(a.i) + side_str(a.si) + ")";
    case AKind::Colour: return "color(" + p(a.i) + side_str(a.si) + ", #" + std::to_string(a.colour) + ")";
    case AKind::StateEq: return p(a.i) + side_str(a.si) + " =_Q " + p(a.j) + side_str(a.sj);
    case AKind::PathEq: return p(a.i) + " =_P " + p(a.j);
    case AKind::NotPref: return pterm(a.t1, m, ".") + " notpref " + pterm(a.t2, m, ".");
    case AKind::OutMember: return pterm(a.t1, m, ".") + " in " + lang_str(a.lang);
    case AKind::OutLenLe: return "len(" + pterm(a.t1, m, ".") + ") <= len(" + pterm(a.t2, m, ".") + ")";
    case AKind::OutLenLt: return "len(" + pterm(a.t1, m, ".") + ") < len(" + pterm(a.t2, m, ".") + ")";
    case AKind::SumLe: return pterm(a.t1, m, "+") + " <= " + pterm(a.t2, m, "+");
    case AKind::SumLt: return pterm(a.t1, m, "+") + " < " + pterm(a.t2, m, "+");
    case AKind::SumEq: return pterm(a.t1, m, "+") + " = " + pterm(a.t2, m, "+");
    case AKind::SumNe: return pterm(a.t1, m, "+") + " != " + pterm(a.t2, m, "+");
  }
  return "?";
}

std::string tree_text(const ATree& t, const VarMaps* maps) {
  return tree_str(t, [&](const Atom& a) { return atom_text(a, maps); });
}

std::pair<PathFormula, VarMaps> to_path_formula(const PatternFormula& f, const Automaton& a) {
  if (!f.universals.empty()) throw Error("universal prefix must be eliminated before translation");
  VarMaps maps;
  std::vector<ATree> eqs;
  const int n = static_cast<int>(f.bindings.size());
  for (int i = 0; i < n; ++i) maps.path_names.push_back(f.bindings[i].path);

  // State variables: a source occurrence is preferred as representative.
  std::vector<std::pair<std::string, std::pair<int, Side>>> occ;
  for (int i = 0; i < n; ++i) occ.push_back({f.bindings[i].src, {i, Side::Src}});
  for (int i = 0; i < n; ++i) occ.push_back({f.bindings[i].dst, {i, Side::Dst}});
  for (const auto& [name, where] : occ) {
    auto [it, fresh] = maps.state.emplace(name, where);
    if (fresh) continue;
    Atom e = make_atom(AKind::StateEq, it->second.first, where.first);
    e.si = it->second.second;
    e.sj = where.second;
    eqs.push_back(ATree::leaf(e));
    maps.renamed.push_back(name + "@" + f.bindings[where.first].path + side_str(where.second));
  }
  for (int i = 0; i < n; ++i) {
    auto [it, fresh] = maps.input.emplace(f.bindings[i].in, i);
    if (fresh) continue;
    eqs.push_back(ATree::leaf(make_atom(AKind::Pref, it->second, i)));
    eqs.push_back(ATree::leaf(make_atom(AKind::Pref, i, it->second)));
    maps.renamed.push_back(f.bindings[i].in + "@" + f.bindings[i].path);
  }
  for (int i = 0; i < n; ++i) {
    const std::string& v = f.bindings[i].out;
    if (v.empty()) continue;
    auto [it, fresh] = maps.output.emplace(v, i);
    if (fresh) continue;
    maps.renamed.push_back(v + "@" + f.bindings[i].path);
    if (a.kind() == MonoidKind::IntSum) {
      Atom e = make_atom(AKind::SumEq);
      e.t1 = {it->second};
      e.t2 = {i};
      eqs.push_back(ATree::leaf(e));
    } else if (a.kind() == MonoidKind::FreeWord) {
      throw FragmentError("output variable '" + v + "' repeated over a free monoid");
    }
  }

  auto path_of = [&](const std::string& p) {
    for (int i = 0; i < n; ++i)
      if (f.bindings[i].path == p) return i;
    throw Error("unbound path variable '" + p + "'");
  };
  auto st = [&](const std::string& q) {
    auto it = maps.state.find(q);
    if (it == maps.state.end()) throw Error("unbound state variable '" + q + "'");
    return it->second;
  };
  auto in = [&](const std::string& u) {
    auto it = maps.input.find(u);
    if (it == maps.input.end()) throw Error("unbound input variable '" + u + "'");
    return it->second;
  };
  auto term = [&](const Term& t) {
    std::vector<int> r;
    for (const auto& v : t.vars) {
      auto it = maps.output.find(v);
      if (it == maps.output.end()) throw Error("unbound output variable '" + v + "'");
      r.push_back(it->second);
    }
    return r;
  };

  std::function<ATree(const PTree&)> conv = [&](const PTree& t) -> ATree {
    switch (t.kind) {
      case PTree::True: return ATree::constant(true);
      case PTree::False: return ATree::constant(false);
      case PTree::Not: return ATree::negate(conv(t.kids[0]));
      case PTree::And:
      case PTree::Or: {
        std::vector<ATree> ks;
        for (const auto& k : t.kids) ks.push_back(conv(k));
        return t.kind == PTree::And ? ATree::all(std::move(ks)) : ATree::any(std::move(ks));
      }
      case PTree::Leaf: break;
    }
    const PAtom& p = t.atom;
    Atom r;
    switch (p.kind) {
      case PKind::InPref: r = make_atom(AKind::Pref, in(p.x), in(p.y)); break;
      case PKind::InLenLe: r = make_atom(AKind::LenLe, in(p.x), in(p.y)); break;
      case PKind::InMember:
        r = make_atom(AKind::Member, in(p.x));
        r.lang = p.lang;
        break;
      case PKind::Init:
      case PKind::Final:
      case PKind::Colour: {
        auto [i, s] = st(p.x);
        r = make_atom(p.kind == PKind::Init ? AKind::Init : p.kind == PKind::Final ? AKind::Final : AKind::Colour, i);
        r.si = s;
        if (p.kind == PKind::Colour) {
          r.colour = a.colour_index(p.colour);
          if (r.colour < 0) throw Error("unknown colour '" + p.colour + "'");
        }
        break;
      }
      case PKind::StateEq: {
        auto [i, si] = st(p.x);
        auto [j, sj] = st(p.y);
        r = make_atom(AKind::StateEq, i, j);
        r.si = si;
        r.sj = sj;
        break;
      }
      case PKind::PathEq: r = make_atom(AKind::PathEq, path_of(p.x), path_of(p.y)); break;
      case PKind::OutNotPref: r = make_atom(AKind::NotPref); break;
      case PKind::OutMember:
        r = make_atom(AKind::OutMember);
        r.lang = p.lang;
        break;
      case PKind::OutLenLe: r = make_atom(AKind::OutLenLe); break;
      case PKind::OutLe: r = make_atom(AKind::SumLe); break;
      case PKind::OutLt: r = make_atom(AKind::SumLt); break;
      case PKind::OutEq:
        if (a.kind() != MonoidKind::IntSum) throw FragmentError("output equality needs the integer sum monoid");
        r = make_atom(AKind::SumEq);
        break;
      case PKind::OutNe:
        if (a.kind() == MonoidKind::FreeWord) {
          Atom x = make_atom(AKind::NotPref), y = make_atom(AKind::NotPref);
          x.t1 = y.t2 = term(p.t1);
          x.t2 = y.t1 = term(p.t2);
          return ATree::any({ATree::leaf(x), ATree::leaf(y)});
        }
        r = make_atom(AKind::SumNe);
        break;
    }
    if (is_output_kind(r.kind)) {
      r.t1 = term(p.t1);
      r.t2 = term(p.t2);
    }
    return ATree::leaf(r);
  };

  PathFormula pf;
  pf.arity = n;
  eqs.push_back(conv(f.constraint));
  pf.tree = ATree::all(std::move(eqs));
  return {std::move(pf), std::move(maps)};
}

namespace {

ATree push(const ATree& t, bool neg) {
  switch (t.kind) {
    case ATree::True: return ATree::constant(!neg);
    case ATree::False: return ATree::constant(neg);
    case ATree::Not: return push(t.kids[0], !neg);
    case ATree::And:
    case ATree::Or: {
      std::vector<ATree> ks;
      for (const auto& k : t.kids) ks.push_back(push(k, neg));
      bool conj = (t.kind == ATree::And) != neg;
      return conj ? ATree::all(std::move(ks)) : ATree::any(std::move(ks));
    }
    case ATree::Leaf: break;
  }
  if (!neg) return t;
  Atom a = t.atom;
  switch (a.kind) {
    case AKind::NotPref: throw FragmentError("negated notpref reached negation normal form");
    case AKind::OutLenLe: a.kind = AKind::OutLenLt; std::swap(a.t1, a.t2); return ATree::leaf(a);
    case AKind::OutLenLt: a.kind = AKind::OutLenLe; std::swap(a.t1, a.t2); return ATree::leaf(a);
    case AKind::SumLe: a.kind = AKind::SumLt; std::swap(a.t1, a.t2); return ATree::leaf(a);
    case AKind::SumLt: a.kind = AKind::SumLe; std::swap(a.t1, a.t2); return ATree::leaf(a);
    case AKind::SumEq: a.kind = AKind::SumNe; return ATree::leaf(a);
    case AKind::SumNe: a.kind = AKind::SumEq; return ATree::leaf(a);
    default: return ATree::negate(t);
  }
}

bool clauses_rec(const ATree& t, Clause& acc, const std::function<bool(Clause&)>& k);

bool and_rec(const std::vector<ATree>& ks, size_t idx, Clause& acc, const std::function<bool(Clause&)>& k) {
  if (idx == ks.size()) return k(acc);
  return clauses_rec(ks[idx], acc, [&](Clause& c) { return and_rec(ks, idx + 1, c, k); });
}

bool clauses_rec(const ATree& t, Clause& acc, const std::function<bool(Clause&)>& k) {
  switch (t.kind) {
    case ATree::True: return k(acc);
    case ATree::False: return true;
    case ATree::Leaf:
    case ATree::Not: {
      const bool neg = t.kind == ATree::Not;
      const ATree& leaf = neg ? t.kids[0] : t;
      if (leaf.kind != ATree::Leaf) throw Error("clause enumeration needs negation normal form");
      acc.push_back({leaf.atom, neg});
      bool go = k(acc);
      acc.pop_back();
      return go;
    }
    case ATree::And: return and_rec(t.kids, 0, acc, k);
    case ATree::Or:
      for (const auto& kid : t.kids)
        if (!clauses_rec(kid, acc, k)) return false;
      return true;
  }
  return true;
}

}  // namespace

PathFormula nnf(const PathFormula& f) {
  PathFormula r;
  r.arity = f.arity;
  r.tree = push(f.tree, false);
  r.nnf = true;
  return r;
}

bool for_each_clause(const PathFormula& f, const std::function<bool(const Clause&)>& visit) {
  Clause acc;
  const PathFormula g = f.nnf ? f : nnf(f);
  return clauses_rec(g.tree, acc, [&](Clause& c) { return visit(c); });
}

std::vector<Clause> dnf_clauses(const PathFormula& f) {
  std::vector<Clause> out;
  for_each_clause(f, [&](const Clause& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

PatternValuation recover_valuation(const Automaton& a, const std::vector<Path>& paths, const VarMaps& maps) {
  PatternValuation v;
  for (size_t i = 0; i < maps.path_names.size(); ++i) v.paths[maps.path_names[i]] = paths.at(i);
  for (const auto& [q, where] : maps.state) {
    const Path& p = paths.at(where.first);
    v.states[q] = where.second == Side::Src ? p.start : path_end(a, p);
  }
  for (const auto& [u, i] : maps.input) v.inputs[u] = path_labels(a, paths.at(i));
  for (const auto& [o, i] : maps.output) v.outputs[o] = path_output(a, paths.at(i));
  return v;
}

}  // namespace patlog
