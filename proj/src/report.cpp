#include "patlog/report.hpp"

#include <algorithm>
#include <sstream>

#include "patlog/semantics.hpp"

namespace patlog {

using nlohmann::json;

namespace {

json value_json(const Automaton& a, const Value& v) {
  switch (a.kind()) {
    case MonoidKind::Trivial: return nullptr;
    case MonoidKind::IntSum: return v.num;
    case MonoidKind::FreeWord: {
      json w = json::array();
      for (int c : v.word) w.push_back(a.gamma_text(c));
      return w;
    }
  }
  return nullptr;
}

Value value_of(const Automaton& a, const json& j) {
  switch (a.kind()) {
    case MonoidKind::Trivial: return Value::unit();
    case MonoidKind::IntSum: return Value::integer(j.get<int64_t>());
    case MonoidKind::FreeWord: {
      const auto& gamma = a.monoid().gamma;
      std::vector<int> w;
      for (const auto& s : j) {
        auto it = std::find(gamma.begin(), gamma.end(), s.get<std::string>());
        if (it == gamma.end()) throw Error("unknown output symbol '" + s.get<std::string>() + "'");
        w.push_back(static_cast<int>(it - gamma.begin()));
      }
      return Value::of_word(std::move(w));
    }
  }
  return Value::unit();
}

int state_of(const Automaton& a, const json& j) {
  const int q = a.state_index(j.get<std::string>());
  if (q < 0) throw Error("unknown state '" + j.get<std::string>() + "'");
  return q;
}

int label_of(const Automaton& a, const std::string& s) {
  if (s == "eps") return kEps;
  const int l = a.symbol_index(s);
  if (l < 0) throw Error("unknown input symbol '" + s + "'");
  return l;
}

std::string tuple_text(const std::map<std::string, std::string>& t) {
  std::string s;
  for (const auto& [var, q] : t) s += (s.empty() ? "" : ", ") + var + " = " + q;
  return s;
}

}  // namespace

json valuation_json(const Automaton& a, const PatternValuation& v) {
  json j;
  j["paths"] = json::object();
  for (const auto& [name, p] : v.paths) {
    json steps = json::array();
    for (int t : p.trans) {
      const Transition& tr = a.transition(t);
      steps.push_back({{"src", a.state_name(tr.src)},
                       {"label", a.label_text(tr.label)},
                       {"output", value_json(a, a.value(tr.value))},
                       {"dst", a.state_name(tr.dst)}});
    }
    j["paths"][name] = {{"start", a.state_name(p.start)}, {"steps", steps}};
  }
  j["states"] = json::object();
  for (const auto& [name, q] : v.states) j["states"][name] = a.state_name(q);
  j["inputs"] = json::object();
  for (const auto& [name, w] : v.inputs) {
    json word = json::array();
    for (int l : w) word.push_back(a.label_text(l));
    j["inputs"][name] = word;
  }
  j["outputs"] = json::object();
  for (const auto& [name, val] : v.outputs) j["outputs"][name] = value_json(a, val);
  return j;
}

PatternValuation valuation_from_json(const Automaton& a, const json& j) {
  PatternValuation v;
  for (const auto& [name, p] : j.at("paths").items()) {
    Path path;
    path.start = state_of(a, p.at("start"));
    int at = path.start;
    for (const auto& s : p.at("steps")) {
      const int src = state_of(a, s.at("src"));
      const int label = label_of(a, s.at("label").get<std::string>());
      const Value out = value_of(a, s.at("output"));
      const int dst = state_of(a, s.at("dst"));
      if (src != at) throw Error("path '" + name + "' is not contiguous");
      int found = -1;
      for (int t : a.out(src)) {
        const Transition& tr = a.transition(t);
        if (tr.label == label && tr.dst == dst && a.value(tr.value) == out) found = t;
      }
      if (found < 0) throw Error("path '" + name + "' uses a missing transition");
      path.trans.push_back(found);
      at = dst;
    }
    v.paths[name] = path;
  }
  for (const auto& [name, q] : j.at("states").items()) v.states[name] = state_of(a, q);
  for (const auto& [name, w] : j.at("inputs").items()) {
    std::vector<int> word;
    for (const auto& s : w) word.push_back(label_of(a, s.get<std::string>()));
    v.inputs[name] = word;
  }
  for (const auto& [name, val] : j.at("outputs").items()) v.outputs[name] = value_of(a, val);
  return v;
}

RunReport report_from_check(const Automaton& a, const PatternFormula& f, const CheckResult& r) {
  RunReport out;
  out.fragment = fragment_name(r.fragment.tag);
  out.warnings = r.fragment.warnings;
  out.verdict = verdict_name(r.kind);
  out.method = method_name(r.method);
  out.formula_text = formula_text(f);
  out.has_witness = r.kind == Verdict::Sat && r.has_witness;
  if (out.has_witness) out.witness = r.witness;
  if (r.kind != Verdict::Sat)
    for (size_t k = 0; k < r.failing_tuple.size() && k < f.universals.size(); ++k)
      out.failing_tuple[f.universals[k]] = a.state_name(r.failing_tuple[k]);
  out.clauses = r.clauses;
  out.spec_sets = r.spec_sets;
  out.configurations = r.configurations;
  out.control_states = r.control_states;
  out.bound_used = r.bound_used;
  out.explain = r.explain;
  return out;
}

RunReport report_from_membership(const Automaton& a, const PropertySpec& p, const Membership& m) {
  const auto formulas = catalog_formulas(p, a);
  RunReport out;
  out.property = p.name;
  if (property_info(p.name).takes_k) out.property += " (k = " + std::to_string(p.k) + ")";
  if (m.formula >= 0) {
    out = report_from_check(a, formulas.at(m.formula), m.results.at(m.formula));
    out.property = p.name;
    if (property_info(p.name).takes_k) out.property += " (k = " + std::to_string(p.k) + ")";
    out.formula = m.formula;
  } else if (!m.results.empty()) {
    out.fragment = fragment_name(m.results.front().fragment.tag);
    for (const auto& r : m.results)
      for (const auto& w : r.fragment.warnings)
        if (std::find(out.warnings.begin(), out.warnings.end(), w) == out.warnings.end()) out.warnings.push_back(w);
    out.method = method_name(m.results.back().method);
  }
  out.verdict = membership_name(m.kind);
  out.clauses = out.spec_sets = out.configurations = out.control_states = 0;
  out.bound_used = 0;
  out.explain.clear();
  for (size_t i = 0; i < m.results.size(); ++i) {
    const CheckResult& r = m.results[i];
    out.clauses += r.clauses;
    out.spec_sets += r.spec_sets;
    out.configurations += r.configurations;
    out.control_states += r.control_states;
    out.bound_used = std::max(out.bound_used, r.bound_used);
    out.explain.push_back("formula " + std::to_string(i) + ": " + verdict_name(r.kind));
    for (const auto& line : r.explain) out.explain.push_back("  " + line);
  }
  return out;
}

RunReport report_from_oracle(const Automaton& a, const PatternFormula& f, const OracleResult& r, int max_len) {
  RunReport out;
  out.formula_text = formula_text(f);
  out.verdict = r.sat ? "SAT" : "NO-WITNESS";
  out.method = "enumeration up to length " + std::to_string(max_len);
  out.has_witness = r.sat;
  if (r.sat) out.witness = r.witness;
  for (size_t k = 0; k < r.failing_tuple.size() && k < f.universals.size(); ++k)
    out.failing_tuple[f.universals[k]] = a.state_name(r.failing_tuple[k]);
  out.configurations = r.nodes;
  out.bound_used = static_cast<uint64_t>(max_len);
  return out;
}

json report_json(const Automaton& a, const RunReport& r) {
  json j;
  j["command"] = r.command;
  j["verdict"] = r.verdict;
  if (!r.property.empty()) j["property"] = r.property;
  if (r.formula >= 0) j["formula_index"] = r.formula;
  if (!r.fragment.empty()) j["fragment"] = r.fragment;
  j["warnings"] = r.warnings;
  j["method"] = r.method;
  j["witness"] = r.has_witness ? valuation_json(a, r.witness) : json(nullptr);
  if (!r.failing_tuple.empty()) j["failing_tuple"] = r.failing_tuple;
  j["statistics"] = {{"clauses", r.clauses},
                     {"spec_sets", r.spec_sets},
                     {"configurations", r.configurations},
                     {"control_states", r.control_states},
                     {"bound_used", r.bound_used},
                     {"wall_ms", r.wall_ms}};
  if (!r.explain.empty()) j["explain"] = r.explain;
  return j;
}

std::string report_text(const Automaton& a, const RunReport& r, bool witness, bool explain) {
  std::ostringstream s;
  s << r.verdict;
  if (!r.property.empty()) s << "  " << r.property;
  s << "\n";
  for (const auto& w : r.warnings) s << "warning: " << w << "\n";
  if (!r.failing_tuple.empty()) s << "state tuple: " << tuple_text(r.failing_tuple) << "\n";
  if (witness && r.has_witness) {
    if (r.formula >= 0) s << "violated by formula " << r.formula << "\n";
    for (const auto& [name, p] : r.witness.paths) s << "  " << name << " = " << path_text(a, p) << "\n";
    for (const auto& [name, q] : r.witness.states) s << "  " << name << " = " << a.state_name(q) << "\n";
    for (const auto& [name, w] : r.witness.inputs) s << "  " << name << " = " << a.word_text(w) << "\n";
    for (const auto& [name, v] : r.witness.outputs) s << "  " << name << " = " << a.value_text(v) << "\n";
  }
  if (explain) {
    s << "fragment: " << (r.fragment.empty() ? "-" : r.fragment) << "\n";
    if (!r.formula_text.empty()) s << "formula: " << r.formula_text << "\n";
    s << "method: " << r.method << "\n";
    s << "clauses: " << r.clauses << ", spec sets: " << r.spec_sets << ", configurations: " << r.configurations
      << ", control states: " << r.control_states << ", bound: " << r.bound_used << ", wall: " << r.wall_ms
      << " ms\n";
    for (const auto& line : r.explain) s << "  " << line << "\n";
  }
  return s.str();
}

}  // namespace patlog
