#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "patlog/catalog.hpp"
#include "patlog/checker.hpp"
#include "patlog/semantics.hpp"

namespace patlog {

struct RunReport {
  std::string command;  // echo of the invocation
  std::string fragment;
  std::vector<std::string> warnings;
  std::string verdict;  // SAT / UNSAT / UNKNOWN, or the catalog membership
  std::string method;
  std::string property;
  int formula = -1;  // catalog: index of the deciding formula
  std::string formula_text;

  bool has_witness = false;
  PatternValuation witness;
  std::map<std::string, std::string> failing_tuple;  // ∀ variable -> state

  size_t clauses = 0;
  size_t spec_sets = 0;
  size_t configurations = 0;
  size_t control_states = 0;
  uint64_t bound_used = 0;
  double wall_ms = 0;
  std::vector<std::string> explain;
};

RunReport report_from_check(const Automaton& a, const PatternFormula& f, const CheckResult& r);
RunReport report_from_membership(const Automaton& a, const PropertySpec& p, const Membership& m);
RunReport report_from_oracle(const Automaton& a, const PatternFormula& f, const OracleResult& r, int max_len);

nlohmann::json report_json(const Automaton& a, const RunReport& r);
std::string report_text(const Automaton& a, const RunReport& r, bool witness, bool explain);

nlohmann::json valuation_json(const Automaton& a, const PatternValuation& v);
// Inverse of valuation_json; throws Error on records that match no transition.
PatternValuation valuation_from_json(const Automaton& a, const nlohmann::json& j);

}  // namespace patlog
