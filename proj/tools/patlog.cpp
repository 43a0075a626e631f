#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "patlog/catalog.hpp"
#include "patlog/report.hpp"
#include "patlog/semantics.hpp"

using namespace patlog;

namespace {

// Exit codes above 2, by error class.
enum ExitCode {
  kUsage = 3,
  kParse = 4,
  kFragment = 5,
  kResource = 6,
  kInternal = 7,
};

const char* kExitHelp =
    "Exit codes:\n"
    "  check    0 SAT, 1 UNSAT, 2 UNKNOWN\n"
    "  catalog  0 in-class, 1 not-in-class, 2 unknown\n"
    "  oracle   0 SAT, 1 no witness up to --max-len\n"
    "  3 usage error, 4 parse error, 5 fragment rejected, 6 resource limit,\n"
    "  7 internal error (a witness failed re-verification)\n";

struct Common {
  std::optional<uint64_t> bound;
  double safety_factor = 4.0;
  size_t memo_cap = kDefaultMemoCap;
  bool witness = false;
  bool json = false;
  bool explain = false;
};

void add_common(CLI::App* cmd, Common& c, bool search) {
  if (search) {
    cmd->add_option("--bound", c.bound, "witness length bound for counter search (0 gives UNKNOWN when needed)");
    cmd->add_option("--safety-factor", c.safety_factor, "multiplier on the default bound")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--memo-cap", c.memo_cap, "maximum memoised configurations per acceptor")
        ->envname("PATLOG_MEMO_CAP")
        ->check(CLI::PositiveNumber);
  }
  cmd->add_flag("--witness", c.witness, "print the witness valuation");
  cmd->add_flag("--json", c.json, "emit a JSON report");
  cmd->add_flag("--explain", c.explain, "print fragment, clause counts and acceptor statistics");
}

CheckOptions options_of(const Common& c) {
  CheckOptions o;
  o.search.memo_cap = c.memo_cap;
  o.search.safety_factor = c.safety_factor;
  if (c.bound) {
    o.search.witness_bound = *c.bound;
    o.search.bound_policy = BoundPolicy::Explicit;
  }
  return o;
}

PatternFormula load_formula(const std::string& path, const Automaton& a) {
  const std::string dir = std::filesystem::path(path).parent_path().string();
  try {
    return parse_formula(read_file(path), FormulaContext::of(a, dir));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void emit(const Automaton& a, RunReport& r, const Common& c, std::chrono::steady_clock::time_point t0) {
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (c.json)
    std::cout << report_json(a, r).dump(2) << "\n";
  else
    std::cout << report_text(a, r, c.witness, c.explain);
}

std::string echo(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(argv[i]);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checking of pattern formulas over automata with outputs"};
  app.footer(kExitHelp);
  app.require_subcommand(1);

  Common common;
  std::string aut_path, formula_path, property;
  std::optional<int> k;
  int max_len = 6;

  auto* check = app.add_subcommand("check", "decide a pattern formula on an automaton");
  check->add_option("automaton", aut_path)->required();
  check->add_option("formula", formula_path)->required();
  add_common(check, common, true);

  auto* catalog = app.add_subcommand("catalog", "decide a structural property");
  catalog->add_option("property", property)->required();
  catalog->add_option("automaton", aut_path)->required();
  catalog->add_option("-k", k, "parameter of k-ambiguous, k-valued, k-sequential");
  add_common(catalog, common, true);

  auto* oracle = app.add_subcommand("oracle", "brute-force evaluation over short paths");
  oracle->add_option("automaton", aut_path)->required();
  oracle->add_option("formula", formula_path)->required();
  oracle->add_option("--max-len", max_len, "longest path enumerated")->required()->check(CLI::NonNegativeNumber);
  add_common(oracle, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*check) {
      Automaton a = load_automaton(aut_path);
      PatternFormula f = load_formula(formula_path, a);
      CheckResult r = check_formula(a, f, options_of(common));
      RunReport rep = report_from_check(a, f, r);
      rep.command = echo(argc, argv);
      emit(a, rep, common, t0);
      return r.kind == Verdict::Sat ? 0 : r.kind == Verdict::Unsat ? 1 : 2;
    }
    if (*catalog) {
      const PropertyInfo& info = property_info(property);
      PropertySpec p{property, 1};
      if (k) {
        if (!info.takes_k) {
          std::cerr << "error: -k does not apply to " << property << "\n";
          return kUsage;
        }
        if (*k < 1) {
          std::cerr << "error: -k must be at least 1\n";
          return kUsage;
        }
        p.k = *k;
      }
      Automaton a = load_automaton(aut_path);
      if (!property_applies(property, a.kind())) {
        std::cerr << "error: " << property << " does not apply to " << monoid_name(a.kind()) << " automata\n";
        return kUsage;
      }
      Membership m = check_property(a, p, options_of(common));
      RunReport rep = report_from_membership(a, p, m);
      rep.command = echo(argc, argv);
      emit(a, rep, common, t0);
      return m.kind == Membership::InClass ? 0 : m.kind == Membership::NotInClass ? 1 : 2;
    }
    if (*oracle) {
      Automaton a = load_automaton(aut_path);
      PatternFormula f = load_formula(formula_path, a);
      OracleResult r = oracle_check(a, f, max_len);
      RunReport rep = report_from_oracle(a, f, r, max_len);
      rep.command = echo(argc, argv);
      emit(a, rep, common, t0);
      return r.sat ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const FragmentError& e) {
    std::cerr << "fragment error: " << e.what() << "\n";
    return kFragment;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const SoundnessError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
