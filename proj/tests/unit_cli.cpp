#include <doctest.h>

#include <array>
#include <cstdio>
#include <memory>
#include <string>

#include <json.hpp>

#ifndef PATLOG_BIN
#error "PATLOG_BIN must point at the patlog executable"
#endif

namespace {

struct Run {
  int code;
  std::string out;
};

Run patlog(const std::string& args) {
  const std::string cmd = std::string(PATLOG_BIN) + " " + args + " 2>/dev/null";
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  Run r{-1, {}};
  std::array<char, 4096> buf{};
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(PATLOG_DATA) + "/" + name; }

}  // namespace

TEST_CASE("check verdicts map to exit codes") {
  CHECK(patlog("check " + data("twin_loops.aut") + " " + data("two_values.f")).code == 0);
  const Run unsat = patlog("check " + data("unreachable.aut") + " " + data("reach_all.f"));
  CHECK(unsat.code == 1);
  CHECK(unsat.out.find("q = dead") != std::string::npos);
}

TEST_CASE("json report") {
  const Run r = patlog("check --json " + data("twin_loops.aut") + " " + data("two_values.f"));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"] == "SAT");
  CHECK(j["fragment"] == "PL_Trans");
  CHECK(j["witness"]["paths"].contains("p"));
  CHECK(j["statistics"].contains("configurations"));
}

TEST_CASE("catalog") {
  CHECK(patlog("catalog functional " + data("twin_loops.aut")).code == 1);
  CHECK(patlog("catalog k-valued -k 2 " + data("twin_loops.aut")).code == 0);
  CHECK(patlog("catalog functional " + data("weights.aut")).code == 1);
  const Run w = patlog("catalog k-ambiguous " + data("ambiguous.aut"));
  CHECK(w.out.find("in-class") != std::string::npos);
}

TEST_CASE("oracle") {
  CHECK(patlog("oracle --max-len 3 " + data("twin_loops.aut") + " " + data("two_values.f")).code == 0);
  CHECK(patlog("oracle --max-len 0 " + data("twin_loops.aut") + " " + data("two_values.f")).code == 1);
}

TEST_CASE("errors") {
  CHECK(patlog("").code == 3);
  CHECK(patlog("catalog functional -k 0 " + data("twin_loops.aut")).code == 3);
  CHECK(patlog("catalog k-valued -k 0 " + data("twin_loops.aut")).code == 3);
  CHECK(patlog("catalog functional -k 2 " + data("twin_loops.aut")).code == 3);
  CHECK(patlog("catalog finite-valued " + data("weights.aut")).code == 3);
  CHECK(patlog("catalog no-such-property " + data("weights.aut")).code == 3);
  CHECK(patlog("check " + data("missing.aut") + " " + data("two_values.f")).code == 4);
  CHECK(patlog("check " + data("two_values.f") + " " + data("two_values.f")).code == 4);
  CHECK(patlog("check " + data("twin_loops.aut") + " " + data("pcp.f")).code == 5);
  CHECK(patlog("check --memo-cap 2 " + data("twin_loops.aut") + " " + data("two_values.f")).code == 6);
}
