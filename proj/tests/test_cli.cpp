#include <sstream>

#include "doctest.h"
#include "phodge/cli.hpp"

using namespace phodge;
using namespace phodge::cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run phodge_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus_file(const std::string& name) { return std::string(PHODGE_CORPUS_DIR) + "/" + name; }

std::vector<Json> json_lines(const std::string& text) {
  std::vector<Json> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) v.push_back(Json::parse(line));
  return v;
}

const char* kSupersingular =
    R"({"id": "ss", "kind": "filtered_module", "payload": {"p": 3, "phi": [[0, -3], [1, 0]],
        "filtration": [{"jump": 0, "basis": [[1, 0], [0, 1]]}, {"jump": 1, "basis": [[1, 0]]}]}})";

std::string corpus_of(const std::string& entries) { return R"({"schema": 1, "entries": [)" + entries + "]}"; }

}  // namespace

TEST_CASE("parse_corpus") {
  SUBCASE("empty documents") {
    auto a = parse_corpus("[]");
    CHECK(a.issues.empty());
    CHECK(a.entries.empty());
    auto b = parse_corpus(corpus_of(""));
    CHECK(b.issues.empty());
    CHECK(b.entries.empty());
  }
  SUBCASE("a valid entry") {
    auto c = parse_corpus(corpus_of(kSupersingular));
    REQUIRE(c.issues.empty());
    REQUIRE(c.entries.size() == 1);
    CHECK(c.entries[0].id == "ss");
    CHECK_FALSE(c.entries[0].expected);
  }
  SUBCASE("missing phi points at the field") {
    auto c = parse_corpus(corpus_of(R"({"id": "x", "kind": "filtered_module", "payload": {"p": 3, "filtration": []}})"));
    REQUIRE(c.issues.size() == 1);
    CHECK(c.issues[0].location == "entries[0].payload.phi");
  }
  SUBCASE("malformed JSON reports the line") {
    auto c = parse_corpus("{\"schema\": 1,\n \"entries\": [\n {\"id\": \"a\" \"kind\": 1}]}", "f.json");
    REQUIRE(c.issues.size() == 1);
    CHECK(c.issues[0].location == "f.json: line 3");
  }
  SUBCASE("every bad entry is reported") {
    auto c = parse_corpus(corpus_of(std::string(kSupersingular) + "," + kSupersingular +
                                    R"(, {"id": "k", "kind": "sheaf", "payload": {}})" +
                                    R"(, {"id": "w", "kind": "witt_computation", "payload": {"p": 4, "a": [1]}})" +
                                    R"(, {"id": "e", "kind": "witt_computation", "payload": {"p": 2, "op": "neg", "a": [1]},
                                          "expected": {"admissible": {}}})"));
    REQUIRE(c.issues.size() == 4);
    CHECK(c.issues[0].location == "entries[1].id");
    CHECK(c.issues[1].location == "entries[2].kind");
    CHECK(c.issues[2].location == "entries[3].payload.p");
    CHECK(c.issues[3].location == "entries[4].expected.admissible");
    CHECK(c.entries.size() == 1);
  }
  SUBCASE("schema version") {
    auto c = parse_corpus(R"({"schema": 2, "entries": []})");
    REQUIRE(c.issues.size() == 1);
    CHECK(c.issues[0].location == "schema");
  }
  SUBCASE("unknown settings") {
    auto c = parse_corpus(corpus_of(R"({"id": "w", "kind": "witt_computation",
        "payload": {"p": 2, "op": "neg", "a": [1], "settings": {"speed": 3}}})"));
    REQUIRE(c.issues.size() == 1);
    CHECK(c.issues[0].location == "entries[0].payload.settings.speed");
  }
}

TEST_CASE("entry settings override the command line") {
  auto c = parse_corpus(corpus_of(R"({"id": "w", "kind": "witt_computation",
      "payload": {"p": 2, "op": "neg", "a": [1], "settings": {"prec": 20, "window": [-4, 4]}}})"));
  REQUIRE(c.issues.empty());
  Settings g;
  g.order = 5;
  Settings s = entry_settings(g, c.entries[0]);
  CHECK(s.prec == 20);
  CHECK(s.order == 5);
  CHECK(s.window_lo == -4);
  CHECK(s.window_hi == 4);
}

TEST_CASE("commands on entries") {
  auto c = parse_corpus(corpus_of(kSupersingular));
  REQUIRE(c.issues.empty());
  Outcome o = run_entry("polygon", c.entries[0], Settings{});
  CHECK(o.status == Status::Ok);
  CHECK(o.result["newton"] == Json::parse("[[0,0],[2,1]]"));
  CHECK(o.result["hodge"] == Json::parse("[[0,0],[1,0],[2,1]]"));
  CHECK(o.summary == "Newton (0,0)-(2,1); Hodge (0,0)-(1,0)-(2,1)");

  Outcome a = run_entry("admissible", c.entries[0], Settings{});
  CHECK(a.status == Status::Ok);
  CHECK(a.result["verdict"] == "Admissible");

  Outcome k = run_entry("solve", c.entries[0], Settings{});
  CHECK(k.status == Status::Error);
  CHECK(k.result["error"] == "KindMismatch");
}

TEST_CASE("regression") {
  std::string ok = R"({"id": "w", "kind": "witt_computation", "payload": {"p": 2, "op": "add", "a": [1, 0], "b": [1, 0]},
                       "expected": {"witt": {"value": [2, -1]}}})";
  std::string bad = R"({"id": "w", "kind": "witt_computation", "payload": {"p": 2, "op": "add", "a": [1, 0], "b": [1, 0]},
                        "expected": {"witt": {"value": [2, 1]}}})";
  std::string obstruction = R"({"id": "r", "kind": "connection_module",
      "payload": {"field": {"p": 3, "f": 1}, "rank": 2, "pole": "logarithmic", "A": [[0, 0], [0, 1]]},
      "expected": {"solve": {"error": "ResonanceObstruction"}}})";
  auto c = parse_corpus(corpus_of(ok + "," + kSupersingular + "," + obstruction));
  REQUIRE(c.issues.empty());
  CHECK(regress_entry(c.entries[0], Settings{}).status == Status::Ok);
  CHECK(regress_entry(c.entries[1], Settings{}).status == Status::Skipped);
  CHECK(regress_entry(c.entries[2], Settings{}).status == Status::Ok);

  auto d = parse_corpus(corpus_of(bad));
  Outcome m = regress_entry(d.entries[0], Settings{});
  CHECK(m.status == Status::Fail);
  REQUIRE(m.result["mismatches"].size() == 1);
  CHECK(m.result["mismatches"][0]["expected"] == Json::parse("[2,1]"));
  CHECK(m.result["mismatches"][0]["got"] == Json::parse("[2,-1]"));
  CHECK(m.summary == "witt.value: expected [2,1], got [2,-1]");
}

TEST_CASE("exit codes") {
  Outcome ok, fail, err, skip;
  fail.status = Status::Fail;
  err.status = Status::Error;
  skip.status = Status::Skipped;
  CHECK(exit_code({}) == 0);
  CHECK(exit_code({ok, skip}) == 0);
  CHECK(exit_code({ok, fail, skip}) == 1);
  CHECK(exit_code({fail, err}) == 2);
}

TEST_CASE("command line") {
  SUBCASE("witt add from operands") {
    Run r = phodge_run({"witt", "add", "--p", "2", "1,0", "1,0", "--json"});
    CHECK(r.code == 0);
    auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0]["result"]["value"] == Json::parse("[2,-1]"));
    Run m = phodge_run({"witt", "add", "--p", "3", "--modulus", "2", "(1,0)", "(1,0)"});
    CHECK(m.code == 0);
    CHECK(m.out.find("add = (2,7)") != std::string::npos);
  }
  SUBCASE("shipped corpus") {
    Run r = phodge_run({"regress", "--corpus", corpus_file("examples.json"), "--json"});
    CHECK(r.code == 0);
    auto lines = json_lines(r.out);
    REQUIRE_FALSE(lines.empty());
    CHECK(lines.back()["summary"]["skipped"] == 1);
    CHECK(lines.back()["summary"]["fail"] == 0);
  }
  SUBCASE("parallel output keeps input order") {
    Run a = phodge_run({"regress", "--corpus", corpus_file("examples.json"), "--json"});
    Run b = phodge_run({"regress", "--corpus", corpus_file("examples.json"), "--json", "--jobs", "4"});
    CHECK(a.out == b.out);
  }
  SUBCASE("corrupted fixture") {
    Run r = phodge_run({"regress", "--corpus", corpus_file("fixtures/corrupted.json")});
    CHECK(r.code == 1);
    CHECK(r.out.find("admissible.tN: expected 2, got 1") != std::string::npos);
  }
  SUBCASE("schema violations") {
    Run r = phodge_run({"regress", "--corpus", corpus_file("fixtures/schema_violation.json")});
    CHECK(r.code == 2);
    CHECK(r.err.find("entries[0].payload.phi") != std::string::npos);
    CHECK(phodge_run({"regress", "--corpus", corpus_file("fixtures/malformed.json")}).code == 2);
    CHECK(phodge_run({"regress", "--corpus", corpus_file("no-such-file.json")}).code == 2);
  }
  SUBCASE("usage errors") {
    CHECK(phodge_run({}).code == 2);
    CHECK(phodge_run({"frobnicate", "--corpus", corpus_file("examples.json")}).code == 2);
    CHECK(phodge_run({"admissible", "--prec", "zero"}).code == 2);
    CHECK(phodge_run({"--help"}).code == 0);
  }
  SUBCASE("single entries") {
    Run r = phodge_run({"polygon", "--corpus", corpus_file("examples.json"), "--entry", "supersingular"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Newton (0,0)-(2,1); Hodge (0,0)-(1,0)-(2,1)") != std::string::npos);
    CHECK(phodge_run({"solve", "--corpus", corpus_file("examples.json"), "--entry", "supersingular"}).code == 2);
    CHECK(phodge_run({"admissible", "--corpus", corpus_file("examples.json"), "--entry", "missing"}).code == 2);
    CHECK(phodge_run({"admissible", "--corpus", corpus_file("examples.json"), "--entry", "ordinary-bad"}).code == 1);
    Run t = phodge_run({"twist", "--corpus", corpus_file("examples.json"), "--entry", "ordinary-good", "--by", "-2",
                        "--json"});
    auto lines = json_lines(t.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0]["result"]["tH_shift"] == 4);
    CHECK(lines[0]["result"]["tN_shift"] == 4);
  }
}
