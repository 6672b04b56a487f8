#include <doctest.h>

#include <filesystem>

#include "clhavoc/frontend.hpp"
#include "clhavoc/reduction.hpp"
#include "common.hpp"

using namespace clhavoc;

namespace {
std::vector<std::string> corpus() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(FIXTURE_DIR))
    if (e.path().extension() == ".clsys") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

const char* kTiny = R"(
behavior { ports p; states a; }
sid { A(x) <- comp(x : a); }
)";
}  // namespace

TEST_CASE("every fixture survives parse, render, parse") {
  auto files = corpus();
  REQUIRE(files.size() >= 9);
  for (const auto& path : files) {
    CAPTURE(path);
    SystemFile f = parse_system_file(path);
    std::string once = render(f);
    SystemFile g = parse_system(once);
    CHECK(g == f);
    CHECK(render(g) == once);
  }
}

TEST_CASE("macro expansion") {
  SystemFile f = load("ring2.clsys");
  // 9 Ring and 9 Chain instances; 18 recursive Chain rules, 9 Ring rules, 3 base rules
  CHECK(f.sid.predicates().size() == 18);
  CHECK(f.sid.rules.size() == 30);
  CHECK(f.sid.defines("Chain_2_1"));
  CHECK(load("ring.clsys").sid.rules.size() == 15);
}

TEST_CASE("the tree with linked leaves has four rules") {
  SystemFile f = load("tll.clsys");
  CHECK(f.sid.rules.size() == 4);
  CHECK(f.sid.arity("Node") == 3);
  CHECK(f.sid.arity("Root") == 0);
}

TEST_CASE("blocks and queries") {
  SystemFile f = load("configs.clsys");
  CHECK(f.sid.rules.empty());
  CHECK(f.configs.size() == 5);
  REQUIRE(f.config("ring3"));
  CHECK(f.config("ring3")->config.components().size() == 3);
  REQUIRE(f.queries.size() == 1);
  CHECK(f.queries[0].kind == Query::Kind::Simulate);

  SystemFile r = load("ring2.clsys");
  REQUIRE(r.queries.size() == 2);
  CHECK(r.queries[0].kind == Query::Kind::Entail);
  CHECK(render(r.queries[0].rhs) == "exists x, y . <x.out, y.in> * Chain_1_1(y, x)");
  CHECK(load("bad.clsys").queries[0].target == "TH");
}

TEST_CASE("comments and both comment styles") {
  SystemFile f = parse_system(std::string("# one\n// two\n") + kTiny + "// tail");
  CHECK(f.sid.rules.size() == 1);
}

TEST_CASE("syntax errors carry a position") {
  std::string text = "behavior { ports in, out; states H; }\nsid {\n  A(x, y) <- <x.out y.in>;\n}\n";
  try {
    parse_system(text);
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.col() == 21);  // at y, where the comma belongs
  }
  CHECK_THROWS_AS(parse_system("behavior { ports p; states a; trans a -q-> a; }"), ParseError);
  CHECK_THROWS_AS(parse_system("behavior { ports p; states a; }\nsid { A(x) <- comp(x : b); }"), ParseError);
  CHECK_THROWS_AS(parse_system("behavior { ports p; states a; }\nsid { A(x) <- B(x); }"), ParseError);
  CHECK_THROWS_AS(parse_system("behavior { ports p; states a; }\nsid { A(x) <- comp(y); }"), ParseError);
  CHECK_THROWS_AS(parse_system("behavior { ports p; states a; }\nsid { A(x) <- comp(x); A(x, y) <- comp(x); }"),
                  ParseError);
  CHECK_THROWS_AS(parse_system("sid { A() <- emp; } sid {"), ParseError);
}

TEST_CASE("rendering is deterministic") {
  SystemFile f = load("formulas.clsys");
  CHECK(render(f) == render(load("formulas.clsys")));
  CHECK(render(parse_formula("exists u . comp(x) * <x.p, u.q>")) == "exists u . comp(x) * <x.p, u.q>");
}

TEST_CASE("reduced output re-parses and reduces again to the same shape") {
  SystemFile f = load("ring.clsys");
  ReductionResult r = reduce_havoc_to_entailment(f.sid, "Ring_1_1", {true, false});
  SystemFile g = parse_system(render_reduced(r));
  CHECK(g.sid == r.combined);
  REQUIRE(g.queries.size() == r.entailments.size());
  // reducing the original predicate inside the re-parsed file repeats the construction
  ReductionResult again = reduce_havoc_to_entailment(g.sid, "Ring_1_1", {true, false});
  CHECK(again.image_states == r.image_states);
  CHECK(again.image_transitions == r.image_transitions);
  CHECK(again.derived.rules.size() == r.derived.rules.size());
  CHECK(class_equiv(again.derived, r.derived).equivalent);
}
