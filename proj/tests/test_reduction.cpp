#include <doctest.h>

#include "clhavoc/oracle.hpp"
#include "clhavoc/reduction.hpp"
#include "common.hpp"

using namespace clhavoc;

namespace {
Var v(const std::string& n) { return Var::named(n); }

bool all_hold(const ReductionResult& r, int depth) {
  for (const auto& e : r.entailments) {
    auto xs = standard_params(e.arity);
    if (!entails_bounded(r.combined, pred(e.lhs, xs), pred(e.rhs, xs), depth).holds) return false;
  }
  return true;
}

PredRelation by_origin(const ReductionResult& r) {
  return [&r](const std::string& a, const std::string& b) {
    auto it = r.origin.find(b);
    return it != r.origin.end() && it->second == a;
  };
}
}  // namespace

TEST_CASE("tightness gate") {
  Sid ring = load("ring.clsys").sid;
  CHECK_THROWS_AS(reduce_havoc_to_entailment(ring, "Ring_1_1", {}), TightnessNotEstablished);
  CHECK(reduce_havoc_to_entailment(ring, "Ring_1_1", {true, false}).tightness == "assumed");
  CHECK(reduce_havoc_to_entailment(load("pcring.clsys").sid, "pcRing_1_1", {}).tightness == "PCR");
  // only the rules below the predicate matter
  CHECK(reduce_havoc_to_entailment(ring, "Chain_1_1", {}).tightness == "PCR");
}

TEST_CASE("token ring entailments hold") {
  Sid ring = load("ring.clsys").sid;
  ReductionResult r = reduce_havoc_to_entailment(ring, "Ring_1_1", {true, false});
  REQUIRE_FALSE(r.entailments.empty());
  for (const auto& e : r.entailments) {
    CHECK(e.rhs == "Ring_1_1");
    CHECK(r.origin.at(e.lhs) == "Ring_1_1");
  }
  CHECK(all_hold(r, 5));
  CHECK(r.entailments[0].str() == r.entailments[0].lhs + "() |= Ring_1_1()");
}

TEST_CASE("the token about to move is caught") {
  Sid bad = load("bad.clsys").sid;
  ReductionResult r = reduce_havoc_to_entailment(bad, "TH", {true, false});
  REQUIRE_FALSE(r.entailments.empty());
  CHECK_FALSE(all_hold(r, 1));
  CHECK(r.entailments[0].str() == r.entailments[0].lhs + "(x1, x2) |= TH(x1, x2)");
}

TEST_CASE("no interaction atoms, no targets") {
  Sid sid;
  sid.behavior = token_behavior();
  sid.rules.push_back(Rule{"A", {v("x")}, comp_in(v("x"), "T")});
  ReductionResult r = reduce_havoc_to_entailment(sid, "A", {});
  CHECK(r.targets.empty());
  CHECK(r.entailments.empty());
}

TEST_CASE("derived rules are the original ones up to states") {
  for (const auto& [f, p] : std::vector<std::pair<std::string, std::string>>{
           {"ring.clsys", "Ring_1_1"}, {"tll_linked.clsys", "Root"}, {"pcring.clsys", "pcRing_1_1"}}) {
    CAPTURE(f);
    Sid sid = load(f).sid;
    ReductionResult r = reduce_havoc_to_entailment(sid, p, {true, false});
    Sid orig = restrict_sid(sid, p);
    ClassEquivResult eq = class_equiv(orig, r.derived, by_origin(r));
    CHECK(eq.equivalent);
    CHECK(eq.pairing.size() == orig.rules.size());
    CHECK(eq.pairing_back.size() == r.derived.rules.size());
    for (const auto& [i, j] : eq.pairing) CHECK(r.origin.at(r.derived.rules[j].pred) == orig.rules[i].pred);
  }
}

TEST_CASE("class equivalence on its own") {
  Sid ring = load("ring.clsys").sid;
  ClassEquivResult self = class_equiv(ring, ring);
  CHECK(self.equivalent);
  Sid same_name = ring;
  auto id = [](const std::string& a, const std::string& b) { return a == b; };
  ClassEquivResult idp = class_equiv(ring, same_name, id);
  CHECK(idp.equivalent);
  for (const auto& [i, j] : idp.pairing) CHECK(ring.rules[i].pred == ring.rules[j].pred);

  std::string text = render(ring);
  SystemFile g = parse_system(std::string(text).replace(text.find("<x.out, z.in>"), 13, "<x.in, z.out>"));
  CHECK_FALSE(class_equiv(ring, g.sid, id).equivalent);

  // state atoms do not matter, equalities on parameters do
  Sid a, b, c;
  a.rules.push_back(Rule{"A", {v("x"), v("y")}, comp_in(v("x"), "H")});
  b.rules.push_back(Rule{"B", {v("x"), v("y")}, comp(v("x"))});
  c.rules.push_back(Rule{"C", {v("x"), v("y")}, sep({comp(v("x")), eq(v("x"), v("y"))})});
  CHECK(class_equiv(a, b).equivalent);
  CHECK_FALSE(class_equiv(a, c).equivalent);
}

TEST_CASE("reduced file") {
  Sid ring = load("ring.clsys").sid;
  ReductionResult r = reduce_havoc_to_entailment(ring, "Ring_1_1", {true, false});
  SystemFile g = parse_system(render_reduced(r));
  REQUIRE(g.queries.size() == r.entailments.size());
  for (size_t k = 0; k < g.queries.size(); ++k) {
    CHECK(g.queries[k].kind == Query::Kind::Entail);
    CHECK(entails_bounded(g.sid, g.queries[k].lhs, g.queries[k].rhs, 4).holds);
  }
  for (const auto& [n, d] : r.description) CHECK(d.find(r.origin.at(n)) == 1);
}
