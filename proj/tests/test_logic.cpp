#include <doctest.h>

#include <algorithm>
#include <random>

#include "clhavoc/logic.hpp"
#include "common.hpp"

using namespace clhavoc;

namespace {
Var v(const std::string& n) { return Var::named(n); }
ComponentId c(int i) { return ComponentId{i}; }

// sep-conjunction of atoms, checked by splitting the configuration: every
// comp atom takes one component, every interaction atom one interaction, the
// rest takes nothing
bool split_oracle(const Configuration& g, const Store& nu, const FlatFormula& f) {
  std::multiset<ComponentId> comps;
  for (const auto& x : f.comps) comps.insert(nu.at(x));
  std::set<ComponentId> cs(comps.begin(), comps.end());
  if (cs.size() != comps.size() || cs != g.components()) return false;
  std::multiset<Interaction> is;
  for (const auto& a : f.inters) {
    Interaction i;
    for (const auto& b : a.bindings) i.bindings.push_back({nu.at(b.var), b.port});
    is.insert(i);
  }
  std::set<Interaction> iset(is.begin(), is.end());
  if (iset.size() != is.size() || iset != g.interactions()) return false;
  for (const auto& s : f.states)
    if (!g.has_state(nu.at(s.x)) || g.state_of(nu.at(s.x)) != s.q) return false;
  for (const auto& e : f.eqs)
    if (nu.at(e.lhs) != nu.at(e.rhs)) return false;
  for (const auto& e : f.neqs)
    if (nu.at(e.lhs) == nu.at(e.rhs)) return false;
  return true;
}
}  // namespace

TEST_CASE("substitution") {
  CHECK(substitute(eq(v("x"), v("y")), {{v("x"), v("z")}}) == eq(v("z"), v("y")));
  Formula bound = exists({v("x")}, eq(v("x"), v("y")));
  CHECK(substitute(bound, {{v("x"), v("z")}}) == bound);
  CHECK(substitute(pred("Chain", {v("x"), v("y")}), {{v("x"), v("u")}, {v("y"), v("x")}}) ==
        pred("Chain", {v("u"), v("x")}));
  // capture: y must not be caught by the binder
  Formula f = exists({v("y")}, sep({comp(v("y")), inter({{v("x"), "out"}, {v("y"), "in"}})}));
  Formula g = substitute(f, {{v("x"), v("y")}});
  CHECK(free_vars(g) == std::set<Var>{v("y")});
}

TEST_CASE("builders and size") {
  CHECK(sep({emp(), comp(v("x")), emp()}) == comp(v("x")));
  CHECK(formula_size(emp()) == 1);
  CHECK(formula_size(comp(v("x"))) == 2);
  CHECK(formula_size(sep({comp(v("x")), comp(v("y"))})) == 5);
  CHECK(formula_size(inter({{v("x"), "out"}, {v("y"), "in"}})) == 5);
  CHECK(formula_size(exists({v("x")}, comp(v("x")))) == 4);
  CHECK(render(comp_in(v("x"), "T")) == "comp(x : T)");
}

TEST_CASE("flatten renames binders apart") {
  Formula f = sep({exists({v("z")}, comp(v("z"))), exists({v("z")}, comp(v("z")))});
  FlatFormula ff = flatten(f);
  CHECK(ff.exists.size() == 2);
  CHECK(ff.exists[0] != ff.exists[1]);
  CHECK(ff.comps.size() == 2);
}

TEST_CASE("satisfaction on the composed two ring") {
  Configuration g({c(1), c(2)},
                  {Interaction{{{c(1), "out"}, {c(2), "in"}}}, Interaction{{{c(2), "out"}, {c(1), "in"}}}},
                  {{c(1), "T"}, {c(2), "H"}});
  Store nu{{v("x1"), c(1)}, {v("x2"), c(2)}};
  Formula f = sep({comp_in(v("x1"), "T"), comp_in(v("x2"), "H"), inter({{v("x1"), "out"}, {v("x2"), "in"}}),
                   inter({{v("x2"), "out"}, {v("x1"), "in"}})});
  CHECK(eval_qpf(g, nu, f));
  CHECK_FALSE(eval_qpf(g, nu, sep({comp_in(v("x1"), "H"), comp(v("x2")), inter({{v("x1"), "out"}, {v("x2"), "in"}}),
                                   inter({{v("x2"), "out"}, {v("x1"), "in"}})})));
  // existentials may name the second component
  CHECK(eval_qpf(g, {{v("x1"), c(1)}}, exists({v("y")}, sep({comp(v("x1")), comp(v("y")),
                                                              inter({{v("x1"), "out"}, {v("y"), "in"}}),
                                                              inter({{v("y"), "out"}, {v("x1"), "in"}})}))));
}

TEST_CASE("satisfaction edge cases") {
  Configuration empty;
  CHECK(eval_qpf(empty, {}, emp()));
  CHECK_FALSE(eval_qpf(Configuration({}, {}, {{c(1), "H"}}), {{v("x"), c(1)}}, comp(v("x"))));
  Configuration one({c(1)}, {}, {{c(1), "H"}});
  for (int y : {1, 2}) {
    Configuration g = y == 2 ? Configuration({c(1)}, {}, {{c(1), "H"}, {c(2), "H"}}) : one;
    CHECK_FALSE(eval_qpf(g, {{v("x"), c(1)}, {v("y"), c(y)}}, sep({comp(v("x")), comp(v("y"))})));
  }
  CHECK_THROWS_AS(eval_qpf(one, {}, comp(v("x"))), UnboundVariable);
}

TEST_CASE("satisfaction agrees with the split oracle on random atoms") {
  std::mt19937 rng(7);
  const std::vector<Var> vars{v("a"), v("b"), v("c")};
  const std::vector<State> qs{"H", "T"};
  int agree = 0, sat = 0;
  for (int round = 0; round < 3000; ++round) {
    // configuration over ids 1..3
    std::set<ComponentId> cs;
    std::set<Interaction> is;
    std::map<ComponentId, State> rho;
    for (int i = 1; i <= 3; ++i) {
      rho[c(i)] = qs[rng() % 2];
      if (rng() % 2) cs.insert(c(i));
    }
    for (int k = rng() % 3; k > 0; --k) {
      int a = 1 + rng() % 3, b = 1 + rng() % 3;
      if (a != b) is.insert(Interaction{{{c(a), "out"}, {c(b), "in"}}});
    }
    Configuration g(cs, is, rho);
    Store nu;
    for (const auto& x : vars) nu[x] = c(1 + rng() % 3);
    std::vector<Formula> parts;
    for (int k = rng() % 5; k > 0; --k) {
      const Var& x = vars[rng() % 3];
      const Var& y = vars[rng() % 3];
      switch (rng() % 5) {
        case 0: parts.push_back(comp(x)); break;
        case 1: parts.push_back(inter({{x, "out"}, {y, "in"}})); break;
        case 2: parts.push_back(state(x, qs[rng() % 2])); break;
        case 3: parts.push_back(eq(x, y)); break;
        default: parts.push_back(neq(x, y)); break;
      }
    }
    Formula f = sep(parts);
    bool expect;
    try {
      expect = split_oracle(g, nu, flatten(f));
    } catch (const std::out_of_range&) {
      continue;
    }
    bool got = eval_qpf(g, nu, f);
    CHECK(got == expect);
    agree += got == expect;
    sat += got;
  }
  CHECK(sat > 20);
  CHECK(agree > 2000);
}

TEST_CASE("unfolding") {
  Sid sid = load("ring.clsys").sid;
  auto u0 = unfold(sid, PredAtom{"Chain_0_1", {v("x"), v("x")}}, 0);
  REQUIRE(u0.size() == 1);
  CHECK_FALSE(u0[0].complete);
  CHECK(u0[0].formula == pred("Chain_0_1", {v("x"), v("x")}));

  auto u1 = unfold(sid, PredAtom{"Chain_0_1", {v("x"), v("x")}}, 1);
  bool found = false;
  for (const auto& u : u1) {
    if (!u.complete) continue;
    FlatFormula f = flatten(u.formula);
    if (f.comps == std::vector<Var>{v("x")} && f.states.size() == 1 && f.states[0].q == "T" && f.inters.empty())
      found = true;
  }
  CHECK(found);

  // chains of length <= 2 below the ring rule: HT and TH
  auto count = [&](int d) {
    auto us = unfold(sid, PredAtom{"Ring_1_1", {}}, d);
    return std::count_if(us.begin(), us.end(), [](const Unfolding& u) { return u.complete; });
  };
  CHECK(count(2) == 0);
  CHECK(count(3) == 2);
  // length 3: HHT, HT*, TH*, TTH with * the unconstrained base
  CHECK(count(4) == 6);
  Unfolder uf(sid);
  CHECK(uf.complete("Ring_1_1", 4).size() == 6);
}

TEST_CASE("bounded satisfaction") {
  SystemFile ring = load("ring.clsys");
  auto ring_of = [](const std::vector<State>& qs) {
    int n = static_cast<int>(qs.size());
    std::set<ComponentId> cs;
    std::set<Interaction> is;
    std::map<ComponentId, State> rho;
    for (int i = 1; i <= n; ++i) {
      cs.insert(c(i));
      is.insert(Interaction{{{c(i), "out"}, {c(i % n + 1), "in"}}});
      rho[c(i)] = qs[i - 1];
    }
    return Configuration(cs, is, rho);
  };
  CHECK(eval_bounded(ring_of({"H", "H", "T"}), {}, pred("Ring_1_1", {}), ring.sid, 4) == BoundedVerdict::Sat);
  CHECK(eval_bounded(ring_of({"H", "H", "T"}), {}, pred("Ring_1_1", {}), ring.sid, 3) ==
        BoundedVerdict::UnsatAtDepth);
  CHECK(eval_bounded(ring_of({"H", "H", "H"}), {}, pred("Ring_1_1", {}), ring.sid, 6) ==
        BoundedVerdict::UnsatAtDepth);
  CHECK(eval_bounded(Configuration({}, {}, {{c(1), "T"}}), {{v("x"), c(1)}}, pred("Chain_0_1", {v("x"), v("x")}),
                     ring.sid, 3) == BoundedVerdict::UnsatAtDepth);

  // two components never hold two H and one T
  SystemFile ring2 = load("ring2.clsys");
  for (const auto& a : {"H", "T"})
    for (const auto& b : {"H", "T"})
      CHECK(eval_bounded(ring_of({a, b}), {}, pred("Ring_2_1", {}), ring2.sid, 6) == BoundedVerdict::UnsatAtDepth);
  CHECK(eval_bounded(ring_of({"H", "T", "H"}), {}, pred("Ring_2_1", {}), ring2.sid, 4) == BoundedVerdict::Sat);
}

TEST_CASE("sid validation") {
  Sid sid;
  sid.behavior = token_behavior();
  sid.rules.push_back(Rule{"A", {v("x")}, pred("B", {v("x")})});
  CHECK_THROWS_AS(sid.validate(), UndefinedPredicate);
  sid.rules.push_back(Rule{"B", {v("x"), v("y")}, comp(v("x"))});
  CHECK_THROWS_AS(sid.validate(), ArityMismatch);
  Sid free;
  free.behavior = token_behavior();
  free.rules.push_back(Rule{"A", {v("x")}, comp(v("y"))});
  CHECK_THROWS(free.validate());
}
