#include <doctest.h>

#include <algorithm>

#include "clhavoc/core_model.hpp"
#include "common.hpp"

using namespace clhavoc;

namespace {
ComponentId c(int i) { return ComponentId{i}; }
Interaction link(int a, const Port& p, int b, const Port& q) { return Interaction{{{c(a), p}, {c(b), q}}}; }

Configuration ring(const std::vector<State>& qs) {
  int n = static_cast<int>(qs.size());
  std::set<ComponentId> cs;
  std::set<Interaction> is;
  std::map<ComponentId, State> rho;
  for (int i = 1; i <= n; ++i) {
    cs.insert(c(i));
    is.insert(link(i, "out", i % n + 1, "in"));
    rho[c(i)] = qs[i - 1];
  }
  return Configuration(cs, is, rho);
}
}  // namespace

TEST_CASE("composition of the two half rings") {
  std::map<ComponentId, State> rho{{c(1), "H"}, {c(2), "T"}};
  Configuration g1({c(1)}, {link(1, "out", 2, "in")}, rho);
  Configuration g2({c(2)}, {link(2, "out", 1, "in")}, rho);
  auto g = compose(g1, g2);
  REQUIRE(g);
  CHECK(g->components() == std::set<ComponentId>{c(1), c(2)});
  CHECK(g->interactions() == std::set<Interaction>{link(1, "out", 2, "in"), link(2, "out", 1, "in")});
  CHECK(g->state_map() == rho);
  CHECK(compose(g1, Configuration({}, {}, rho)) == g1);
  CHECK_FALSE(compose(g1, g1));
}

TEST_CASE("composition with disagreeing states") {
  Configuration g1({c(1)}, {}, {{c(1), "H"}});
  Configuration g2({c(2)}, {}, {{c(1), "T"}, {c(2), "T"}});
  CHECK_THROWS_AS(compose(g1, g2), StateMapMismatch);
}

TEST_CASE("interaction binding a port twice to one component is rejected") {
  CHECK_THROWS_AS(Configuration({c(1)}, {Interaction{{{c(1), "out"}, {c(1), "in"}}}}, {{c(1), "H"}}), Error);
}

TEST_CASE("step on the three ring") {
  Behavior b = token_behavior();
  Configuration g = ring({"H", "H", "T"});
  auto s = step(g, link(3, "out", 1, "in"), b);
  REQUIRE(s.size() == 1);
  CHECK(s[0].state_of(c(1)) == "T");
  CHECK(s[0].state_of(c(2)) == "H");
  CHECK(s[0].state_of(c(3)) == "H");
  CHECK(step(g, link(1, "out", 2, "in"), b).empty());
  CHECK_THROWS_AS(step(g, link(2, "out", 1, "in"), b), UnknownInteraction);
}

TEST_CASE("nondeterministic behaviour gives one successor per choice") {
  Behavior b{{"p"}, {"q", "q1", "q2"}, {{"q", "p", "q1"}, {"q", "p", "q2"}}};
  Interaction i{{{c(1), "p"}}};
  Configuration g({c(1)}, {i}, {{c(1), "q"}});
  CHECK(step(g, i, b).size() == 2);
}

TEST_CASE("successors and reachability") {
  Behavior b = token_behavior();
  CHECK(successors(Configuration({c(1)}, {}, {{c(1), "H"}}), b).empty());

  // every rotation of the token on the three ring
  auto reach = reachable(ring({"H", "H", "T"}), b);
  CHECK(reach.size() == 3);
  for (const auto& start : reach) {
    auto from = reachable(start, b);
    for (const auto& g : reach) CHECK(std::count(from.begin(), from.end(), g) == 1);
  }

  // two ring: H/T both ways; hand enumeration gives the two token positions
  auto two = reachable(ring({"H", "T"}), b);
  CHECK(two.size() == 2);
  CHECK(std::count(two.begin(), two.end(), ring({"T", "H"})) == 1);
}

TEST_CASE("degree") {
  CHECK(degree(ring({"T", "H", "H", "H"})) == 2);
  CHECK(degree(Configuration()) == 0);
  Configuration star({c(1), c(2), c(3), c(4)},
                     {link(1, "out", 2, "in"), link(1, "out", 3, "in"), link(1, "out", 4, "in")},
                     {{c(1), "H"}, {c(2), "H"}, {c(3), "H"}, {c(4), "H"}});
  CHECK(degree(star) == 3);
}

TEST_CASE("tightness") {
  CHECK(is_tight(ring({"T", "H", "H", "H"})));
  CHECK_FALSE(is_tight(Configuration({}, {link(1, "out", 2, "in")}, {{c(1), "H"}, {c(2), "T"}})));
  Configuration g = ring({"T", "H", "H"});
  Configuration minus({c(1), c(2)}, g.interactions(), g.state_map());
  CHECK_FALSE(is_tight(minus));
}
