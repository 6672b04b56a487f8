#include <doctest.h>

#include <functional>

#include "clhavoc/eq_formula.hpp"

using namespace clhavoc;

namespace {
Var v(const std::string& n) { return Var::named(n); }

// all set partitions of vs as restricted growth strings
std::vector<EqFormula> partitions(const std::vector<Var>& vs) {
  std::vector<EqFormula> out;
  std::vector<int> rgs(vs.size(), 0);
  std::function<void(size_t, int)> rec = [&](size_t i, int mx) {
    if (i == vs.size()) {
      EqFormula e;
      for (size_t k = 0; k < vs.size(); ++k) {
        e.add_var(vs[k]);
        for (size_t j = 0; j < k; ++j)
          if (rgs[j] == rgs[k]) e.add_eq(vs[j], vs[k]);
      }
      out.push_back(e);
      return;
    }
    for (int b = 0; b <= mx + 1; ++b) {
      rgs[i] = b;
      rec(i + 1, std::max(mx, b));
    }
  };
  rec(0, -1);
  return out;
}

// value assignments over a domain as large as the variable set
std::vector<std::map<Var, int>> assignments(const std::vector<Var>& vs) {
  std::vector<std::map<Var, int>> out;
  int n = static_cast<int>(vs.size());
  std::vector<int> val(vs.size(), 0);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == vs.size()) {
      std::map<Var, int> m;
      for (size_t k = 0; k < vs.size(); ++k) m[vs[k]] = val[k];
      out.push_back(m);
      return;
    }
    for (int x = 0; x < n; ++x) val[i] = x, rec(i + 1);
  };
  rec(0);
  return out;
}

bool holds(const EqFormula& e, const std::map<Var, int>& m) {
  for (const auto& cl : e.classes())
    for (const auto& x : cl)
      if (m.at(x) != m.at(cl.front())) return false;
  return true;
}

// semantic entailment of a = b over all assignments of vs
bool sem_entails(const EqFormula& e, const std::vector<Var>& vs, const Var& a, const Var& b) {
  for (const auto& m : assignments(vs))
    if (holds(e, m) && m.at(a) != m.at(b)) return false;
  return true;
}

std::vector<Var> universe(int n) {
  std::vector<Var> vs;
  for (int i = 0; i < n; ++i) vs.push_back(v(std::string(1, static_cast<char>('a' + i))));
  return vs;
}
}  // namespace

TEST_CASE("conjunction") {
  EqFormula a, b;
  a.add_eq(v("x"), v("y"));
  b.add_eq(v("y"), v("z"));
  EqFormula ab = a.conjoin(b);
  CHECK(ab.entails(v("x"), v("z")));
  CHECK(ab.classes().size() == 1);
  CHECK(a.conjoin(EqFormula()) == a);

  EqFormula p, q;
  p.add_eq(Var::begin(1), v("x"));
  p.add_eq(Var::end(1), v("y"));
  q.add_eq(v("x"), v("y"));
  CHECK(p.conjoin(q).entails(Var::begin(1), Var::end(1)));
}

TEST_CASE("elimination") {
  EqFormula e;
  e.add_eq(v("x"), v("y"));
  e.add_eq(v("x"), v("z"));
  EqFormula r = e.eliminate({v("x")});
  CHECK(r.entails(v("y"), v("z")));
  CHECK_FALSE(r.mentions(v("x")));
  EqFormula lone;
  lone.add_var(v("x"));
  CHECK(lone.eliminate({v("x")}) == EqFormula());
}

TEST_CASE("entailment") {
  EqFormula e;
  e.add_eq(v("x"), v("y"));
  CHECK(e.entails(v("x"), v("y")));
  CHECK_FALSE(EqFormula().entails(v("x"), v("y")));
}

TEST_CASE("exhaustive check against assignments, up to four variables") {
  int checked = 0;
  for (int n = 0; n <= 4; ++n) {
    auto vs = universe(n);
    auto ps = partitions(vs);
    for (const auto& e : ps) {
      // entails
      for (const auto& a : vs)
        for (const auto& b : vs) {
          CHECK(e.entails(a, b) == sem_entails(e, vs, a, b));
          ++checked;
        }
      // elimination of every subset
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::set<Var> drop;
        std::vector<Var> kept;
        for (int i = 0; i < n; ++i) (mask >> i & 1u) ? (void)drop.insert(vs[i]) : kept.push_back(vs[i]);
        EqFormula r = e.eliminate(drop);
        CHECK(r.vars() == std::set<Var>(kept.begin(), kept.end()));
        for (const auto& a : kept)
          for (const auto& b : kept) {
            CHECK(r.entails(a, b) == sem_entails(e, vs, a, b));
            ++checked;
          }
      }
      // conjunction with every partition of the same variables
      for (const auto& f : ps) {
        EqFormula g = e.conjoin(f);
        for (const auto& m : assignments(vs)) CHECK(holds(g, m) == (holds(e, m) && holds(f, m)));
        ++checked;
      }
    }
  }
  CHECK(checked > 1500);
}

TEST_CASE("renaming is a relabelling") {
  EqFormula e;
  e.add_eq(v("a"), v("b"));
  e.add_var(v("c"));
  EqFormula r = e.renamed({{v("a"), v("x")}, {v("c"), v("y")}});
  CHECK(r.entails(v("x"), v("b")));
  CHECK(r.mentions(v("y")));
  CHECK_FALSE(r.mentions(v("a")));
}
