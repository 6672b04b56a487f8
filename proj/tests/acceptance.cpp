// one line per acceptance criterion; exits 1 if any failed
#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "clhavoc/analysis.hpp"
#include "clhavoc/automata.hpp"
#include "clhavoc/eq_formula.hpp"
#include "clhavoc/frontend.hpp"
#include "clhavoc/oracle.hpp"
#include "clhavoc/reduction.hpp"
#include "clhavoc/transducer.hpp"

using namespace clhavoc;

namespace {

std::string fixture(const std::string& n) { return std::string(FIXTURE_DIR) + "/" + n; }
Sid sid_of(const std::string& n) { return parse_system_file(fixture(n)).sid; }
ComponentId c(int i) { return ComponentId{i}; }

struct Outcome {
  bool ok = true;
  std::string note;
};

// per-fixture depth for sweeps over every predicate; the literal tree with
// linked leaves has unconstrained leaf parameters and explodes past depth 2
const std::vector<std::pair<std::string, int>> kSweep{
    {"ring.clsys", 4},      {"ring2.clsys", 4}, {"pcring.clsys", 4},  {"chain.clsys", 4}, {"tll.clsys", 2},
    {"tll_linked.clsys", 3}, {"tll_pcr.clsys", 4}, {"bad.clsys", 4}, {"formulas.clsys", 4}};

int failures = 0;

void run(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.ok && dt > limit_s) o = {false, "took longer than " + std::to_string(limit_s) + " s"};
  if (!o.ok) ++failures;
  std::ostringstream t;
  t.precision(3);
  t << std::fixed << dt;
  std::cout << (o.ok ? "PASS" : "FAIL") << "  " << (id < 10 ? " " : "") << id << "  " << name << "  (" << t.str()
            << " s)" << (o.note.empty() ? "" : "  " + o.note) << std::endl;
}

Outcome expect(bool cond, const std::string& note = "") { return {cond, note}; }

// ---- helpers for the equality oracle ---------------------------------------

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
    for (int b = 0; b <= mx + 1; ++b) rgs[i] = b, rec(i + 1, std::max(mx, b));
  };
  rec(0, -1);
  return out;
}

bool sem_entails(const EqFormula& e, const std::vector<Var>& vs, const Var& a, const Var& b) {
  int n = static_cast<int>(vs.size());
  std::vector<int> val(vs.size(), 0);
  std::map<Var, size_t> pos;
  for (size_t k = 0; k < vs.size(); ++k) pos[vs[k]] = k;
  std::function<bool(size_t)> rec = [&](size_t i) -> bool {
    if (i == vs.size()) {
      for (const auto& cl : e.classes())
        for (const auto& x : cl)
          if (val[pos[x]] != val[pos[cl.front()]]) return true;
      return val[pos[a]] == val[pos[b]];
    }
    for (int x = 0; x < n; ++x) {
      val[i] = x;
      if (!rec(i + 1)) return false;
    }
    return true;
  };
  return rec(0);
}

bool entailments_hold(const ReductionResult& r, int depth) {
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

int main() {
  run(1, "composition of the two half rings", 1, [] {
    std::map<ComponentId, State> rho{{c(1), "T"}, {c(2), "H"}};
    Interaction i12{{{c(1), "out"}, {c(2), "in"}}}, i21{{{c(2), "out"}, {c(1), "in"}}};
    auto g = compose(Configuration({c(1)}, {i12}, rho), Configuration({c(2)}, {i21}, rho));
    SystemFile f = parse_system_file(fixture("configs.clsys"));
    auto h = compose(f.config("gamma1")->config, f.config("gamma2")->config);
    return expect(g && *g == Configuration({c(1), c(2)}, {i12, i21}, rho) && h && *h == *g);
  });

  run(2, "three ring configurations reach each other", 1, [] {
    SystemFile f = parse_system_file(fixture("configs.clsys"));
    auto reach = reachable(f.config("ring3")->config, f.sid.behavior);
    if (reach.size() != 3) return expect(false, std::to_string(reach.size()) + " reachable");
    for (const auto& g : reach) {
      auto from = reachable(g, f.sid.behavior);
      for (const auto& h : reach)
        if (std::find(from.begin(), from.end(), h) == from.end()) return expect(false);
    }
    return expect(true);
  });

  run(3, "four ring has degree 2", 1, [] {
    SystemFile f = parse_system_file(fixture("configs.clsys"));
    return expect(degree(f.config("ring4")->config) == 2);
  });

  run(4, "PCR classification", 1, [] {
    Sid ring = sid_of("ring.clsys");
    PcrReport rr = check_pcr(ring);
    for (const auto& r : rr.rules) {
      bool chain = ring.rules[r.rule].pred.rfind("Chain", 0) == 0;
      if (chain && !r.pcr()) return expect(false, "chain rule " + std::to_string(r.rule));
      if (!chain && (r.progressing || r.connected)) return expect(false, "ring rule " + std::to_string(r.rule));
    }
    if (!check_pcr(sid_of("pcring.clsys")).all()) return expect(false, "pcRing");
    if (!check_pcr(sid_of("tll_pcr.clsys")).all()) return expect(false, "rewritten tree");
    PcrReport t = check_pcr(sid_of("tll.clsys"));
    bool ok = !t.rules[0].pcr() && t.rules[1].pcr() && !t.rules[2].pcr() && !t.rules[3].pcr();
    return expect(ok, ok ? "" : "tree");
  });

  run(5, "automaton of the tree with linked leaves", 1, [] {
    SidAutomaton sa = sid_to_ta(sid_of("tll.clsys"));
    const auto& a = sa.ta;
    if (a.states().size() != 2 || a.transitions().size() != 4) return expect(false, "size");
    int root = sa.state_of.at("Root"), node = sa.state_of.at("Node");
    std::multiset<std::string> shape;
    for (const auto& t : a.transitions()) {
      const auto& s = *a.symbols()[t.symbol];
      std::string kids;
      for (int k : t.children) kids += k == node ? "N" : "R";
      std::string st = s.body().states.empty() ? "-" : s.body().states[0].q;
      shape.insert(std::to_string(s.rank()) + kids + (t.target == root ? ">R" : ">N") + st);
    }
    std::multiset<std::string> want{"1N>R-", "2NN>N-", "0>Nq0", "0>Nq1"};
    return expect(shape == want);
  });

  run(6, "token ring is invariant up to depth 5", 60, [] {
    Sid sid = sid_of("ring.clsys");
    HavocVerdict h = havoc_invariant_bounded(sid, "Ring_1_1", 5);
    if (!h.invariant) return expect(false, "oracle found " + h.cex->str());
    ReductionResult r = reduce_havoc_to_entailment(sid, "Ring_1_1", {true, false});
    return expect(!r.entailments.empty() && entailments_hold(r, 5),
                  std::to_string(h.models) + " models, " + std::to_string(r.entailments.size()) + " entailments");
  });

  run(7, "token about to move is not invariant", 1, [] {
    Sid sid = sid_of("bad.clsys");
    HavocVerdict h = havoc_invariant_bounded(sid, "TH", 1);
    ReductionResult r = reduce_havoc_to_entailment(sid, "TH", {true, false});
    return expect(!h.invariant && h.cex && h.models == 1 && !entailments_hold(r, 1));
  });

  run(8, "reduction equals direct steps (ring depth 4)", 300, [] {
    Sid sid = sid_of("ring.clsys");
    ReductionResult r = reduce_havoc_to_entailment(sid, "Ring_1_1", {true, false});
    CrossValidation cv = cross_validate_reduction(sid, "Ring_1_1", r, 4);
    return expect(cv.equal && cv.left > 0, std::to_string(cv.left) + " successors");
  });
  run(8, "reduction equals direct steps (linked tree depth 3)", 300, [] {
    Sid sid = sid_of("tll_linked.clsys");
    ReductionResult r = reduce_havoc_to_entailment(sid, "Root", {true, false});
    CrossValidation cv = cross_validate_reduction(sid, "Root", r, 3);
    return expect(cv.equal && cv.left > 0, std::to_string(cv.left) + " successors");
  });

  run(9, "derived rules match the original ones", 30, [] {
    std::string note;
    for (const auto& [f, p] : std::vector<std::pair<std::string, std::string>>{{"ring.clsys", "Ring_1_1"},
                                                                             {"tll_linked.clsys", "Root"}}) {
      Sid sid = sid_of(f);
      ReductionResult r = reduce_havoc_to_entailment(sid, p, {true, false});
      Sid orig = restrict_sid(sid, p);
      ClassEquivResult eq = class_equiv(orig, r.derived, by_origin(r));
      if (!eq.equivalent || eq.pairing.size() != orig.rules.size()) return expect(false, f);
      note += f + ": " + std::to_string(eq.pairing.size()) + "+" + std::to_string(eq.pairing_back.size()) +
              " pairs; ";
    }
    return expect(true, note);
  });

  run(10, "one step closure iff multi step closure", 30, [] {
    for (const auto& [f, d] : kSweep) {
      Sid sid = sid_of(f);
      for (const auto& p : sid.predicates()) {
        StepClosure sc = havoc_step_closure(sid, p, d);
        if (sc.one_step != sc.multi_step) return expect(false, f + " " + p);
      }
    }
    return expect(true);
  });

  run(11, "equality formulas against brute force", 10, [] {
    long checks = 0;
    for (int n = 0; n <= 4; ++n) {
      std::vector<Var> vs;
      for (int i = 0; i < n; ++i) vs.push_back(Var::named(std::string(1, static_cast<char>('a' + i))));
      for (const auto& e : partitions(vs)) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          std::set<Var> drop;
          std::vector<Var> kept;
          for (int i = 0; i < n; ++i) (mask >> i & 1u) ? (void)drop.insert(vs[i]) : kept.push_back(vs[i]);
          EqFormula r = e.eliminate(drop);
          for (const auto& a : kept)
            for (const auto& b : kept) {
              if (r.entails(a, b) != sem_entails(e, vs, a, b)) return expect(false, "elimination");
              ++checks;
            }
        }
        for (const auto& a : vs)
          for (const auto& b : vs) {
            if (e.entails(a, b) != sem_entails(e, vs, a, b)) return expect(false, "entailment");
            ++checks;
          }
      }
    }
    return expect(true, std::to_string(checks) + " checks");
  });

  run(12, "profile against unfolding brute force", 30, [] {
    for (const auto& [f, d] : kSweep) {
      Sid sid = sid_of(f);
      if (profile(sid) != profile_bruteforce(sid, 4)) return expect(false, f);
    }
    return expect(true);
  });

  run(13, "models of PCR fixtures are tight", 60, [] {
    int fixtures = 0;
    size_t models = 0;
    for (const auto& [f, d] : kSweep) {
      Sid sid = sid_of(f);
      if (sid.rules.empty() || !check_pcr(sid).all()) continue;
      ++fixtures;
      for (const auto& p : sid.predicates()) {
        if (!sample_tightness(sid, p, 4)) return expect(false, f + " " + p);
        models += enumerate_models(sid, p, 4).size();
      }
    }
    return expect(fixtures >= 3, std::to_string(fixtures) + " fixtures, " + std::to_string(models) + " models");
  });

  run(14, "round trip and reduced files", 10, [] {
    int files = 0;
    for (const auto& e : std::filesystem::directory_iterator(FIXTURE_DIR)) {
      if (e.path().extension() != ".clsys") continue;
      SystemFile f = parse_system_file(e.path().string());
      std::string once = render(f);
      SystemFile g = parse_system(once);
      if (!(g == f) || render(g) != once) return expect(false, e.path().filename().string());
      ++files;
    }
    for (const auto& [f, p, d] : std::vector<std::tuple<std::string, std::string, int>>{
             {"ring.clsys", "Ring_1_1", 4}, {"tll_linked.clsys", "Root", 3}, {"pcring.clsys", "pcRing_1_1", 3},
             {"bad.clsys", "TH", 1}}) {
      ReductionResult r = reduce_havoc_to_entailment(sid_of(f), p, {true, false});
      std::string text = render_reduced(r);
      SystemFile g = parse_system(text);
      if (render(g) != text || !(g.sid == r.combined) || g.queries.size() != r.entailments.size())
        return expect(false, f + " reduced");
      bool before = entailments_hold(r, d);
      bool after = true;
      for (const auto& q : g.queries) after = after && entails_bounded(g.sid, q.lhs, q.rhs, d).holds;
      if (before != after) return expect(false, f + " re-check");
    }
    return expect(true, std::to_string(files) + " files");
  });

  std::cout << (failures ? std::to_string(failures) + " criteria failed" : "all criteria passed") << std::endl;
  return failures ? 1 : 0;
}
