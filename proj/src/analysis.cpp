#include "clhavoc/analysis.hpp"

#include <algorithm>

#include "clhavoc/eq_formula.hpp"
#include "clhavoc/oracle.hpp"

namespace clhavoc {

std::map<std::string, std::set<int>> profile(const Sid& sid) {
  std::map<std::string, std::set<int>> prof;
  for (const auto& p : sid.predicates()) {
    prof[p];
    for (int i = 1; i <= sid.arity(p); ++i) prof[p].insert(i);
  }
  std::vector<FlatFormula> bodies;
  for (const auto& r : sid.rules) bodies.push_back(flatten(r.body));
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t k = 0; k < sid.rules.size(); ++k) {
      const Rule& r = sid.rules[k];
      for (const auto& atom : bodies[k].preds) {
        auto& pb = prof[atom.pred];
        for (auto it = pb.begin(); it != pb.end();) {
          const Var& y = atom.args[*it - 1];
          bool kept = false;
          for (int j : prof[r.pred])
            if (r.params[j - 1] == y) kept = true;
          if (kept) {
            ++it;
          } else {
            it = pb.erase(it);
            changed = true;
          }
        }
      }
    }
  }
  return prof;
}

bool PcrReport::all() const {
  return std::all_of(rules.begin(), rules.end(), [](const RulePcr& r) { return r.pcr(); });
}

PcrReport check_pcr(const Sid& sid) {
  PcrReport rep;
  auto prof = profile(sid);
  for (size_t k = 0; k < sid.rules.size(); ++k) {
    const Rule& r = sid.rules[k];
    const FlatFormula f = flatten(r.body);
    RulePcr out;
    out.rule = static_cast<int>(k);

    std::set<Var> anchor;  // x1 and the profile parameters
    if (!r.params.empty()) anchor.insert(r.params[0]);
    for (int i : prof[r.pred]) anchor.insert(r.params[i - 1]);

    // progressing
    EqFormula eqs = EqFormula::from_atoms(f.eqs);
    auto same_as_x1 = [&](const Var& v) {
      return !r.params.empty() && (v == r.params[0] || eqs.entails(v, r.params[0]));
    };
    if (r.params.empty()) {
      out.why_not_p = "no first parameter to allocate";
    } else if (f.comps.size() != 1 || f.comps[0] != r.params[0]) {
      out.why_not_p = "component atoms other than comp(" + r.params[0].str() + ")";
    } else {
      for (const auto& s : f.states)
        if (!same_as_x1(s.x)) out.why_not_p = "state atom on " + s.x.str();
      if (out.why_not_p.empty()) {
        std::set<Var> passed, needed;
        for (const auto& a : f.preds)
          for (const auto& v : a.args)
            if (!same_as_x1(v)) passed.insert(v);
        for (size_t j = 1; j < r.params.size(); ++j)
          if (!same_as_x1(r.params[j])) needed.insert(r.params[j]);
        for (const auto& y : f.exists)
          if (!same_as_x1(y)) needed.insert(y);
        if (passed != needed) out.why_not_p = "predicate arguments differ from the other parameters and quantified variables";
      }
    }
    out.progressing = out.why_not_p.empty();

    // connected
    for (size_t l = 0; l < f.preds.size() && out.why_not_c.empty(); ++l) {
      const auto& a = f.preds[l];
      if (a.args.empty()) {
        out.why_not_c = "atom " + a.pred + " has no parameters";
        break;
      }
      bool linked = false;
      for (const auto& i : f.inters) {
        bool has_z = false, has_anchor = false;
        for (const auto& b : i.bindings) {
          has_z |= b.var == a.args[0];
          has_anchor |= anchor.count(b.var) != 0;
        }
        linked |= has_z && has_anchor;
      }
      if (!linked) out.why_not_c = "no interaction links " + a.args[0].str() + " to the rule's anchor";
    }
    out.connected = out.why_not_c.empty();

    // e-restricted
    std::set<Var> profvars;
    for (int i : prof[r.pred]) profvars.insert(r.params[i - 1]);
    for (const auto& n : f.neqs)
      if (!profvars.count(n.lhs) && !profvars.count(n.rhs))
        out.why_not_r = "disequality " + n.lhs.str() + " != " + n.rhs.str() + " avoids the profile";
    out.restricted = out.why_not_r.empty();
    rep.rules.push_back(out);
  }
  return rep;
}

SidMetrics sid_metrics(const Sid& sid) {
  SidMetrics m;
  for (const auto& r : sid.rules) {
    m.size += formula_size(r.body) + static_cast<int>(r.params.size()) + 1;
    m.maxarity = std::max(m.maxarity, static_cast<int>(r.params.size()));
    FlatFormula f = flatten(r.body);
    for (const auto& i : f.inters) m.maxinter = std::max(m.maxinter, static_cast<int>(i.bindings.size()));
    for (const auto& a : f.preds) m.maxarity = std::max(m.maxarity, static_cast<int>(a.args.size()));
    m.maxpreds = std::max(m.maxpreds, static_cast<int>(f.preds.size()));
  }
  return m;
}

std::set<std::string> reachable_predicates(const Sid& sid, const std::string& root) {
  if (!sid.defines(root)) throw UndefinedPredicate("undefined predicate " + root);
  std::set<std::string> seen{root};
  std::vector<std::string> work{root};
  while (!work.empty()) {
    std::string p = work.back();
    work.pop_back();
    for (const Rule* r : sid.rules_for(p))
      for (const auto& q : predicates_used(r->body))
        if (seen.insert(q).second) work.push_back(q);
  }
  return seen;
}

Sid restrict_sid(const Sid& sid, const std::string& root) {
  auto keep = reachable_predicates(sid, root);
  Sid out;
  out.behavior = sid.behavior;
  for (const auto& r : sid.rules)
    if (keep.count(r.pred)) out.rules.push_back(r);
  return out;
}

int degree_sample(const Sid& sid, const std::string& pred, int depth) {
  int best = 0;
  for (const auto& [key, m] : enumerate_models(sid, pred, depth).models) best = std::max(best, degree(m.config));
  return best;
}

}  // namespace clhavoc
