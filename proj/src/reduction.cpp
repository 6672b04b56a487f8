#include "clhavoc/reduction.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "clhavoc/frontend.hpp"
#include "clhavoc/oracle.hpp"

namespace clhavoc {

std::string Entailment::str() const {
  std::string args;
  for (int j = 1; j <= arity; ++j) args += (j > 1 ? ", x" : "x") + std::to_string(j);
  return lhs + "(" + args + ") |= " + rhs + "(" + args + ")";
}

ReductionResult reduce_havoc_to_entailment(const Sid& sid, const std::string& pred, const ReductionOptions& opt) {
  ReductionResult out;
  out.root = pred;
  Sid part = restrict_sid(sid, pred);
  if (check_pcr(part).all())
    out.tightness = "PCR";
  else if (opt.assume_tight)
    out.tightness = "assumed";
  else
    throw TightnessNotEstablished("rules reachable from " + pred +
                                  " are not PCR; tightness must be asserted with --assume-tight");

  SidAutomaton sa = sid_to_ta(sid);
  out.ta_states = sa.ta.states().size();
  out.ta_transitions = sa.ta.transitions().size();
  out.taus = interaction_types(part);
  int max_arity = sid_metrics(sid).maxarity;
  ImageAutomaton img = image(sa.ta, sa.state_of.at(pred), out.taus, sid.behavior, max_arity, opt.trace);
  out.image_states = img.ta.states().size();
  out.image_transitions = img.ta.transitions().size();
  out.trace = img.trace;

  std::vector<std::string> names(img.ta.states().size());
  std::map<std::string, int> counter;
  auto preds = sid.predicates();
  std::set<std::string> taken(preds.begin(), preds.end());
  for (size_t s = 0; s < names.size(); ++s) {
    const std::string& base = sa.ta.states()[img.info[s].base];
    std::string n;
    do n = base + "_bar$" + std::to_string(++counter[base]);
    while (taken.count(n));
    taken.insert(n);
    names[s] = n;
    out.origin[n] = base;
    std::string tau;
    for (const auto& p : out.taus[img.info[s].tau]) tau += (tau.empty() ? "" : ",") + p;
    out.description[n] = "(" + base + ", (" + tau + "), " + img.info[s].phi.str() + ")";
  }
  out.derived = ta_to_sid(img.ta, names, sid.behavior);
  out.combined = sid;
  out.combined.rules.insert(out.combined.rules.end(), out.derived.rules.begin(), out.derived.rules.end());
  for (int t : img.targets) {
    out.targets.push_back(names[t]);
    out.entailments.push_back({names[t], pred, sid.arity(pred)});
  }
  return out;
}

std::string render_reduced(const ReductionResult& r) {
  SystemFile f;
  f.has_behavior = true;
  f.sid = r.combined;
  for (const auto& e : r.entailments) {
    auto xs = standard_params(e.arity);
    Query q;
    q.kind = Query::Kind::Entail;
    q.lhs = pred(e.lhs, xs);
    q.rhs = pred(e.rhs, xs);
    f.queries.push_back(std::move(q));
  }
  return render(f);
}

// ---- syntactic equivalence of rule classes ----------------------------------

namespace {

// body with state atoms dropped and equalities on quantified variables substituted away
struct NormBody {
  std::vector<Var> exists;
  EqFormula param_eqs;
  std::vector<Var> comps;
  std::vector<InterAtom> inters;
  std::vector<NeqAtom> neqs;
  std::vector<PredAtom> preds;
};

NormBody normalize(const Rule& r) {
  FlatFormula f = flatten(r.body);
  std::map<Var, Var> s;
  for (size_t j = 0; j < r.params.size(); ++j) s[r.params[j]] = Var::param(static_cast<int>(j) + 1);
  for (size_t k = 0; k < f.exists.size(); ++k) s[f.exists[k]] = Var::named("#" + std::to_string(k + 1));
  f = f.renamed(s);
  EqFormula eqs = EqFormula::from_atoms(f.eqs);
  // representative: smallest parameter, otherwise smallest quantified variable
  std::map<Var, Var> rep;
  for (const auto& c : eqs.classes()) {
    Var best = c.front();
    for (const auto& v : c)
      if (v.kind == VarKind::Param && (best.kind != VarKind::Param || v < best)) best = v;
    for (const auto& v : c) rep[v] = best;
  }
  NormBody n;
  n.param_eqs = eqs.restrict([](const Var& v) { return v.kind == VarKind::Param; });
  n.param_eqs = n.param_eqs.restrict([&](const Var& v) {
    for (const auto& c : n.param_eqs.classes())
      if (std::find(c.begin(), c.end(), v) != c.end()) return c.size() > 1;
    return false;
  });
  FlatFormula g = f.renamed(rep);
  n.comps = g.comps;
  n.inters = g.inters;
  n.preds = g.preds;
  std::set<std::pair<Var, Var>> seen;
  for (auto a : g.neqs) {
    if (a.rhs < a.lhs) std::swap(a.lhs, a.rhs);
    if (seen.insert({a.lhs, a.rhs}).second) n.neqs.push_back(a);
  }
  std::set<Var> used;
  for (const auto& v : g.comps) used.insert(v);
  for (const auto& a : g.inters)
    for (const auto& b : a.bindings) used.insert(b.var);
  for (const auto& a : g.neqs) used.insert(a.lhs), used.insert(a.rhs);
  for (const auto& a : g.preds) used.insert(a.args.begin(), a.args.end());
  for (const auto& v : used)
    if (v.kind == VarKind::Named) n.exists.push_back(v);
  return n;
}

class BodyMatcher {
 public:
  BodyMatcher(const NormBody& a, const NormBody& b, const PredRelation& rel) : a_(a), b_(b), rel_(rel) {}

  bool run() {
    if (!(a_.param_eqs == b_.param_eqs)) return false;
    if (a_.exists.size() != b_.exists.size() || a_.comps.size() != b_.comps.size() ||
        a_.inters.size() != b_.inters.size() || a_.neqs.size() != b_.neqs.size() || a_.preds.size() != b_.preds.size())
      return false;
    used_.assign(4, {});
    used_[0].assign(a_.comps.size(), false);
    used_[1].assign(a_.inters.size(), false);
    used_[2].assign(a_.neqs.size(), false);
    used_[3].assign(a_.preds.size(), false);
    return match(0, 0);
  }

 private:
  bool map_var(const Var& x, const Var& y, std::vector<Var>& trail) {
    if (x.kind == VarKind::Param || y.kind == VarKind::Param) return x == y;
    auto it = fwd_.find(x);
    auto jt = bwd_.find(y);
    if (it != fwd_.end() || jt != bwd_.end()) return it != fwd_.end() && it->second == y;
    fwd_[x] = y;
    bwd_[y] = x;
    trail.push_back(x);
    return true;
  }
  void undo(std::vector<Var>& trail) {
    for (const auto& x : trail) {
      bwd_.erase(fwd_[x]);
      fwd_.erase(x);
    }
    trail.clear();
  }

  template <class F>
  bool try_each(int kind, size_t k, int next_kind, size_t count, F&& bind) {
    for (size_t j = 0; j < count; ++j) {
      if (used_[kind][j]) continue;
      std::vector<Var> trail;
      if (bind(j, trail)) {
        used_[kind][j] = true;
        if (match(next_kind, k + 1)) return true;
        used_[kind][j] = false;
      }
      undo(trail);
    }
    return false;
  }

  bool match(int kind, size_t k) {
    if (kind == 0 && k == a_.comps.size()) return match(1, 0);
    if (kind == 1 && k == a_.inters.size()) return match(2, 0);
    if (kind == 2 && k == a_.neqs.size()) return match(3, 0);
    if (kind == 3 && k == a_.preds.size()) return true;
    switch (kind) {
      case 0:
        return try_each(0, k, 0, b_.comps.size(),
                        [&](size_t j, std::vector<Var>& t) { return map_var(a_.comps[k], b_.comps[j], t); });
      case 1:
        return try_each(1, k, 1, b_.inters.size(), [&](size_t j, std::vector<Var>& t) {
          const auto& x = a_.inters[k].bindings;
          const auto& y = b_.inters[j].bindings;
          if (x.size() != y.size()) return false;
          for (size_t p = 0; p < x.size(); ++p)
            if (x[p].port != y[p].port || !map_var(x[p].var, y[p].var, t)) return false;
          return true;
        });
      case 2:
        return try_each(2, k, 2, b_.neqs.size(), [&](size_t j, std::vector<Var>& t) {
          const auto& x = a_.neqs[k];
          const auto& y = b_.neqs[j];
          if (map_var(x.lhs, y.lhs, t) && map_var(x.rhs, y.rhs, t)) return true;
          undo(t);
          return map_var(x.lhs, y.rhs, t) && map_var(x.rhs, y.lhs, t);
        });
      default:
        return try_each(3, k, 3, b_.preds.size(), [&](size_t j, std::vector<Var>& t) {
          const auto& x = a_.preds[k];
          const auto& y = b_.preds[j];
          if (x.args.size() != y.args.size() || !rel_(x.pred, y.pred)) return false;
          for (size_t p = 0; p < x.args.size(); ++p)
            if (!map_var(x.args[p], y.args[p], t)) return false;
          return true;
        });
    }
  }

  const NormBody& a_;
  const NormBody& b_;
  const PredRelation& rel_;
  std::map<Var, Var> fwd_, bwd_;
  std::vector<std::vector<bool>> used_;
};

}  // namespace

ClassEquivResult class_equiv(const Sid& a, const Sid& b, const PredRelation& related) {
  PredRelation rel = related;
  if (!rel) rel = [&](const std::string& x, const std::string& y) {
    return a.defines(x) && b.defines(y) && a.arity(x) == b.arity(y);
  };
  std::vector<NormBody> na, nb;
  for (const auto& r : a.rules) na.push_back(normalize(r));
  for (const auto& r : b.rules) nb.push_back(normalize(r));
  auto same = [&](size_t i, size_t j) {
    const Rule& ra = a.rules[i];
    const Rule& rb = b.rules[j];
    if (ra.params.size() != rb.params.size() || !rel(ra.pred, rb.pred)) return false;
    return BodyMatcher(na[i], nb[j], rel).run();
  };
  ClassEquivResult out;
  out.equivalent = true;
  for (size_t i = 0; i < a.rules.size(); ++i) {
    int found = -1;
    for (size_t j = 0; j < b.rules.size() && found < 0; ++j)
      if (same(i, j)) found = static_cast<int>(j);
    if (found < 0) {
      out.equivalent = false;
      out.unmatched.push_back("left: " + render(a.rules[i]));
    } else {
      out.pairing.emplace_back(static_cast<int>(i), found);
    }
  }
  for (size_t j = 0; j < b.rules.size(); ++j) {
    int found = -1;
    for (size_t i = 0; i < a.rules.size() && found < 0; ++i)
      if (same(i, j)) found = static_cast<int>(i);
    if (found < 0) {
      out.equivalent = false;
      out.unmatched.push_back("right: " + render(b.rules[j]));
    } else {
      out.pairing_back.emplace_back(static_cast<int>(j), found);
    }
  }
  return out;
}

}  // namespace clhavoc
