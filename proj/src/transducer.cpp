#include "clhavoc/transducer.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace clhavoc {

std::vector<InteractionType> interaction_types(const Sid& sid) {
  std::vector<InteractionType> out;
  for (const auto& r : sid.rules)
    for (const auto& a : flatten(r.body).inters) {
      auto t = a.type();
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
  return out;
}

bool transducer_state_valid(const EqFormula& phi, int n) {
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      if (phi.entails(Var::begin(i), Var::begin(j))) return false;
      if (phi.entails(Var::end(i), Var::end(j))) return false;
      if (phi.entails(Var::begin(i), Var::end(j))) return false;
    }
  return true;
}

bool transducer_state_final(const EqFormula& phi, int n) {
  for (int i = 1; i <= n; ++i)
    if (!phi.entails(Var::begin(i), Var::end(i))) return false;
  return true;
}

std::string StepWitness::str(const InteractionType& tau) const {
  std::ostringstream os;
  os << "I={";
  for (size_t k = 0; k < positions.size(); ++k) os << (k ? "," : "") << positions[k];
  os << "}";
  for (size_t k = 0; k < positions.size(); ++k)
    os << " " << xi[k].str() << ":" << moves[k].from << "-" << tau[positions[k] - 1] << "->" << moves[k].to;
  os << (interaction_atom >= 0 ? " J=[1," + std::to_string(tau.size()) + "]" : " J={}");
  return os.str();
}

namespace {

std::set<int> indices(const EqFormula& phi, VarKind k) {
  std::set<int> out;
  for (const auto& v : phi.vars())
    if (v.kind == k) out.insert(v.index);
  return out;
}

}  // namespace

std::vector<StepResult> transducer_step(const InteractionType& tau, const AlphabetSymbol& alpha,
                                        const std::vector<EqFormula>& child_states, const Behavior& b,
                                        int max_arity) {
  const int n = static_cast<int>(tau.size());
  if (static_cast<int>(child_states.size()) != alpha.rank())
    throw ArityMismatch("transducer step with " + std::to_string(child_states.size()) + " children for rank " +
                        std::to_string(alpha.rank()));
  std::vector<StepResult> out;
  // begin indices owned by children must be disjoint; ends come from one place only
  std::set<int> begins_below;
  int children_with_end = 0;
  for (const auto& phi : child_states) {
    for (int i : indices(phi, VarKind::Begin))
      if (!begins_below.insert(i).second) return out;
    if (!indices(phi, VarKind::End).empty()) ++children_with_end;
  }
  if (children_with_end > 1) return out;

  const FlatFormula& psi = alpha.body();
  // variables usable as xi: comp(x) together with state(x, q)
  std::vector<std::pair<Var, State>> candidates;
  for (const auto& x : psi.comps) {
    std::optional<State> q;
    bool clash = false;
    for (const auto& s : psi.states)
      if (s.x == x) {
        if (q && *q != s.q) clash = true;
        q = s.q;
      }
    if (q && !clash) candidates.emplace_back(x, *q);
  }

  std::vector<int> j_choices{-1};
  if (children_with_end == 0)
    for (size_t k = 0; k < psi.inters.size(); ++k)
      if (psi.inters[k].type() == tau) j_choices.push_back(static_cast<int>(k));

  std::vector<int> free_positions;
  for (int i = 1; i <= n; ++i)
    if (!begins_below.count(i)) free_positions.push_back(i);

  EqFormula below;
  for (size_t l = 0; l < child_states.size(); ++l) {
    std::map<Var, Var> s;
    for (const auto& v : child_states[l].vars())
      if (v.kind == VarKind::Param) s[v] = Var::childparam(static_cast<int>(l) + 1, v.index);
    below = below.conjoin(child_states[l].renamed(s));
  }
  EqFormula local = EqFormula::from_atoms(psi.eqs);

  auto finish = [&](const StepWitness& w) {
    EqFormula phi = below.conjoin(local);
    for (size_t k = 0; k < w.positions.size(); ++k) phi.add_eq(Var::begin(w.positions[k]), w.xi[k]);
    if (w.interaction_atom >= 0) {
      const auto& atom = psi.inters[w.interaction_atom];
      for (int l = 1; l <= n; ++l) phi.add_eq(Var::end(l), atom.bindings[l - 1].var);
    }
    phi = phi.restrict([&](const Var& v) {
      if (v.tag) return false;
      if (v.kind == VarKind::Begin || v.kind == VarKind::End) return true;
      return v.kind == VarKind::Param && v.index <= max_arity;
    });
    // singleton parameters carry no information
    phi = phi.restrict([&](const Var& v) {
      if (v.kind != VarKind::Param) return true;
      for (const auto& c : phi.classes())
        if (std::binary_search(c.begin(), c.end(), v)) return c.size() > 1;
      return false;
    });
    if (!transducer_state_valid(phi, n)) return;
    FlatFormula body = psi;
    for (size_t k = 0; k < w.xi.size(); ++k)
      for (auto& s : body.states)
        if (s.x == w.xi[k]) s.q = w.moves[k].to;
    out.push_back({AlphabetSymbol(std::move(body), alpha.arities()), std::move(phi), w});
  };

  // choose I as a subset of the free positions, then distinct xi and moves
  std::function<void(size_t, StepWitness&, std::vector<bool>&)> choose = [&](size_t k, StepWitness& w,
                                                                              std::vector<bool>& used) {
    if (k == free_positions.size()) {
      for (int j : j_choices) {
        w.interaction_atom = j;
        finish(w);
      }
      w.interaction_atom = -1;
      return;
    }
    choose(k + 1, w, used);  // position not in I
    int i = free_positions[k];
    for (size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      for (const Transition* t : b.moves(candidates[c].second, tau[i - 1])) {
        used[c] = true;
        w.positions.push_back(i);
        w.xi.push_back(candidates[c].first);
        w.moves.push_back(*t);
        choose(k + 1, w, used);
        w.positions.pop_back();
        w.xi.pop_back();
        w.moves.pop_back();
        used[c] = false;
      }
    }
  };
  StepWitness w;
  std::vector<bool> used(candidates.size(), false);
  choose(0, w, used);
  return out;
}

ImageAutomaton image(const TreeAutomaton& input, int root, const std::vector<InteractionType>& taus,
                     const Behavior& b, int max_arity, bool trace) {
  std::vector<int> renum;
  TreeAutomaton a = ta_restrict(input, root, &renum);
  const int r = renum[root];

  TreeAutomaton prod;
  std::vector<ImageState> info;
  std::map<std::tuple<int, int, EqFormula>, int> index;
  std::map<TaTransition, bool> fires;
  std::vector<std::string> log;

  auto state_id = [&](int base, int k, const EqFormula& phi) {
    auto key = std::make_tuple(k, base, phi);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = prod.add_state(a.states()[base] + "|" + std::to_string(k) + "|" + phi.str());
    info.push_back({base, k, phi});
    index.emplace(key, id);
    return id;
  };

  for (size_t k = 0; k < taus.size(); ++k) {
    const auto& tau = taus[k];
    const int n = static_cast<int>(tau.size());
    std::set<std::pair<size_t, std::vector<int>>> done;
    for (bool changed = true; changed;) {
      changed = false;
      // product states of this tau grouped by base state
      std::map<int, std::vector<int>> by_base;
      for (size_t s = 0; s < info.size(); ++s)
        if (info[s].tau == static_cast<int>(k)) by_base[info[s].base].push_back(static_cast<int>(s));
      for (size_t ti = 0; ti < a.transitions().size(); ++ti) {
        const auto& t = a.transitions()[ti];
        std::vector<std::vector<int>> combos{{}};
        for (int c : t.children) {
          std::vector<std::vector<int>> next;
          for (const auto& p : combos)
            for (int s : by_base[c]) {
              auto x = p;
              x.push_back(s);
              next.push_back(std::move(x));
            }
          combos = std::move(next);
        }
        for (const auto& combo : combos) {
          if (!done.insert({ti, combo}).second) continue;
          std::vector<EqFormula> kids;
          for (int s : combo) kids.push_back(info[s].phi);
          for (auto& res : transducer_step(tau, *a.symbols()[t.symbol], kids, b, max_arity)) {
            size_t before = info.size();
            int target = state_id(t.target, static_cast<int>(k), res.state);
            if (info.size() != before) changed = true;
            int sym = prod.add_symbol(res.output);
            TaTransition pt{sym, combo, target};
            prod.add_transition(pt);
            fires[pt] = res.witness.interaction_atom >= 0;
            if (trace) {
              std::ostringstream os;
              os << "tau=(";
              for (int p = 0; p < n; ++p) os << (p ? "," : "") << tau[p];
              os << ") " << a.states()[t.target] << " " << res.witness.str(tau) << " children=[";
              for (size_t c = 0; c < combo.size(); ++c) os << (c ? " " : "") << prod.states()[combo[c]];
              os << "] -> " << prod.states()[target];
              log.push_back(os.str());
            }
          }
        }
      }
    }
  }

  std::vector<int> targets;
  for (size_t s = 0; s < info.size(); ++s)
    if (info[s].base == r && transducer_state_final(info[s].phi, static_cast<int>(taus[info[s].tau].size())))
      prod.set_final(static_cast<int>(s));

  ImageAutomaton out;
  out.raw_states = prod.states().size();
  out.raw_transitions = prod.transitions().size();
  std::vector<int> keep;
  out.ta = ta_trim(prod, &keep);
  out.info.resize(out.ta.states().size());
  for (size_t s = 0; s < keep.size(); ++s)
    if (keep[s] >= 0) {
      out.info[keep[s]] = info[s];
      // report base states of the caller's automaton
      for (size_t q = 0; q < renum.size(); ++q)
        if (renum[q] == info[s].base) out.info[keep[s]].base = static_cast<int>(q);
    }
  for (int q : out.ta.finals()) out.targets.push_back(q);
  for (const auto& [t, f] : fires) {
    if (keep[t.target] < 0) continue;
    TaTransition n{t.symbol, {}, keep[t.target]};
    bool ok = true;
    for (int c : t.children) {
      if (keep[c] < 0) ok = false;
      n.children.push_back(keep[c]);
    }
    if (ok) out.fires_here[n] = f;
  }
  out.trace = std::move(log);
  return out;
}

}  // namespace clhavoc
