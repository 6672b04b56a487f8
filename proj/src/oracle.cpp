#include "clhavoc/oracle.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>

#include "clhavoc/reduction.hpp"

namespace clhavoc {

// ---- canonical form ----------------------------------------------------

namespace {

class Canon {
 public:
  Canon(const Configuration& g, const std::vector<ComponentId>& store) : g_(g), store_(store) {
    std::set<ComponentId> all = g.ids();
    all.insert(store.begin(), store.end());
    ids_.assign(all.begin(), all.end());
    for (size_t k = 0; k < ids_.size(); ++k) pos_[ids_[k]] = static_cast<int>(k);
    std::set<std::string> names;
    for (const auto& [c, q] : g.state_map()) names.insert(q);
    for (const auto& i : g.interactions())
      for (const auto& b : i.bindings) names.insert(b.port);
    int k = 0;
    for (const auto& n : names) name_[n] = ++k;
    for (const auto& i : g.interactions()) {
      std::vector<std::pair<int, int>> v;
      for (const auto& b : i.bindings) v.emplace_back(pos_[b.component], name_[b.port]);
      inters_.push_back(std::move(v));
    }
  }

  std::string run() {
    std::vector<std::vector<int>> sig(ids_.size());
    for (size_t k = 0; k < ids_.size(); ++k) {
      ComponentId c = ids_[k];
      sig[k].push_back(g_.components().count(c) ? 1 : 0);
      sig[k].push_back(g_.has_state(c) ? name_[g_.state_of(c)] : 0);
      for (size_t s = 0; s < store_.size(); ++s)
        if (store_[s] == c) sig[k].push_back(static_cast<int>(s) + 1);
    }
    std::vector<int> col = ranks(sig);
    search(refine(col));
    return best_;
  }

 private:
  static std::vector<int> ranks(const std::vector<std::vector<int>>& sig) {
    std::vector<std::vector<int>> u = sig;
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    std::vector<int> out;
    for (const auto& s : sig) out.push_back(static_cast<int>(std::lower_bound(u.begin(), u.end(), s) - u.begin()));
    return out;
  }

  static int count(const std::vector<int>& col) { return static_cast<int>(std::set<int>(col.begin(), col.end()).size()); }

  std::vector<int> refine(std::vector<int> col) const {
    while (true) {
      std::vector<std::vector<std::vector<int>>> nb(ids_.size());
      for (const auto& i : inters_)
        for (size_t p = 0; p < i.size(); ++p) {
          std::vector<int> s{static_cast<int>(p), static_cast<int>(i.size())};
          for (auto [x, port] : i) s.push_back(port), s.push_back(col[x]);
          nb[i[p].first].push_back(std::move(s));
        }
      std::vector<std::vector<int>> sig(ids_.size());
      for (size_t k = 0; k < ids_.size(); ++k) {
        std::sort(nb[k].begin(), nb[k].end());
        sig[k].push_back(col[k]);
        for (const auto& s : nb[k]) {
          sig[k].push_back(-1);
          sig[k].insert(sig[k].end(), s.begin(), s.end());
        }
      }
      std::vector<int> next = ranks(sig);
      if (count(next) == count(col)) return next;
      col = std::move(next);
    }
  }

  void search(const std::vector<int>& col) {
    int n = static_cast<int>(ids_.size());
    if (count(col) == n) {
      std::string enc = encode(col);
      if (best_.empty() || enc < best_) best_ = enc;
      return;
    }
    // first non-singleton cell
    std::map<int, std::vector<int>> cells;
    for (int k = 0; k < n; ++k) cells[col[k]].push_back(k);
    for (const auto& [c, members] : cells) {
      if (members.size() < 2) continue;
      for (int m : members) {
        std::vector<int> split(n);
        for (int k = 0; k < n; ++k) split[k] = 2 * col[k] + (k == m ? 0 : 1);
        search(refine(ranks_of(split)));
      }
      return;
    }
  }

  static std::vector<int> ranks_of(const std::vector<int>& v) {
    std::vector<std::vector<int>> s;
    for (int x : v) s.push_back({x});
    return ranks(s);
  }

  std::string encode(const std::vector<int>& col) const {
    std::ostringstream os;
    std::vector<int> by(ids_.size());
    for (size_t k = 0; k < ids_.size(); ++k) by[col[k]] = static_cast<int>(k);
    for (int lbl = 0; lbl < static_cast<int>(ids_.size()); ++lbl) {
      ComponentId c = ids_[by[lbl]];
      os << (g_.components().count(c) ? 'C' : 'a') << (g_.has_state(c) ? g_.state_of(c) : "?") << ' ';
    }
    std::vector<std::string> is;
    for (const auto& i : inters_) {
      std::string s = "<";
      for (auto [x, port] : i) s += std::to_string(col[x]) + "." + std::to_string(port) + ",";
      is.push_back(s + ">");
    }
    std::sort(is.begin(), is.end());
    os << "|";
    for (const auto& s : is) os << s;
    os << "|";
    for (auto c : store_) os << col[pos_.at(c)] << ",";
    // port and state names by number, so spell them out once
    os << "|";
    for (const auto& [n, k] : name_) os << n << "=" << k << ",";
    return os.str();
  }

  const Configuration& g_;
  const std::vector<ComponentId>& store_;
  std::vector<ComponentId> ids_;
  std::map<ComponentId, int> pos_;
  std::map<std::string, int> name_;
  std::vector<std::vector<std::pair<int, int>>> inters_;
  std::string best_;
};

}  // namespace

std::string canonical_key(const Configuration& g, const std::vector<ComponentId>& store) {
  std::string k = Canon(g, store).run();
  return std::to_string(g.components().size()) + "#" + k;
}

void ModelSet::insert(Model m) {
  std::string k = canonical_key(m.config, m.store);
  models.emplace(std::move(k), std::move(m));
}

std::vector<const Model*> ModelSet::ordered() const {
  std::vector<std::pair<std::pair<size_t, std::string>, const Model*>> v;
  for (const auto& [k, m] : models) v.push_back({{m.config.components().size(), k}, &m});
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<const Model*> out;
  for (const auto& x : v) out.push_back(x.second);
  return out;
}

std::vector<Var> standard_params(int n) {
  std::vector<Var> out;
  for (int j = 1; j <= n; ++j) out.push_back(Var::named("x" + std::to_string(j)));
  return out;
}

// ---- enumeration of models of a predicate-free formula --------------------

ModelSet models_of_qpf(const FlatFormula& f, const std::vector<Var>& store_vars, const Behavior& b) {
  ModelSet out;
  std::vector<Var> vars;
  {
    std::set<Var> all = f.all_vars();
    all.insert(store_vars.begin(), store_vars.end());
    vars.assign(all.begin(), all.end());
  }
  std::map<Var, int> idx;
  for (size_t k = 0; k < vars.size(); ++k) idx[vars[k]] = static_cast<int>(k);
  std::vector<int> parent(vars.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& e : f.eqs) {
    int a = find(idx[e.lhs]), c = find(idx[e.rhs]);
    if (a != c) parent[std::max(a, c)] = std::min(a, c);
  }
  auto cls = [&](const Var& v) { return find(idx.at(v)); };

  const int nv = static_cast<int>(vars.size());
  std::vector<int> comp_count(nv, 0);
  std::vector<std::optional<State>> need(nv);
  for (const auto& c : f.comps)
    if (++comp_count[cls(c)] > 1) return out;
  for (const auto& s : f.states) {
    int c = cls(s.x);
    if (need[c] && *need[c] != s.q) return out;
    need[c] = s.q;
  }
  for (const auto& n : f.neqs)
    if (cls(n.lhs) == cls(n.rhs)) return out;

  std::vector<int> comp_classes, loose;  // loose: visible classes without a component atom
  std::set<int> visible;
  for (const auto& a : f.inters)
    for (const auto& bd : a.bindings) visible.insert(cls(bd.var));
  for (const auto& v : store_vars) visible.insert(cls(v));
  for (int c = 0; c < nv; ++c) {
    if (find(c) != c) continue;
    if (comp_count[c]) comp_classes.push_back(c);
    else if (visible.count(c)) loose.push_back(c);
  }
  const int m = static_cast<int>(comp_classes.size());

  // each loose class joins a component class or one of the absent groups
  std::vector<int> choice(loose.size());
  std::function<void(size_t, int)> go = [&](size_t k, int groups) {
    if (k < loose.size()) {
      for (int t = 0; t < m + groups + 1; ++t) {
        choice[k] = t;
        go(k + 1, std::max(groups, t - m + 1));
      }
      return;
    }
    std::map<int, int> id;  // class -> component id value
    for (int j = 0; j < m; ++j) id[comp_classes[j]] = j + 1;
    for (size_t j = 0; j < loose.size(); ++j) id[loose[j]] = choice[j] + 1;
    const int nid = m + groups;
    std::vector<std::optional<State>> st(nid + 1);
    for (const auto& [c, v] : id)
      if (need[c]) {
        if (st[v] && *st[v] != *need[c]) return;
        st[v] = need[c];
      }
    for (const auto& n : f.neqs) {
      auto a = id.find(cls(n.lhs)), c = id.find(cls(n.rhs));
      if (a != id.end() && c != id.end() && a->second == c->second) return;
    }
    std::set<Interaction> inters;
    for (const auto& a : f.inters) {
      Interaction i;
      std::set<int> seen;
      for (const auto& bd : a.bindings) {
        int v = id.at(cls(bd.var));
        if (!seen.insert(v).second) return;
        i.bindings.push_back({ComponentId{v}, bd.port});
      }
      if (!inters.insert(i).second) return;
    }
    std::set<ComponentId> comps;
    for (int j = 1; j <= m; ++j) comps.insert(ComponentId{j});
    std::vector<ComponentId> store;
    for (const auto& v : store_vars) store.push_back(ComponentId{id.at(cls(v))});
    // free states range over the behaviour
    std::vector<int> open;
    for (int v = 1; v <= nid; ++v)
      if (!st[v]) open.push_back(v);
    std::vector<size_t> pick(open.size(), 0);
    if (!open.empty() && b.states.empty()) return;
    while (true) {
      std::map<ComponentId, State> rho;
      for (int v = 1; v <= nid; ++v)
        if (st[v]) rho[ComponentId{v}] = *st[v];
      for (size_t k2 = 0; k2 < open.size(); ++k2) rho[ComponentId{open[k2]}] = b.states[pick[k2]];
      out.insert(Model{Configuration(comps, inters, std::move(rho)), store});
      size_t k2 = 0;
      while (k2 < pick.size() && ++pick[k2] == b.states.size()) pick[k2++] = 0;
      if (k2 == pick.size()) break;
    }
  };
  go(0, 0);
  return out;
}

ModelSet enumerate_models(const Sid& sid, const Formula& f, const std::vector<Var>& store_vars, int depth) {
  Unfolder u(sid);
  ModelSet out;
  for (const auto& cand : u.complete(flatten(f), depth))
    for (auto& [k, m] : models_of_qpf(cand, store_vars, sid.behavior).models) out.models.emplace(k, std::move(m));
  return out;
}

ModelSet enumerate_models(const Sid& sid, const std::string& pred, int depth) {
  auto xs = standard_params(sid.arity(pred));
  return enumerate_models(sid, clhavoc::pred(pred, xs), xs, depth);
}

std::string render_model(const Model& m, const std::vector<Var>& store_vars) {
  std::string s = render(m.config);
  if (!m.store.empty()) {
    s += " store:";
    for (size_t k = 0; k < m.store.size(); ++k)
      s += " " + (k < store_vars.size() ? store_vars[k].str() : "x" + std::to_string(k + 1)) + "=" + to_string(m.store[k]);
  }
  return s;
}

std::string Counterexample::str() const {
  return "model " + render_model(model, standard_params(static_cast<int>(model.store.size()))) + "\n  fires " + render(interaction) + "\n  reaching " + render(successor);
}

// ---- bounded checks ------------------------------------------------------

namespace {

Store store_of(const std::vector<Var>& xs, const std::vector<ComponentId>& vals) {
  Store s;
  for (size_t k = 0; k < xs.size(); ++k) s[xs[k]] = vals[k];
  return s;
}

}  // namespace

HavocVerdict havoc_invariant_bounded(const Sid& sid, const std::string& pred, int depth) {
  HavocVerdict out;
  auto xs = standard_params(sid.arity(pred));
  ModelSet ms = enumerate_models(sid, pred, depth);
  out.models = ms.size();
  Unfolder u(sid);
  FlatFormula goal = flatten(clhavoc::pred(pred, xs));
  for (const Model* m : ms.ordered()) {
    Store nu = store_of(xs, m->store);
    for (const auto& i : m->config.interactions())
      for (const auto& g2 : step(m->config, i, sid.behavior)) {
        ++out.successors;
        if (g2 == m->config) continue;
        if (eval_bounded(g2, nu, goal, u, depth) == BoundedVerdict::Sat) continue;
        out.invariant = false;
        out.cex = Counterexample{*m, i, g2};
        return out;
      }
  }
  return out;
}

EntailVerdict entails_bounded(const Sid& sid, const Formula& lhs, const Formula& rhs, int depth) {
  EntailVerdict out;
  auto fl = free_vars(lhs);
  std::vector<Var> xs(fl.begin(), fl.end());
  std::vector<Var> extra;
  for (const auto& v : free_vars(rhs))
    if (!fl.count(v)) extra.push_back(v);
  FlatFormula goal = flatten(exists(extra, rhs));
  ModelSet ms = enumerate_models(sid, lhs, xs, depth);
  out.models = ms.size();
  Unfolder u(sid);
  for (const Model* m : ms.ordered()) {
    if (eval_bounded(m->config, store_of(xs, m->store), goal, u, depth) == BoundedVerdict::Sat) continue;
    out.holds = false;
    out.cex = *m;
    return out;
  }
  return out;
}

CrossValidation cross_validate_reduction(const Sid& sid, const std::string& pred, const ReductionResult& red,
                                         int depth) {
  CrossValidation out;
  std::set<std::string> left, right;
  std::map<std::string, std::string> shown;
  for (const auto& [k, m] : enumerate_models(sid, pred, depth).models)
    for (const auto& i : m.config.interactions()) {
      bool present = std::all_of(i.bindings.begin(), i.bindings.end(),
                                 [&](const Binding& b) { return m.config.components().count(b.component) != 0; });
      if (!present) continue;
      for (const auto& g2 : step(m.config, i, sid.behavior)) {
        std::string key = canonical_key(g2, m.store);
        if (left.insert(key).second) shown[key] = render_model(Model{g2, m.store});
      }
    }
  for (const auto& t : red.targets)
    for (const auto& [k, m] : enumerate_models(red.combined, t, depth).models)
      if (right.insert(k).second) shown[k] = render_model(m);
  out.left = left.size();
  out.right = right.size();
  for (const auto& k : left)
    if (!right.count(k) && out.only_left.size() < 5) out.only_left.push_back(shown[k]);
  for (const auto& k : right)
    if (!left.count(k) && out.only_right.size() < 5) out.only_right.push_back(shown[k]);
  out.equal = left == right;
  return out;
}

StepClosure havoc_step_closure(const Sid& sid, const std::string& pred, int depth) {
  StepClosure out;
  ModelSet ms = enumerate_models(sid, pred, depth);
  for (const auto& [k, m] : ms.models) {
    for (const auto& g2 : successors(m.config, sid.behavior))
      if (!ms.contains(canonical_key(g2, m.store))) out.one_step = false;
    std::set<Configuration> seen{m.config};
    std::deque<Configuration> work{m.config};
    while (!work.empty() && out.multi_step) {
      Configuration g = work.front();
      work.pop_front();
      if (!ms.contains(canonical_key(g, m.store))) out.multi_step = false;
      for (auto& g2 : successors(g, sid.behavior))
        if (seen.insert(g2).second) work.push_back(std::move(g2));
    }
  }
  return out;
}

std::map<std::string, std::set<int>> profile_bruteforce(const Sid& sid, int depth) {
  std::map<std::string, std::set<int>> out;
  std::map<const Rule*, FlatFormula> bodies;
  for (const auto& r : sid.rules) bodies[&r] = flatten(r.body);
  // (predicate, positions still holding a root parameter)
  using Item = std::pair<std::string, std::vector<bool>>;
  std::set<Item> seen;
  std::vector<Item> frontier;
  for (const auto& p : sid.predicates()) {
    Item it{p, std::vector<bool>(sid.arity(p), true)};
    if (seen.insert(it).second) frontier.push_back(it);
  }
  for (int d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<Item> next;
    for (const auto& [p, ok] : frontier)
      for (const Rule* r : sid.rules_for(p))
        for (const auto& atom : bodies[r].preds) {
          std::vector<bool> ok2(atom.args.size(), false);
          for (size_t i = 0; i < atom.args.size(); ++i)
            for (size_t j = 0; j < r->params.size(); ++j)
              if (ok[j] && r->params[j] == atom.args[i]) ok2[i] = true;
          Item it{atom.pred, ok2};
          if (seen.insert(it).second) next.push_back(it);
        }
    frontier = std::move(next);
  }
  for (const auto& p : sid.predicates()) {
    out[p];
    for (int i = 1; i <= sid.arity(p); ++i) out[p].insert(i);
  }
  for (const auto& [p, ok] : seen)
    for (size_t i = 0; i < ok.size(); ++i)
      if (!ok[i]) out[p].erase(static_cast<int>(i) + 1);
  return out;
}

bool sample_tightness(const Sid& sid, const std::string& pred, int depth, std::optional<Model>* loose) {
  ModelSet ms = enumerate_models(sid, pred, depth);
  for (const Model* m : ms.ordered())
    if (!is_tight(m->config)) {
      if (loose) *loose = *m;
      return false;
    }
  return true;
}

}  // namespace clhavoc
