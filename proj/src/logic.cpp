#include "clhavoc/logic.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace clhavoc {

std::string render_address(const Address& a) {
  if (a.empty()) return "ε";
  std::string s;
  for (size_t k = 0; k < a.size(); ++k) {
    if (k) s += '.';
    s += std::to_string(a[k]);
  }
  return s;
}

std::string Var::str() const {
  std::string s;
  switch (kind) {
    case VarKind::Named: s = name; break;
    case VarKind::Param: s = "$in" + std::to_string(index); break;
    case VarKind::ChildParam: s = "$out" + std::to_string(child) + "." + std::to_string(index); break;
    case VarKind::Begin: s = "$begin" + std::to_string(index); break;
    case VarKind::End: s = "$end" + std::to_string(index); break;
  }
  if (tag) s += "@" + render_address(*tag);
  return s;
}

std::string render(const Var& v) { return v.str(); }

InteractionType InterAtom::type() const {
  InteractionType t;
  for (const auto& b : bindings) t.push_back(b.port);
  return t;
}

bool SepConj::operator==(const SepConj& o) const { return parts == o.parts; }
bool Exists::operator==(const Exists& o) const { return vars == o.vars && body == o.body; }

Formula emp() { return Formula{Emp{}}; }
Formula comp(Var x) { return Formula{CompAtom{std::move(x)}}; }
Formula state(Var x, State q) { return Formula{StateAtom{std::move(x), std::move(q)}}; }
Formula comp_in(Var x, State q) { return sep({comp(x), state(x, std::move(q))}); }
Formula inter(std::vector<VarPort> b) { return Formula{InterAtom{std::move(b)}}; }
Formula eq(Var a, Var b) { return Formula{EqAtom{std::move(a), std::move(b)}}; }
Formula neq(Var a, Var b) { return Formula{NeqAtom{std::move(a), std::move(b)}}; }
Formula pred(std::string name, std::vector<Var> args) { return Formula{PredAtom{std::move(name), std::move(args)}}; }

Formula sep(std::vector<Formula> parts) {
  std::vector<Formula> flat;
  for (auto& p : parts) {
    if (std::holds_alternative<Emp>(p.node)) continue;
    if (auto* s = std::get_if<SepConj>(&p.node)) {
      for (auto& q : s->parts) flat.push_back(std::move(q));
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return emp();
  if (flat.size() == 1) return std::move(flat.front());
  return Formula{SepConj{std::move(flat)}};
}

Formula exists(std::vector<Var> vars, Formula body) {
  if (vars.empty()) return body;
  if (auto* e = std::get_if<Exists>(&body.node)) {
    vars.insert(vars.end(), e->vars.begin(), e->vars.end());
    Formula inner = std::move(e->body.front());
    return Formula{Exists{std::move(vars), {std::move(inner)}}};
  }
  return Formula{Exists{std::move(vars), {std::move(body)}}};
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void collect_free(const Formula& f, std::set<Var>& bound, std::set<Var>& out) {
  auto use = [&](const Var& v) {
    if (!bound.count(v)) out.insert(v);
  };
  std::visit(overloaded{
                 [](const Emp&) {},
                 [&](const CompAtom& a) { use(a.x); },
                 [&](const StateAtom& a) { use(a.x); },
                 [&](const InterAtom& a) {
                   for (const auto& b : a.bindings) use(b.var);
                 },
                 [&](const EqAtom& a) { use(a.lhs), use(a.rhs); },
                 [&](const NeqAtom& a) { use(a.lhs), use(a.rhs); },
                 [&](const PredAtom& a) {
                   for (const auto& v : a.args) use(v);
                 },
                 [&](const SepConj& s) {
                   for (const auto& p : s.parts) collect_free(p, bound, out);
                 },
                 [&](const Exists& e) {
                   std::set<Var> inner = bound;
                   inner.insert(e.vars.begin(), e.vars.end());
                   collect_free(e.body.front(), inner, out);
                 },
             },
             f.node);
}

Var fresh_like(const Var& v, const std::set<Var>& avoid) {
  std::string base = v.kind == VarKind::Named ? v.name : v.str();
  for (int k = 1;; ++k) {
    Var c = Var::named(base + "_" + std::to_string(k));
    if (!avoid.count(c)) return c;
  }
}

Var subst_var(const std::map<Var, Var>& s, const Var& v) {
  auto it = s.find(v);
  return it == s.end() ? v : it->second;
}

}  // namespace

std::set<Var> free_vars(const Formula& f) {
  std::set<Var> bound, out;
  collect_free(f, bound, out);
  return out;
}

std::set<std::string> predicates_used(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (auto* p = std::get_if<PredAtom>(&g.node)) out.insert(p->pred);
    if (auto* s = std::get_if<SepConj>(&g.node))
      for (const auto& q : s->parts) go(q);
    if (auto* e = std::get_if<Exists>(&g.node)) go(e->body.front());
  };
  go(f);
  return out;
}

Formula substitute(const Formula& f, const std::map<Var, Var>& s) {
  return std::visit(
      overloaded{
          [&](const Emp&) { return emp(); },
          [&](const CompAtom& a) { return comp(subst_var(s, a.x)); },
          [&](const StateAtom& a) { return state(subst_var(s, a.x), a.q); },
          [&](const InterAtom& a) {
            std::vector<VarPort> b;
            for (const auto& x : a.bindings) b.push_back({subst_var(s, x.var), x.port});
            return inter(std::move(b));
          },
          [&](const EqAtom& a) { return eq(subst_var(s, a.lhs), subst_var(s, a.rhs)); },
          [&](const NeqAtom& a) { return neq(subst_var(s, a.lhs), subst_var(s, a.rhs)); },
          [&](const PredAtom& a) {
            std::vector<Var> args;
            for (const auto& v : a.args) args.push_back(subst_var(s, v));
            return pred(a.pred, std::move(args));
          },
          [&](const SepConj& c) {
            std::vector<Formula> parts;
            for (const auto& p : c.parts) parts.push_back(substitute(p, s));
            return Formula{SepConj{std::move(parts)}};
          },
          [&](const Exists& e) {
            const Formula& body = e.body.front();
            std::set<Var> fv = free_vars(body);
            std::map<Var, Var> inner;
            std::set<Var> ranges;
            for (const auto& [k, v] : s) {
              if (std::find(e.vars.begin(), e.vars.end(), k) != e.vars.end()) continue;
              if (!fv.count(k)) continue;
              inner[k] = v;
              ranges.insert(v);
            }
            std::set<Var> avoid = fv;
            avoid.insert(ranges.begin(), ranges.end());
            avoid.insert(e.vars.begin(), e.vars.end());
            std::vector<Var> vars;
            for (const auto& b : e.vars) {
              if (ranges.count(b)) {
                Var nb = fresh_like(b, avoid);
                avoid.insert(nb);
                inner[b] = nb;
                vars.push_back(nb);
              } else {
                vars.push_back(b);
              }
            }
            return Formula{Exists{std::move(vars), {substitute(body, inner)}}};
          },
      },
      f.node);
}

int formula_size(const Formula& f) {
  return std::visit(overloaded{
                        [](const Emp&) { return 1; },
                        [](const CompAtom&) { return 2; },
                        [](const StateAtom&) { return 3; },
                        [](const InterAtom& a) { return 1 + 2 * static_cast<int>(a.bindings.size()); },
                        [](const EqAtom&) { return 3; },
                        [](const NeqAtom&) { return 3; },
                        [](const PredAtom& a) { return 1 + static_cast<int>(a.args.size()); },
                        [](const SepConj& s) {
                          int n = static_cast<int>(s.parts.size()) - 1;
                          for (const auto& p : s.parts) n += formula_size(p);
                          return n;
                        },
                        [](const Exists& e) { return 2 * static_cast<int>(e.vars.size()) + formula_size(e.body.front()); },
                    },
                    f.node);
}

// ---- flat view ---------------------------------------------------------

std::set<Var> FlatFormula::all_vars() const {
  std::set<Var> out(exists.begin(), exists.end());
  out.insert(comps.begin(), comps.end());
  for (const auto& a : inters)
    for (const auto& b : a.bindings) out.insert(b.var);
  for (const auto& a : states) out.insert(a.x);
  for (const auto& a : eqs) out.insert(a.lhs), out.insert(a.rhs);
  for (const auto& a : neqs) out.insert(a.lhs), out.insert(a.rhs);
  for (const auto& a : preds) out.insert(a.args.begin(), a.args.end());
  return out;
}

std::set<Var> FlatFormula::free_vars() const {
  std::set<Var> out = all_vars();
  for (const auto& v : exists) out.erase(v);
  return out;
}

FlatFormula FlatFormula::renamed(const std::map<Var, Var>& s) const {
  FlatFormula r;
  for (const auto& v : exists) r.exists.push_back(subst_var(s, v));
  for (const auto& v : comps) r.comps.push_back(subst_var(s, v));
  for (const auto& a : inters) {
    InterAtom n;
    for (const auto& b : a.bindings) n.bindings.push_back({subst_var(s, b.var), b.port});
    r.inters.push_back(std::move(n));
  }
  for (const auto& a : states) r.states.push_back({subst_var(s, a.x), a.q});
  for (const auto& a : eqs) r.eqs.push_back({subst_var(s, a.lhs), subst_var(s, a.rhs)});
  for (const auto& a : neqs) r.neqs.push_back({subst_var(s, a.lhs), subst_var(s, a.rhs)});
  for (const auto& a : preds) {
    PredAtom n{a.pred, {}};
    for (const auto& v : a.args) n.args.push_back(subst_var(s, v));
    r.preds.push_back(std::move(n));
  }
  return r;
}

void FlatFormula::append(const FlatFormula& o) {
  exists.insert(exists.end(), o.exists.begin(), o.exists.end());
  comps.insert(comps.end(), o.comps.begin(), o.comps.end());
  inters.insert(inters.end(), o.inters.begin(), o.inters.end());
  states.insert(states.end(), o.states.begin(), o.states.end());
  eqs.insert(eqs.end(), o.eqs.begin(), o.eqs.end());
  neqs.insert(neqs.end(), o.neqs.begin(), o.neqs.end());
  preds.insert(preds.end(), o.preds.begin(), o.preds.end());
}

namespace {

void flatten_into(const Formula& f, std::map<Var, Var>& env, std::set<Var>& used, FlatFormula& out) {
  std::visit(overloaded{
                 [](const Emp&) {},
                 [&](const CompAtom& a) { out.comps.push_back(subst_var(env, a.x)); },
                 [&](const StateAtom& a) { out.states.push_back({subst_var(env, a.x), a.q}); },
                 [&](const InterAtom& a) {
                   InterAtom n;
                   for (const auto& b : a.bindings) n.bindings.push_back({subst_var(env, b.var), b.port});
                   out.inters.push_back(std::move(n));
                 },
                 [&](const EqAtom& a) { out.eqs.push_back({subst_var(env, a.lhs), subst_var(env, a.rhs)}); },
                 [&](const NeqAtom& a) { out.neqs.push_back({subst_var(env, a.lhs), subst_var(env, a.rhs)}); },
                 [&](const PredAtom& a) {
                   PredAtom n{a.pred, {}};
                   for (const auto& v : a.args) n.args.push_back(subst_var(env, v));
                   out.preds.push_back(std::move(n));
                 },
                 [&](const SepConj& s) {
                   for (const auto& p : s.parts) flatten_into(p, env, used, out);
                 },
                 [&](const Exists& e) {
                   std::map<Var, Var> inner = env;
                   for (const auto& v : e.vars) {
                     Var nv = v;
                     if (used.count(v)) nv = fresh_like(v, used);
                     used.insert(nv);
                     inner[v] = nv;
                     out.exists.push_back(nv);
                   }
                   flatten_into(e.body.front(), inner, used, out);
                 },
             },
             f.node);
}

}  // namespace

FlatFormula flatten(const Formula& f) {
  std::map<Var, Var> env;
  std::set<Var> used = free_vars(f);
  FlatFormula out;
  flatten_into(f, env, used, out);
  return out;
}

Formula to_formula(const FlatFormula& f) {
  std::vector<Formula> parts;
  std::vector<bool> state_done(f.states.size(), false);
  for (const auto& c : f.comps) {
    parts.push_back(comp(c));
    for (size_t k = 0; k < f.states.size(); ++k)
      if (!state_done[k] && f.states[k].x == c) {
        parts.push_back(state(c, f.states[k].q));
        state_done[k] = true;
        break;
      }
  }
  for (size_t k = 0; k < f.states.size(); ++k)
    if (!state_done[k]) parts.push_back(state(f.states[k].x, f.states[k].q));
  for (const auto& a : f.inters) parts.push_back(Formula{a});
  for (const auto& a : f.eqs) parts.push_back(Formula{a});
  for (const auto& a : f.neqs) parts.push_back(Formula{a});
  for (const auto& a : f.preds) parts.push_back(Formula{a});
  return exists(f.exists, sep(std::move(parts)));
}

std::string render(const Formula& f) {
  return std::visit(
      overloaded{
          [](const Emp&) -> std::string { return "emp"; },
          [](const CompAtom& a) { return "comp(" + a.x.str() + ")"; },
          [](const StateAtom& a) { return "state(" + a.x.str() + " : " + a.q + ")"; },
          [](const InterAtom& a) {
            std::string s = "<";
            for (size_t k = 0; k < a.bindings.size(); ++k) {
              if (k) s += ", ";
              s += a.bindings[k].var.str() + "." + a.bindings[k].port;
            }
            return s + ">";
          },
          [](const EqAtom& a) { return a.lhs.str() + " = " + a.rhs.str(); },
          [](const NeqAtom& a) { return a.lhs.str() + " != " + a.rhs.str(); },
          [](const PredAtom& a) {
            std::string s = a.pred + "(";
            for (size_t k = 0; k < a.args.size(); ++k) {
              if (k) s += ", ";
              s += a.args[k].str();
            }
            return s + ")";
          },
          [](const SepConj& c) {
            std::string s;
            for (size_t k = 0; k < c.parts.size(); ++k) {
              if (k) s += " * ";
              const Formula& p = c.parts[k];
              // comp(x) * state(x : q) prints as the shorthand
              if (auto* ca = std::get_if<CompAtom>(&p.node); ca && k + 1 < c.parts.size()) {
                if (auto* sa = std::get_if<StateAtom>(&c.parts[k + 1].node); sa && sa->x == ca->x) {
                  s += "comp(" + ca->x.str() + " : " + sa->q + ")";
                  ++k;
                  continue;
                }
              }
              if (std::holds_alternative<Exists>(p.node))
                s += "(" + render(p) + ")";
              else
                s += render(p);
            }
            return s;
          },
          [](const Exists& e) {
            std::string s = "exists ";
            for (size_t k = 0; k < e.vars.size(); ++k) {
              if (k) s += ", ";
              s += e.vars[k].str();
            }
            return s + " . " + render(e.body.front());
          },
      },
      f.node);
}

std::string render(const FlatFormula& f) { return render(to_formula(f)); }

// ---- SID ---------------------------------------------------------------

std::vector<std::string> Sid::predicates() const {
  std::vector<std::string> out;
  for (const auto& r : rules)
    if (std::find(out.begin(), out.end(), r.pred) == out.end()) out.push_back(r.pred);
  return out;
}

bool Sid::defines(const std::string& p) const {
  return std::any_of(rules.begin(), rules.end(), [&](const Rule& r) { return r.pred == p; });
}

int Sid::arity(const std::string& p) const {
  for (const auto& r : rules)
    if (r.pred == p) return static_cast<int>(r.params.size());
  throw UndefinedPredicate("undefined predicate " + p);
}

std::vector<const Rule*> Sid::rules_for(const std::string& p) const {
  std::vector<const Rule*> out;
  for (const auto& r : rules)
    if (r.pred == p) out.push_back(&r);
  return out;
}

void Sid::validate() const {
  std::map<std::string, int> ar;
  for (const auto& r : rules) {
    auto [it, fresh] = ar.emplace(r.pred, static_cast<int>(r.params.size()));
    if (!fresh && it->second != static_cast<int>(r.params.size()))
      throw ArityMismatch("predicate " + r.pred + " defined with different arities");
  }
  for (const auto& r : rules) {
    std::set<Var> ps(r.params.begin(), r.params.end());
    if (ps.size() != r.params.size()) throw MalformedRule("rule for " + r.pred + " repeats a parameter");
    for (const auto& v : free_vars(r.body))
      if (!ps.count(v)) throw MalformedRule("variable " + v.str() + " in rule for " + r.pred + " is not a parameter");
    FlatFormula fl = flatten(r.body);
    for (const auto& a : fl.preds) {
      auto it = ar.find(a.pred);
      if (it == ar.end()) throw UndefinedPredicate("undefined predicate " + a.pred + " in rule for " + r.pred);
      if (it->second != static_cast<int>(a.args.size()))
        throw ArityMismatch("predicate " + a.pred + " used with arity " + std::to_string(a.args.size()));
    }
  }
}

// ---- predicate-free evaluation -----------------------------------------

namespace {

class QpfMatcher {
 public:
  QpfMatcher(const Configuration& g, const Store& nu, const FlatFormula& f) : g_(g), f_(f) {
    std::set<Var> vars = f.all_vars();
    for (const auto& v : vars) index_.emplace(v, static_cast<int>(index_.size()));
    parent_.resize(index_.size());
    for (size_t k = 0; k < parent_.size(); ++k) parent_[k] = static_cast<int>(k);
    for (const auto& e : f.eqs) unite(cls(e.lhs), cls(e.rhs));
    value_.assign(parent_.size(), std::nullopt);
    need_.assign(parent_.size(), std::nullopt);
    for (const auto& v : f.free_vars()) {
      auto it = nu.find(v);
      if (it == nu.end()) throw UnboundVariable("variable " + v.str() + " not bound by the store");
      int c = cls(v);
      if (value_[c] && *value_[c] != it->second) ok_ = false;
      value_[c] = it->second;
    }
    for (const auto& s : f.states) {
      int c = cls(s.x);
      if (need_[c] && *need_[c] != s.q) ok_ = false;
      need_[c] = s.q;
    }
    for (const auto& n : f.neqs) {
      int a = cls(n.lhs), b = cls(n.rhs);
      if (a == b) ok_ = false;
      neq_.push_back({a, b});
    }
    for (size_t c = 0; c < value_.size(); ++c)
      if (value_[c] && static_cast<int>(c) == find(static_cast<int>(c)) && !consistent(static_cast<int>(c))) ok_ = false;
    inters_.assign(g.interactions().begin(), g.interactions().end());
  }

  bool run() {
    if (!ok_) return false;
    if (f_.comps.size() != g_.components().size()) return false;
    if (f_.inters.size() != inters_.size()) return false;
    {
      std::multiset<InteractionType> want, have;
      for (const auto& a : f_.inters) want.insert(a.type());
      for (const auto& i : inters_) have.insert(i.type());
      if (want != have) return false;
    }
    std::set<int> comp_classes;
    for (const auto& c : f_.comps)
      if (!comp_classes.insert(cls(c)).second) return false;
    used_inter_.assign(inters_.size(), false);
    return match_inter(0);
  }

 private:
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }
  int cls(const Var& v) { return find(index_.at(v)); }

  // checks the constraints of a bound class
  bool consistent(int c) {
    const ComponentId v = *value_[c];
    if (need_[c] && g_.state_of(v) != *need_[c]) return false;
    for (auto [a, b] : neq_) {
      int o = a == c ? b : (b == c ? a : -1);
      if (o >= 0 && value_[o] && *value_[o] == v) return false;
    }
    return true;
  }

  bool bind(int c, ComponentId v, std::vector<int>& trail) {
    if (value_[c]) return *value_[c] == v;
    value_[c] = v;
    trail.push_back(c);
    return consistent(c);
  }
  void undo(std::vector<int>& trail) {
    for (int c : trail) value_[c].reset();
    trail.clear();
  }

  bool match_inter(size_t k) {
    if (k == f_.inters.size()) {
      used_comp_.clear();
      return match_comp(0);
    }
    const auto& atom = f_.inters[k];
    for (size_t j = 0; j < inters_.size(); ++j) {
      if (used_inter_[j]) continue;
      const auto& i = inters_[j];
      if (i.bindings.size() != atom.bindings.size()) continue;
      bool same = true;
      for (size_t p = 0; p < i.bindings.size() && same; ++p) same = i.bindings[p].port == atom.bindings[p].port;
      if (!same) continue;
      std::vector<int> trail;
      bool good = true;
      for (size_t p = 0; p < i.bindings.size() && good; ++p)
        good = bind(cls(atom.bindings[p].var), i.bindings[p].component, trail);
      if (good) {
        used_inter_[j] = true;
        if (match_inter(k + 1)) return true;
        used_inter_[j] = false;
      }
      undo(trail);
    }
    return false;
  }

  bool match_comp(size_t k) {
    if (k == f_.comps.size()) return true;
    int c = cls(f_.comps[k]);
    if (value_[c]) {
      ComponentId v = *value_[c];
      if (!g_.components().count(v) || used_comp_.count(v)) return false;
      used_comp_.insert(v);
      if (match_comp(k + 1)) return true;
      used_comp_.erase(v);
      return false;
    }
    for (auto v : g_.components()) {
      if (used_comp_.count(v)) continue;
      std::vector<int> trail;
      if (bind(c, v, trail)) {
        used_comp_.insert(v);
        if (match_comp(k + 1)) return true;
        used_comp_.erase(v);
      }
      undo(trail);
    }
    return false;
  }

  const Configuration& g_;
  const FlatFormula& f_;
  std::map<Var, int> index_;
  std::vector<int> parent_;
  std::vector<std::optional<ComponentId>> value_;
  std::vector<std::optional<State>> need_;
  std::vector<std::pair<int, int>> neq_;
  std::vector<Interaction> inters_;
  std::vector<bool> used_inter_;
  std::set<ComponentId> used_comp_;
  bool ok_ = true;
};

}  // namespace

bool eval_qpf(const Configuration& g, const Store& nu, const FlatFormula& f) {
  if (!f.predicate_free()) throw Error("eval_qpf on a formula with predicate atoms");
  return QpfMatcher(g, nu, f).run();
}

bool eval_qpf(const Configuration& g, const Store& nu, const Formula& f) { return eval_qpf(g, nu, flatten(f)); }

// ---- unfolding ---------------------------------------------------------

namespace {

Address prefixed(int l, const std::optional<Address>& t) {
  Address a{l};
  if (t) a.insert(a.end(), t->begin(), t->end());
  return a;
}

// moves a child derivation under position l: parameters become the actual
// arguments, tags get the prefix
FlatFormula relocate(const FlatFormula& child, int l, const std::vector<Var>& args) {
  std::map<Var, Var> s;
  for (size_t j = 0; j < args.size(); ++j) s[Var::param(static_cast<int>(j) + 1)] = args[j];
  for (const auto& v : child.all_vars())
    if (v.tag && !s.count(v)) {
      Var w = v;
      w.tag = prefixed(l, v.tag);
      s[v] = w;
    }
  return child.renamed(s);
}

// body of one rule instance over placeholder params, existentials tagged at the root
FlatFormula rule_instance(const Rule& r) {
  FlatFormula fl = flatten(r.body);
  std::map<Var, Var> s;
  for (size_t j = 0; j < r.params.size(); ++j) s[r.params[j]] = Var::param(static_cast<int>(j) + 1);
  for (const auto& y : fl.exists) s[y] = y.tagged({});
  return fl.renamed(s);
}

}  // namespace

const std::vector<FlatFormula>& Unfolder::complete(const std::string& p, int depth) {
  auto key = std::make_pair(p, depth);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  std::vector<FlatFormula> out;
  if (depth > 0) {
    auto rules = sid_->rules_for(p);
    if (rules.empty()) throw UndefinedPredicate("undefined predicate " + p);
    for (const Rule* r : rules) {
      FlatFormula inst = rule_instance(*r);
      std::vector<PredAtom> atoms = std::move(inst.preds);
      inst.preds.clear();
      std::vector<FlatFormula> partial{inst};
      for (size_t l = 0; l < atoms.size() && !partial.empty(); ++l) {
        const auto& kids = complete(atoms[l].pred, depth - 1);
        std::vector<FlatFormula> next;
        for (const auto& kid : kids) {
          FlatFormula moved = relocate(kid, static_cast<int>(l) + 1, atoms[l].args);
          for (const auto& base : partial) {
            FlatFormula f = base;
            f.append(moved);
            next.push_back(std::move(f));
            if (next.size() + out.size() > limit_) throw Error("unfolding limit exceeded for " + p);
          }
        }
        partial = std::move(next);
      }
      for (auto& f : partial) out.push_back(std::move(f));
    }
  }
  return cache_.emplace(key, std::move(out)).first->second;
}

std::vector<FlatFormula> Unfolder::complete(const FlatFormula& f, int depth) {
  FlatFormula base = f;
  std::vector<PredAtom> atoms = std::move(base.preds);
  base.preds.clear();
  std::vector<FlatFormula> partial{base};
  for (size_t l = 0; l < atoms.size() && !partial.empty(); ++l) {
    if (static_cast<int>(atoms[l].args.size()) != sid_->arity(atoms[l].pred))
      throw ArityMismatch("predicate " + atoms[l].pred + " used with wrong arity");
    const auto& kids = complete(atoms[l].pred, depth);
    std::vector<FlatFormula> next;
    for (const auto& kid : kids) {
      FlatFormula moved = relocate(kid, static_cast<int>(l) + 1, atoms[l].args);
      for (const auto& b : partial) {
        FlatFormula g = b;
        g.append(moved);
        next.push_back(std::move(g));
        if (next.size() > limit_) throw Error("unfolding limit exceeded");
      }
    }
    partial = std::move(next);
  }
  return partial;
}

std::vector<Unfolding> unfold(const Sid& sid, const PredAtom& atom, int depth) {
  if (static_cast<int>(atom.args.size()) != sid.arity(atom.pred))
    throw ArityMismatch("predicate " + atom.pred + " used with wrong arity");
  // partial derivations, innermost first
  std::function<std::vector<std::pair<FlatFormula, bool>>(const std::string&, int)> go =
      [&](const std::string& p, int d) {
        std::vector<std::pair<FlatFormula, bool>> out;
        if (d == 0) {
          FlatFormula f;
          PredAtom a{p, {}};
          for (int j = 1; j <= sid.arity(p); ++j) a.args.push_back(Var::param(j));
          f.preds.push_back(a);
          out.emplace_back(std::move(f), false);
          return out;
        }
        for (const Rule* r : sid.rules_for(p)) {
          FlatFormula inst = rule_instance(*r);
          std::vector<PredAtom> atoms = std::move(inst.preds);
          inst.preds.clear();
          std::vector<std::pair<FlatFormula, bool>> partial{{inst, true}};
          for (size_t l = 0; l < atoms.size(); ++l) {
            auto kids = go(atoms[l].pred, d - 1);
            std::vector<std::pair<FlatFormula, bool>> next;
            for (const auto& [kid, kc] : kids) {
              FlatFormula moved = relocate(kid, static_cast<int>(l) + 1, atoms[l].args);
              for (const auto& [b, bc] : partial) {
                FlatFormula g = b;
                g.append(moved);
                next.emplace_back(std::move(g), bc && kc);
              }
            }
            partial = std::move(next);
          }
          for (auto& x : partial) out.push_back(std::move(x));
        }
        return out;
      };
  std::map<Var, Var> s;
  for (size_t j = 0; j < atom.args.size(); ++j) s[Var::param(static_cast<int>(j) + 1)] = atom.args[j];
  std::vector<Unfolding> result;
  for (auto& [f, c] : go(atom.pred, depth)) result.push_back({to_formula(f.renamed(s)), c});
  return result;
}

BoundedVerdict eval_bounded(const Configuration& g, const Store& nu, const FlatFormula& f, Unfolder& u, int depth) {
  const size_t nc = g.components().size(), ni = g.interactions().size();
  // common case: a single predicate atom
  if (f.preds.size() == 1 && f.exists.empty() && f.comps.empty() && f.inters.empty() && f.states.empty() &&
      f.eqs.empty() && f.neqs.empty()) {
    const auto& atom = f.preds.front();
    if (static_cast<int>(atom.args.size()) != u.sid().arity(atom.pred))
      throw ArityMismatch("predicate " + atom.pred + " used with wrong arity");
    std::map<Var, Var> s;
    for (size_t j = 0; j < atom.args.size(); ++j) s[Var::param(static_cast<int>(j) + 1)] = atom.args[j];
    for (const auto& cand : u.complete(atom.pred, depth)) {
      if (cand.comps.size() != nc || cand.inters.size() != ni) continue;
      if (eval_qpf(g, nu, cand.renamed(s))) return BoundedVerdict::Sat;
    }
    return BoundedVerdict::UnsatAtDepth;
  }
  for (const auto& cand : u.complete(f, depth)) {
    if (cand.comps.size() != nc || cand.inters.size() != ni) continue;
    if (eval_qpf(g, nu, cand)) return BoundedVerdict::Sat;
  }
  return BoundedVerdict::UnsatAtDepth;
}

BoundedVerdict eval_bounded(const Configuration& g, const Store& nu, const Formula& f, const Sid& sid, int depth) {
  Unfolder u(sid);
  return eval_bounded(g, nu, flatten(f), u, depth);
}

}  // namespace clhavoc
