#include "clhavoc/automata.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace clhavoc {

namespace {

std::string atom_strings(const FlatFormula& f) {
  std::vector<std::string> xs;
  for (const auto& v : f.comps) xs.push_back("comp(" + v.str() + ")");
  for (const auto& a : f.states) xs.push_back("state(" + a.x.str() + ":" + a.q + ")");
  for (const auto& a : f.inters) xs.push_back(render(Formula{a}));
  for (const auto& a : f.eqs) {
    auto [l, r] = std::minmax(a.lhs, a.rhs);
    xs.push_back(l.str() + "=" + r.str());
  }
  for (const auto& a : f.neqs) {
    auto [l, r] = std::minmax(a.lhs, a.rhs);
    xs.push_back(l.str() + "!=" + r.str());
  }
  std::sort(xs.begin(), xs.end());
  std::string s;
  for (const auto& x : xs) s += x + ";";
  return s;
}

}  // namespace

AlphabetSymbol::AlphabetSymbol(FlatFormula body, std::vector<int> arities)
    : body_(std::move(body)), arities_(std::move(arities)) {
  if (arities_.empty()) throw Error("symbol without arity");
  if (!body_.predicate_free()) throw Error("symbol body with predicate atoms");
  for (const auto& v : body_.free_vars()) {
    bool ok = (v.kind == VarKind::Param && v.index >= 1 && v.index <= arities_[0]) ||
              (v.kind == VarKind::ChildParam && v.child >= 1 && v.child <= rank() && v.index >= 1 &&
               v.index <= arities_[v.child]);
    if (!ok) throw Error("symbol variable " + v.str() + " outside its parameters");
  }
  std::map<Var, Var> canon;
  for (size_t k = 0; k < body_.exists.size(); ++k) canon[body_.exists[k]] = Var::named("#" + std::to_string(k + 1));
  std::string s = "<";
  for (size_t k = 0; k < arities_.size(); ++k) s += (k ? "," : "") + std::to_string(arities_[k]);
  s += ">#" + std::to_string(body_.exists.size()) + ":" + atom_strings(body_.renamed(canon));
  key_ = std::move(s);
}

std::string AlphabetSymbol::str() const {
  std::string s = "<" + render(body_);
  for (int a : arities_) s += ", " + std::to_string(a);
  return s + ">";
}

const Tree& Tree::at(const Address& u) const {
  const Tree* t = this;
  for (int l : u) {
    if (l < 1 || l > static_cast<int>(t->children.size())) throw BadAddress("address " + render_address(u) + " not in tree");
    t = &t->children[l - 1];
  }
  return *t;
}

std::vector<Address> Tree::addresses() const {
  std::vector<Address> out;
  std::function<void(const Tree&, Address)> go = [&](const Tree& t, Address a) {
    out.push_back(a);
    for (size_t l = 0; l < t.children.size(); ++l) {
      Address b = a;
      b.push_back(static_cast<int>(l) + 1);
      go(t.children[l], b);
    }
  };
  go(*this, {});
  return out;
}

int Tree::height() const {
  int h = 0;
  for (const auto& c : children) h = std::max(h, c.height());
  return h + 1;
}

int Tree::size() const {
  int n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::string Tree::str() const {
  std::string s = label->str();
  if (!children.empty()) {
    s += "(";
    for (size_t k = 0; k < children.size(); ++k) s += (k ? ", " : "") + children[k].str();
    s += ")";
  }
  return s;
}

// ---- tree automata -------------------------------------------------------

int TreeAutomaton::add_symbol(const AlphabetSymbol& s) {
  auto it = symbol_index_.find(s.key());
  if (it != symbol_index_.end()) return it->second;
  symbols_.push_back(std::make_shared<AlphabetSymbol>(s));
  symbol_index_[s.key()] = static_cast<int>(symbols_.size()) - 1;
  return static_cast<int>(symbols_.size()) - 1;
}

int TreeAutomaton::find_symbol(const std::string& key) const {
  auto it = symbol_index_.find(key);
  return it == symbol_index_.end() ? -1 : it->second;
}

int TreeAutomaton::add_state(const std::string& name) {
  states_.push_back(name);
  return static_cast<int>(states_.size()) - 1;
}

void TreeAutomaton::add_transition(TaTransition t) {
  if (t.symbol < 0 || t.symbol >= static_cast<int>(symbols_.size())) throw Error("transition with unknown symbol");
  if (static_cast<int>(t.children.size()) != symbols_[t.symbol]->rank())
    throw ArityMismatch("transition arity differs from symbol rank");
  if (seen_.insert(t).second) transitions_.push_back(std::move(t));
}

void TreeAutomaton::set_final(int q, bool f) {
  if (f) finals_.insert(q);
  else finals_.erase(q);
}

std::string TreeAutomaton::str() const {
  std::ostringstream os;
  os << "states:";
  for (size_t q = 0; q < states_.size(); ++q) os << " " << states_[q] << (finals_.count(static_cast<int>(q)) ? "*" : "");
  os << "\n";
  for (const auto& t : transitions_) {
    os << "  " << symbols_[t.symbol]->str() << "(";
    for (size_t k = 0; k < t.children.size(); ++k) os << (k ? ", " : "") << states_[t.children[k]];
    os << ") -> " << states_[t.target] << "\n";
  }
  return os.str();
}

// ---- characteristic formulas --------------------------------------------

namespace {

void char_into(const Tree& t, const Address& u, FlatFormula& out) {
  const FlatFormula& b = t.label->body();
  std::map<Var, Var> s;
  for (const auto& v : b.all_vars()) {
    if (v.kind == VarKind::Param) {
      s[v] = Var::param(v.index).tagged(u);
    } else if (v.kind == VarKind::ChildParam) {
      Address w = u;
      w.push_back(v.child);
      s[v] = Var::param(v.index).tagged(w);
    } else {
      s[v] = v.tagged(u);
    }
  }
  FlatFormula f = b.renamed(s);
  f.exists.clear();
  out.append(f);
  for (size_t l = 0; l < t.children.size(); ++l) {
    Address w = u;
    w.push_back(static_cast<int>(l) + 1);
    char_into(t.children[l], w, out);
  }
}

}  // namespace

FlatFormula char_formula(const Tree& t, const Address& u) {
  FlatFormula out;
  char_into(t.at(u), u, out);
  return out;
}

FlatFormula closed_char_formula(const Tree& t, const Address& u) {
  FlatFormula f = char_formula(t, u);
  for (const auto& v : f.all_vars())
    if (!(v.kind == VarKind::Param && v.tag == u)) f.exists.push_back(v);
  return f;
}

// ---- SID <-> TA ----------------------------------------------------------

SidAutomaton sid_to_ta(const Sid& sid) {
  SidAutomaton out;
  for (const auto& p : sid.predicates()) out.state_of[p] = out.ta.add_state(p);
  for (const auto& r : sid.rules) {
    FlatFormula f = flatten(r.body);
    std::map<Var, Var> s;
    for (size_t j = 0; j < r.params.size(); ++j) s[r.params[j]] = Var::param(static_cast<int>(j) + 1);
    for (const auto& y : f.exists)
      if (y.kind != VarKind::Named || y.tag) throw NonNormalizableRule("rule for " + r.pred + " binds a reserved variable");
    f = f.renamed(s);
    std::vector<int> arities{static_cast<int>(r.params.size())};
    std::vector<int> kids;
    std::vector<PredAtom> atoms = std::move(f.preds);
    f.preds.clear();
    for (size_t l = 0; l < atoms.size(); ++l) {
      auto it = out.state_of.find(atoms[l].pred);
      if (it == out.state_of.end()) throw UndefinedPredicate("undefined predicate " + atoms[l].pred);
      kids.push_back(it->second);
      arities.push_back(static_cast<int>(atoms[l].args.size()));
      for (size_t i = 0; i < atoms[l].args.size(); ++i)
        f.eqs.push_back({Var::childparam(static_cast<int>(l) + 1, static_cast<int>(i) + 1), atoms[l].args[i]});
    }
    int sym = out.ta.add_symbol(AlphabetSymbol(std::move(f), arities));
    out.rule_symbol.push_back(sym);
    out.ta.add_transition({sym, kids, out.state_of.at(r.pred)});
  }
  for (const auto& [p, q] : out.state_of) out.ta.set_final(q);
  return out;
}

bool is_sid_compatible(const TreeAutomaton& a) {
  std::map<int, int> arity;
  auto agree = [&](int q, int n) {
    auto [it, fresh] = arity.emplace(q, n);
    return fresh || it->second == n;
  };
  for (const auto& t : a.transitions()) {
    const auto& ar = a.symbols()[t.symbol]->arities();
    if (!agree(t.target, ar[0])) return false;
    for (size_t l = 0; l < t.children.size(); ++l)
      if (!agree(t.children[l], ar[l + 1])) return false;
  }
  return true;
}

Sid ta_to_sid(const TreeAutomaton& a, const std::vector<std::string>& pred_name, const Behavior& b) {
  if (!is_sid_compatible(a)) throw NotSidCompatible("automaton is not SID-compatible");
  Sid sid;
  sid.behavior = b;
  for (const auto& t : a.transitions()) {
    const AlphabetSymbol& sym = *a.symbols()[t.symbol];
    const FlatFormula& body = sym.body();
    Rule r;
    r.pred = pred_name.at(t.target);
    std::set<std::string> reserved;
    std::map<Var, Var> s;
    for (int j = 1; j <= sym.arity(); ++j) {
      Var x = Var::named("x" + std::to_string(j));
      r.params.push_back(x);
      s[Var::param(j)] = x;
      reserved.insert(x.name);
    }
    FlatFormula f;
    std::vector<std::vector<Var>> child_args(t.children.size());
    for (size_t l = 0; l < t.children.size(); ++l)
      for (int i = 1; i <= sym.arities()[l + 1]; ++i) {
        Var y = Var::named("y" + std::to_string(l + 1) + "_" + std::to_string(i));
        s[Var::childparam(static_cast<int>(l) + 1, i)] = y;
        child_args[l].push_back(y);
        f.exists.push_back(y);
        reserved.insert(y.name);
      }
    for (const auto& y : body.exists) {
      Var w = y.kind == VarKind::Named && !y.tag ? y : Var::named("e");
      std::string base = w.name;
      for (int k = 1; reserved.count(w.name); ++k) w = Var::named(base + "_" + std::to_string(k));
      reserved.insert(w.name);
      s[y] = w;
    }
    FlatFormula inst = body.renamed(s);
    inst.exists.insert(inst.exists.begin(), f.exists.begin(), f.exists.end());
    for (size_t l = 0; l < t.children.size(); ++l) inst.preds.push_back({pred_name.at(t.children[l]), child_args[l]});
    r.body = to_formula(inst);
    sid.rules.push_back(std::move(r));
  }
  return sid;
}

std::set<int> ta_run_states(const TreeAutomaton& a, const Tree& t) {
  std::vector<std::set<int>> kids;
  for (const auto& c : t.children) kids.push_back(ta_run_states(a, c));
  std::set<int> out;
  int sym = a.find_symbol(t.label->key());
  if (sym < 0) return out;
  for (const auto& tr : a.transitions()) {
    if (tr.symbol != sym || tr.children.size() != kids.size()) continue;
    bool ok = true;
    for (size_t l = 0; l < kids.size() && ok; ++l) ok = kids[l].count(tr.children[l]) != 0;
    if (ok) out.insert(tr.target);
  }
  return out;
}

bool ta_membership(const TreeAutomaton& a, const Tree& t, int q) { return ta_run_states(a, t).count(q) != 0; }

namespace {

TreeAutomaton keep_states(const TreeAutomaton& a, const std::vector<bool>& keep, std::vector<int>* renumber) {
  TreeAutomaton r;
  for (const auto& s : a.symbols()) r.add_symbol(*s);
  std::vector<int> map(a.states().size(), -1);
  for (size_t q = 0; q < a.states().size(); ++q)
    if (keep[q]) map[q] = r.add_state(a.states()[q]);
  for (int q : a.finals())
    if (map[q] >= 0) r.set_final(map[q]);
  for (const auto& t : a.transitions()) {
    if (map[t.target] < 0) continue;
    TaTransition n{t.symbol, {}, map[t.target]};
    bool ok = true;
    for (int c : t.children) {
      if (map[c] < 0) ok = false;
      n.children.push_back(map[c]);
    }
    if (ok) r.add_transition(std::move(n));
  }
  if (renumber) *renumber = map;
  return r;
}

}  // namespace

TreeAutomaton ta_trim(const TreeAutomaton& a, std::vector<int>* renumber) {
  size_t n = a.states().size();
  std::vector<bool> prod(n, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : a.transitions()) {
      if (prod[t.target]) continue;
      if (std::all_of(t.children.begin(), t.children.end(), [&](int c) { return prod[c]; }))
        prod[t.target] = changed = true;
    }
  }
  std::vector<bool> useful(n, false);
  for (int q : a.finals())
    if (prod[q]) useful[q] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : a.transitions()) {
      if (!useful[t.target]) continue;
      if (!std::all_of(t.children.begin(), t.children.end(), [&](int c) { return prod[c]; })) continue;
      for (int c : t.children)
        if (!useful[c]) useful[c] = changed = true;
    }
  }
  std::vector<bool> keep(n);
  for (size_t q = 0; q < n; ++q) keep[q] = prod[q] && useful[q];
  return keep_states(a, keep, renumber);
}

TreeAutomaton ta_restrict(const TreeAutomaton& a, int root, std::vector<int>* renumber) {
  std::vector<bool> keep(a.states().size(), false);
  keep[root] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : a.transitions())
      if (keep[t.target])
        for (int c : t.children)
          if (!keep[c]) keep[c] = changed = true;
  }
  return keep_states(a, keep, renumber);
}

std::vector<Tree> enumerate_trees(const TreeAutomaton& a, int q, int h, size_t limit) {
  std::map<std::pair<int, int>, std::vector<Tree>> memo;
  std::function<const std::vector<Tree>&(int, int)> go = [&](int s, int d) -> const std::vector<Tree>& {
    auto key = std::make_pair(s, d);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<Tree> out;
    if (d > 0)
      for (const auto& t : a.transitions()) {
        if (t.target != s) continue;
        std::vector<std::vector<Tree>> partial{{}};
        for (int c : t.children) {
          const auto& kids = go(c, d - 1);
          std::vector<std::vector<Tree>> next;
          for (const auto& p : partial)
            for (const auto& k : kids) {
              auto x = p;
              x.push_back(k);
              next.push_back(std::move(x));
              if (next.size() > limit) throw Error("tree enumeration limit exceeded");
            }
          partial = std::move(next);
        }
        for (auto& p : partial) {
          out.push_back(Tree{a.symbols()[t.symbol], std::move(p)});
          if (out.size() > limit) throw Error("tree enumeration limit exceeded");
        }
      }
    return memo.emplace(key, std::move(out)).first->second;
  };
  return go(q, h);
}

}  // namespace clhavoc
