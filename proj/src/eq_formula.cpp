#include "clhavoc/eq_formula.hpp"

#include <algorithm>

namespace clhavoc {

EqFormula EqFormula::from_atoms(const std::vector<EqAtom>& eqs, const std::set<Var>& extra) {
  EqFormula f;
  for (const auto& v : extra) f.add_var(v);
  for (const auto& e : eqs) f.add_eq(e.lhs, e.rhs);
  return f;
}

void EqFormula::normalize() {
  for (auto& c : classes_) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  classes_.erase(std::remove_if(classes_.begin(), classes_.end(), [](const auto& c) { return c.empty(); }),
                 classes_.end());
  std::sort(classes_.begin(), classes_.end());
}

void EqFormula::add_var(const Var& v) {
  if (mentions(v)) return;
  classes_.push_back({v});
  normalize();
}

void EqFormula::add_eq(const Var& a, const Var& b) {
  add_var(a);
  add_var(b);
  auto ia = std::find_if(classes_.begin(), classes_.end(),
                         [&](const auto& c) { return std::binary_search(c.begin(), c.end(), a); });
  auto ib = std::find_if(classes_.begin(), classes_.end(),
                         [&](const auto& c) { return std::binary_search(c.begin(), c.end(), b); });
  if (ia == ib) return;
  ia->insert(ia->end(), ib->begin(), ib->end());
  ib->clear();
  normalize();
}

EqFormula EqFormula::conjoin(const EqFormula& o) const {
  EqFormula r = *this;
  for (const auto& c : o.classes_) {
    r.add_var(c.front());
    for (size_t k = 1; k < c.size(); ++k) r.add_eq(c.front(), c[k]);
  }
  return r;
}

EqFormula EqFormula::restrict(const std::function<bool(const Var&)>& keep) const {
  EqFormula r;
  for (const auto& c : classes_) {
    std::vector<Var> kept;
    for (const auto& v : c)
      if (keep(v)) kept.push_back(v);
    if (!kept.empty()) r.classes_.push_back(std::move(kept));
  }
  r.normalize();
  return r;
}

EqFormula EqFormula::eliminate(const std::set<Var>& drop) const {
  return restrict([&](const Var& v) { return !drop.count(v); });
}

EqFormula EqFormula::renamed(const std::map<Var, Var>& s) const {
  EqFormula r;
  for (const auto& c : classes_) {
    std::vector<Var> n;
    for (const auto& v : c) {
      auto it = s.find(v);
      n.push_back(it == s.end() ? v : it->second);
    }
    r.add_var(n.front());
    for (size_t k = 1; k < n.size(); ++k) r.add_eq(n.front(), n[k]);
  }
  return r;
}

bool EqFormula::mentions(const Var& v) const {
  return std::any_of(classes_.begin(), classes_.end(),
                     [&](const auto& c) { return std::binary_search(c.begin(), c.end(), v); });
}

bool EqFormula::entails(const Var& a, const Var& b) const {
  for (const auto& c : classes_)
    if (std::binary_search(c.begin(), c.end(), a)) return std::binary_search(c.begin(), c.end(), b);
  return false;
}

std::set<Var> EqFormula::vars() const {
  std::set<Var> out;
  for (const auto& c : classes_) out.insert(c.begin(), c.end());
  return out;
}

std::string EqFormula::str() const {
  std::string s = "[";
  for (size_t k = 0; k < classes_.size(); ++k) {
    if (k) s += " ";
    s += "{";
    for (size_t j = 0; j < classes_[k].size(); ++j) {
      if (j) s += ",";
      s += classes_[k][j].str();
    }
    s += "}";
  }
  return s + "]";
}

}  // namespace clhavoc
