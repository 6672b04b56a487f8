#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "clhavoc/logic.hpp"

namespace clhavoc {

// Separating conjunction of equalities, kept as a partition of an explicit
// variable set.  Singleton classes are variables that occur without being
// equal to anything else; they still count as free.
class EqFormula {
 public:
  EqFormula() = default;

  static EqFormula from_atoms(const std::vector<EqAtom>& eqs, const std::set<Var>& extra = {});

  void add_var(const Var& v);
  void add_eq(const Var& a, const Var& b);

  EqFormula conjoin(const EqFormula& o) const;
  // existentially quantifies every variable not satisfying keep
  EqFormula restrict(const std::function<bool(const Var&)>& keep) const;
  EqFormula eliminate(const std::set<Var>& drop) const;
  EqFormula renamed(const std::map<Var, Var>& s) const;

  bool mentions(const Var& v) const;
  bool entails(const Var& a, const Var& b) const;  // a == b counts only if mentioned
  std::set<Var> vars() const;
  const std::vector<std::vector<Var>>& classes() const { return classes_; }

  std::string str() const;

  auto operator<=>(const EqFormula&) const = default;
  bool operator==(const EqFormula&) const = default;

 private:
  void normalize();
  std::vector<std::vector<Var>> classes_;  // each sorted, list sorted
};

}  // namespace clhavoc
