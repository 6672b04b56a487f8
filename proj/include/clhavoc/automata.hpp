#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "clhavoc/logic.hpp"

namespace clhavoc {

class BadAddress : public Error {
 public:
  using Error::Error;
};
class NonNormalizableRule : public Error {
 public:
  using Error::Error;
};
class NotSidCompatible : public Error {
 public:
  using Error::Error;
};

// <exists y . psi, a0, a1..ah>.  psi talks about Var::param(1..a0),
// Var::childparam(l, 1..al) and its own existentials.
class AlphabetSymbol {
 public:
  AlphabetSymbol(FlatFormula body, std::vector<int> arities);

  const FlatFormula& body() const { return body_; }
  const std::vector<int>& arities() const { return arities_; }
  int rank() const { return static_cast<int>(arities_.size()) - 1; }
  int arity() const { return arities_.front(); }
  // equal keys = equal symbols up to renaming of existentials and atom order
  const std::string& key() const { return key_; }
  std::string str() const;

 private:
  FlatFormula body_;
  std::vector<int> arities_;
  std::string key_;
};

using SymbolRef = std::shared_ptr<const AlphabetSymbol>;

struct Tree {
  SymbolRef label;
  std::vector<Tree> children;

  const Tree& at(const Address& u) const;  // throws BadAddress
  std::vector<Address> addresses() const;  // preorder
  int height() const;
  int size() const;
  std::string str() const;
};

struct TaTransition {
  int symbol;
  std::vector<int> children;
  int target;
  auto operator<=>(const TaTransition&) const = default;
};

class TreeAutomaton {
 public:
  int add_symbol(const AlphabetSymbol& s);  // deduplicates by key
  int find_symbol(const std::string& key) const;  // -1 if absent
  int add_state(const std::string& name);
  void add_transition(TaTransition t);  // deduplicates
  void set_final(int q, bool f = true);

  const std::vector<SymbolRef>& symbols() const { return symbols_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::set<int>& finals() const { return finals_; }
  const std::vector<TaTransition>& transitions() const { return transitions_; }
  std::string str() const;

 private:
  std::vector<SymbolRef> symbols_;
  std::map<std::string, int> symbol_index_;
  std::vector<std::string> states_;
  std::set<int> finals_;
  std::vector<TaTransition> transitions_;
  std::set<TaTransition> seen_;
};

// Phi^u: the characteristic formula of the subtree at u, with node variables
// superscripted by absolute addresses
FlatFormula char_formula(const Tree& t, const Address& u);
// same, every variable except x_j^u existentially closed
FlatFormula closed_char_formula(const Tree& t, const Address& u);

struct SidAutomaton {
  TreeAutomaton ta;
  std::map<std::string, int> state_of;  // predicate -> state
  std::vector<int> rule_symbol;         // rule index -> symbol
};
SidAutomaton sid_to_ta(const Sid& sid);

bool is_sid_compatible(const TreeAutomaton& a);
// one predicate per state, named by pred_name(state)
Sid ta_to_sid(const TreeAutomaton& a, const std::vector<std::string>& pred_name, const Behavior& b);

bool ta_membership(const TreeAutomaton& a, const Tree& t, int q);
std::set<int> ta_run_states(const TreeAutomaton& a, const Tree& t);
// keeps states that are productive and reach a final state; returns old->new map (-1 dropped)
TreeAutomaton ta_trim(const TreeAutomaton& a, std::vector<int>* renumber = nullptr);
// restriction to the states a given state depends on
TreeAutomaton ta_restrict(const TreeAutomaton& a, int root, std::vector<int>* renumber = nullptr);

// trees accepted in q with height <= h, at most limit of them
std::vector<Tree> enumerate_trees(const TreeAutomaton& a, int q, int h, size_t limit = 100000);

}  // namespace clhavoc
