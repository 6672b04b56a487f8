#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "clhavoc/core_model.hpp"

namespace clhavoc {

class UnboundVariable : public Error {
 public:
  using Error::Error;
};
class UndefinedPredicate : public Error {
 public:
  using Error::Error;
};
class ArityMismatch : public Error {
 public:
  using Error::Error;
};
class MalformedRule : public Error {
 public:
  using Error::Error;
};

// tree address, empty = root
using Address = std::vector<int>;
std::string render_address(const Address& a);

enum class VarKind : unsigned char { Named, Param, ChildParam, Begin, End };

// Named is an ordinary variable.  The others are reserved families used by
// the automata encoding (x_in^j, x_out^{l,j}) and by the transducer (begin_i, end_i).
struct Var {
  VarKind kind = VarKind::Named;
  std::string name;
  int child = 0;
  int index = 0;
  std::optional<Address> tag;  // node superscript for characteristic formulas

  static Var named(std::string n) { return Var{VarKind::Named, std::move(n), 0, 0, {}}; }
  static Var param(int j) { return Var{VarKind::Param, {}, 0, j, {}}; }
  static Var childparam(int l, int j) { return Var{VarKind::ChildParam, {}, l, j, {}}; }
  static Var begin(int i) { return Var{VarKind::Begin, {}, 0, i, {}}; }
  static Var end(int i) { return Var{VarKind::End, {}, 0, i, {}}; }

  Var tagged(Address a) const {
    Var v = *this;
    v.tag = std::move(a);
    return v;
  }
  bool plain() const { return kind == VarKind::Named && !tag; }
  std::string str() const;

  auto operator<=>(const Var&) const = default;
  bool operator==(const Var&) const = default;
};

struct VarPort {
  Var var;
  Port port;
  auto operator<=>(const VarPort&) const = default;
  bool operator==(const VarPort&) const = default;
};

struct Emp {
  auto operator<=>(const Emp&) const = default;
  bool operator==(const Emp&) const = default;
};
struct CompAtom {
  Var x;
  auto operator<=>(const CompAtom&) const = default;
  bool operator==(const CompAtom&) const = default;
};
struct InterAtom {
  std::vector<VarPort> bindings;
  auto operator<=>(const InterAtom&) const = default;
  bool operator==(const InterAtom&) const = default;
  InteractionType type() const;
};
struct StateAtom {
  Var x;
  State q;
  auto operator<=>(const StateAtom&) const = default;
  bool operator==(const StateAtom&) const = default;
};
struct EqAtom {
  Var lhs, rhs;
  auto operator<=>(const EqAtom&) const = default;
  bool operator==(const EqAtom&) const = default;
};
struct NeqAtom {
  Var lhs, rhs;
  auto operator<=>(const NeqAtom&) const = default;
  bool operator==(const NeqAtom&) const = default;
};
struct PredAtom {
  std::string pred;
  std::vector<Var> args;
  auto operator<=>(const PredAtom&) const = default;
  bool operator==(const PredAtom&) const = default;
};

struct Formula;
struct SepConj {
  std::vector<Formula> parts;
  bool operator==(const SepConj&) const;
};
struct Exists {
  std::vector<Var> vars;
  std::vector<Formula> body;  // exactly one element
  bool operator==(const Exists&) const;
};

struct Formula {
  std::variant<Emp, CompAtom, InterAtom, StateAtom, EqAtom, NeqAtom, PredAtom, SepConj, Exists> node;
  bool operator==(const Formula&) const = default;
};

// builders; sep flattens nested conjunctions and drops emp
Formula emp();
Formula comp(Var x);
Formula comp_in(Var x, State q);  // comp(x) * state(x, q)
Formula state(Var x, State q);
Formula inter(std::vector<VarPort> b);
Formula eq(Var a, Var b);
Formula neq(Var a, Var b);
Formula pred(std::string name, std::vector<Var> args);
Formula sep(std::vector<Formula> parts);
Formula exists(std::vector<Var> vars, Formula body);

std::set<Var> free_vars(const Formula& f);
std::set<std::string> predicates_used(const Formula& f);
// simultaneous, capture-avoiding
Formula substitute(const Formula& f, const std::map<Var, Var>& s);
// number of symbols needed to write f down
int formula_size(const Formula& f);

// prenex view: exists vars . atoms, binders renamed apart
struct FlatFormula {
  std::vector<Var> exists;
  std::vector<Var> comps;
  std::vector<InterAtom> inters;
  std::vector<StateAtom> states;
  std::vector<EqAtom> eqs;
  std::vector<NeqAtom> neqs;
  std::vector<PredAtom> preds;

  bool predicate_free() const { return preds.empty(); }
  std::set<Var> all_vars() const;  // every occurrence, bound or not
  std::set<Var> free_vars() const;
  // renames every occurrence, binders included; caller keeps it injective
  FlatFormula renamed(const std::map<Var, Var>& s) const;
  void append(const FlatFormula& other);  // binders must already be disjoint
  bool operator==(const FlatFormula&) const = default;
};

FlatFormula flatten(const Formula& f);
Formula to_formula(const FlatFormula& f);
std::string render(const Formula& f);
std::string render(const FlatFormula& f);
std::string render(const Var& v);

struct Rule {
  std::string pred;
  std::vector<Var> params;
  Formula body;
  int line = 0;  // not part of equality

  bool operator==(const Rule& o) const { return pred == o.pred && params == o.params && body == o.body; }
};

struct Sid {
  Behavior behavior;
  std::vector<Rule> rules;

  std::vector<std::string> predicates() const;  // defined ones, first-definition order
  bool defines(const std::string& p) const;
  int arity(const std::string& p) const;  // throws UndefinedPredicate
  std::vector<const Rule*> rules_for(const std::string& p) const;
  void validate() const;  // distinct params, fv within params, arities consistent
  bool operator==(const Sid&) const = default;
};

using Store = std::map<Var, ComponentId>;

// predicate-free satisfaction.  Existentials range over the ids of g plus an
// unbounded pool of absent ids in every state.
bool eval_qpf(const Configuration& g, const Store& nu, const FlatFormula& f);
bool eval_qpf(const Configuration& g, const Store& nu, const Formula& f);

struct Unfolding {
  Formula formula;
  bool complete = false;
};
// all derivations up to the depth; the depth-0 result is the atom itself
std::vector<Unfolding> unfold(const Sid& sid, const PredAtom& atom, int depth);

// cached complete unfoldings.  Existentials introduced at derivation node u
// carry tag u, so different derivations never clash.
class Unfolder {
 public:
  explicit Unfolder(const Sid& sid, size_t limit = 2'000'000) : sid_(&sid), limit_(limit) {}
  // over placeholder parameters Var::param(1..n)
  const std::vector<FlatFormula>& complete(const std::string& pred, int depth);
  // complete unfoldings of a whole formula
  std::vector<FlatFormula> complete(const FlatFormula& f, int depth);
  const Sid& sid() const { return *sid_; }

 private:
  const Sid* sid_;
  size_t limit_;
  std::map<std::pair<std::string, int>, std::vector<FlatFormula>> cache_;
};

enum class BoundedVerdict { Sat, UnsatAtDepth };
BoundedVerdict eval_bounded(const Configuration& g, const Store& nu, const Formula& f, const Sid& sid, int depth);
BoundedVerdict eval_bounded(const Configuration& g, const Store& nu, const FlatFormula& f, Unfolder& u, int depth);

}  // namespace clhavoc
