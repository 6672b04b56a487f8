#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "clhavoc/logic.hpp"

namespace clhavoc {

struct ReductionResult;

// a model (configuration, store); the store lists the values of the
// designated variables in order
struct Model {
  Configuration config;
  std::vector<ComponentId> store;
};

// invariant under renaming of component ids
std::string canonical_key(const Configuration& g, const std::vector<ComponentId>& store);

struct ModelSet {
  std::map<std::string, Model> models;  // by canonical key
  bool contains(const std::string& key) const { return models.count(key) != 0; }
  size_t size() const { return models.size(); }
  void insert(Model m);
  // fewest components first, then by key
  std::vector<const Model*> ordered() const;
};

// models of a predicate-free formula; store_vars must be free in f
ModelSet models_of_qpf(const FlatFormula& f, const std::vector<Var>& store_vars, const Behavior& b);
// models of a formula over all complete unfoldings up to depth
ModelSet enumerate_models(const Sid& sid, const Formula& f, const std::vector<Var>& store_vars, int depth);
// models of pred(x1..xn)
ModelSet enumerate_models(const Sid& sid, const std::string& pred, int depth);

std::vector<Var> standard_params(int n);  // x1..xn

struct Counterexample {
  Model model;
  Interaction interaction;
  Configuration successor;
  std::string str() const;
};

struct HavocVerdict {
  bool invariant = true;
  std::optional<Counterexample> cex;
  size_t models = 0, successors = 0;
};
HavocVerdict havoc_invariant_bounded(const Sid& sid, const std::string& pred, int depth);

struct EntailVerdict {
  bool holds = true;
  std::optional<Model> cex;
  size_t models = 0;
};
EntailVerdict entails_bounded(const Sid& sid, const Formula& lhs, const Formula& rhs, int depth);

struct CrossValidation {
  bool equal = false;
  size_t left = 0, right = 0;
  std::vector<std::string> only_left, only_right;  // a few examples
};
CrossValidation cross_validate_reduction(const Sid& sid, const std::string& pred, const ReductionResult& red,
                                         int depth);

// closure under one step versus closure under arbitrary step sequences,
// both measured against the bounded model set
struct StepClosure {
  bool one_step = true, multi_step = true;
};
StepClosure havoc_step_closure(const Sid& sid, const std::string& pred, int depth);

// positions that stay bound to a parameter of the starting predicate along
// every chain of at most depth rule applications
std::map<std::string, std::set<int>> profile_bruteforce(const Sid& sid, int depth);

// every bounded model tight?
bool sample_tightness(const Sid& sid, const std::string& pred, int depth, std::optional<Model>* loose = nullptr);

std::string render_model(const Model& m, const std::vector<Var>& store_vars = {});

}  // namespace clhavoc
