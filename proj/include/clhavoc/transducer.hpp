#pragma once

#include <map>
#include <string>
#include <vector>

#include "clhavoc/automata.hpp"
#include "clhavoc/eq_formula.hpp"

namespace clhavoc {

// port tuples of the interaction atoms occurring in the rules, in first-seen order
std::vector<InteractionType> interaction_types(const Sid& sid);

// transducer states are equality formulas over x_in^j, begin_i, end_i
bool transducer_state_valid(const EqFormula& phi, int n);
bool transducer_state_final(const EqFormula& phi, int n);

struct StepWitness {
  std::vector<int> positions;  // I, 1-based positions of tau
  std::vector<Var> xi;         // rewritten component variables
  std::vector<Transition> moves;
  int interaction_atom = -1;  // index into the symbol's interaction atoms when J = [1,n]
  std::string str(const InteractionType& tau) const;
};

struct StepResult {
  AlphabetSymbol output;
  EqFormula state;
  StepWitness witness;
};

// all transitions (alpha, alpha')(phi_1..phi_h) -> phi of the transducer for tau
std::vector<StepResult> transducer_step(const InteractionType& tau, const AlphabetSymbol& alpha,
                                        const std::vector<EqFormula>& child_states, const Behavior& b,
                                        int max_arity);

struct ImageState {
  int base;  // state of the input automaton
  int tau;   // index into taus
  EqFormula phi;
};

struct ImageAutomaton {
  TreeAutomaton ta;  // trimmed
  std::vector<ImageState> info;
  std::vector<int> targets;                // final states: (root, phi final)
  std::map<TaTransition, bool> fires_here;  // J chosen at this node
  std::vector<std::string> trace;
  size_t raw_states = 0, raw_transitions = 0;
};

// product of the automaton below root with T_tau, one disjoint part per tau
ImageAutomaton image(const TreeAutomaton& a, int root, const std::vector<InteractionType>& taus, const Behavior& b,
                     int max_arity, bool trace = false);

}  // namespace clhavoc
