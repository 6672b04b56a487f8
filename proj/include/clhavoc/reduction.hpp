#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "clhavoc/analysis.hpp"
#include "clhavoc/transducer.hpp"

namespace clhavoc {

class TightnessNotEstablished : public Error {
 public:
  using Error::Error;
};

struct ReductionOptions {
  bool assume_tight = false;
  bool trace = false;
};

struct Entailment {
  std::string lhs, rhs;
  int arity = 0;
  std::string str() const;  // lhs(x1..xn) |= rhs(x1..xn)
};

struct ReductionResult {
  std::string root;
  Sid derived;   // rules of the image predicates only
  Sid combined;  // original rules followed by the derived ones
  std::vector<std::string> targets;
  std::vector<Entailment> entailments;
  std::map<std::string, std::string> origin;       // derived predicate -> original predicate
  std::map<std::string, std::string> description;  // derived predicate -> (state, tau, phi)
  std::vector<InteractionType> taus;
  std::string tightness;  // how the gate was passed
  size_t ta_states = 0, ta_transitions = 0, image_states = 0, image_transitions = 0;
  std::vector<std::string> trace;
};

// throws TightnessNotEstablished unless the reachable rules are PCR or assume_tight is set
ReductionResult reduce_havoc_to_entailment(const Sid& sid, const std::string& pred, const ReductionOptions& opt);

// file with the behaviour, all rules and one entail query per target
std::string render_reduced(const ReductionResult& r);

struct ClassEquivResult {
  bool equivalent = false;
  std::vector<std::pair<int, int>> pairing;     // rule of a -> rule of b
  std::vector<std::pair<int, int>> pairing_back;  // rule of b -> rule of a
  std::vector<std::string> unmatched;
};

// Rules of a and b are paired up to dropping state atoms.  related(pa, pb)
// decides which predicates may correspond; by default any two of equal arity.
using PredRelation = std::function<bool(const std::string&, const std::string&)>;
ClassEquivResult class_equiv(const Sid& a, const Sid& b, const PredRelation& related = nullptr);

}  // namespace clhavoc
