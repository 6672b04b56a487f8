#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace clhavoc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StateMapMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownInteraction : public Error {
 public:
  using Error::Error;
};

using Port = std::string;
using State = std::string;

struct ComponentId {
  int value = 0;
  auto operator<=>(const ComponentId&) const = default;
};

std::string to_string(ComponentId c);

struct Transition {
  State from;
  Port port;
  State to;
  auto operator<=>(const Transition&) const = default;
};

// finite-state behaviour shared by every component; may be nondeterministic
struct Behavior {
  std::vector<Port> ports;
  std::vector<State> states;
  std::vector<Transition> transitions;

  bool has_port(const Port& p) const;
  bool has_state(const State& q) const;
  std::vector<const Transition*> moves(const State& q, const Port& p) const;
  void validate() const;  // throws Error
  bool operator==(const Behavior&) const = default;
};

struct Binding {
  ComponentId component;
  Port port;
  auto operator<=>(const Binding&) const = default;
};

using InteractionType = std::vector<Port>;

struct Interaction {
  std::vector<Binding> bindings;
  auto operator<=>(const Interaction&) const = default;

  InteractionType type() const;
  bool mentions(ComponentId c) const;
};

// (C, I, rho).  rho is kept finite: its keys are the carrier.
class Configuration {
 public:
  Configuration() = default;
  Configuration(std::set<ComponentId> components, std::set<Interaction> interactions,
                std::map<ComponentId, State> state_map);

  const std::set<ComponentId>& components() const { return components_; }
  const std::set<Interaction>& interactions() const { return interactions_; }
  const std::map<ComponentId, State>& state_map() const { return state_map_; }

  bool has_state(ComponentId c) const { return state_map_.count(c) != 0; }
  const State& state_of(ComponentId c) const;
  Configuration with_state(ComponentId c, const State& q) const;

  // every id that occurs anywhere (components, interactions, carrier)
  std::set<ComponentId> ids() const;

  auto operator<=>(const Configuration&) const = default;
  bool operator==(const Configuration&) const = default;

 private:
  std::set<ComponentId> components_;
  std::set<Interaction> interactions_;
  std::map<ComponentId, State> state_map_;
};

// nullopt when the component or interaction sets overlap
std::optional<Configuration> compose(const Configuration& a, const Configuration& b);

std::vector<Configuration> step(const Configuration& g, const Interaction& i, const Behavior& b);
std::vector<Configuration> successors(const Configuration& g, const Behavior& b);
std::vector<Configuration> reachable(const Configuration& g, const Behavior& b);

int degree(const Configuration& g);
bool is_tight(const Configuration& g);

std::string render(const Interaction& i);
std::string render(const Configuration& g);

}  // namespace clhavoc
