#include "clhavoc/core_model.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace clhavoc {

std::string to_string(ComponentId c) { return "c" + std::to_string(c.value); }

bool Behavior::has_port(const Port& p) const {
  return std::find(ports.begin(), ports.end(), p) != ports.end();
}

bool Behavior::has_state(const State& q) const {
  return std::find(states.begin(), states.end(), q) != states.end();
}

std::vector<const Transition*> Behavior::moves(const State& q, const Port& p) const {
  std::vector<const Transition*> out;
  for (const auto& t : transitions)
    if (t.from == q && t.port == p) out.push_back(&t);
  return out;
}

void Behavior::validate() const {
  for (const auto& t : transitions) {
    if (!has_state(t.from) || !has_state(t.to))
      throw Error("transition " + t.from + " -" + t.port + "-> " + t.to + " uses an undeclared state");
    if (!has_port(t.port))
      throw Error("transition " + t.from + " -" + t.port + "-> " + t.to + " uses an undeclared port");
  }
}

InteractionType Interaction::type() const {
  InteractionType t;
  for (const auto& b : bindings) t.push_back(b.port);
  return t;
}

bool Interaction::mentions(ComponentId c) const {
  return std::any_of(bindings.begin(), bindings.end(),
                     [&](const Binding& b) { return b.component == c; });
}

Configuration::Configuration(std::set<ComponentId> components, std::set<Interaction> interactions,
                             std::map<ComponentId, State> state_map)
    : components_(std::move(components)),
      interactions_(std::move(interactions)),
      state_map_(std::move(state_map)) {
  for (auto c : components_)
    if (!state_map_.count(c)) throw Error("no state for component " + to_string(c));
  for (const auto& i : interactions_) {
    if (i.bindings.empty()) throw Error("empty interaction");
    std::set<ComponentId> seen;
    for (const auto& b : i.bindings) {
      if (!seen.insert(b.component).second)
        throw Error("interaction " + render(i) + " repeats a component");
      if (!state_map_.count(b.component))
        throw Error("no state for component " + to_string(b.component));
    }
  }
}

const State& Configuration::state_of(ComponentId c) const {
  auto it = state_map_.find(c);
  if (it == state_map_.end()) throw Error("id " + to_string(c) + " is outside the carrier");
  return it->second;
}

Configuration Configuration::with_state(ComponentId c, const State& q) const {
  Configuration g = *this;
  g.state_map_[c] = q;
  return g;
}

std::set<ComponentId> Configuration::ids() const {
  std::set<ComponentId> out = components_;
  for (const auto& i : interactions_)
    for (const auto& b : i.bindings) out.insert(b.component);
  for (const auto& [c, q] : state_map_) out.insert(c);
  return out;
}

std::optional<Configuration> compose(const Configuration& a, const Configuration& b) {
  for (auto c : a.components())
    if (b.components().count(c)) return std::nullopt;
  for (const auto& i : a.interactions())
    if (b.interactions().count(i)) return std::nullopt;
  auto rho = a.state_map();
  for (const auto& [c, q] : b.state_map()) {
    auto [it, fresh] = rho.emplace(c, q);
    if (!fresh && it->second != q)
      throw StateMapMismatch("state maps disagree on " + to_string(c));
  }
  auto comps = a.components();
  comps.insert(b.components().begin(), b.components().end());
  auto inters = a.interactions();
  inters.insert(b.interactions().begin(), b.interactions().end());
  return Configuration(std::move(comps), std::move(inters), std::move(rho));
}

std::vector<Configuration> step(const Configuration& g, const Interaction& i, const Behavior& b) {
  if (!g.interactions().count(i)) throw UnknownInteraction("interaction " + render(i) + " not in configuration");
  // one successor per choice of a move for every bound component
  std::vector<std::vector<const Transition*>> choices;
  for (const auto& bd : i.bindings) {
    auto m = b.moves(g.state_of(bd.component), bd.port);
    if (m.empty()) return {};
    choices.push_back(std::move(m));
  }
  std::set<Configuration> out;
  std::vector<size_t> idx(choices.size(), 0);
  while (true) {
    auto rho = g.state_map();
    for (size_t k = 0; k < choices.size(); ++k) rho[i.bindings[k].component] = choices[k][idx[k]]->to;
    out.insert(Configuration(g.components(), g.interactions(), std::move(rho)));
    size_t k = 0;
    while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return {out.begin(), out.end()};
}

std::vector<Configuration> successors(const Configuration& g, const Behavior& b) {
  std::set<Configuration> out;
  for (const auto& i : g.interactions())
    for (auto& s : step(g, i, b)) out.insert(std::move(s));
  return {out.begin(), out.end()};
}

std::vector<Configuration> reachable(const Configuration& g, const Behavior& b) {
  std::set<Configuration> seen{g};
  std::deque<Configuration> work{g};
  while (!work.empty()) {
    auto cur = std::move(work.front());
    work.pop_front();
    for (auto& s : successors(cur, b))
      if (seen.insert(s).second) work.push_back(std::move(s));
  }
  return {seen.begin(), seen.end()};
}

int degree(const Configuration& g) {
  std::map<ComponentId, int> count;
  // components are pairwise distinct inside an interaction
  for (const auto& i : g.interactions())
    for (const auto& b : i.bindings) ++count[b.component];
  int best = 0;
  for (const auto& [c, n] : count) best = std::max(best, n);
  return best;
}

bool is_tight(const Configuration& g) {
  for (const auto& i : g.interactions())
    for (const auto& b : i.bindings)
      if (!g.components().count(b.component)) return false;
  return true;
}

std::string render(const Interaction& i) {
  std::ostringstream os;
  os << '<';
  for (size_t k = 0; k < i.bindings.size(); ++k) {
    if (k) os << ", ";
    os << to_string(i.bindings[k].component) << '.' << i.bindings[k].port;
  }
  os << '>';
  return os.str();
}

std::string render(const Configuration& g) {
  std::ostringstream os;
  os << "{components:";
  for (auto c : g.components()) os << ' ' << to_string(c);
  os << "; interactions:";
  bool first = true;
  for (const auto& i : g.interactions()) {
    os << (first ? " " : ", ") << render(i);
    first = false;
  }
  os << "; states:";
  first = true;
  for (const auto& [c, q] : g.state_map()) {
    os << (first ? " " : ", ") << to_string(c) << '=' << q;
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace clhavoc
