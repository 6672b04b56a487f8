#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "clhavoc/logic.hpp"

namespace clhavoc {

// parameter positions (1-based) that every unfolding passes through unchanged
std::map<std::string, std::set<int>> profile(const Sid& sid);

struct RulePcr {
  int rule = 0;
  bool progressing = false, connected = false, restricted = false;
  std::string why_not_p, why_not_c, why_not_r;
  bool pcr() const { return progressing && connected && restricted; }
};

struct PcrReport {
  std::vector<RulePcr> rules;
  bool all() const;
};

PcrReport check_pcr(const Sid& sid);

struct SidMetrics {
  int size = 0, maxarity = 0, maxinter = 0, maxpreds = 0;
};
SidMetrics sid_metrics(const Sid& sid);

std::set<std::string> reachable_predicates(const Sid& sid, const std::string& root);
// only the rules of predicates reachable from root
Sid restrict_sid(const Sid& sid, const std::string& root);

int degree_sample(const Sid& sid, const std::string& pred, int depth);

}  // namespace clhavoc
