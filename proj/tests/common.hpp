#pragma once

#include <string>

#include "clhavoc/frontend.hpp"

#ifndef FIXTURE_DIR
#define FIXTURE_DIR "fixtures"
#endif

inline std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }
inline clhavoc::SystemFile load(const std::string& name) { return clhavoc::parse_system_file(fixture(name)); }

inline clhavoc::Behavior token_behavior() {
  return {{"in", "out"}, {"H", "T"}, {{"H", "in", "T"}, {"T", "out", "H"}}};
}
