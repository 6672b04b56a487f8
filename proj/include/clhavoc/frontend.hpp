#pragma once

#include <string>
#include <vector>

#include "clhavoc/core_model.hpp"
#include "clhavoc/logic.hpp"

namespace clhavoc {

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_, col_;
};

struct ConfigBlock {
  std::string name;
  std::vector<std::string> names;  // ComponentId{k+1} is names[k]
  Configuration config;
  bool operator==(const ConfigBlock&) const = default;
};

struct Query {
  enum class Kind { Entail, Havoc, Simulate };
  Kind kind = Kind::Entail;
  Formula lhs, rhs;    // Entail
  std::string target;  // Havoc: predicate, Simulate: config name
  bool operator==(const Query&) const = default;
};

struct SystemFile {
  bool has_behavior = false;
  Sid sid;  // carries the behaviour
  std::vector<ConfigBlock> configs;
  std::vector<Query> queries;

  const ConfigBlock* config(const std::string& name) const;
  bool operator==(const SystemFile&) const = default;
};

SystemFile parse_system(const std::string& text);
SystemFile parse_system_file(const std::string& path);
Formula parse_formula(const std::string& text);

std::string render(const Behavior& b);
std::string render(const Rule& r);
std::string render(const Sid& sid);  // behaviour block + sid block
std::string render(const ConfigBlock& c);
std::string render(const SystemFile& f);

}  // namespace clhavoc
