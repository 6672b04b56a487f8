#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "clhavoc/analysis.hpp"
#include "clhavoc/automata.hpp"
#include "clhavoc/frontend.hpp"
#include "clhavoc/oracle.hpp"
#include "clhavoc/reduction.hpp"

using namespace clhavoc;

namespace {

enum Exit { kPositive = 0, kNegative = 1, kUnknown = 2, kInputError = 3 };

struct Args {
  std::string file, pred, out, config;
  int depth = 4;
  int jobs = 1;
  bool assume_tight = false, trace = false;
};

void need_pred(const SystemFile& f, const std::string& pred) {
  if (pred.empty()) throw Error("--pred is required");
  if (!f.sid.defines(pred)) throw UndefinedPredicate("undefined predicate " + pred);
}

std::string join(const std::set<int>& s) {
  std::string out;
  for (int i : s) out += (out.empty() ? "" : ",") + std::to_string(i);
  return "{" + out + "}";
}

int cmd_parse(const Args& a) {
  std::cout << render(parse_system_file(a.file));
  return kPositive;
}

int cmd_analyze(const Args& a) {
  SystemFile f = parse_system_file(a.file);
  const Sid& sid = f.sid;
  SidMetrics m = sid_metrics(sid);
  std::cout << "metrics size=" << m.size << " maxarity=" << m.maxarity << " maxinter=" << m.maxinter
            << " maxpreds=" << m.maxpreds << "\n";
  std::cout << "profile\n";
  for (const auto& [p, s] : profile(sid)) std::cout << "  " << p << " " << join(s) << "\n";
  std::cout << "rules  P C R  rule\n";
  PcrReport rep = check_pcr(sid);
  for (const auto& r : rep.rules) {
    std::cout << "  " << r.rule << (r.rule < 10 ? "    " : "   ") << (r.progressing ? "y" : "n") << " "
              << (r.connected ? "y" : "n") << " " << (r.restricted ? "y" : "n") << "  " << render(sid.rules[r.rule]) << "\n";
    for (const auto* why : {&r.why_not_p, &r.why_not_c, &r.why_not_r})
      if (!why->empty()) std::cout << "        # " << *why << "\n";
  }
  std::cout << "pcr " << (rep.all() ? "yes" : "no") << "\n";
  if (!a.pred.empty()) {
    need_pred(f, a.pred);
    std::cout << "degree(" << a.pred << ", depth " << a.depth << ") = " << degree_sample(sid, a.pred, a.depth) << "\n";
  }
  return kPositive;
}

nlohmann::json manifest(const ReductionResult& r, const std::string& reduced_path) {
  nlohmann::json j;
  j["root"] = r.root;
  j["reduced_file"] = reduced_path;
  j["tightness"] = r.tightness;
  j["interaction_types"] = nlohmann::json::array();
  for (const auto& t : r.taus) j["interaction_types"].push_back(t);
  j["targets"] = r.targets;
  j["entailments"] = nlohmann::json::array();
  for (const auto& e : r.entailments) j["entailments"].push_back({{"lhs", e.lhs}, {"rhs", e.rhs}, {"arity", e.arity}});
  for (const auto& [n, o] : r.origin) j["predicates"][n] = {{"origin", o}, {"state", r.description.at(n)}};
  j["stats"] = {{"ta_states", r.ta_states},
                {"ta_transitions", r.ta_transitions},
                {"image_states", r.image_states},
                {"image_transitions", r.image_transitions},
                {"derived_rules", r.derived.rules.size()}};
  return j;
}

int cmd_reduce(const Args& a) {
  SystemFile f = parse_system_file(a.file);
  need_pred(f, a.pred);
  ReductionResult r;
  try {
    r = reduce_havoc_to_entailment(f.sid, a.pred, {a.assume_tight, a.trace});
  } catch (const TightnessNotEstablished& e) {
    std::cerr << "gated: " << e.what() << "\n";
    return kUnknown;
  }
  std::string out = a.out.empty() ? a.file + ".reduced.clsys" : a.out;
  std::string man = a.out.empty() ? a.file + ".manifest.json" : a.out + ".manifest.json";
  std::ofstream(out) << render_reduced(r);
  std::ofstream(man) << manifest(r, out).dump(2) << "\n";
  for (const auto& line : r.trace) std::cout << "trace " << line << "\n";
  std::cout << "tightness " << r.tightness << "\n"
            << "automaton " << r.ta_states << " states, " << r.ta_transitions << " transitions\n"
            << "image " << r.image_states << " states, " << r.image_transitions << " transitions\n";
  for (const auto& e : r.entailments) std::cout << "entail " << e.str() << "\n";
  std::cout << "wrote " << out << "\nwrote " << man << "\n";
  return kPositive;
}

int cmd_check(const Args& a) {
  SystemFile f = parse_system_file(a.file);
  need_pred(f, a.pred);
  std::string tightness;
  bool sampled_loose = false;
  if (check_pcr(restrict_sid(f.sid, a.pred)).all()) {
    tightness = "PCR";
  } else if (a.assume_tight) {
    tightness = "assumed";
  } else {
    std::optional<Model> loose;
    if (sample_tightness(f.sid, a.pred, a.depth, &loose)) {
      tightness = "sampled up to depth " + std::to_string(a.depth);
    } else {
      sampled_loose = true;
      tightness = "not established, loose model " + render_model(*loose, standard_params(f.sid.arity(a.pred)));
    }
  }
  std::cout << "tightness " << tightness << "\n";
  ReductionResult r = reduce_havoc_to_entailment(f.sid, a.pred, {true, a.trace});
  for (const auto& line : r.trace) std::cout << "trace " << line << "\n";
  auto xs = standard_params(f.sid.arity(a.pred));
  for (const auto& e : r.entailments) {
    EntailVerdict v = entails_bounded(r.combined, pred(e.lhs, xs), pred(e.rhs, xs), a.depth);
    std::cout << "entail " << e.str() << " : " << (v.holds ? "holds" : "fails") << " (" << v.models << " models)\n";
    if (!v.holds) {
      std::cout << "  successor outside " << a.pred << ": " << render_model(*v.cex, xs) << "\n";
      HavocVerdict h = havoc_invariant_bounded(f.sid, a.pred, a.depth);
      if (h.cex) std::cout << h.cex->str() << "\n";
      std::cout << "verdict Counterexample\n";
      return kNegative;
    }
  }
  if (sampled_loose) {
    std::cout << "verdict Unknown\n";
    return kUnknown;
  }
  std::cout << "verdict InvariantUpToDepth " << a.depth << "\n";
  return kPositive;
}

int cmd_simulate(const Args& a) {
  SystemFile f = parse_system_file(a.file);
  const ConfigBlock* c = f.config(a.config);
  if (!c) throw Error("no config named " + a.config);
  auto reach = reachable(c->config, f.sid.behavior);
  std::cout << reach.size() << " reachable configurations\n";
  for (const auto& g : reach) std::cout << render(g) << "\n";
  return kPositive;
}

int cmd_oracle(const Args& a) {
  SystemFile f = parse_system_file(a.file);
  need_pred(f, a.pred);
  HavocVerdict h = havoc_invariant_bounded(f.sid, a.pred, a.depth);
  std::cout << "models " << h.models << ", successors " << h.successors << "\n";
  if (h.cex) std::cout << h.cex->str() << "\n";
  std::cout << "havoc " << (h.invariant ? "invariant" : "not invariant") << " up to depth " << a.depth << "\n";
  ReductionResult r = reduce_havoc_to_entailment(f.sid, a.pred, {true, a.trace});
  CrossValidation cv = cross_validate_reduction(f.sid, a.pred, r, a.depth);
  std::cout << "cross-validation " << (cv.equal ? "equal" : "differs") << " (" << cv.left << " step successors, "
            << cv.right << " image models)\n";
  for (const auto& s : cv.only_left) std::cout << "  only successor: " << s << "\n";
  for (const auto& s : cv.only_right) std::cout << "  only image: " << s << "\n";
  if (!h.invariant) return kNegative;
  return cv.equal ? kPositive : kUnknown;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"havoc invariance for configuration logic"};
  app.require_subcommand(1);
  Args a;
  auto common = [&](CLI::App* s) {
    s->add_option("file", a.file, "input .clsys file")->required();
    s->add_option("--jobs", a.jobs, "worker cap (work runs on one thread)")->check(CLI::PositiveNumber);
  };
  auto with_pred = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--pred", a.pred, "predicate");
    if (required) o->required();
    s->add_option("--depth", a.depth, "unfolding depth")->check(CLI::NonNegativeNumber);
  };
  auto* parse = app.add_subcommand("parse", "parse and print");
  common(parse);
  auto* analyze = app.add_subcommand("analyze", "profile, PCR table, metrics");
  common(analyze);
  with_pred(analyze, false);
  auto* reduce = app.add_subcommand("reduce", "emit the entailment instances");
  common(reduce);
  with_pred(reduce, true);
  reduce->add_flag("--assume-tight", a.assume_tight, "skip the PCR gate");
  reduce->add_flag("--trace-transducer", a.trace, "print transducer steps");
  reduce->add_option("-o", a.out, "output path");
  auto* check = app.add_subcommand("check", "reduce and check entailments up to depth");
  common(check);
  with_pred(check, true);
  check->add_flag("--assume-tight", a.assume_tight, "skip tightness evidence");
  check->add_flag("--trace-transducer", a.trace, "print transducer steps");
  auto* simulate = app.add_subcommand("simulate", "reachable configurations of a config block");
  common(simulate);
  simulate->add_option("--config", a.config, "config block name")->required();
  auto* oracle = app.add_subcommand("oracle", "brute-force havoc check and cross-validation");
  common(oracle);
  with_pred(oracle, true);
  oracle->add_flag("--trace-transducer", a.trace, "print transducer steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }
  try {
    if (*parse) return cmd_parse(a);
    if (*analyze) return cmd_analyze(a);
    if (*reduce) return cmd_reduce(a);
    if (*check) return cmd_check(a);
    if (*simulate) return cmd_simulate(a);
    if (*oracle) return cmd_oracle(a);
  } catch (const ParseError& e) {
    std::cerr << a.file << ":" << e.what() << "\n";
    return kInputError;
  } catch (const TightnessNotEstablished& e) {
    std::cerr << e.what() << "\n";
    return kUnknown;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
