#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "modliar/modliar.hpp"

namespace modliar::cli {
namespace {

namespace fs = std::filesystem;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DefinitionSet load_definitions(const std::string& path) {
  if (path.empty()) return {};
  std::string text = read_file(path);
  try {
    return parse_definitions(text);
  } catch (const ParseError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const DefinitionError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Formula load_formula(const std::string& text) {
  try {
    return parse_formula(text);
  } catch (const ParseError& e) {
    throw InputError("query: " + std::string(e.what()));
  }
}

FrameClass load_system(const std::string& name) {
  auto s = parse_system(name);
  if (!s) throw InputError("unknown system '" + name + "'");
  return frame_class(*s);
}

/// Writes to --out when given, stdout otherwise.
void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + out_path + "'");
  file << text;
}

std::string model_text(const KripkeModel& m, World designated) {
  std::ostringstream os;
  os << "worlds: " << m.size() << " (designated " << designated << ")\n";
  os << "access:";
  if (m.access().empty()) os << " (none)";
  for (const auto& [a, b] : m.access()) os << " " << a << "->" << b;
  os << "\n";
  for (World w = 0; w < m.size(); ++w) {
    os << "  " << w << ": {";
    bool first = true;
    for (const auto& atom : m.valuation()[w]) {
      os << (first ? "" : ", ") << atom;
      first = false;
    }
    os << "}\n";
  }
  return os.str();
}

struct Options {
  std::string defs;
  std::string system = "T";
  std::vector<std::string> systems;
  std::string query;
  std::string format = "text";
  std::string out;
  std::string file;
  std::size_t bound = 4;
  std::size_t world = 0;
  std::size_t max_prefixes = TableauOptions{}.max_prefixes;
};

int cmd_sat(const Options& o, std::ostream& out) {
  DefinitionSet defs = load_definitions(o.defs);
  Formula query = o.query.empty() ? census_query(defs) : load_formula(o.query);
  FrameClass cls = load_system(o.system);
  Verdict v = decide(defs, query, cls, TableauOptions{o.max_prefixes});

  std::string text;
  if (o.format == "json") {
    text = verdict_to_json(v).dump(2) + "\n";
  } else if (o.format == "dot") {
    text = to_string(v.outcome) + "\n";
    if (v.model) text += model_to_dot(*v.model, v.designated);
  } else {
    text = to_string(v.outcome) + "\n";
    if (v.model) text += model_text(*v.model, *v.designated);
  }
  emit(text, o.out, out);
  return v.outcome == Outcome::Indeterminate ? kIndeterminate : kOk;
}

int cmd_valid(const Options& o, std::ostream& out) {
  DefinitionSet defs = load_definitions(o.defs);
  Formula f = load_formula(o.query);
  FrameClass cls = load_system(o.system);
  ValidityResult r = valid(f, cls, defs, TableauOptions{o.max_prefixes});

  std::string status = r.status == Validity::Valid     ? "valid"
                       : r.status == Validity::Invalid ? "not valid"
                                                       : "indeterminate";
  std::string text;
  if (o.format == "json") {
    nlohmann::json j{{"valid", r.status == Validity::Valid ? nlohmann::json(true)
                               : r.status == Validity::Invalid ? nlohmann::json(false)
                                                               : nlohmann::json(nullptr)},
                     {"countermodel", r.countermodel ? model_to_json(*r.countermodel) : nlohmann::json(nullptr)},
                     {"designated", r.designated ? nlohmann::json(*r.designated) : nlohmann::json(nullptr)},
                     {"stats", stats_to_json(r.stats)}};
    text = j.dump(2) + "\n";
  } else if (o.format == "dot") {
    text = status + "\n";
    if (r.countermodel) text += model_to_dot(*r.countermodel, r.designated);
  } else {
    text = status + "\n";
    if (r.countermodel) text += "countermodel:\n" + model_text(*r.countermodel, *r.designated);
  }
  emit(text, o.out, out);
  switch (r.status) {
    case Validity::Valid: return kOk;
    case Validity::Invalid: return kNegative;
    case Validity::Indeterminate: return kIndeterminate;
  }
  return kIndeterminate;
}

int cmd_check_model(const Options& o, std::ostream& out) {
  KripkeModel m = [&] {
    try {
      return model_from_json(nlohmann::json::parse(read_file(o.file)));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(o.file + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw InputError(o.file + ": " + e.what());
    }
  }();
  DefinitionSet defs = load_definitions(o.defs);
  if (o.world >= m.size()) throw InputError("world " + std::to_string(o.world) + " is not in the model");

  std::optional<bool> query_holds;
  if (!o.query.empty()) query_holds = holds_at(m, o.world, load_formula(o.query));
  bool respects = respects_definitions(m, defs);
  PropertySet props = frame_properties(m);
  std::optional<bool> in_class;
  if (!o.systems.empty()) in_class = in_frame_class(m, load_system(o.systems.front()));

  std::string text;
  if (o.format == "json") {
    nlohmann::json j{{"respects_definitions", respects}, {"frame_properties", props.names()}};
    j["holds_at"] = query_holds ? nlohmann::json(*query_holds) : nlohmann::json(nullptr);
    j["world"] = o.world;
    j["in_frame_class"] = in_class ? nlohmann::json(*in_class) : nlohmann::json(nullptr);
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    if (query_holds) os << "holds at world " << o.world << ": " << (*query_holds ? "true" : "false") << "\n";
    os << "respects definitions: " << (respects ? "true" : "false") << "\n";
    os << "frame properties:";
    if (props.empty()) os << " (none)";
    for (const auto& p : props.names()) os << " " << p;
    os << "\n";
    if (in_class) os << "in " << o.systems.front() << ": " << (*in_class ? "true" : "false") << "\n";
    text = os.str();
  }
  emit(text, o.out, out);
  bool ok = respects && query_holds.value_or(true) && in_class.value_or(true);
  return ok ? kOk : kNegative;
}

int cmd_prove(const Options& o, const bool system_given, std::ostream& out) {
  ProofScript script = [&] {
    try {
      return parse_proof_script(read_file(o.file));
    } catch (const ParseError& e) {
      throw InputError(o.file + ": " + e.what());
    }
  }();
  std::string defs_path = o.defs;
  if (defs_path.empty() && script.definitions_path) {
    fs::path p(*script.definitions_path);
    defs_path = p.is_absolute() ? p.string() : (fs::path(o.file).parent_path() / p).string();
  }
  DefinitionSet defs = load_definitions(defs_path);
  FrameClass cls = system_given      ? load_system(o.system)
                   : script.system   ? frame_class(*script.system)
                                     : load_system(o.system);
  ProofReport r = check_proof(script, defs, cls);
  emit(o.format == "json" ? report_to_json(r).dump(2) + "\n" : report_to_text(r), o.out, out);
  return r.valid ? kOk : kNegative;
}

int cmd_census(const Options& o, std::ostream& out) {
  DefinitionSet defs = load_definitions(o.defs);
  std::vector<FrameClass> classes;
  for (const auto& s : o.systems) classes.push_back(load_system(s));
  if (classes.empty())
    for (System s : kAllSystems) classes.push_back(frame_class(s));
  if (o.bound < 1 || o.bound > kMaxOracleWorlds)
    throw InputError("--bound must be between 1 and " + std::to_string(kMaxOracleWorlds));
  auto rows = census(defs, classes, o.bound);
  emit(o.format == "json" ? census_to_json(rows).dump(2) + "\n" : census_to_text(rows, o.bound), o.out, out);
  return kOk;
}

int cmd_paradox(const Options& o, std::ostream& out) {
  using clock = std::chrono::steady_clock;
  const DefinitionSet defs = parse_definitions(bundled::kLiarDefinitions);
  const Formula query = census_query(defs);
  nlohmann::json checks = nlohmann::json::array();
  bool all_ok = true;
  auto record = [&](const std::string& what, bool ok, const std::string& detail) {
    checks.push_back({{"check", what}, {"ok", ok}, {"detail", detail}});
    all_ok = all_ok && ok;
  };

  for (System s : {System::T, System::B, System::S4, System::S5}) {
    auto t0 = clock::now();
    Verdict v = decide(defs, query, frame_class(s));
    double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    std::ostringstream d;
    d << to_string(v.outcome) << " in " << ms << " ms, " << v.stats.branches_closed << " branches closed";
    record("tableau " + system_name(s) + ": no model of the definition", v.unsat(), d.str());
  }
  for (System s : {System::K, System::D}) {
    Verdict v = decide(defs, query, frame_class(s));
    bool ok = v.sat() && v.model->size() <= 2 && respects_definitions(*v.model, defs) &&
              in_frame_class(*v.model, frame_class(s));
    std::string d = to_string(v.outcome);
    if (v.model) d += ", " + std::to_string(v.model->size()) + "-world witness " + model_to_json(*v.model).dump();
    record("tableau " + system_name(s) + ": definition is satisfiable", ok, d);
  }
  for (System s : {System::K, System::D, System::T, System::B, System::S4, System::S5}) {
    SearchResult r = enumerate_models(defs, query, frame_class(s), o.bound);
    bool expect_model = !frame_class(s).reflexive();
    std::string d = (r.found() ? "model found" : "no model") + std::string(" after ") +
                    std::to_string(r.models_checked) + " candidates (bound " + std::to_string(o.bound) + ")";
    record("oracle " + system_name(s) + ": " + (expect_model ? "finds a model" : "finds no model"),
           r.found() == expect_model, d);
  }
  {
    ProofScript script = parse_proof_script(bundled::kLiarDerivation);
    ProofReport r = check_proof(script, defs, frame_class(System::T));
    bool ok = r.valid && r.uses(RuleId::Nec) == 0 &&
              r.conclusion->formula == parse_formula("q <-> ~q") && r.conclusion->world == kRootWorld;
    std::string d = r.valid ? "valid, conclusion " + print_formula(r.conclusion->formula) + " @ " +
                                  r.conclusion->world + ", necessitation uses: " +
                                  std::to_string(r.uses(RuleId::Nec))
                            : "invalid at line " + std::to_string(r.first_failure->line);
    record("derivation checks under T without necessitation", ok, d);

    ProofReport rk = check_proof(script, defs, frame_class(System::K));
    bool k_ok = !rk.valid && rk.first_failure && script.lines[static_cast<std::size_t>(rk.first_failure->line - 1)].rule ==
                                                     RuleId::TAxiom;
    record("derivation fails under K at the first reflexivity step", k_ok,
           rk.first_failure ? "line " + std::to_string(rk.first_failure->line) + ": " + rk.first_failure->reason
                            : "unexpectedly valid");
  }

  std::string text;
  if (o.format == "json") {
    text = nlohmann::json{{"agrees", all_ok}, {"checks", checks}}.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "modal liar: def q := ~[]q\n";
    for (const auto& c : checks)
      os << (c["ok"].get<bool>() ? "[ok]   " : "[FAIL] ") << c["check"].get<std::string>() << " -- "
         << c["detail"].get<std::string>() << "\n";
    os << (all_ok ? "q <-> ~q is forced on every reflexive frame; all checks agree\n" : "checks disagree\n");
    text = os.str();
  }
  emit(text, o.out, out);
  return all_ok ? kOk : kNegative;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modal liar kernel: satisfiability, validity, countermodels and proof checking"};
  app.name("modliar");
  app.require_subcommand(1);

  Options o;
  const std::vector<std::string> systems{"K", "D", "T", "B", "K4", "S4", "S5"};

  auto add_defs = [&](CLI::App* sub) {
    sub->add_option("--defs", o.defs, "definitions file (def <atom> := <formula> per line)");
  };
  auto add_system = [&](CLI::App* sub) {
    return sub->add_option("--system", o.system, "frame class")->check(CLI::IsMember(systems))->capture_default_str();
  };
  auto add_format = [&](CLI::App* sub, std::vector<std::string> formats) {
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember(formats))->capture_default_str();
    sub->add_option("--out", o.out, "write output to this path instead of stdout");
  };

  auto* sat = app.add_subcommand("sat", "decide whether the definitions and query have a model in the class");
  add_defs(sat);
  add_system(sat);
  sat->add_option("--query", o.query, "formula that must hold at the root (default: a | ~a for the first definition)");
  sat->add_option("--max-prefixes", o.max_prefixes, "tableau resource cap")->capture_default_str();
  add_format(sat, {"text", "json", "dot"});

  auto* val = app.add_subcommand("valid", "check validity over the class, printing a countermodel if not valid");
  add_defs(val);
  add_system(val);
  val->add_option("--query", o.query, "formula to check")->required();
  val->add_option("--max-prefixes", o.max_prefixes, "tableau resource cap")->capture_default_str();
  add_format(val, {"text", "json", "dot"});

  auto* chk = app.add_subcommand("check-model", "evaluate a model JSON file");
  chk->add_option("model", o.file, "model JSON file")->required();
  add_defs(chk);
  chk->add_option("--system", o.systems, "also report membership in this frame class")
      ->check(CLI::IsMember(systems))
      ->expected(0, 1);
  chk->add_option("--query", o.query, "formula to evaluate");
  chk->add_option("--world", o.world, "world at which to evaluate the query")->capture_default_str();
  add_format(chk, {"text", "json"});

  auto* prv = app.add_subcommand("prove", "check a proof script");
  prv->add_option("script", o.file, "proof script")->required();
  add_defs(prv);
  auto* prv_system = add_system(prv);
  prv_system->description("frame class (overrides the script's 'system' line)");
  add_format(prv, {"text", "json"});

  auto* cen = app.add_subcommand("census", "brute-force satisfiability of the definitions per frame class");
  add_defs(cen);
  cen->add_option("--system", o.systems, "frame class (repeatable; default: all)")->check(CLI::IsMember(systems));
  cen->add_option("--bound", o.bound, "largest model size searched")->capture_default_str();
  add_format(cen, {"text", "json"});

  auto* par = app.add_subcommand("paradox", "run the bundled modal liar checks end to end");
  par->add_option("--bound", o.bound, "oracle model-size bound")->capture_default_str();
  add_format(par, {"text", "json"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (*sat) return cmd_sat(o, out);
    if (*val) return cmd_valid(o, out);
    if (*chk) return cmd_check_model(o, out);
    if (*prv) return cmd_prove(o, prv_system->count() > 0, out);
    if (*cen) return cmd_census(o, out);
    if (*par) {
      if (o.bound < 1 || o.bound > kMaxOracleWorlds)
        throw InputError("--bound must be between 1 and " + std::to_string(kMaxOracleWorlds));
      return cmd_paradox(o, out);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace modliar::cli
