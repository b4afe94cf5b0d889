// Copyright 2026 The sharecheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sharecheck/cli.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "sharecheck/case_studies.hpp"
#include "sharecheck/explorer.hpp"
#include "sharecheck/heap_lang.hpp"
#include "sharecheck/registry.hpp"

#ifndef SHARECHECK_DATA_DIR
#define SHARECHECK_DATA_DIR "data"
#endif

namespace sharecheck {

using nlohmann::json;

int combine_exit(int a, int b) {
  const auto rank = [](int c) {
    switch (c) {
      case kExitInput:
        return 3;
      case kExitBound:
        return 2;
      case kExitMismatch:
        return 1;
      default:
        return 0;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

std::filesystem::path default_data_dir() { return SHARECHECK_DATA_DIR; }

namespace {

// Which fields each relation reads; the rest are padded with units.
const std::map<RelationKind, std::vector<std::string>>& relation_fields() {
  static const std::map<RelationKind, std::vector<std::string>> f = {
      {RelationKind::Exchange, {"p", "s", "p_after", "s_after"}},
      {RelationKind::Deposit, {"p", "s", "p_after"}},
      {RelationKind::Withdraw, {"p", "p_after", "s_after"}},
      {RelationKind::Update, {"p", "p_after"}},
      {RelationKind::Guard, {"p", "s"}},
  };
  return f;
}

const Element& field_of(const ExchangeQuery& q, const std::string& f) {
  if (f == "p") return q.p;
  if (f == "s") return q.s;
  if (f == "p_after") return q.p_after;
  return q.s_after;
}

Element& field_of(ExchangeQuery& q, const std::string& f) {
  return const_cast<Element&>(field_of(static_cast<const ExchangeQuery&>(q), f));
}

struct RelationQuery {
  std::string name;
  std::string rule;
  ExchangeQuery query;
  bool expect_holds = true;
};

RelationQuery relation_from_json(const json& j, std::size_t index) {
  const std::string where = "queries[" + std::to_string(index) + "]";
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  RelationQuery r;
  r.name = j.value("name", where);
  r.rule = j.value("rule", "");
  if (!j.contains("relation") || !j.at("relation").is_string()) {
    throw SchemaError(where + ".relation: expected exchange|deposit|withdraw|update|guard");
  }
  const auto kind = relation_kind_from_string(j.at("relation").get<std::string>());
  if (!kind) throw SchemaError(where + ".relation: unknown relation '" + j.at("relation").get<std::string>() + "'");
  r.query.kind = *kind;
  r.query.p = r.query.s = r.query.p_after = r.query.s_after = Element::unit();
  const auto& fields = relation_fields().at(*kind);
  for (const auto& [key, value] : j.items()) {
    if (key == "name" || key == "relation" || key == "expect" || key == "rule") continue;
    if (std::find(fields.begin(), fields.end(), key) == fields.end()) {
      throw SchemaError(where + "." + key + ": not a field of a " + to_string(*kind) + " query");
    }
    field_of(r.query, key) = element_from_json(value, where + "." + key);
  }
  for (const auto& f : fields) {
    if (!j.contains(f)) throw SchemaError(where + "." + f + ": missing");
  }
  const std::string expect = j.value("expect", std::string("holds"));
  if (expect != "holds" && expect != "fails") throw SchemaError(where + ".expect: expected holds or fails");
  r.expect_holds = expect == "holds";
  return r;
}

// Parameters with the --bound override applied to fractional carriers.
json with_bound(json decl, const CliOptions& o) {
  if (!o.bound || !decl.is_object()) return decl;
  const std::string b = decl.value("builtin", "");
  if (b == "fractional" || b == "frac-heap") {
    if (!decl.contains("params") || decl["params"].is_null()) decl["params"] = json::object();
    decl["params"]["denominator_bound"] = *o.bound;
  }
  return decl;
}

std::string read_verdict(const CheckResult& r) { return to_string(r.verdict); }

CommandResult input_error(const std::string& what) {
  CommandResult r;
  r.exit = kExitInput;
  r.report = {{"error", what}, {"exit", kExitInput}};
  r.text = "error: " + what + "\n";
  return r;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace

json relations_to_json(const ProtocolSuite& suite) {
  json qs = json::array();
  for (const auto& sq : suite.queries) {
    json q{{"name", sq.name}, {"rule", sq.rule}, {"relation", to_string(sq.query.kind)},
           {"expect", sq.expect_holds ? "holds" : "fails"}};
    for (const auto& f : relation_fields().at(sq.query.kind)) q[f] = element_to_json(field_of(sq.query, f));
    qs.push_back(std::move(q));
  }
  return json{{"queries", qs}};
}

CommandResult run_check(const json& protocol, const json& relations, const CliOptions& options) {
  BuiltProtocol built;
  std::vector<RelationQuery> queries;
  try {
    built = build_protocol(with_bound(protocol, options));
    if (!relations.is_null()) {
      if (!relations.is_object()) throw SchemaError("relations: expected an object");
      for (const auto& [key, _] : relations.items()) {
        if (key != "queries") throw SchemaError("relations." + key + ": unknown field");
      }
      const json qs = relations.value("queries", json::array());
      if (!qs.is_array()) throw SchemaError("relations.queries: expected an array");
      for (std::size_t i = 0; i < qs.size(); ++i) queries.push_back(relation_from_json(qs[i], i));
    }
  } catch (const SchemaError& e) {
    return input_error(e.what());
  } catch (const EncodingError& e) {
    return input_error(e.what());
  } catch (const json::exception& e) {
    return input_error(e.what());
  }

  CommandResult out;
  std::ostringstream text;
  const auto& sp = built.spec;
  const LawReport wf = check_wellformed(sp);
  json laws = json::array();
  for (const auto& l : wf.laws) {
    json lj{{"law", l.law}, {"verdict", read_verdict(l.result)}};
    if (!l.result.ok()) {
      json w = json::array();
      for (const auto& e : l.witness) w.push_back(e.to_string());
      lj["witness"] = w;
      lj["reason"] = l.result.reason;
    }
    if (!l.result.bound.empty()) lj["bound"] = l.result.bound;
    laws.push_back(std::move(lj));
  }
  text << "protocol " << sp.name << "\n";
  text << "  well-formed: " << (wf.all_hold() ? "yes" : "NO") << "\n";
  for (const auto& l : wf.laws) {
    if (!l.result.ok()) text << "    " << l.law << " fails: " << l.result.reason << "\n";
  }
  if (!wf.all_hold()) out.exit = kExitMismatch;

  json results = json::array();
  std::size_t mismatches = 0;
  for (const auto& q : queries) {
    CheckResult r;
    try {
      r = exchange_holds(sp, q.query);
    } catch (const DomainError& e) {
      return input_error(q.name + ": " + e.what());
    }
    const bool match = r.ok() == q.expect_holds;
    if (!match) ++mismatches;
    json qj{{"name", q.name},
            {"rule", q.rule},
            {"relation", to_string(q.query.kind)},
            {"expect", q.expect_holds ? "holds" : "fails"},
            {"verdict", read_verdict(r)},
            {"match", match},
            {"frames_examined", r.frames_examined}};
    if (r.frame) qj["witness"] = r.frame->to_string();
    if (!r.reason.empty()) qj["reason"] = r.reason;
    if (!r.bound.empty()) qj["bound"] = r.bound;
    results.push_back(std::move(qj));
    text << "  " << (match ? "ok   " : "MISMATCH ") << q.name << (q.rule.empty() ? "" : " " + q.rule) << ": "
         << read_verdict(r);
    if (r.frame) text << " (frame " << r.frame->to_string() << ")";
    text << "\n";
  }
  if (mismatches) out.exit = combine_exit(out.exit, kExitMismatch);
  text << "  " << queries.size() << " queries, " << mismatches << " mismatches\n";
  out.report = json{{"command", "check"},
                    {"protocol", sp.name},
                    {"wellformed", {{"holds", wf.all_hold()}, {"laws", laws}}},
                    {"queries", results},
                    {"mismatches", mismatches},
                    {"exit", out.exit}};
  out.text = text.str();
  return out;
}

CommandResult run_explore(const json& scenario_json, const CliOptions& options) {
  Scenario s;
  ExplorationResult r;
  try {
    s = scenario_from_json(scenario_json);
    for (auto& inst : s.instances) inst.protocol = with_bound(inst.protocol, options);
    if (options.max_states) s.bounds.max_states = *options.max_states;
    if (options.max_steps) s.bounds.max_steps = *options.max_steps;
    r = explore(s, {.mode = options.mode});
  } catch (const ScenarioError& e) {
    return input_error(e.what());
  } catch (const SchemaError& e) {
    return input_error(e.what());
  } catch (const EncodingError& e) {
    return input_error(e.what());
  } catch (const ParseError& e) {
    return input_error(e.what());
  } catch (const GhostUsageError& e) {
    return input_error(e.what());
  } catch (const json::exception& e) {
    return input_error(e.what());
  }

  CommandResult out;
  json report = r.to_json();
  json props = json::array();
  std::optional<bool> oracle_subset;
  for (const auto& p : s.properties) {
    bool held = true;
    for (const auto& v : r.violations) {
      if (v.kind == "property" && v.name == p.name) held = false;
    }
    props.push_back({{"name", p.name}, {"kind", p.kind}, {"held", held && !r.bound_exceeded}});
    if (p.kind == "ht-oracle") oracle_subset = oracle_subset.value_or(true) && held && !r.bound_exceeded;
  }
  report["properties"] = props;
  if (oracle_subset) report["oracle_subset"] = *oracle_subset;
  for (auto& v : report["violations"]) {
    json names = json::array();
    for (const auto& tid : v["trace"]) names.push_back(s.threads.at(tid.get<std::size_t>()).name);
    v["trace_threads"] = names;
  }
  if (r.bound_exceeded) {
    out.exit = kExitBound;
  } else if (!r.expectation_met()) {
    out.exit = kExitMismatch;
  }
  report["command"] = "explore";
  report["exit"] = out.exit;
  out.report = std::move(report);
  out.text = r.to_text();
  if (oracle_subset) out.text += std::string("  outcomes within the sequential oracle: ") + (*oracle_subset ? "yes" : "NO") + "\n";
  return out;
}

const std::vector<DemoEntry>& demo_registry() {
  static const std::vector<DemoEntry> r = {
      {"rwlock-exc", "explore", {"scenarios/rwlock-exc.json"}},
      {"rwlock-shared", "explore", {"scenarios/rwlock-shared.json"}},
      {"rwlock-multi", "explore", {"scenarios/rwlock-multi.json"}},
      {"hashtable-collide", "explore", {"scenarios/hashtable-collide.json"}},
      {"race-negative", "explore", {"scenarios/race-negative.json"}},
      {"protocol-frac", "check", {"protocols/fractional.json", "relations/fractional.json"}},
      {"protocol-count", "check", {"protocols/counting.json", "relations/counting.json"}},
      {"protocol-rwlock", "check", {"protocols/rwlock.json", "relations/rwlock.json"}},
  };
  return r;
}

std::map<std::string, json> demo_files() {
  std::map<std::string, json> f;
  f["scenarios/rwlock-exc.json"] = to_json(build_rwlock_scenario({}));
  {
    RwLockScenarioParams p;
    p.writer_deltas = {1};
    p.reader_counters = {0, 0};
    f["scenarios/rwlock-shared.json"] = to_json(build_rwlock_scenario(p));
  }
  {
    RwLockScenarioParams p;
    p.counters = 2;
    p.writer_deltas = {1};
    p.reader_counters = {0, 1};
    f["scenarios/rwlock-multi.json"] = to_json(build_rwlock_scenario(p));
  }
  f["scenarios/hashtable-collide.json"] = to_json(build_hashtable_scenario(collision_params()));
  {
    RwLockScenarioParams p;
    p.writer_deltas = {1};
    p.reader_counters = {0};
    p.locks = false;
    f["scenarios/race-negative.json"] = to_json(build_rwlock_scenario(p));
  }
  f["scenarios/hashtable-overflow.json"] = to_json(build_abort_scenario());
  f["protocols/fractional.json"] = json{{"builtin", "fractional"}, {"params", json::object()}};
  f["relations/fractional.json"] = relations_to_json(fractional_suite());
  f["protocols/counting.json"] = json{{"builtin", "counting"}, {"params", json::object()}};
  f["relations/counting.json"] = relations_to_json(counting_suite());
  f["protocols/rwlock.json"] = json{{"builtin", "rwlock"}, {"params", json::object()}};
  f["relations/rwlock.json"] = relations_to_json(rwlock_suite());
  return f;
}

CommandResult run_demo(const std::string& name, const CliOptions& options) {
  const auto& reg = demo_registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const DemoEntry& d) { return d.name == name; });
  if (it == reg.end()) {
    std::string names;
    json list = json::array();
    for (const auto& d : reg) {
      names += (names.empty() ? "" : ", ") + d.name;
      list.push_back(d.name);
    }
    CommandResult r = input_error("unknown demo '" + name + "'; available: " + names);
    r.report["demos"] = list;
    return r;
  }
  const auto dir = options.data_dir.empty() ? default_data_dir() : options.data_dir;
  std::vector<json> inputs;
  try {
    for (const auto& rel : it->inputs) inputs.push_back(read_json_file(dir / rel));
  } catch (const SchemaError& e) {
    return input_error(e.what());
  }
  CommandResult r = it->command == "check" ? run_check(inputs.at(0), inputs.at(1), options)
                                           : run_explore(inputs.at(0), options);
  r.report["demo"] = name;
  return r;
}

CommandResult run_report(const CliOptions& options) {
  CommandResult out;
  json demos = json::array();
  std::string text;
  for (const auto& d : demo_registry()) {
    CommandResult r = run_demo(d.name, options);
    out.exit = combine_exit(out.exit, r.exit);
    demos.push_back({{"name", d.name}, {"exit", r.exit}, {"report", r.report}});
    text += "== " + d.name + " (exit " + std::to_string(r.exit) + ")\n" + r.text;
  }
  out.report = json{{"command", "report"}, {"mode", to_string(options.mode)}, {"demos", demos}, {"exit", out.exit}};
  out.text = text;
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sharecheck: storage-protocol law checker and interleaving explorer"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string mode = "rule";
  std::string format = "json";
  std::size_t max_states = 0;
  std::size_t max_steps = 0;
  std::int64_t bound = 0;
  bool quiet = false;
  std::string data_dir;
  app.add_option("--mode", mode, "ghost admission mode")->check(CLI::IsMember({"rule", "concrete"}));
  app.add_option("--max-states", max_states, "exploration state bound")->check(CLI::PositiveNumber);
  app.add_option("--max-steps", max_steps, "heap steps per thread")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--bound", bound, "denominator bound for fractional carriers")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", quiet, "print nothing; exit code only");
  app.add_option("--data-dir", data_dir, "directory holding the demo inputs");

  std::string protocol_path;
  std::string relations_path;
  auto* check = app.add_subcommand("check", "check a protocol's laws and relation queries");
  check->add_option("protocol", protocol_path, "protocol file")->required();
  check->add_option("relations", relations_path, "relation-query file");
  std::vector<std::string> scenario_paths;
  auto* explore_cmd = app.add_subcommand("explore", "explore every interleaving of a scenario");
  explore_cmd->add_option("scenario", scenario_paths, "scenario file(s)")->required();
  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "run a built-in demo");
  demo->add_option("name", demo_name, "demo name")->required();
  auto* report = app.add_subcommand("report", "run every demo and emit one report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  CliOptions o;
  o.mode = *admission_mode_from_string(mode);
  if (max_states) o.max_states = max_states;
  if (max_steps) o.max_steps = max_steps;
  if (bound) o.bound = bound;
  o.text = format == "text";
  o.quiet = quiet;
  o.data_dir = data_dir;

  CommandResult r;
  if (check->parsed()) {
    try {
      const json p = read_json_file(protocol_path);
      const json rel = relations_path.empty() ? json() : read_json_file(relations_path);
      r = run_check(p, rel, o);
    } catch (const SchemaError& e) {
      r = input_error(e.what());
    }
  } else if (explore_cmd->parsed()) {
    std::vector<CommandResult> runs;
    for (const auto& path : scenario_paths) {
      try {
        runs.push_back(run_explore(read_json_file(path), o));
      } catch (const SchemaError& e) {
        runs.push_back(input_error(e.what()));
      }
      runs.back().report["file"] = path;
    }
    if (runs.size() == 1) {
      r = std::move(runs.front());
    } else {
      r.report = json::array();
      for (auto& run : runs) {
        r.exit = combine_exit(r.exit, run.exit);
        r.report.push_back(run.report);
        r.text += run.text;
      }
    }
  } else if (demo->parsed()) {
    r = run_demo(demo_name, o);
  } else if (report->parsed()) {
    r = run_report(o);
  }
  if (!o.quiet) {
    if (o.text) {
      out << r.text;
    } else {
      out << r.report.dump(2) << "\n";
    }
  } else if (r.exit == kExitInput && r.report.is_object() && r.report.contains("error")) {
    err << "error: " << r.report["error"].get<std::string>() << "\n";
  }
  return r.exit;
}

}  // namespace sharecheck
