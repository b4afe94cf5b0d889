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

// Exhaustive interleaving exploration of a scenario: heap-language threads,
// ghost ledger driven by a label-triggered script, and named properties.

#ifndef SHARECHECK_EXPLORER_HPP
#define SHARECHECK_EXPLORER_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sharecheck/ghost_engine.hpp"
#include "sharecheck/heap_lang.hpp"

namespace sharecheck {

/// Names an instance, owner or location from the point of view of a step.
struct Ref {
  enum class Kind { Literal, Self, ByLoc };
  Kind kind = Kind::Literal;
  std::string text;
  /// Location name -> result, looked up with the location the step touched.
  std::map<std::string, std::string> by_loc;

  static Ref lit(std::string s);
  static Ref self();
  static Ref loc_table(std::map<std::string, std::string> table);
  friend bool operator==(const Ref&, const Ref&) = default;
};

struct ArgSource {
  enum class Kind { Literal, Heap, Result, Written, LocIndex };
  Kind kind = Kind::Literal;
  Element literal;
  Ref heap;  // names the location to read after the step
  std::vector<std::string> names;  // LocIndex: position of the step's location

  static ArgSource lit(Element e);
  static ArgSource heap_at(Ref r);
  static ArgSource result();
  static ArgSource written();
  static ArgSource loc_index(std::vector<std::string> names);
  friend bool operator==(const ArgSource&, const ArgSource&) = default;
};

/// One rule instantiation from the scenario's rule sets.
struct ScriptAction {
  std::string rule;
  Ref instance;
  Ref owner = Ref::self();
  Ref region;
  std::map<std::string, ArgSource> args;
  friend bool operator==(const ScriptAction&, const ScriptAction&) = default;
};

/// Fires when a step crosses `label` (with the given result and phase).
struct ScriptEntry {
  std::string label;
  std::optional<Element> when_result;
  std::optional<Phase> when_phase;
  std::vector<ScriptAction> actions;
  std::optional<Ref> mark;  // added to the stepping thread's marks
  std::optional<Ref> unmark;
  friend bool operator==(const ScriptEntry&, const ScriptEntry&) = default;
};

struct HeapInit {
  std::string name;
  std::string value;  // closed value in program syntax; may use @names
  friend bool operator==(const HeapInit&, const HeapInit&) = default;
};

struct ThreadSpec {
  std::string name;
  std::string program;
  friend bool operator==(const ThreadSpec&, const ThreadSpec&) = default;
};

struct InstanceDecl {
  std::string id;
  nlohmann::json protocol;  // registry declaration
  std::map<std::string, Element> fragments;
  Element stored;
  friend bool operator==(const InstanceDecl&, const InstanceDecl&) = default;
};

/// kind: ghost-invariant | mutual-exclusion | reader-agreement |
/// heap-predicate | guarded-read | ht-valid | ht-oracle.
struct PropertyDecl {
  std::string name;
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  friend bool operator==(const PropertyDecl&, const PropertyDecl&) = default;
};

enum class Expectation { NoStuck, StuckReachable };
std::string to_string(Expectation e);
std::optional<Expectation> expectation_from_string(std::string_view s);

struct Bounds {
  std::size_t max_states = 200000;
  std::size_t max_steps = 64;  // heap-touching steps per thread
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<HeapInit> heap;
  std::vector<ThreadSpec> threads;
  std::vector<InstanceDecl> instances;
  std::vector<nlohmann::json> rule_sets;
  std::vector<ScriptEntry> script;
  std::vector<PropertyDecl> properties;
  /// Named cells reported in terminal outcomes; empty means all of them.
  std::vector<std::string> outcome_cells;
  Expectation expect = Expectation::NoStuck;
  Bounds bounds;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Malformed scenario (unknown label, bad program, duplicate names, ...).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const Scenario& s);
/// Throws ScenarioError (or SchemaError) naming the offending field.
Scenario scenario_from_json(const nlohmann::json& j);

struct ExploreOptions {
  AdmissionMode mode = AdmissionMode::Rule;
  bool memoize = true;
  /// Run a thread's heap-free steps together with the step before them.
  bool collapse_local = true;
  /// Re-search breadth-first for the shortest trace of each violation.
  bool shortest_traces = true;
};

/// Explorer state: heap and threads, ghost ledger, per-thread marks.
struct ExplorerState {
  MachineConfig cfg;
  GhostLedger ledger;
  std::vector<std::set<std::string>> marks;

  std::size_t hash() const;
  friend bool operator==(const ExplorerState& a, const ExplorerState& b);
};

/// A scenario with its programs parsed and its ghost state allocated.
struct CompiledScenario {
  Scenario source;
  LocationNames names;
  std::map<std::int64_t, std::string> loc_names;
  ExplorerState initial;
  RuleSet rules;
  std::set<std::string> labels;  // labels that occur in the programs
};

CompiledScenario compile(const Scenario& s, AdmissionMode mode = AdmissionMode::Rule);

struct Violation {
  std::string kind;  // stuck | ghost | property
  std::string name;  // stuck kind, ghost rule or property name
  std::string detail;
  std::vector<std::size_t> trace;  // thread indices, one per transition

  std::string key() const { return kind + ":" + name; }
};

/// Per-state properties see `events` empty; per-transition ones (guarded-read)
/// also see the events of the transition that produced the state. Returns
/// the failure reason.
std::optional<std::string> check_property(const CompiledScenario& c, const ExplorerState& state,
                                          const PropertyDecl& property,
                                          const std::vector<StepEvent>& events = {});

struct ExplorationResult {
  std::string scenario;
  AdmissionMode mode = AdmissionMode::Rule;
  bool memoize = true;
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t schedules = 0;
  std::size_t memo_hits = 0;
  std::size_t stuck_states = 0;
  bool bound_exceeded = false;
  std::string bound_reason;
  Expectation expect = Expectation::NoStuck;
  std::vector<Violation> violations;  // one per key, ordered by key
  std::set<std::string> outcomes;     // terminal summaries, canonical JSON text
  std::vector<std::string> warnings;

  bool expectation_met() const;
  nlohmann::json to_json() const;
  std::string to_text() const;
};

ExplorationResult explore(const Scenario& s, const ExploreOptions& options = {});

/// Schedule entry that is not an enabled thread.
class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t index, const std::string& what) : std::runtime_error(what), index(index) {}
  std::size_t index;
};

struct TraceStep {
  std::size_t tid = 0;
  std::string thread;
  std::vector<std::string> events;
  std::vector<std::string> ghost;
  nlohmann::json state;
};

struct Trace {
  nlohmann::json initial;
  std::vector<TraceStep> steps;
  std::optional<Violation> violation;  // what stopped the replay, if anything
  bool terminal = false;
  std::optional<std::string> outcome;

  nlohmann::json to_json() const;
};

Trace replay(const Scenario& s, const std::vector<std::size_t>& schedule, const ExploreOptions& options = {});

/// Terminal summary of a finished state, as canonical JSON text.
std::string outcome_summary(const CompiledScenario& c, const ExplorerState& state);
nlohmann::json state_snapshot(const CompiledScenario& c, const ExplorerState& state);

}  // namespace sharecheck

#endif  // SHARECHECK_EXPLORER_HPP
