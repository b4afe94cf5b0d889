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

// Acceptance run: one PASS/FAIL line per criterion. Limits and tolerances
// are pinned below; reference sets are computed here, not by the explorer.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sharecheck/case_studies.hpp"
#include "sharecheck/cli.hpp"
#include "sharecheck/combinators.hpp"
#include "sharecheck/protocols.hpp"
#include "sharecheck/relation_suite.hpp"
#include "sharecheck/storage_protocol.hpp"

#ifndef SHARECHECK_CLI
#define SHARECHECK_CLI "sharecheck"
#endif

namespace sharecheck {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kLawsSeconds = 60;
constexpr double kRelationsSeconds = 300;
constexpr double kRwLockSecondsPerScenario = 300;
constexpr double kHashTableSeconds = 600;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fixed(double v) {
  std::ostringstream o;
  o.precision(1);
  o << std::fixed << v;
  return o.str();
}

// Direct triple loop over a small carrier: commutativity, associativity,
// unit and downward closure of validity.
bool brute_force_laws(const MonoidSpec& m, std::string* why) {
  const auto xs = m.enumerator.prefix(40);
  for (const auto& a : xs) {
    if (compose(m, a, m.unit) != a) return *why = "unit at " + a.to_string(), false;
    for (const auto& b : xs) {
      const Element ab = compose(m, a, b);
      if (ab != compose(m, b, a)) return *why = "commutativity at " + a.to_string() + ", " + b.to_string(), false;
      if (m.valid(ab) && !m.valid(a)) return *why = "validity not downward closed at " + a.to_string(), false;
      for (const auto& c : xs) {
        if (compose(m, ab, c) != compose(m, a, compose(m, b, c))) {
          return *why = "associativity at " + a.to_string() + ", " + b.to_string() + ", " + c.to_string(), false;
        }
      }
    }
  }
  return true;
}

Outcome criterion_laws() {
  Outcome o;
  const auto start = Clock::now();
  const Element x0 = Element::integer(0);
  const Element x1 = Element::integer(1);
  const std::vector<std::pair<std::string, MonoidSpec>> carriers = {
      {"Excl({0,1})", build_excl({x0, x1})},
      {"AgN({0,1}), counts <= 4", build_agn({x0, x1}, 4)},
      {"AgNVec K=2", build_agnvec({x0, x1}, 2)},
      {"counting", build_counting_monoid()},
      {"fractional D=12", build_frac(12)},
      {"rwlock product X=2 rc in [-2,4]", build_rwlock({.rc_min = -2, .rc_max = 4}).spec.protocol},
      {"hash table L=3, 2 keys, 2 values", build_hashtable_monoid().spec},
  };
  for (const auto& [name, m] : carriers) {
    const LawReport r = check_pcm_laws(m);
    std::size_t bounded = 0;
    for (const auto& l : r.laws) {
      o.require(l.result.ok(), name + ": " + l.law + " " + l.result.reason);
      bounded += l.result.verdict == Verdict::HoldsUpToBound;
    }
    std::string why;
    o.require(brute_force_laws(m, &why), name + " (direct loop): " + why);
    o.note(name + ": " + std::to_string(r.laws.size()) + " laws, " + std::to_string(bounded) + " up to bound");
  }
  // The checker must reject a non-associative table.
  CustomTable broken;
  broken.unit = Element::unit();
  const Element a = sym("a");
  const Element b = sym("b");
  broken.elements = {Element::unit(), a, b};
  broken.table = {{a, a, b}, {a, b, b}, {b, b, a}};  // (a·a)·b = a but a·(a·b) = b
  o.require(!check_pcm_laws(build_custom_table(broken)).all_hold(), "non-associative table accepted");
  const double t = seconds_since(start);
  o.require(t < kLawsSeconds, "runtime " + fixed(t) + " s over " + fixed(kLawsSeconds) + " s");
  o.note("runtime " + fixed(t) + " s");
  return o;
}

std::vector<ProtocolSuite> acceptance_suites() {
  std::vector<ProtocolSuite> s = standard_protocol_suites();
  // The multi-counter rules are instantiated over counters in [-1, 2].
  for (auto& suite : s) {
    if (suite.built.spec.name.rfind("rwlock-multi", 0) == 0) suite = rwlock_multi_suite({}, {-1, 2});
  }
  return s;
}

// Positive rule names each suite must cover.
const std::map<std::string, std::vector<std::string>>& required_rules() {
  static const std::map<std::string, std::vector<std::string>> r = {
      {"fractional", {"frac-deposit", "frac-guard", "frac-withdraw"}},
      {"frac-heap", {"heap-deposit", "heap-guard", "heap-withdraw"}},
      {"counting", {"count-deposit", "count-guard", "count-withdraw"}},
      {"forever", {"forever-guard", "forever-update"}},
      {"rwlock",
       {"rw-exc-acquire", "rw-exc-begin", "rw-exc-release", "rw-shared-acquire", "rw-shared-begin", "rw-shared-guard",
        "rw-shared-release", "rw-shared-retry"}},
      {"rwlock-multi",
       {"xrw-exc-acquire", "xrw-exc-begin", "xrw-exc-progress", "xrw-exc-release", "xrw-shared-acquire",
        "xrw-shared-begin", "xrw-shared-guard", "xrw-shared-release", "xrw-shared-retry"}},
  };
  return r;
}

void criteria_relations(Outcome& positives, Outcome& controls) {
  const auto start = Clock::now();
  std::size_t npos = 0;
  std::size_t nctl = 0;
  std::size_t witnesses = 0;
  for (const auto& s : acceptance_suites()) {
    const auto& sp = s.built.spec;
    std::set<std::string> pos_rules;
    std::set<std::string> ctl_rules;
    for (const auto& q : s.queries) {
      const CheckResult r = exchange_holds(sp, q.query);
      const std::string base = q.rule.substr(0, q.rule.find('/'));
      if (q.control) {
        ++nctl;
        ctl_rules.insert(base);
        controls.require(r.verdict == Verdict::FailsWithWitness, sp.name + " " + q.name + " did not fail");
        if (!r.ok()) {
          const bool self = r.frame && witness_falsifies(sp, q, r);
          witnesses += self;
          controls.require(self, sp.name + " " + q.name + ": witness does not falsify the body");
        }
      } else {
        ++npos;
        pos_rules.insert(base);
        positives.require(r.ok(), sp.name + " " + q.name + ": " + r.reason);
      }
    }
    for (const auto& f : s.facts) {
      const CheckResult r = check_fact(sp, f);
      if (f.control) {
        ++nctl;
        controls.require(!r.ok(), sp.name + " fact " + f.name + " did not fail");
        if (!r.ok()) controls.require(witness_falsifies(sp.protocol, f, r), sp.name + " fact " + f.name + ": witness");
      } else {
        ++npos;
        positives.require(r.ok(), sp.name + " fact " + f.name + ": " + r.reason);
      }
    }
    const auto req = required_rules().find(sp.name);
    if (req != required_rules().end()) {
      for (const auto& rule : req->second) positives.require(pos_rules.count(rule), sp.name + " lacks " + rule);
    }
    // Each positive rule has a perturbed control, except the identity update.
    for (const auto& rule : pos_rules) {
      if (rule == "forever-update") continue;
      controls.require(ctl_rules.count(rule), sp.name + " " + rule + " has no control");
    }
  }
  // Hash-table derived rules live at the monoid level.
  const MonoidSuite ht = hashtable_suite();
  for (const auto& f : ht.facts) {
    const CheckResult r = check_fact(ht.built.spec, f);
    if (f.control) {
      ++nctl;
      controls.require(!r.ok(), "hashtable fact " + f.name + " did not fail");
      if (!r.ok()) controls.require(witness_falsifies(ht.built.spec, f, r), "hashtable fact " + f.name + ": witness");
    } else {
      ++npos;
      positives.require(r.ok(), "hashtable fact " + f.name + ": " + r.reason);
    }
  }
  const double t = seconds_since(start);
  positives.require(t < kRelationsSeconds, "runtime " + fixed(t) + " s over " + fixed(kRelationsSeconds) + " s");
  positives.note(std::to_string(npos) + " positive relations and facts, runtime " + fixed(t) + " s");
  controls.note(std::to_string(nctl) + " controls, " + std::to_string(witnesses) + " self-verified frame witnesses");
}

std::vector<std::pair<Element, Element>> prefix_pairs(const StorageProtocolSpec& sp, std::size_t n) {
  std::vector<std::pair<Element, Element>> out;
  const auto xs = sp.protocol.enumerator.prefix(n);
  for (const auto& a : xs) {
    for (const auto& b : xs) out.emplace_back(a, b);
  }
  return out;
}

Outcome criterion_cross_validation() {
  Outcome o;
  std::vector<std::pair<std::string, StorageProtocolSpec>> specs = {
      {"fractional", build_fractional().spec},     {"counting", build_counting().spec},
      {"forever", build_forever().spec},           {"frac-heap", build_frac_heap().spec},
      {"rwlock", build_rwlock().spec},             {"rwlock-multi", build_rwlock_multi().spec},
      {"hashtable", pcm_as_protocol(build_hashtable_monoid().spec)},
  };
  std::size_t total = 0;
  for (const auto& [name, sp] : specs) {
    auto pairs = prefix_pairs(sp, 20);
    // The rule pairs of the suites exercise the interesting transitions.
    if (name == "rwlock" || name == "rwlock-multi") {
      const ProtocolSuite s = name == "rwlock" ? rwlock_suite() : rwlock_multi_suite();
      for (const auto& q : s.queries) {
        if (q.query.kind == RelationKind::Update || q.query.kind == RelationKind::Exchange) {
          pairs.emplace_back(q.query.p, q.query.p_after);
        }
      }
    }
    const UpdateAgreement a = cross_validate_updates(sp, pairs);
    total += a.pairs;
    o.require(a.exact(), name + ": " + std::to_string(a.disagreements.size()) + " disagreements" +
                             (a.exact() ? "" : ", first " + a.disagreements.front()));
  }
  // Plain PCM: the protocol update is the frame-preserving update.
  const MonoidSpec agn = build_agn({Element::integer(0), Element::integer(1)}, 3);
  const StorageProtocolSpec as_protocol = pcm_as_protocol(agn);
  for (const auto& a : agn.enumerator.elements()) {
    for (const auto& b : agn.enumerator.elements()) {
      ++total;
      o.require(update_holds(as_protocol, a, b).ok() == frame_preserving_update(agn, a, b).ok(),
                "AgN update " + a.to_string() + " -> " + b.to_string());
    }
  }
  o.note(std::to_string(total) + " pairs compared");
  return o;
}

std::string violation_list(const ExplorationResult& r) {
  std::string out;
  for (const auto& v : r.violations) out += (out.empty() ? "" : "; ") + v.key() + " " + v.detail;
  return out;
}

bool has_property_kind(const Scenario& s, const std::string& kind) {
  for (const auto& p : s.properties) {
    if (p.kind == kind) return true;
  }
  return false;
}

// Reader observations under an atomic cell: each reader runs wholly before
// or wholly after each writer, so it sees initial plus some subset of deltas.
std::set<std::string> rwlock_reference(const RwLockScenarioParams& p) {
  std::int64_t final_value = p.initial;
  for (const auto d : p.writer_deltas) final_value += d;
  std::set<std::int64_t> seen = {p.initial};
  for (const auto d : p.writer_deltas) {
    auto next = seen;
    for (const auto v : seen) next.insert(v + d);
    seen = next;
  }
  std::set<std::string> out;
  std::function<void(std::size_t, json)> go = [&](std::size_t j, json o) {
    if (j == p.reader_counters.size()) {
      out.insert(o.dump());
      return;
    }
    for (const auto v : seen) {
      o["seen" + std::to_string(j)] = std::to_string(v);
      go(j + 1, o);
    }
  };
  go(0, json{{"cell", std::to_string(final_value)}});
  return out;
}

Outcome criterion_rwlock() {
  Outcome o;
  RwLockScenarioParams exc;
  RwLockScenarioParams shared;
  shared.writer_deltas = {1};
  shared.reader_counters = {0, 0};
  RwLockScenarioParams multi;
  multi.counters = 2;
  multi.writer_deltas = {1};
  multi.reader_counters = {0, 1};
  for (const auto& [name, params] : std::vector<std::pair<std::string, RwLockScenarioParams>>{
           {"K=1 two writers", exc}, {"K=1 two readers + writer", shared}, {"K=2 readers on both counters + writer", multi}}) {
    const Scenario s = build_rwlock_scenario(params);
    for (const char* kind : {"ghost-invariant", "mutual-exclusion", "reader-agreement"}) {
      o.require(has_property_kind(s, kind), name + " lacks a " + kind + " property");
    }
    const auto reference = rwlock_reference(params);
    for (const auto mode : {AdmissionMode::Rule, AdmissionMode::Concrete}) {
      const auto start = Clock::now();
      const ExplorationResult r = explore(s, {.mode = mode});
      const double t = seconds_since(start);
      const std::string tag = name + " [" + to_string(mode) + "]";
      o.require(!r.bound_exceeded, tag + ": bound exceeded: " + r.bound_reason);
      o.require(r.violations.empty(), tag + ": " + violation_list(r));
      o.require(r.stuck_states == 0, tag + ": " + std::to_string(r.stuck_states) + " stuck states");
      o.require(r.outcomes == reference, tag + ": terminal outcomes differ from the atomic-cell reference");
      o.require(t < kRwLockSecondsPerScenario, tag + ": runtime " + fixed(t) + " s");
      o.note(tag + ": " + std::to_string(r.states) + " states, " + std::to_string(r.outcomes.size()) +
             " outcomes, " + fixed(t) + " s");
    }
  }
  return o;
}

// Terminal map from the slot cells of an outcome: some((k, v)) -> k |-> v.
std::map<std::int64_t, std::int64_t> map_from_slots(const json& outcome, std::int64_t length) {
  std::map<std::int64_t, std::int64_t> m;
  for (std::int64_t i = 0; i < length; ++i) {
    const Element slot = parse_element(outcome.at("slot" + std::to_string(i)).get<std::string>());
    if (!slot.is_ctor("some")) continue;
    const Element& entry = slot.items()[0];
    m[entry.items()[0].as_int()] = entry.items()[1].as_int();
  }
  return m;
}

Outcome criterion_hashtable() {
  Outcome o;
  const HashTableScenarioParams p = collision_params();
  o.require(p.table.length == 3 && p.table.hash == std::vector<std::int64_t>{0, 0}, "collision parameters changed");
  const Scenario s = build_hashtable_scenario(p);
  o.require(has_property_kind(s, "ht-valid"), "no table-validity property");
  const auto oracle = sequential_oracle(p.threads);
  // Query cells in thread order, then op order, as the oracle lists them.
  std::vector<std::string> query_cells;
  for (std::size_t t = 0; t < p.threads.size(); ++t) {
    for (std::size_t j = 0; j < p.threads[t].size(); ++j) {
      if (p.threads[t][j].kind == HtOp::Kind::Query) query_cells.push_back("res" + std::to_string(t) + "_" + std::to_string(j));
    }
  }
  for (const auto mode : {AdmissionMode::Rule, AdmissionMode::Concrete}) {
    const auto start = Clock::now();
    const ExplorationResult r = explore(s, {.mode = mode});
    const double t = seconds_since(start);
    const std::string tag = std::string("[") + to_string(mode) + "]";
    o.require(!r.bound_exceeded, tag + " bound exceeded: " + r.bound_reason);
    o.require(r.stuck_states == 0, tag + " " + std::to_string(r.stuck_states) + " stuck states");
    o.require(r.violations.empty(), tag + " " + violation_list(r));
    o.require(!r.outcomes.empty(), tag + " no terminal outcomes");
    std::size_t matched = 0;
    for (const auto& text : r.outcomes) {
      const json out = json::parse(text);
      OracleOutcome seen;
      for (const auto& cell : query_cells) {
        const Element v = parse_element(out.at(cell).get<std::string>());
        seen.results.push_back(v.is_ctor("some") ? std::optional<std::int64_t>(v.items()[0].as_int()) : std::nullopt);
      }
      seen.table = map_from_slots(out, p.table.length);
      const bool ok = oracle.count(seen) > 0;
      matched += ok;
      o.require(ok, tag + " outcome " + text + " is not a sequential outcome");
    }
    o.require(t < kHashTableSeconds, tag + " runtime " + fixed(t) + " s");
    o.note(tag + " " + std::to_string(r.states) + " states, " + std::to_string(matched) + "/" +
           std::to_string(r.outcomes.size()) + " outcomes in the oracle set of " + std::to_string(oracle.size()) + ", " +
           fixed(t) + " s");
  }
  return o;
}

Outcome criterion_race() {
  Outcome o;
  RwLockScenarioParams p;
  p.writer_deltas = {1};
  p.reader_counters = {0};
  p.locks = false;
  const ExplorationResult unlocked = explore(build_rwlock_scenario(p));
  bool race = false;
  for (const auto& v : unlocked.violations) race = race || v.key() == "stuck:data-race";
  o.require(race, "locks removed: no data race found");
  p.locks = true;
  const ExplorationResult locked = explore(build_rwlock_scenario(p));
  std::size_t stuck = locked.stuck_states;
  for (const auto& v : locked.violations) stuck += v.kind == "stuck";
  o.require(!locked.bound_exceeded, "locks restored: bound exceeded");
  o.require(stuck == 0, "locks restored: " + std::to_string(stuck) + " stuck");
  o.note("locks removed: race " + std::string(race ? "found" : "missing") + "; locks restored: " +
         std::to_string(stuck) + " stuck over " + std::to_string(locked.states) + " states");
  return o;
}

Outcome criterion_determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path();
  std::vector<std::string> reports;
  for (int run = 0; run < 2; ++run) {
    const auto path = dir / ("sharecheck_acceptance_report" + std::to_string(run) + ".json");
    const std::string cmd = std::string("\"") + SHARECHECK_CLI + "\" report > \"" + path.string() + "\"";
    const int rc = std::system(cmd.c_str());
    o.require(rc == 0, "report run " + std::to_string(run) + " exited with status " + std::to_string(rc));
    std::ifstream in(path);
    reports.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    std::filesystem::remove(path);
  }
  o.require(!reports[0].empty(), "empty report");
  o.require(reports[0] == reports[1], "the two reports differ");
  o.note(std::to_string(demo_registry().size()) + " demos, " + std::to_string(reports[0].size()) + " bytes, identical");
  return o;
}

void print(int n, const std::string& title, const Outcome& o, bool* all) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << ": " << title << "\n";
  for (const auto& note : o.notes) std::cout << "    " << note << "\n";
  std::cout.flush();
  *all = *all && o.pass;
}

}  // namespace
}  // namespace sharecheck

int main() {
  using namespace sharecheck;
  bool all = true;
  print(1, "PCM law suite", criterion_laws(), &all);
  Outcome positives;
  Outcome controls;
  criteria_relations(positives, controls);
  print(2, "relation suite positives", positives, &all);
  print(3, "relation suite negative controls", controls, &all);
  print(4, "update cross-validation", criterion_cross_validation(), &all);
  print(5, "reader-writer lock exploration", criterion_rwlock(), &all);
  print(6, "hash table exploration against the sequential oracle", criterion_hashtable(), &all);
  print(7, "race detection negative control", criterion_race(), &all);
  print(8, "determinism of the demo registry report", criterion_determinism(), &all);
  return all ? 0 : 1;
}
