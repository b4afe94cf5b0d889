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

#include "sharecheck/explorer.hpp"

#include <gtest/gtest.h>

#include <random>

namespace sharecheck {
namespace {

ExploreOptions plain(bool memo = true) {
  ExploreOptions o;
  o.memoize = memo;
  o.collapse_local = false;
  return o;
}

Scenario two_writers() {
  Scenario s;
  s.name = "two-writers";
  s.heap = {{"l", "0"}};
  s.threads = {{"a", "(store @l 1)"}, {"b", "(store @l 2)"}};
  return s;
}

Scenario na_race(bool readers_only = false) {
  Scenario s;
  s.name = "na-race";
  s.heap = {{"l", "0"}};
  s.threads = {{"r", "(load-na @l)"}, {"w", readers_only ? "(load-na @l)" : "(store-na @l 1)"}};
  s.expect = Expectation::StuckReachable;
  return s;
}

TEST(Explore, EmptyScenarioHasOneState) {
  Scenario s;
  s.name = "empty";
  const auto r = explore(s);
  EXPECT_EQ(r.states, 1u);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.outcomes.size(), 1u);
  EXPECT_FALSE(r.bound_exceeded);
}

TEST(Explore, TwoScWritesGiveBothOutcomes) {
  for (const bool memo : {true, false}) {
    const auto r = explore(two_writers(), plain(memo));
    EXPECT_EQ(r.outcomes, (std::set<std::string>{R"({"l":"1"})", R"({"l":"2"})"}));
    EXPECT_TRUE(r.violations.empty());
    if (!memo) EXPECT_EQ(r.schedules, 2u);
  }
}

TEST(Explore, UnsynchronizedNaAccessesRace) {
  const auto r = explore(na_race());
  ASSERT_FALSE(r.violations.empty());
  EXPECT_EQ(r.violations[0].key(), "stuck:data-race");
  EXPECT_TRUE(r.expectation_met());
  EXPECT_GT(r.stuck_states, 0u);
  // Shortest race: the reader begins, then the writer collides.
  EXPECT_EQ(r.violations[0].trace.size(), 2u);
  const auto t = replay(na_race(), r.violations[0].trace);
  ASSERT_TRUE(t.violation);
  EXPECT_EQ(t.violation->key(), "stuck:data-race");
}

TEST(Explore, ConcurrentNaReadsDoNotRace) {
  const auto r = explore(na_race(true));
  EXPECT_TRUE(r.violations.empty());
  EXPECT_FALSE(r.expectation_met());
}

TEST(Explore, AbortIsStuck) {
  Scenario s;
  s.name = "abort";
  s.threads = {{"t", "(seq 1 (abort))"}};
  const auto r = explore(s);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].key(), "stuck:abort");
}

// Thread t performs steps[t] steps regardless of the schedule, so the
// number of interleavings is the multinomial coefficient.
std::uint64_t multinomial(const std::vector<std::size_t>& steps) {
  std::vector<std::size_t> left = steps;
  std::uint64_t count = 0;
  std::function<void()> go = [&] {
    bool any = false;
    for (auto& l : left) {
      if (l == 0) continue;
      any = true;
      --l;
      go();
      ++l;
    }
    if (!any) ++count;
  };
  go();
  return count;
}

std::size_t solo_steps(const std::string& program, const std::string& heap_value) {
  Scenario s;
  s.name = "solo";
  s.heap = {{"l", heap_value}, {"m", heap_value}};
  s.threads = {{"t", program}};
  const auto r = explore(s, plain(false));
  EXPECT_EQ(r.schedules, 1u);
  return r.transitions;
}

TEST(Explore, InterleavingCountMatchesPermutationOracle) {
  std::mt19937 rng(7);
  const std::vector<std::string> ops = {"(store @l 1)", "(load @l)", "(faa @m 1)", "(+ 1 2)", "(load @m)",
                                        "(cas @l 0 5)"};
  for (int round = 0; round < 12; ++round) {
    Scenario s;
    s.name = "random";
    s.heap = {{"l", "0"}, {"m", "0"}};
    s.bounds.max_states = 2000000;
    const std::size_t nthreads = 2 + rng() % 2;
    std::vector<std::size_t> steps;
    for (std::size_t t = 0; t < nthreads; ++t) {
      std::string prog = "(seq";
      const std::size_t n = 1 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) prog += " " + ops[rng() % ops.size()];
      prog += n == 1 ? " ())" : ")";
      s.threads.push_back({"t" + std::to_string(t), prog});
      steps.push_back(solo_steps(prog, "0"));
    }
    const auto r = explore(s, plain(false));
    ASSERT_FALSE(r.bound_exceeded);
    EXPECT_EQ(r.schedules, multinomial(steps)) << to_json(s).dump();
    const auto m = explore(s, plain(true));
    EXPECT_EQ(m.outcomes, r.outcomes);
    EXPECT_LE(m.states, r.states);
  }
}

TEST(Explore, MemoizationKeepsViolationsAndOutcomes) {
  for (const auto& s : {na_race(), two_writers()}) {
    const auto a = explore(s, plain(true));
    const auto b = explore(s, plain(false));
    EXPECT_EQ(a.outcomes, b.outcomes);
    ASSERT_EQ(a.violations.size(), b.violations.size());
    for (std::size_t i = 0; i < a.violations.size(); ++i) EXPECT_EQ(a.violations[i].key(), b.violations[i].key());
  }
}

TEST(Explore, CollapsingLocalStepsKeepsOutcomes) {
  Scenario s;
  s.name = "collapse";
  s.heap = {{"l", "0"}};
  s.threads = {{"a", "(let x (load @l) (store @l (+ x 1)))"}, {"b", "(let y (load @l) (store @l (+ y 1)))"}};
  const auto full = explore(s, plain(true));
  ExploreOptions o;
  const auto collapsed = explore(s, o);
  EXPECT_EQ(full.outcomes, collapsed.outcomes);
  EXPECT_EQ(collapsed.outcomes, (std::set<std::string>{R"({"l":"1"})", R"({"l":"2"})"}));
  EXPECT_LT(collapsed.states, full.states);
}

TEST(Explore, SpinLoopsTerminateThroughMemo) {
  Scenario s;
  s.name = "spin";
  s.heap = {{"flag", "false"}};
  s.threads = {{"waiter", "(do v (load @flag) v)"}, {"setter", "(store @flag true)"}};
  const auto r = explore(s);
  EXPECT_FALSE(r.bound_exceeded);
  EXPECT_EQ(r.outcomes.size(), 1u);
  // Without memoization the loop can spin until the step bound.
  s.bounds.max_steps = 20;
  const auto u = explore(s, plain(false));
  EXPECT_TRUE(u.bound_exceeded);
  EXPECT_NE(u.to_json()["bound_reason"].get<std::string>().find("20 heap steps"), std::string::npos);
}

TEST(Explore, StateBoundIsReported) {
  Scenario s = two_writers();
  s.bounds.max_states = 2;
  const auto r = explore(s, plain(true));
  EXPECT_TRUE(r.bound_exceeded);
}

TEST(Replay, EmptyScheduleIsTheInitialState) {
  const auto t = replay(two_writers(), {});
  EXPECT_TRUE(t.steps.empty());
  EXPECT_FALSE(t.terminal);
  EXPECT_EQ(t.initial["heap"]["l"]["value"], "0");
}

TEST(Replay, RejectsThreadsThatAreNotEnabled) {
  try {
    replay(two_writers(), {0, 0});
    FAIL() << "expected a replay error";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.index, 1u);
  }
  EXPECT_THROW(replay(two_writers(), {5}), ReplayError);
}

TEST(Replay, TerminalOutcomeIsAmongExplored) {
  const auto r = explore(two_writers(), plain(false));
  for (const std::vector<std::size_t> sched : {std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{1, 0}}) {
    const auto t = replay(two_writers(), sched, plain(false));
    ASSERT_TRUE(t.terminal);
    EXPECT_TRUE(r.outcomes.contains(*t.outcome));
  }
}

TEST(Properties, MutualExclusionCountsMarks) {
  Scenario s;
  s.name = "marks";
  s.threads = {{"a", "()"}, {"b", "()"}};
  const auto c = compile(s);
  const PropertyDecl p{"mutex", "mutual-exclusion", {}};
  ExplorerState st = c.initial;
  EXPECT_FALSE(check_property(c, st, p));
  st.marks[0].insert("exclusive");
  EXPECT_FALSE(check_property(c, st, p));
  st.marks[1].insert("exclusive@other");
  EXPECT_FALSE(check_property(c, st, p));
  st.marks[1].insert("exclusive");
  EXPECT_TRUE(check_property(c, st, p));
  st.marks[1].clear();
  st.marks[1].insert("shared");
  EXPECT_TRUE(check_property(c, st, p));
}

TEST(Properties, FreedLocationIsAFailureNotACrash) {
  Scenario s;
  s.name = "freed";
  s.heap = {{"l", "0"}};
  s.threads = {{"t", "(free @l)"}};
  s.properties = {{"l-is-zero", "heap-predicate", {{"cell", "l"}, {"values", {"0"}}}}};
  const auto r = explore(s);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_NE(r.violations[0].detail.find("freed"), std::string::npos);
}

TEST(Properties, GhostInvariantHoldsInitially) {
  Scenario s;
  s.name = "ghost";
  s.instances = {{"rw", {{"builtin", "rwlock"}}, {{"lock", parse_element("(ex((false, 0, 0)), eps, eps, 0, eps)")}},
                  parse_element("ex(0)")}};
  const auto c = compile(s);
  EXPECT_FALSE(check_property(c, c.initial, {"inv", "ghost-invariant", {}}));
}

TEST(ScenarioJson, RoundTrips) {
  Scenario s = na_race();
  s.rule_sets = {{{"set", "rwlock"}}};
  s.threads[0].program = "(@ \"rd\" (load-na @l))";
  ScriptEntry e;
  e.label = "rd";
  e.when_phase = Phase::End;
  e.actions.push_back({"rw-shared-guard", Ref::loc_table({{"l", "rw"}}), Ref::self(), Ref::lit("lock"),
                       {{"x", ArgSource::heap_at(Ref::lit("l"))}, {"i", ArgSource::loc_index({"l"})}}});
  e.mark = Ref::lit("shared");
  s.script.push_back(e);
  s.properties = {{"p", "ghost-invariant", nlohmann::json::object()}};
  const auto j = to_json(s);
  EXPECT_EQ(scenario_from_json(j), s);
  EXPECT_EQ(to_json(scenario_from_json(j)).dump(), j.dump());
}

TEST(ScenarioJson, RejectsMalformedInput) {
  auto j = to_json(two_writers());
  j["bogus"] = 1;
  EXPECT_THROW(scenario_from_json(j), ScenarioError);
  j = to_json(two_writers());
  j["expect"] = "sometimes";
  EXPECT_THROW(scenario_from_json(j), ScenarioError);
  Scenario s = two_writers();
  s.threads[0].program = "(store @nowhere 1)";
  EXPECT_THROW(compile(s), ScenarioError);
  s = two_writers();
  s.script.push_back({"missing-label", {}, {}, {}, {}, {}});
  EXPECT_THROW(compile(s), ScenarioError);
}

TEST(Explore, ResultsAreDeterministic) {
  const auto a = explore(na_race()).to_json().dump();
  const auto b = explore(na_race()).to_json().dump();
  EXPECT_EQ(a, b);
}

}  // namespace
}  // namespace sharecheck
