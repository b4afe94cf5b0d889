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

#include "sharecheck/ghost_engine.hpp"

#include <gtest/gtest.h>

#include "sharecheck/combinators.hpp"

namespace sharecheck {
namespace {

using K = GhostAction::Kind;

const Element kZero = Element::integer(0);
const Element kOne = Element::integer(1);
const Element kEps = Element::unit();

ProtocolRef rwlock() {
  static const ProtocolRef p = make_protocol(build_rwlock().spec);
  return p;
}

GhostLedger fresh_lock(std::int64_t rc = 0) {
  const auto a = GhostAction::alloc("rw", rwlock(), {{"lock", kEps, rw_fields(false, rc, kZero)}}, ex(kZero));
  const auto o = apply_action({}, a, AdmissionMode::Rule);
  EXPECT_TRUE(o.admitted) << (o.violation ? o.violation->reason : "");
  return o.ledger;
}

GhostLedger run(const GhostLedger& l, const RuleSet& rules, const std::string& rule, const std::string& owner,
                std::map<std::string, Element> args = {}, AdmissionMode mode = AdmissionMode::Rule) {
  GhostLedger cur = l;
  for (const auto& a : rules.at(rule)(RuleContext{cur, "rw", owner, "lock", std::move(args)})) {
    const auto o = apply_action(cur, a, mode);
    EXPECT_TRUE(o.admitted) << rule << ": " << (o.violation ? o.violation->reason : "");
    cur = o.ledger;
  }
  return cur;
}

TEST(GhostAlloc, StoresTheImageOfTheJointState) {
  const auto l = fresh_lock();
  EXPECT_EQ(l.at("rw").stored, ex(kZero));
  EXPECT_FALSE(check_ledger_invariants(l));
  EXPECT_THROW(apply_action(l, GhostAction::alloc("rw", rwlock(), {}, kEps), AdmissionMode::Rule), GhostUsageError);
}

TEST(GhostAlloc, RejectsMismatchedStoredContent) {
  const auto a = GhostAction::alloc("rw", rwlock(), {{"lock", kEps, rw_fields(false, 0, kZero)}}, ex(kOne));
  EXPECT_FALSE(apply_action({}, a, AdmissionMode::Rule).admitted);
}

TEST(GhostExchange, ExclusiveBeginIsAdmitted) {
  const auto l = run(fresh_lock(), rwlock_rules(), "rw-exc-begin", "t1");
  EXPECT_EQ(l.at("rw").fragment("lock"), rw_fields(true, 0, kZero));
  EXPECT_EQ(l.at("rw").fragment("t1"), rw_exc_pending());
  EXPECT_FALSE(check_ledger_invariants(l));
}

TEST(GhostExchange, ExclusiveAcquireWithdrawsTheValue) {
  const auto rules = rwlock_rules();
  auto l = run(fresh_lock(), rules, "rw-exc-begin", "t1");
  l = run(l, rules, "rw-exc-acquire", "t1");
  EXPECT_EQ(l.at("rw").stored, kEps);
  EXPECT_EQ(l.at("rw").fragment("t1"), rw_exc());
  l = run(l, rules, "rw-exc-release", "t1", {{"x", kOne}});
  EXPECT_EQ(l.at("rw").stored, ex(kOne));
  EXPECT_EQ(l.at("rw").fragment("lock"), rw_fields(false, 0, kOne));
  EXPECT_FALSE(l.at("rw").fragments.contains("t1"));
  EXPECT_FALSE(check_ledger_invariants(l));
}

TEST(GhostExchange, AcquireWithAReaderIsRejectedWithAWitness) {
  const auto rules = rwlock_rules();
  auto l = run(fresh_lock(), rules, "rw-shared-begin", "r");
  l = run(l, rules, "rw-exc-begin", "w");
  const auto acts = rules.at("rw-exc-acquire")(RuleContext{l, "rw", "w", "lock", {}});
  const auto o = apply_action(l, acts.at(0), AdmissionMode::Rule);
  EXPECT_FALSE(o.admitted);
  ASSERT_TRUE(o.violation);
  ASSERT_TRUE(o.violation->witness);
  EXPECT_EQ(o.ledger, l);
  // The witness frame really breaks the exchange.
  const auto& sp = rwlock()->spec();
  const auto& m = sp.protocol;
  const Element f1 = rw_fields(true, 1, kZero);
  EXPECT_TRUE(exchange_body(sp, m.compose(f1, rw_exc_pending()), sp.storage.unit, m.compose(f1, rw_exc()), ex(kZero),
                            *o.violation->witness));
  // Against the actual frame (a pending reader) nothing goes wrong.
  EXPECT_TRUE(apply_action(l, acts.at(0), AdmissionMode::Concrete).admitted);
}

TEST(GhostExchange, HoldingTooLittleIsRejected) {
  const auto l = fresh_lock();
  const auto a = GhostAction::exchange(K::Update, "rw", {{"t1", rw_exc_pending(), rw_exc()}});
  const auto o = apply_action(l, a, AdmissionMode::Concrete);
  EXPECT_FALSE(o.admitted);
  EXPECT_NE(o.violation->reason.find("does not hold"), std::string::npos);
}

TEST(GhostExchange, DuplicateOwnerIsAUsageError) {
  const auto a = GhostAction::exchange(K::Update, "rw", {{"t1", kEps, kEps}, {"t1", kEps, kEps}});
  EXPECT_THROW(apply_action(fresh_lock(), a, AdmissionMode::Rule), GhostUsageError);
  EXPECT_THROW(apply_action(fresh_lock(), GhostAction::close_guard("nope"), AdmissionMode::Rule), GhostUsageError);
}

TEST(GhostGuard, SharedTokenGuardsTheValue) {
  const auto rules = rwlock_rules();
  auto l = run(fresh_lock(), rules, "rw-shared-begin", "r");
  l = run(l, rules, "rw-shared-acquire", "r");
  GhostLedger opened;
  const auto w = open_guard(l, "rw", "r", ex(kZero), AdmissionMode::Rule, &opened);
  ASSERT_TRUE(std::holds_alternative<GuardWindow>(w));
  EXPECT_TRUE(opened.at("rw").window);
  // A second window on the same instance is refused.
  EXPECT_TRUE(std::holds_alternative<GhostViolation>(open_guard(opened, "rw", "r", ex(kZero), AdmissionMode::Rule)));
  const auto closed = apply_action(opened, GhostAction::close_guard("rw"), AdmissionMode::Rule);
  EXPECT_EQ(closed.ledger, l);
}

TEST(GhostGuard, UnitIsTriviallyGuarded) {
  const auto w = open_guard(fresh_lock(), "rw", "nobody", kEps, AdmissionMode::Rule);
  EXPECT_TRUE(std::holds_alternative<GuardWindow>(w));
}

TEST(GhostGuard, PendingTokenGuardsNothing) {
  auto l = run(fresh_lock(), rwlock_rules(), "rw-shared-begin", "r");
  const auto w = open_guard(l, "rw", "r", ex(kZero), AdmissionMode::Rule);
  ASSERT_TRUE(std::holds_alternative<GhostViolation>(w));
  // Rule mode catches it even though the value happens to be stored.
  EXPECT_TRUE(std::holds_alternative<GuardWindow>(open_guard(l, "rw", "r", ex(kZero), AdmissionMode::Concrete)));
}

TEST(GhostRules, MissingTokenIsARuleError) {
  const auto rules = rwlock_rules();
  const auto l = fresh_lock();
  EXPECT_THROW(rules.at("rw-shared-release")(RuleContext{l, "rw", "r", "lock", {}}), RuleError);
  EXPECT_THROW(rules.at("rw-exc-release")(RuleContext{l, "rw", "r", "lock", {}}), RuleError);
}

TEST(GhostSnapshot, StableAndSensitive) {
  const auto a = fresh_lock();
  const auto b = fresh_lock();
  EXPECT_EQ(ledger_snapshot(a).dump(), ledger_snapshot(b).dump());
  EXPECT_EQ(ledger_hash(a), ledger_hash(b));
  const auto c = run(a, rwlock_rules(), "rw-exc-begin", "t1");
  EXPECT_NE(ledger_snapshot(a).dump(), ledger_snapshot(c).dump());
  EXPECT_NE(ledger_hash(a), ledger_hash(c));
  EXPECT_EQ(ledger_snapshot(c)["rw"]["fragments"]["t1"], rw_exc_pending().to_string());
}

// Every action Rule mode admits, Concrete mode admits too.
TEST(GhostModes, RuleAdmissionImpliesConcrete) {
  const auto rules = rwlock_rules();
  const std::vector<std::string> owners = {"a", "b"};
  std::vector<GhostLedger> frontier = {fresh_lock()};
  std::size_t checked = 0;
  for (int depth = 0; depth < 4; ++depth) {
    std::vector<GhostLedger> next;
    for (const auto& l : frontier) {
      for (const auto& [name, rule] : rules) {
        for (const auto& owner : owners) {
          std::vector<GhostAction> acts;
          try {
            acts = rule(RuleContext{l, "rw", owner, "lock", {{"x", kOne}}});
          } catch (const RuleError&) {
            continue;
          }
          const auto r = apply_action(l, acts[0], AdmissionMode::Rule);
          const auto c = apply_action(l, acts[0], AdmissionMode::Concrete);
          ++checked;
          if (r.admitted) {
            EXPECT_TRUE(c.admitted) << describe(acts[0]);
            EXPECT_EQ(r.ledger, c.ledger);
            EXPECT_FALSE(check_ledger_invariants(r.ledger)) << describe(acts[0]);
            if (acts[0].kind != K::OpenGuard && next.size() < 64) next.push_back(r.ledger);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  EXPECT_GT(checked, 100u);
}

TEST(GhostMulti, ProgressThroughEveryCounter) {
  const auto p = make_protocol(build_rwlock_multi({}).spec);
  const auto rules = rwlock_multi_rules(2);
  GhostLedger l = apply_action({}, GhostAction::alloc("rw", p, {{"lock", kEps, rwm_fields(false, {0, 0}, kZero)}},
                                                       ex(kZero)),
                               AdmissionMode::Rule)
                      .ledger;
  ASSERT_EQ(l.instances.size(), 1u);
  const auto step = [&](const std::string& rule, const std::string& owner, std::map<std::string, Element> args = {}) {
    const auto acts = rules.at(rule)(RuleContext{l, "rw", owner, "lock", std::move(args)});
    const auto o = apply_action(l, acts.at(0), AdmissionMode::Rule);
    return o;
  };
  l = step("xrw-shared-begin", "r", {{"k", kOne}}).ledger;
  l = step("xrw-exc-begin", "w").ledger;
  l = step("xrw-exc-progress", "w").ledger;
  // Counter 1 is held by the reader: progress past it is refused.
  EXPECT_FALSE(step("xrw-exc-progress", "w").admitted);
  l = step("xrw-shared-retry", "r", {{"k", kOne}}).ledger;
  l = step("xrw-exc-progress", "w").ledger;
  const auto acq = step("xrw-exc-acquire", "w");
  ASSERT_TRUE(acq.admitted) << acq.violation->reason;
  EXPECT_EQ(acq.ledger.at("rw").stored, kEps);
  EXPECT_FALSE(check_ledger_invariants(acq.ledger));
}

TEST(GhostHashTable, InsertAndMoveSlots) {
  HashTableParams params;
  params.keys = {kZero, kOne};
  const auto p = make_protocol(pcm_as_protocol(build_hashtable_monoid(params).spec));
  const auto& m = p->spec().protocol;
  const Element none_ = none();
  Element thread = m.unit;
  for (const auto& k : params.keys) thread = m.compose(thread, ht_m(k, none_));
  std::vector<FragmentChange> init = {{"t", kEps, thread}};
  for (std::int64_t i = 0; i < params.length; ++i) init.push_back({"slot" + std::to_string(i), kEps, ht_slot(i, none_)});
  GhostLedger l = apply_action({}, GhostAction::alloc("ht", p, init, kEps), AdmissionMode::Rule).ledger;
  ASSERT_EQ(l.instances.size(), 1u);
  const auto rules = hashtable_rules(params);
  const auto apply = [&](const std::string& rule, std::string region, std::map<std::string, Element> args) {
    const auto acts = rules.at(rule)(RuleContext{l, "ht", "t", std::move(region), std::move(args)});
    const auto o = apply_action(l, acts.at(0), AdmissionMode::Rule);
    EXPECT_TRUE(o.admitted) << rule << ": " << (o.violation ? o.violation->reason : "");
    l = o.ledger;
  };
  apply("ht-take-slot", "slot0", {});
  apply("ht-update", "", {{"index", kZero}, {"entry", some(ht_entry(kZero, kOne))}});
  apply("ht-take-slot", "slot1", {});
  // Key 1 collides with key 0 and lands in slot 1; both slots are held.
  apply("ht-update", "", {{"index", kOne}, {"entry", some(ht_entry(kOne, Element::integer(2)))}});
  apply("ht-return-slot", "slot1", {{"index", kOne}});
  apply("ht-return-slot", "slot0", {{"index", kZero}});
  EXPECT_EQ(l.at("ht").fragment("slot1"), ht_slot(1, some(ht_entry(kOne, Element::integer(2)))));
  EXPECT_FALSE(check_ledger_invariants(l));
  // Writing key 1 into slot 0 again, over key 0, is not a valid update.
  apply("ht-take-slot", "slot0", {});
  const auto bad = rules.at("ht-update")(RuleContext{l, "ht", "t", "", {{"index", kZero},
                                                                    {"entry", some(ht_entry(kOne, kOne))}}});
  EXPECT_FALSE(apply_action(l, bad.at(0), AdmissionMode::Rule).admitted);
}

}  // namespace
}  // namespace sharecheck
