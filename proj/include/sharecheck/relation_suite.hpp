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

#ifndef SHARECHECK_RELATION_SUITE_HPP
#define SHARECHECK_RELATION_SUITE_HPP

#include <string>
#include <vector>

#include "sharecheck/protocols.hpp"

namespace sharecheck {

/// One relation instance with its expected verdict. Negative controls are
/// perturbations of a positive rule and carry `control = true`.
struct SuiteQuery {
  std::string name;
  std::string rule;
  ExchangeQuery query;
  bool expect_holds = true;
  bool control = false;
};

enum class FactKind {
  Update,      // a ⇝ b in the monoid
  AndPremise,  // and_premise(a, b, c)
  Invalid,     // ¬V(a)
  Equal,       // a · b = c
  Complete,    // C(a) ∧ S(a) = b (protocol facts only)
};

std::string to_string(FactKind k);

/// Monoid-level facts: allocation premises, identities, PCM-And premises and
/// the validity facts behind pure deductions.
struct MonoidFact {
  std::string name;
  std::string rule;
  FactKind kind = FactKind::Update;
  Element a;
  Element b;
  Element c;
  bool expect_holds = true;
  bool control = false;
};

CheckResult check_fact(const MonoidSpec& m, const MonoidFact& f);
CheckResult check_fact(const StorageProtocolSpec& sp, const MonoidFact& f);

/// Re-evaluates a failing verdict's witness against the relation's body.
/// True when the witness falsifies the body (or the fact is frame-free).
bool witness_falsifies(const StorageProtocolSpec& sp, const SuiteQuery& q, const CheckResult& r);
bool witness_falsifies(const MonoidSpec& m, const MonoidFact& f, const CheckResult& r);

struct ProtocolSuite {
  BuiltProtocol built;
  std::vector<SuiteQuery> queries;
  std::vector<MonoidFact> facts;
};

struct MonoidSuite {
  BuiltMonoid built;
  std::vector<MonoidFact> facts;
};

ProtocolSuite fractional_suite(const FractionalParams& params = {});
ProtocolSuite frac_heap_suite(const FracHeapParams& params = {});
ProtocolSuite counting_suite(const CountingParams& params = {});
/// Counting with the carrier constraint dropped; holds only controls.
ProtocolSuite counting_unconstrained_suite(const CountingParams& params = {});
ProtocolSuite forever_suite();
ProtocolSuite rwlock_suite(const RwLockParams& params = {});

/// Instantiation range for the counter vectors of the multi-counter rules.
/// Frames still range over the full protocol enumerator.
struct MultiInstances {
  std::int64_t rc_min = 0;
  std::int64_t rc_max = 1;
};
ProtocolSuite rwlock_multi_suite(const RwLockMultiParams& params = {},
                                 const MultiInstances& inst = {});

MonoidSuite hashtable_suite(const HashTableParams& params = {});

/// All protocol suites of the relation acceptance run, in a fixed order.
std::vector<ProtocolSuite> standard_protocol_suites();

}  // namespace sharecheck

#endif  // SHARECHECK_RELATION_SUITE_HPP
