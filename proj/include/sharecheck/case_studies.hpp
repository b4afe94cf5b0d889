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

// Ready-made scenarios: the reader-writer lock (one or several reference
// counters) guarding one heap cell, and the linear-probing hash table with
// one lock per slot. Plus the brute-force sequential oracle for the table.

#ifndef SHARECHECK_CASE_STUDIES_HPP
#define SHARECHECK_CASE_STUDIES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "sharecheck/explorer.hpp"
#include "sharecheck/protocols.hpp"

namespace sharecheck {

struct RwLockScenarioParams {
  int counters = 1;
  /// One writer per entry; each adds its delta to the cell under the lock.
  std::vector<std::int64_t> writer_deltas = {1, 1};
  /// One reader per entry: the counter it increments.
  std::vector<int> reader_counters;
  std::int64_t initial = 0;
  /// false drops the lock calls and the ghost script (race control).
  bool locks = true;
};

Scenario build_rwlock_scenario(const RwLockScenarioParams& p);

struct HtOp {
  enum class Kind { Query, Update };
  Kind kind = Kind::Query;
  std::int64_t key = 0;
  std::int64_t value = 0;

  static HtOp query(std::int64_t k) { return {Kind::Query, k, 0}; }
  static HtOp update(std::int64_t k, std::int64_t v) { return {Kind::Update, k, v}; }
};

struct HashTableScenarioParams {
  /// Keys and values must be integers.
  HashTableParams table;
  std::vector<std::vector<HtOp>> threads;
};

/// Keys 0 and 1 both hashing to slot 0 of a 3-slot table; thread 0 updates
/// both keys, thread 1 queries key 0.
HashTableScenarioParams collision_params();

Scenario build_hashtable_scenario(const HashTableScenarioParams& p);

/// A table too small for its keys, so probing runs off the end.
Scenario build_abort_scenario();

struct OracleOutcome {
  /// Query results in thread order, then op order.
  std::vector<std::optional<std::int64_t>> results;
  std::map<std::int64_t, std::int64_t> table;

  friend auto operator<=>(const OracleOutcome&, const OracleOutcome&) = default;
};

/// Every interleaving of the per-thread ops over an atomic map.
std::set<OracleOutcome> sequential_oracle(const std::vector<std::vector<HtOp>>& threads);

/// The outcome as the explorer's ht-oracle property prints it.
nlohmann::json oracle_outcome_json(const OracleOutcome& o);

}  // namespace sharecheck

#endif  // SHARECHECK_CASE_STUDIES_HPP
