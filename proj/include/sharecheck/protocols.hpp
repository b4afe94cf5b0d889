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

#ifndef SHARECHECK_PROTOCOLS_HPP
#define SHARECHECK_PROTOCOLS_HPP

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sharecheck/combinators.hpp"
#include "sharecheck/storage_protocol.hpp"

namespace sharecheck {

/// Named element constructors of a built-in, keyed by name. Arguments are
/// elements (booleans, integers, symbols, ...).
using NamedElementSet =
    std::map<std::string, std::function<Element(std::span<const Element>)>, std::less<>>;

struct BuiltProtocol {
  StorageProtocolSpec spec;
  NamedElementSet named;
};

struct BuiltMonoid {
  MonoidSpec spec;
  NamedElementSet named;
};

// Fractional protocol for a single proposition.
struct FractionalParams {
  std::int64_t denominator_bound = 12;
  std::int64_t max = 4;
  std::int64_t storage_max = 8;
};
BuiltProtocol build_fractional(const FractionalParams& params = {});

// Counting protocol. Dropping the carrier constraint admits (r, 0) with
// r > 0, which breaks the guard of `ref`.
struct CountingParams {
  std::int64_t r_min = -4;
  std::int64_t r_max = 4;
  std::int64_t c_max = 4;
  std::int64_t storage_max = 8;
  bool carrier_constraint = true;
};
MonoidSpec build_counting_monoid(const CountingParams& params = {});
BuiltProtocol build_counting(const CountingParams& params = {});
/// Throws EncodingError when (r, c) is outside the constrained carrier.
Element counting_element(std::int64_t r, std::int64_t c, bool carrier_constraint = true);

BuiltProtocol build_forever();

// Reader-writer lock protocol, single counter.
struct RwLockParams {
  std::vector<Element> values = {Element::integer(0), Element::integer(1)};
  std::int64_t rc_min = -2;
  std::int64_t rc_max = 4;
  std::int64_t pending_max = 4;
  std::int64_t count_max = 4;
};
BuiltProtocol build_rwlock(const RwLockParams& params = {});

Element rw_fields(bool exc, std::int64_t rc, const Element& x);
Element rw_exc_pending();
Element rw_exc();
Element rw_sh_pending();
Element rw_sh(const Element& x);

// Component accessors shared by the single- and multi-counter encodings.
struct RwView {
  bool has_fields = false;
  bool exc = false;
  Element rc;  // integer (single) or tuple of integers (multi)
  Element x;
  Element ep;  // Excl component, ε or ex(..)
  Element e;
  Element sp;  // integer or tuple
  Element s;   // AgN / AgNVec component
};
/// Decomposes a protocol element; returns nullopt for ⊥.
std::optional<RwView> rw_view(const Element& p);

// Multi-counter variant with K counters.
struct RwLockMultiParams {
  int k = 2;
  std::vector<Element> values = {Element::integer(0), Element::integer(1)};
  std::int64_t rc_min = -1;
  std::int64_t rc_max = 2;
  std::int64_t pending_max = 2;
  std::int64_t count_max = 2;
};
BuiltProtocol build_rwlock_multi(const RwLockMultiParams& params = {});

Element rwm_fields(bool exc, const std::vector<std::int64_t>& rcs, const Element& x);
Element rwm_exc_pending(int k, std::int64_t j);
Element rwm_exc(int k);
Element rwm_sh_pending(int k, int index);
Element rwm_sh(int k, int index, const Element& x);

// Linear-probing hash table monoid.
struct HashTableParams {
  std::int64_t length = 3;
  std::vector<Element> keys = {sym("a"), sym("b")};
  std::vector<Element> values = {Element::integer(1), Element::integer(2)};
  /// H(k) for each key, in the order of `keys`.
  std::vector<std::int64_t> hash = {0, 0};

  std::int64_t hash_of(const Element& key) const;
};
BuiltMonoid build_hashtable_monoid(const HashTableParams& params = {});

/// m(k, v) for v = none() or some(value).
Element ht_m(const Element& key, const Element& opt_value);
/// slot(i, s) for s = none() or some((key, value)).
Element ht_slot(std::int64_t index, const Element& opt_entry);
Element ht_entry(const Element& key, const Element& value);

/// The full-state predicate (no ⊥, keys distinct, map and slots consistent,
/// contiguous probe ranges) on a hash-table monoid element.
bool ht_full_state_ok(const HashTableParams& params, const Element& z);

// Fractional heap: per (location, value) fractional protocol, elementwise.
struct FracHeapParams {
  std::vector<Element> cells = {Element::tuple({Element::integer(0), Element::integer(0)}),
                                Element::tuple({Element::integer(0), Element::integer(1)})};
  std::int64_t denominator_bound = 2;
  std::int64_t max = 2;
  std::int64_t storage_max = 4;
};
BuiltProtocol build_frac_heap(const FracHeapParams& params = {});

}  // namespace sharecheck

#endif  // SHARECHECK_PROTOCOLS_HPP
