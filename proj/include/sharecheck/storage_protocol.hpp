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

#ifndef SHARECHECK_STORAGE_PROTOCOL_HPP
#define SHARECHECK_STORAGE_PROTOCOL_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sharecheck/monoid.hpp"

namespace sharecheck {

/// Raised when the storage function is applied outside the complete states.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Protocol monoid P, storage monoid S, completeness predicate C and the
/// storage function S(-) (only defined where C holds).
struct StorageProtocolSpec {
  std::string name;
  MonoidSpec protocol;
  MonoidSpec storage;
  std::function<bool(const Element&)> complete;
  std::function<Element(const Element&)> stored_of;
};

/// Storage function with the domain check applied.
Element stored(const StorageProtocolSpec& sp, const Element& p);

enum class RelationKind { Exchange, Deposit, Withdraw, Update, Guard };

std::string to_string(RelationKind k);
std::optional<RelationKind> relation_kind_from_string(std::string_view s);

struct ExchangeQuery {
  RelationKind kind = RelationKind::Exchange;
  Element p;
  Element s;
  Element p_after;
  Element s_after;
};

/// Pads the query with storage units as its kind requires.
ExchangeQuery normalized(const StorageProtocolSpec& sp, ExchangeQuery q);

/// Body of (p,s) ⇝⇝ (p',s') at frame q. Returns the failure reason, or
/// nothing when the body holds.
std::optional<std::string> exchange_body(const StorageProtocolSpec& sp, const Element& p,
                                         const Element& s, const Element& p_after,
                                         const Element& s_after, const Element& frame);

/// Body of the guard p ⇝ s at frame q.
std::optional<std::string> guard_body(const StorageProtocolSpec& sp, const Element& p,
                                      const Element& s, const Element& frame);

/// Body of whichever relation `q` names.
std::optional<std::string> query_body(const StorageProtocolSpec& sp, const ExchangeQuery& q,
                                      const Element& frame);

CheckResult exchange_holds(const StorageProtocolSpec& sp, const ExchangeQuery& q);
CheckResult deposit_holds(const StorageProtocolSpec& sp, const Element& p, const Element& s,
                          const Element& p_after);
CheckResult withdraw_holds(const StorageProtocolSpec& sp, const Element& p,
                           const Element& p_after, const Element& s_after);
CheckResult update_holds(const StorageProtocolSpec& sp, const Element& p, const Element& p_after);
CheckResult guard_holds(const StorageProtocolSpec& sp, const Element& p, const Element& s);

/// ∃q. C(p·q), searched over the protocol enumerator.
bool valid_fragment(const StorageProtocolSpec& sp, const Element& p);
std::optional<Element> completion_witness(const StorageProtocolSpec& sp, const Element& p);

/// PCM laws of both monoids plus C ⟹ V∘S over the protocol enumerator.
LawReport check_wellformed(const StorageProtocolSpec& sp, const LawOptions& options = {});

/// The monoid P × S whose valid elements are exactly the pairs (p, S(p))
/// with C(p). A frame-preserving update (p, ε) ⇝ (p', ε) in it quantifies
/// over the same frames as the update relation p ⇝ p' of the protocol.
MonoidSpec completion_graph(const StorageProtocolSpec& sp);

struct UpdateAgreement {
  std::size_t pairs = 0;
  /// Pairs on which the two checks disagree, rendered for reports.
  std::vector<std::string> disagreements;
  bool exact() const { return disagreements.empty(); }
};

/// Compares update_holds(p, p') with frame_preserving_update on the
/// completion graph for every pair, by pass/fail.
UpdateAgreement cross_validate_updates(const StorageProtocolSpec& sp,
                                       std::span<const std::pair<Element, Element>> pairs);

/// A plain PCM viewed as a protocol with C = V and a trivial storage.
StorageProtocolSpec pcm_as_protocol(const MonoidSpec& m);

}  // namespace sharecheck

#endif  // SHARECHECK_STORAGE_PROTOCOL_HPP
