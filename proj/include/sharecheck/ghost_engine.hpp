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

// Runtime ghost state: storage-protocol instances whose fragments are owned
// by threads or lock-invariant regions, updated only through checked actions.

#ifndef SHARECHECK_GHOST_ENGINE_HPP
#define SHARECHECK_GHOST_ENGINE_HPP

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

#include "sharecheck/protocols.hpp"
#include "sharecheck/storage_protocol.hpp"

namespace sharecheck {

/// A protocol shared by every instance allocated from it, with memoized
/// universal checks (they depend only on their arguments).
class Protocol {
 public:
  explicit Protocol(StorageProtocolSpec spec) : spec_(std::move(spec)) {}

  const StorageProtocolSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }

  CheckResult exchange(const ExchangeQuery& q) const;
  CheckResult guard(const Element& p, const Element& s) const;
  /// s included in the stored image of every completion of `joint`.
  CheckResult guard_completions(const Element& joint, const Element& s) const;
  /// Some c with a.c = b; fast paths for a = eps and a = b.
  std::optional<Element> residual(const Element& a, const Element& b) const;

 private:
  StorageProtocolSpec spec_;
  mutable std::mutex mu_;
  mutable std::unordered_map<Element, CheckResult, ElementHash> exchange_cache_;
  mutable std::unordered_map<Element, CheckResult, ElementHash> guard_cache_;
  mutable std::unordered_map<Element, CheckResult, ElementHash> completion_cache_;
  mutable std::unordered_map<Element, std::optional<Element>, ElementHash> residual_cache_;
};

using ProtocolRef = std::shared_ptr<const Protocol>;
ProtocolRef make_protocol(StorageProtocolSpec spec);

enum class AdmissionMode { Rule, Concrete };
std::string to_string(AdmissionMode m);
std::optional<AdmissionMode> admission_mode_from_string(std::string_view s);

struct GuardWindow {
  std::string instance;
  std::string owner;
  Element guarded;
  std::uint64_t step = 0;

  friend bool operator==(const GuardWindow&, const GuardWindow&) = default;
};

struct GhostInstance {
  ProtocolRef protocol;
  /// Owner -> fragment; owners holding eps are absent.
  std::map<std::string, Element> fragments;
  Element stored;
  std::optional<GuardWindow> window;

  Element fragment(const std::string& owner) const;
  Element joint() const;
};

struct GhostLedger {
  std::map<std::string, GhostInstance> instances;

  const GhostInstance& at(const std::string& id) const;
  friend bool operator==(const GhostLedger& a, const GhostLedger& b);
};

/// One owner's share of an exchange: `before` must be part of its fragment.
struct FragmentChange {
  std::string owner;
  Element before;
  Element after;
};

struct GhostAction {
  enum class Kind { Alloc, Exchange, Deposit, Withdraw, Update, OpenGuard, CloseGuard, Transfer };
  Kind kind = Kind::Exchange;
  std::string instance;
  /// Name of the rule this action instantiates, for reports.
  std::string rule;
  ProtocolRef protocol;               // Alloc
  std::vector<FragmentChange> parts;  // Alloc uses `after` as the initial fragments
  Element deposited;                  // Alloc: the initial stored content
  Element withdrawn;
  std::string owner;  // guards and transfers (source)
  std::string to_owner;
  std::optional<Element> element;  // guarded element, or transferred piece (whole fragment if absent)

  static GhostAction alloc(std::string instance, ProtocolRef protocol,
                           std::vector<FragmentChange> initial, Element stored);
  static GhostAction exchange(Kind kind, std::string instance, std::vector<FragmentChange> parts,
                              Element deposited = Element::unit(), Element withdrawn = Element::unit());
  static GhostAction open_guard(std::string instance, std::string owner, Element s);
  static GhostAction close_guard(std::string instance);
  static GhostAction transfer(std::string instance, std::string from, std::string to,
                              std::optional<Element> piece = std::nullopt);
};

std::string to_string(GhostAction::Kind k);
std::optional<GhostAction::Kind> ghost_action_kind_from_string(std::string_view s);
std::string describe(const GhostAction& a);

struct GhostViolation {
  std::string action;
  std::string reason;
  std::optional<Element> witness;
};

struct ApplyOutcome {
  bool admitted = false;
  GhostLedger ledger;  // unchanged on rejection
  std::optional<GhostViolation> violation;
};

/// Malformed actions (unknown instance, duplicate allocation, closing a
/// window that is not open); distinct from protocol violations.
class GhostUsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rule mode admits an exchange only if it holds for every enumerated frame
/// and for the actual one; Concrete mode checks the actual frame only.
ApplyOutcome apply_action(const GhostLedger& ledger, const GhostAction& action, AdmissionMode mode,
                          std::uint64_t step = 0);

std::variant<GuardWindow, GhostViolation> open_guard(const GhostLedger& ledger, const std::string& instance,
                                                     const std::string& owner, const Element& s,
                                                     AdmissionMode mode, GhostLedger* out = nullptr);

/// Joint state complete, stored valid and equal to the stored image of the joint state.
std::optional<std::string> check_ledger_invariants(const GhostLedger& ledger);

nlohmann::json ledger_snapshot(const GhostLedger& ledger);
std::size_t ledger_hash(const GhostLedger& ledger);

// ----------------------------------------------------------- rule templates

/// Inputs for instantiating a named rule against the current ledger.
struct RuleContext {
  const GhostLedger& ledger;
  std::string instance;
  std::string owner;
  std::string region;
  std::map<std::string, Element> args;

  const Element& arg(const std::string& name) const;
};

/// The ledger cannot supply what the rule needs (e.g. the owner holds no
/// shared token); reported as a ghost violation.
class RuleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using RuleTemplate = std::function<std::vector<GhostAction>(const RuleContext&)>;
using RuleSet = std::map<std::string, RuleTemplate, std::less<>>;

/// The rwlock relations of the single-counter lock, one template each.
RuleSet rwlock_rules();
/// Multi-counter lock with K counters; shared rules take arg "k".
RuleSet rwlock_multi_rules(int k);
/// Hash-table updates over an instance of the hash-table monoid.
RuleSet hashtable_rules(const HashTableParams& params);

}  // namespace sharecheck

#endif  // SHARECHECK_GHOST_ENGINE_HPP
