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

#ifndef SHARECHECK_MONOID_HPP
#define SHARECHECK_MONOID_HPP

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sharecheck/element.hpp"

namespace sharecheck {

enum class EnumerationMode { Exhaustive, Bounded };

/// Deterministic, duplicate-free listing of (a bounded part of) a carrier.
///
/// The unit always comes first; the remaining elements follow in rank
/// order (see rank_less). Bounded enumerators carry a human-readable
/// description of the bound so that reports can state it.
class ElementEnumerator {
 public:
  ElementEnumerator() = default;

  static ElementEnumerator exhaustive(std::vector<Element> elements);
  static ElementEnumerator bounded(std::vector<Element> elements, std::string bound);

  EnumerationMode mode() const { return mode_; }
  bool is_exhaustive() const { return mode_ == EnumerationMode::Exhaustive; }
  const std::string& bound() const { return bound_; }
  std::span<const Element> elements() const { return *elements_; }
  std::span<const Element> prefix(std::size_t n) const;
  std::size_t size() const { return elements_->size(); }

 private:
  EnumerationMode mode_ = EnumerationMode::Exhaustive;
  std::string bound_;
  std::shared_ptr<const std::vector<Element>> elements_ = std::make_shared<std::vector<Element>>();
};

/// A partial commutative monoid given as an explicit algebra.
///
/// `compose` is total on the encoding; partiality lives in `valid`.
/// `divides`, when present, decides a ≼ b exactly (used instead of the
/// enumerated search, which can only find witnesses inside the bound).
/// `accepts` is a cheap structural shape check for the encoding.
struct MonoidSpec {
  std::string name;
  Element unit;
  std::function<Element(const Element&, const Element&)> compose;
  std::function<bool(const Element&)> valid;
  std::function<bool(const Element&, const Element&)> divides;
  std::function<bool(const Element&)> accepts;
  ElementEnumerator enumerator;
  bool has_bottom = false;
};

enum class Verdict { Holds, FailsWithWitness, HoldsUpToBound };

std::string to_string(Verdict v);

struct CheckResult {
  Verdict verdict = Verdict::Holds;
  /// Violating frame (or frame tuple for multi-variable laws).
  std::optional<Element> frame;
  std::string reason;
  /// Populated for HoldsUpToBound.
  std::string bound;
  std::size_t frames_examined = 0;

  bool ok() const { return verdict != Verdict::FailsWithWitness; }
};

CheckResult holds_over(const ElementEnumerator& frames, std::size_t examined);
CheckResult fails_with(Element frame, std::string reason, std::size_t examined);

/// Checked composition: throws EncodingError for malformed inputs.
Element compose(const MonoidSpec& spec, const Element& a, const Element& b);
Element compose_all(const MonoidSpec& spec, std::span<const Element> parts);

/// a ≼ b. Uses the exact decider when the spec has one, otherwise
/// searches the enumerated carrier for a witness c with a·c = b.
bool leq(const MonoidSpec& spec, const Element& a, const Element& b);

/// Definitional search for c with a·c = b over the enumerator.
std::optional<Element> leq_witness(const MonoidSpec& spec, const Element& a, const Element& b);

/// Body of a ⇝ b at frame c: 𝒱(a·c) ⟹ 𝒱(b·c).
bool fpu_body(const MonoidSpec& spec, const Element& a, const Element& b, const Element& c);
CheckResult frame_preserving_update(const MonoidSpec& spec, const Element& a, const Element& b);

/// Body of the conjunction premise at t: (x ≼ t ∧ y ≼ t ∧ 𝒱(t)) ⟹ z ≼ t.
bool and_premise_body(const MonoidSpec& spec, const Element& x, const Element& y,
                      const Element& z, const Element& t);
CheckResult and_premise(const MonoidSpec& spec, const Element& x, const Element& y,
                        const Element& z);

struct LawOptions {
  /// Carriers up to this size get every triple checked.
  std::size_t triple_limit = 48;
  /// Pairs are checked over this many leading elements.
  std::size_t pair_limit = 400;
};

struct LawResult {
  std::string law;
  CheckResult result;
  /// Witness elements (one, two or three) for a failed law.
  std::vector<Element> witness;
};

struct LawReport {
  std::string subject;
  std::vector<LawResult> laws;
  bool all_hold() const;
  const LawResult* find(std::string_view law) const;
};

/// Unit, commutativity, associativity, validity of the unit and downward
/// closure of validity; exhaustive on small exhaustive carriers, otherwise
/// over the leading part of the enumeration (reported as up-to-bound).
LawReport check_pcm_laws(const MonoidSpec& spec, const LawOptions& options = {});

}  // namespace sharecheck

#endif  // SHARECHECK_MONOID_HPP
