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

#ifndef SHARECHECK_ELEMENT_HPP
#define SHARECHECK_ELEMENT_HPP

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sharecheck {

/// Raised when a term does not have the shape a monoid expects.
class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ElementKind : std::uint8_t { Unit, Int, Rational, Ctor, Tuple, Map, Bottom };

/// Canonical immutable term used as the carrier encoding of every monoid.
///
/// Terms are hash-consed only by sharing: copies are cheap (one shared
/// pointer), construction canonicalizes (rationals reduced, map entries
/// sorted by key with unit values dropped), so structural equality is
/// identity of canonical forms. The ordering is total and deterministic.
class Element {
 public:
  Element();  // the unit symbol

  static Element unit();
  static Element bottom();
  static Element integer(std::int64_t value);
  /// Reduced; a denominator of 1 yields the integer element.
  static Element rational(std::int64_t num, std::int64_t den);
  static Element boolean(bool value);
  static Element ctor(std::string tag, std::vector<Element> args = {});
  static Element tuple(std::vector<Element> items);
  /// Finite partial map. Keys must be distinct; entries whose value is the
  /// unit are dropped (absent and unit are the same thing in a finite map).
  static Element map(std::vector<std::pair<Element, Element>> entries);

  ElementKind kind() const;
  bool is_unit() const { return kind() == ElementKind::Unit; }
  bool is_bottom() const { return kind() == ElementKind::Bottom; }
  bool is_ctor(std::string_view tag) const;

  std::int64_t as_int() const;
  std::int64_t num() const;  // rationals (integers report den 1)
  std::int64_t den() const;
  bool as_bool() const;
  const std::string& tag() const;
  /// Constructor arguments or tuple items.
  std::span<const Element> items() const;
  /// Map entries laid out as [k0, v0, k1, v1, ...].
  std::span<const Element> map_flat() const;
  std::size_t map_size() const { return map_flat().size() / 2; }
  const Element* map_find(const Element& key) const;

  std::size_t hash() const;
  std::string to_string() const;

  friend bool operator==(const Element& a, const Element& b);
  friend std::strong_ordering operator<=>(const Element& a, const Element& b);

 private:
  struct Node;
  explicit Element(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Small measure used to order enumerations: simple elements come first.
std::int64_t element_rank(const Element& e);

/// Enumeration order: (rank, canonical order); unit ranks 0, bottom last.
bool rank_less(const Element& a, const Element& b);

/// Inverse of Element::to_string: eps, bot, integers, p/q, tag(args...),
/// (items...), {key: value, ...}. Throws EncodingError on malformed text.
Element parse_element(std::string_view text);

struct ElementHash {
  std::size_t operator()(const Element& e) const { return e.hash(); }
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace sharecheck

#endif  // SHARECHECK_ELEMENT_HPP
