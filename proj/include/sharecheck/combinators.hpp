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

#ifndef SHARECHECK_COMBINATORS_HPP
#define SHARECHECK_COMBINATORS_HPP

#include <array>
#include <vector>

#include "sharecheck/monoid.hpp"

namespace sharecheck {

// Element constructors shared by the combinators.
Element ex(const Element& x);
Element ex_unit();  // ex() of Excl(1)
Element agn(const Element& x, std::int64_t n);
Element agnvec(const Element& x, std::vector<std::int64_t> counts);
Element frac(std::int64_t num, std::int64_t den);
Element none();
Element some(const Element& x);
Element sym(std::string name);

/// Excl(X): ε, ex(x) for x in `base`, and ⊥.
MonoidSpec build_excl(std::vector<Element> base);

/// AgN(X): ε, agn(x, n) with n ≥ 1, ⊥. Counts above `max_count` exist but
/// are not enumerated.
MonoidSpec build_agn(std::vector<Element> base, std::int64_t max_count = 4);

/// AgNVec(X) with K counters; count vectors are nonzero and componentwise
/// at most `max_count` in the enumeration.
MonoidSpec build_agnvec(std::vector<Element> base, int k, std::int64_t max_count = 2);

/// (ℕ, +, 0); enumerated up to `max`.
MonoidSpec build_nat(std::int64_t max = 8);

/// (ℤ, +, 0) as a group; enumerated over [min, max].
MonoidSpec build_int(std::int64_t min = -8, std::int64_t max = 8);

/// (ℚ≥0, +, 0); enumerates reduced fractions in [0, max] with denominator
/// at most `denominator_bound`.
MonoidSpec build_frac(std::int64_t denominator_bound = 12, std::int64_t max = 4);

/// The trivial monoid {ε}.
MonoidSpec build_trivial();

/// Componentwise product. Any component reaching ⊥ collapses the whole
/// tuple to the single ⊥ element.
MonoidSpec build_product(std::vector<MonoidSpec> components);

/// Finite partial maps from `keys` into `value` (absent = unit), composed
/// pointwise; a ⊥ entry collapses the map to ⊥.
MonoidSpec build_finmap(std::vector<Element> keys, MonoidSpec value);

/// A finite monoid given by its composition table. Entries missing from
/// the table compose to ⊥ (which must then be invalid).
struct CustomTable {
  std::string name = "custom";
  Element unit;
  std::vector<Element> elements;
  std::vector<std::array<Element, 3>> table;  // (a, b, a·b)
  bool symmetric = true;                      // also read each row as (b, a)
  std::vector<Element> invalid;
};
MonoidSpec build_custom_table(const CustomTable& t);

}  // namespace sharecheck

#endif  // SHARECHECK_COMBINATORS_HPP
