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

#include <gtest/gtest.h>

#include <set>

#include "sharecheck/combinators.hpp"
#include "sharecheck/protocols.hpp"

namespace sharecheck {
namespace {

const Element I0 = Element::integer(0);
const Element I1 = Element::integer(1);
const Element I2 = Element::integer(2);

TEST(Element, CanonicalForms) {
  EXPECT_EQ(Element::rational(2, 4), Element::rational(1, 2));
  EXPECT_EQ(Element::rational(6, 3), Element::integer(2));
  EXPECT_EQ(Element::rational(-1, -2), Element::rational(1, 2));
  EXPECT_THROW(Element::rational(1, 0), EncodingError);
  const Element m1 = Element::map({{I2, I1}, {I1, I2}});
  const Element m2 = Element::map({{I1, I2}, {I2, I1}});
  EXPECT_EQ(m1, m2);
  EXPECT_EQ(m1.hash(), m2.hash());
  EXPECT_EQ(Element::map({{I1, Element::unit()}}), Element::map({}));
  EXPECT_THROW(Element::map({{I1, I1}, {I1, I2}}), EncodingError);
  EXPECT_EQ(m1.to_string(), "{1: 2, 2: 1}");
  EXPECT_EQ(*m1.map_find(I2), I1);
  EXPECT_EQ(m1.map_find(I0), nullptr);
}

TEST(Element, OrderIsTotalAndConsistent) {
  std::vector<Element> xs{Element::unit(), Element::bottom(), I0, I1, Element::rational(1, 2),
                          ex(I1), ex(I2), Element::tuple({I0, I1}), Element::map({{I0, I1}})};
  for (const auto& a : xs) {
    for (const auto& b : xs) {
      const bool eq = a == b;
      EXPECT_EQ(eq, (a <=> b) == 0);
      EXPECT_EQ((a < b), (b > a));
    }
  }
}

TEST(Compose, ExclConflictIsBottom) {
  const auto m = build_excl({I1, I2});
  EXPECT_TRUE(compose(m, ex(I1), ex(I2)).is_bottom());
  EXPECT_FALSE(m.valid(Element::bottom()));
}

TEST(Compose, UnitLawOnEveryEnumeratedElement) {
  for (const auto& m : {build_excl({I0, I1}), build_agn({I0, I1}), build_nat(), build_frac(4, 2)}) {
    for (const auto& a : m.enumerator.elements()) EXPECT_EQ(compose(m, a, m.unit), a) << m.name;
  }
}

TEST(Compose, CountingRefCancelsCounter) {
  const auto m = build_counting_monoid();
  for (std::int64_t r = -3; r <= 3; ++r) {
    EXPECT_EQ(compose(m, counting_element(-1, 0), counting_element(r, 1)), counting_element(r - 1, 1));
  }
}

TEST(Compose, RejectsMalformedEncodings) {
  const auto m = build_excl({I1});
  EXPECT_THROW(compose(m, ex(I2), Element::unit()), EncodingError);
  EXPECT_THROW(compose(build_nat(), Element::integer(-1), I0), EncodingError);
  EXPECT_THROW(counting_element(1, 0), EncodingError);
}

TEST(Enumerator, UnitFirstAndNoDuplicates) {
  for (const auto& m : {build_excl({I0, I1}), build_agn({I0, I1}), build_agnvec({I0, I1}, 2),
                        build_nat(), build_int(), build_frac(), build_counting_monoid(),
                        build_rwlock().spec.protocol, build_hashtable_monoid().spec}) {
    const auto els = m.enumerator.elements();
    ASSERT_FALSE(els.empty());
    EXPECT_EQ(els[0], m.unit) << m.name;
    std::set<Element> seen(els.begin(), els.end());
    EXPECT_EQ(seen.size(), els.size()) << m.name;
  }
}

TEST(Enumerator, FractionsCoverDenominatorBound) {
  const auto m = build_frac(12, 4);
  std::set<Element> seen(m.enumerator.elements().begin(), m.enumerator.elements().end());
  // Oracle: every n/d with d <= 12 and 0 <= n/d <= 4 appears in reduced form.
  for (std::int64_t d = 1; d <= 12; ++d) {
    for (std::int64_t n = 0; n <= 4 * d; ++n) EXPECT_TRUE(seen.count(Element::rational(n, d)));
  }
  EXPECT_FALSE(m.enumerator.is_exhaustive());
}

// Hand-written Excl({1, 2}) carrier used as an independent oracle.
struct ExclOracle {
  std::vector<Element> carrier{Element::unit(), ex(I1), ex(I2), Element::bottom()};
  Element op(const Element& a, const Element& b) const {
    if (a.is_unit()) return b;
    if (b.is_unit()) return a;
    return Element::bottom();
  }
  bool leq(const Element& a, const Element& b) const {
    for (const auto& c : carrier) {
      if (op(a, c) == b) return true;
    }
    return false;
  }
};

TEST(Leq, MatchesHandEnumeratedExcl) {
  const auto m = build_excl({I1, I2});
  const ExclOracle o;
  for (const auto& a : o.carrier) {
    for (const auto& b : o.carrier) EXPECT_EQ(leq(m, a, b), o.leq(a, b)) << a.to_string() << b.to_string();
  }
  EXPECT_FALSE(leq(m, ex(I1), ex(I2)));
}

TEST(Leq, UnitIsBottomOfOrder) {
  for (const auto& m : {build_excl({I0, I1}), build_nat(), build_counting_monoid()}) {
    for (const auto& a : m.enumerator.elements()) EXPECT_TRUE(leq(m, m.unit, a));
  }
}

TEST(Leq, NatWitness) {
  const auto m = build_nat();
  const auto w = leq_witness(m, I2, Element::integer(5));
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, Element::integer(3));
  EXPECT_TRUE(leq(m, I2, Element::integer(5)));
  EXPECT_FALSE(leq(m, Element::integer(5), I2));
}

// The exact deciders must agree with the definitional witness search
// wherever a witness can be found inside the enumeration.
TEST(Leq, DecidersAgreeWithWitnessSearch) {
  std::vector<MonoidSpec> specs{build_excl({I0, I1}), build_agn({I0, I1}), build_agnvec({I0, I1}, 2),
                                build_nat(), build_frac(4, 2), build_counting_monoid(),
                                build_counting_monoid({.carrier_constraint = false}),
                                build_hashtable_monoid().spec};
  for (const auto& m : specs) {
    const auto els = m.enumerator.prefix(60);
    for (const auto& a : els) {
      for (const auto& b : els) {
        const bool decided = m.divides(a, b);
        const bool found = leq_witness(m, a, b).has_value();
        if (found) EXPECT_TRUE(decided) << m.name << " " << a.to_string() << " <= " << b.to_string();
        if (!decided) EXPECT_FALSE(found);
        // Inside the bound the witness b - a is enumerated for these carriers.
        if (m.enumerator.is_exhaustive()) EXPECT_EQ(decided, found) << m.name;
      }
    }
  }
}

TEST(Leq, ReflexiveAndTransitiveOnSamples) {
  for (const auto& m : {build_agn({I0, I1}), build_counting_monoid(), build_frac(3, 1)}) {
    const auto els = m.enumerator.prefix(25);
    for (const auto& a : els) {
      EXPECT_TRUE(leq(m, a, a));
      for (const auto& b : els) {
        if (!leq(m, a, b)) continue;
        for (const auto& c : els) {
          if (leq(m, b, c)) EXPECT_TRUE(leq(m, a, c));
        }
      }
    }
  }
}

TEST(FrameUpdate, ExclReplacesFreely) {
  const auto m = build_excl({I0, I1, I2});
  for (const auto& x : {I0, I1, I2}) {
    for (const auto& y : {I0, I1, I2}) {
      EXPECT_EQ(frame_preserving_update(m, ex(x), ex(y)).verdict, Verdict::Holds);
    }
  }
}

TEST(FrameUpdate, Reflexive) {
  for (const auto& m : {build_excl({I0, I1}), build_agn({I0, I1}), build_counting_monoid()}) {
    for (const auto& a : m.enumerator.prefix(20)) EXPECT_TRUE(frame_preserving_update(m, a, a).ok());
  }
}

TEST(FrameUpdate, AllocatingExclFailsWithSelfVerifyingWitness) {
  const auto m = build_excl({I1, I2});
  const auto r = frame_preserving_update(m, Element::unit(), ex(I1));
  ASSERT_EQ(r.verdict, Verdict::FailsWithWitness);
  ASSERT_TRUE(r.frame.has_value());
  EXPECT_TRUE(r.frame->is_ctor("ex"));
  EXPECT_FALSE(fpu_body(m, Element::unit(), ex(I1), *r.frame));
}

TEST(FrameUpdate, TransitiveOnSamples) {
  const auto m = build_agn({I0, I1}, 3);
  const auto els = m.enumerator.elements();
  for (const auto& a : els) {
    for (const auto& b : els) {
      if (!frame_preserving_update(m, a, b).ok()) continue;
      for (const auto& c : els) {
        if (frame_preserving_update(m, b, c).ok()) EXPECT_TRUE(frame_preserving_update(m, a, c).ok());
      }
    }
  }
}

TEST(FrameUpdate, BoundedCarrierReportsBound) {
  const auto r = frame_preserving_update(build_nat(), I1, I2);
  EXPECT_EQ(r.verdict, Verdict::HoldsUpToBound);
  EXPECT_FALSE(r.bound.empty());
}

TEST(AndPremise, ConflictingExclIncludesBottom) {
  const auto m = build_excl({I1, I2});
  EXPECT_EQ(and_premise(m, ex(I1), ex(I2), Element::bottom()).verdict, Verdict::Holds);
}

TEST(AndPremise, UnitAlwaysHolds) {
  for (const auto& m : {build_excl({I1, I2}), build_agn({I0, I1})}) {
    for (const auto& x : m.enumerator.elements()) {
      for (const auto& y : m.enumerator.prefix(5)) EXPECT_TRUE(and_premise(m, x, y, m.unit).ok());
    }
  }
}

TEST(AndPremise, FailingPremiseWitnessSelfVerifies) {
  const auto m = build_agn({I0, I1}, 4);
  // agn(0,1) and agn(0,1) both fit in agn(0,1) itself, which is not agn(0,2).
  const auto r = and_premise(m, agn(I0, 1), agn(I0, 1), agn(I0, 2));
  ASSERT_EQ(r.verdict, Verdict::FailsWithWitness);
  EXPECT_FALSE(and_premise_body(m, agn(I0, 1), agn(I0, 1), agn(I0, 2), *r.frame));
}

TEST(AndPremise, AntitoneInConclusion) {
  const auto m = build_agn({I0, I1}, 3);
  const auto els = m.enumerator.elements();
  for (const auto& x : els) {
    for (const auto& y : els) {
      for (const auto& z : els) {
        if (!and_premise(m, x, y, z).ok()) continue;
        for (const auto& z2 : els) {
          if (leq(m, z2, z)) EXPECT_TRUE(and_premise(m, x, y, z2).ok());
        }
      }
    }
  }
}

TEST(AndPremise, HashTableMapAndSlotCompose) {
  const HashTableParams prm{.length = 2, .keys = {sym("a"), sym("b")}, .values = {I1, I2}, .hash = {0, 1}};
  const auto ht = build_hashtable_monoid(prm).spec;
  const auto x = ht_m(sym("a"), some(I1));
  for (const auto& s : {none(), some(ht_entry(sym("b"), I2)), some(ht_entry(sym("a"), I1))}) {
    const auto y = ht_slot(1, s);
    EXPECT_EQ(and_premise(ht, x, y, compose(ht, x, y)).verdict, Verdict::Holds) << s.to_string();
  }
}

TEST(Laws, ExclPassesExhaustively) {
  const auto r = check_pcm_laws(build_excl({I0, I1}));
  EXPECT_TRUE(r.all_hold());
  for (const auto& l : r.laws) EXPECT_EQ(l.result.verdict, Verdict::Holds) << l.law;
}

TEST(Laws, NonCommutativeSpecIsCaught) {
  MonoidSpec m = build_nat(4);
  m.name = "broken";
  m.compose = [](const Element& a, const Element& b) {
    return Element::integer(a.as_int() == 0 ? b.as_int() : b.as_int() == 0 ? a.as_int() : a.as_int());
  };
  const auto r = check_pcm_laws(m);
  const auto* comm = r.find("commutativity");
  ASSERT_NE(comm, nullptr);
  ASSERT_EQ(comm->result.verdict, Verdict::FailsWithWitness);
  ASSERT_EQ(comm->witness.size(), 2u);
  EXPECT_NE(m.compose(comm->witness[0], comm->witness[1]), m.compose(comm->witness[1], comm->witness[0]));
}

TEST(Laws, ValidityNotDownwardClosedIsCaught) {
  MonoidSpec m = build_nat(4);
  m.valid = [](const Element& a) { return a.as_int() != 1; };
  const auto report = check_pcm_laws(m);
  const auto* l = report.find("valid-downward-closed");
  ASSERT_NE(l, nullptr);
  EXPECT_EQ(l->result.verdict, Verdict::FailsWithWitness);
}

TEST(Laws, UnconstrainedCountingStillLawful) {
  EXPECT_TRUE(check_pcm_laws(build_counting_monoid({.carrier_constraint = false})).all_hold());
}

TEST(Laws, CustomTable) {
  CustomTable t;
  t.unit = Element::unit();
  t.elements = {sym("a")};
  t.table = {{sym("a"), sym("a"), Element::bottom()}};
  const auto m = build_custom_table(t);
  const auto r = check_pcm_laws(m);
  EXPECT_TRUE(r.all_hold());
  EXPECT_TRUE(compose(m, sym("a"), sym("a")).is_bottom());
}

}  // namespace
}  // namespace sharecheck
