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

#include "sharecheck/relation_suite.hpp"

namespace sharecheck {
namespace {

const Element I0 = Element::integer(0);
const Element I1 = Element::integer(1);
const Element I2 = Element::integer(2);

TEST(Excl, CarrierOfSingleton) {
  const auto m = build_excl({I1});
  const std::set<Element> got(m.enumerator.elements().begin(), m.enumerator.elements().end());
  EXPECT_EQ(got, (std::set<Element>{Element::unit(), ex(I1), Element::bottom()}));
  EXPECT_TRUE(m.enumerator.is_exhaustive());
  EXPECT_EQ(compose(m, ex(I1), Element::unit()), ex(I1));
}

TEST(Excl, EmptyBase) {
  const auto m = build_excl({});
  EXPECT_EQ(m.enumerator.size(), 2u);
  EXPECT_TRUE(check_pcm_laws(m).all_hold());
}

TEST(AgN, CountsAddAndValuesConflict) {
  const auto m = build_agn({I0, I1});
  EXPECT_EQ(compose(m, agn(I0, 1), agn(I0, 2)), agn(I0, 3));
  EXPECT_TRUE(compose(m, agn(I0, 1), agn(I1, 1)).is_bottom());
  EXPECT_THROW(agn(I0, 0), EncodingError);
}

// Independent composition table for AgNVec: equal values add pointwise,
// different values conflict.
TEST(AgNVec, MatchesBruteForceTable) {
  const auto m = build_agnvec({I0, I1}, 2);
  auto oracle = [](const Element& a, const Element& b) {
    if (a.is_unit()) return b;
    if (b.is_unit()) return a;
    if (a.is_bottom() || b.is_bottom()) return Element::bottom();
    if (a.items()[0] != b.items()[0]) return Element::bottom();
    std::vector<std::int64_t> sum;
    for (std::size_t i = 0; i < 2; ++i) {
      sum.push_back(a.items()[1].items()[i].as_int() + b.items()[1].items()[i].as_int());
    }
    return agnvec(a.items()[0], sum);
  };
  for (const auto& a : m.enumerator.elements()) {
    for (const auto& b : m.enumerator.elements()) EXPECT_EQ(m.compose(a, b), oracle(a, b));
  }
  EXPECT_EQ(compose(m, agnvec(I0, {1, 0}), agnvec(I0, {0, 1})), agnvec(I0, {1, 1}));
  EXPECT_THROW(agnvec(I0, {0, 0}), EncodingError);
}

TEST(Fractional, CompleteOnIntegers) {
  const auto sp = build_fractional().spec;
  EXPECT_FALSE(sp.complete(frac(3, 2)));
  EXPECT_TRUE(sp.complete(I2));
  EXPECT_TRUE(deposit_holds(sp, I0, I1, I1).ok());
  EXPECT_TRUE(guard_holds(sp, frac(1, 4), I1).ok());
}

TEST(Fractional, AdditiveSplitting) {
  const auto m = build_frac();
  for (const auto& a : m.enumerator.prefix(40)) {
    for (const auto& b : m.enumerator.prefix(40)) {
      const Element sum = compose(m, a, b);
      // Oracle: cross-multiplied addition.
      const auto n = a.num() * b.den() + b.num() * a.den();
      const auto d = a.den() * b.den();
      EXPECT_EQ(sum, Element::rational(n, d));
    }
  }
}

TEST(Counting, CarrierRejectsPositiveWithoutCounter) {
  EXPECT_THROW(counting_element(1, 0), EncodingError);
  EXPECT_NO_THROW(counting_element(1, 0, false));
  const auto b = build_counting();
  EXPECT_TRUE(exchange_holds(b.spec, {RelationKind::Exchange, counting_element(0, 0), I1,
                                      counting_element(0, 1), I0})
                  .ok());
}

TEST(Forever, Relations) {
  const auto sp = build_forever().spec;
  EXPECT_TRUE(guard_holds(sp, Element::unit(), ex_unit()).ok());
  EXPECT_FALSE(withdraw_holds(sp, Element::unit(), Element::unit(), ex_unit()).ok());
  EXPECT_TRUE(update_holds(sp, Element::unit(), Element::unit()).ok());
}

TEST(RwLock, CompleteExamples) {
  const auto sp = build_rwlock().spec;
  EXPECT_TRUE(sp.complete(rw_fields(false, 0, I0)));
  EXPECT_FALSE(sp.complete(compose(sp.protocol, rw_fields(false, 0, I0), rw_exc())));
  EXPECT_EQ(stored(sp, rw_fields(false, 0, I1)), ex(I1));
  EXPECT_EQ(stored(sp, compose(sp.protocol, rw_fields(true, 0, I1), rw_exc())), Element::unit());
  EXPECT_TRUE(sp.complete(
      compose_all(sp.protocol, std::vector<Element>{rw_fields(false, 2, I0), rw_sh(I0), rw_sh_pending()})));
  EXPECT_FALSE(sp.complete(compose(sp.protocol, rw_fields(false, 1, I0), rw_sh(I1))));
  EXPECT_TRUE(guard_holds(sp, rw_sh(I0), ex(I0)).ok());
}

TEST(RwLock, NamedElementsAreAccepted) {
  const auto b = build_rwlock();
  const std::vector<Element> fields_args{Element::boolean(true), I1, I0};
  for (const auto& [name, args] :
       std::vector<std::pair<std::string, std::vector<Element>>>{{"fields", fields_args},
                                                                 {"excPending", {}},
                                                                 {"exc", {}},
                                                                 {"shPending", {}},
                                                                 {"sh", {I1}}}) {
    const Element e = b.named.at(name)(args);
    EXPECT_TRUE(b.spec.protocol.accepts(e)) << name;
  }
  EXPECT_TRUE(b.spec.storage.accepts(b.named.at("ex")(std::vector<Element>{I0})));
}

TEST(RwLockMulti, NamedElementsAreAcceptedAndWellformed) {
  const auto b = build_rwlock_multi();
  EXPECT_TRUE(b.spec.protocol.accepts(rwm_fields(false, {0, 1}, I0)));
  EXPECT_TRUE(b.spec.protocol.accepts(rwm_exc_pending(2, 2)));
  EXPECT_TRUE(b.spec.protocol.accepts(rwm_sh(2, 1, I1)));
  EXPECT_TRUE(b.spec.complete(rwm_fields(false, {0, 0}, I0)));
  const auto r = check_wellformed(b.spec);
  for (const auto& l : r.laws) EXPECT_TRUE(l.result.ok()) << l.law << ": " << l.result.reason;
}

TEST(HashTable, ExampleValidity) {
  const auto ht = build_hashtable_monoid();
  const auto& m = ht.spec;
  const Element a = sym("a");
  EXPECT_TRUE(m.valid(m.unit));
  EXPECT_FALSE(m.valid(compose(m, ht_slot(0, some(ht_entry(a, I1))), ht_slot(1, some(ht_entry(a, I2))))));
  EXPECT_TRUE(m.valid(compose(m, ht_m(a, some(I1)), ht_slot(0, some(ht_entry(a, I1))))));
}

TEST(HashTable, UnmatchedMapEntryInvalidByBruteForce) {
  const HashTableParams prm{.length = 2, .keys = {sym("a")}, .values = {I1}, .hash = {0}};
  const auto m = build_hashtable_monoid(prm).spec;
  const Element x = ht_m(sym("a"), some(I1));
  // Oracle: x is valid iff some enumerated full state above it passes P.
  bool completable = false;
  for (const auto& z : m.enumerator.elements()) {
    if (leq(m, x, z) && ht_full_state_ok(prm, z)) completable = true;
  }
  EXPECT_TRUE(completable);
  const Element with_none = compose(m, x, compose(m, ht_slot(0, none()), ht_slot(1, none())));
  EXPECT_FALSE(m.valid(with_none));
  for (const auto& z : m.enumerator.elements()) {
    if (leq(m, with_none, z)) EXPECT_FALSE(ht_full_state_ok(prm, z)) << z.to_string();
  }
}

// Validity agrees with the definition (some full state above, restricted to
// the table) on every enumerated element of a small instance.
TEST(HashTable, ValidityMatchesDefinitionOnSmallInstance) {
  const HashTableParams prm{.length = 2, .keys = {sym("a"), sym("b")}, .values = {I1}, .hash = {0, 1}};
  const auto m = build_hashtable_monoid(prm).spec;
  std::vector<Element> full;
  for (const auto& z : m.enumerator.elements()) {
    if (ht_full_state_ok(prm, z)) full.push_back(z);
  }
  for (const auto& z : m.enumerator.elements()) {
    bool oracle = false;
    for (const auto& f : full) oracle = oracle || leq(m, z, f);
    EXPECT_EQ(m.valid(z), oracle) << z.to_string();
  }
}

TEST(HashTable, LawsHold) {
  const auto r = check_pcm_laws(build_hashtable_monoid().spec);
  for (const auto& l : r.laws) EXPECT_TRUE(l.result.ok()) << l.law;
}

TEST(HashTable, DerivedRulesAtLengthThree) {
  const auto suite = hashtable_suite();
  std::size_t controls = 0;
  for (const auto& f : suite.facts) {
    const auto r = check_fact(suite.built.spec, f);
    EXPECT_EQ(r.ok(), f.expect_holds) << f.name << " " << r.reason;
    if (!r.ok()) EXPECT_TRUE(witness_falsifies(suite.built.spec, f, r)) << f.name;
    controls += f.control;
  }
  EXPECT_GT(controls, 0u);
  std::set<std::string> rules;
  for (const auto& f : suite.facts) rules.insert(f.rule);
  for (const char* r : {"ht-query-found", "ht-query-not-found", "ht-update-existing", "ht-update-insert",
                        "ht-and-m-slot", "ht-and-run-extend", "ht-and-m-run"}) {
    EXPECT_TRUE(rules.count(r)) << r;
  }
}

TEST(FracHeap, WellformedAndElementwise) {
  const auto b = build_frac_heap();
  EXPECT_TRUE(check_wellformed(b.spec).all_hold());
  const Element c0 = Element::tuple({I0, I0});
  const Element c1 = Element::tuple({I0, I1});
  const Element both = compose(b.spec.protocol, Element::map({{c0, frac(1, 2)}}), Element::map({{c1, I1}}));
  EXPECT_FALSE(b.spec.complete(both));
  EXPECT_TRUE(b.spec.complete(Element::map({{c0, I1}, {c1, I1}})));
}

class SuiteTest : public ::testing::TestWithParam<int> {};

TEST_P(SuiteTest, EveryQueryMatchesItsExpectation) {
  const auto suites = standard_protocol_suites();
  const auto& s = suites.at(static_cast<std::size_t>(GetParam()));
  const auto& sp = s.built.spec;
  for (const auto& q : s.queries) {
    const auto r = exchange_holds(sp, q.query);
    EXPECT_EQ(r.ok(), q.expect_holds) << q.name << ": " << r.reason;
    if (!r.ok()) EXPECT_TRUE(witness_falsifies(sp, q, r)) << q.name;
  }
  for (const auto& f : s.facts) {
    const auto r = check_fact(sp, f);
    EXPECT_EQ(r.ok(), f.expect_holds) << f.name << ": " << r.reason;
  }
}

INSTANTIATE_TEST_SUITE_P(Builtin, SuiteTest, ::testing::Range(0, 7));

// Every rule that has positives also has at least one control.
TEST(Suites, EveryRuleHasAControl) {
  for (const auto& s : standard_protocol_suites()) {
    std::set<std::string> pos;
    std::set<std::string> ctl;
    for (const auto& q : s.queries) {
      const std::string base = q.rule.substr(0, q.rule.find('/'));
      (q.control ? ctl : pos).insert(base);
    }
    for (const auto& r : pos) {
      if (r == "forever-update") continue;  // the only update is the identity
      EXPECT_TRUE(ctl.count(r)) << s.built.spec.name << " " << r;
    }
  }
}

TEST(Terms, PrintedElementsParseBack) {
  std::vector<MonoidSpec> carriers{build_fractional().spec.protocol, build_counting().spec.protocol,
                                   build_rwlock().spec.protocol, build_rwlock_multi().spec.protocol,
                                   build_hashtable_monoid().spec, build_frac_heap().spec.protocol};
  for (const auto& m : carriers) {
    for (const auto& e : m.enumerator.prefix(400)) {
      EXPECT_EQ(parse_element(e.to_string()), e) << e.to_string();
    }
  }
  EXPECT_EQ(parse_element(" ( ex( 1 ) , eps ,-2/4 ) "),
            Element::tuple({ex(Element::integer(1)), Element::unit(), frac(-1, 2)}));
  EXPECT_EQ(parse_element("bot"), Element::bottom());
  for (const char* bad : {"", "(1,", "1/0", "ex(1))", "{1 2}", "#"}) {
    EXPECT_THROW(parse_element(bad), EncodingError) << bad;
  }
}

}  // namespace
}  // namespace sharecheck
