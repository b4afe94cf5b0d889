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

#include "sharecheck/relation_suite.hpp"

namespace sharecheck {

std::string to_string(FactKind k) {
  switch (k) {
    case FactKind::Update:
      return "update";
    case FactKind::AndPremise:
      return "and-premise";
    case FactKind::Invalid:
      return "invalid";
    case FactKind::Equal:
      return "equal";
    case FactKind::Complete:
      return "complete";
  }
  return "?";
}

CheckResult check_fact(const MonoidSpec& m, const MonoidFact& f) {
  switch (f.kind) {
    case FactKind::Update:
      return frame_preserving_update(m, f.a, f.b);
    case FactKind::AndPremise:
      return and_premise(m, f.a, f.b, f.c);
    case FactKind::Invalid:
      if (m.valid(f.a)) return fails_with(f.a, "element is valid", 1);
      return CheckResult{};
    case FactKind::Equal: {
      const Element got = compose(m, f.a, f.b);
      if (got != f.c) return fails_with(got, "composition is " + got.to_string(), 1);
      return CheckResult{};
    }
    case FactKind::Complete:
      break;
  }
  throw EncodingError("complete facts need a storage protocol");
}

CheckResult check_fact(const StorageProtocolSpec& sp, const MonoidFact& f) {
  if (f.kind != FactKind::Complete) return check_fact(sp.protocol, f);
  if (!sp.complete(f.a)) return fails_with(f.a, "C does not hold", 1);
  const Element st = sp.stored_of(f.a);
  if (st != f.b) return fails_with(f.a, "S(a) = " + st.to_string(), 1);
  return CheckResult{};
}

bool witness_falsifies(const StorageProtocolSpec& sp, const SuiteQuery& q, const CheckResult& r) {
  if (r.ok() || !r.frame) return false;
  return query_body(sp, q.query, *r.frame).has_value();
}

bool witness_falsifies(const MonoidSpec& m, const MonoidFact& f, const CheckResult& r) {
  if (r.ok()) return false;
  switch (f.kind) {
    case FactKind::Update:
      return r.frame && !fpu_body(m, f.a, f.b, *r.frame);
    case FactKind::AndPremise:
      return r.frame && !and_premise_body(m, f.a, f.b, f.c, *r.frame);
    default:
      return !check_fact(m, f).ok();
  }
}

namespace {

const Element kEps = Element::unit();

SuiteQuery query(std::string rule, std::string args, RelationKind kind, Element p, Element s,
                 Element p2, Element s2, bool holds = true) {
  SuiteQuery q;
  q.rule = rule;
  q.name = rule + "(" + args + ")";
  q.query = {kind, std::move(p), std::move(s), std::move(p2), std::move(s2)};
  q.expect_holds = holds;
  q.control = !holds;
  return q;
}

SuiteQuery update(std::string rule, std::string args, Element p, Element p2, bool holds = true) {
  return query(std::move(rule), std::move(args), RelationKind::Update, std::move(p), kEps,
               std::move(p2), kEps, holds);
}

MonoidFact fact(std::string rule, std::string args, FactKind kind, Element a, Element b,
                Element c = Element::unit(), bool holds = true) {
  MonoidFact f;
  f.rule = rule;
  f.name = rule + "(" + args + ")";
  f.kind = kind;
  f.a = std::move(a);
  f.b = std::move(b);
  f.c = std::move(c);
  f.expect_holds = holds;
  f.control = !holds;
  return f;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

// A control is only meaningful when its left-hand side has a completion;
// otherwise the relation holds vacuously.
void add_control(ProtocolSuite& s, SuiteQuery q) {
  const auto& sp = s.built.spec;
  const ExchangeQuery n = normalized(sp, q.query);
  if (!valid_fragment(sp, n.p)) return;
  q.expect_holds = false;
  q.control = true;
  s.queries.push_back(std::move(q));
}

}  // namespace

ProtocolSuite fractional_suite(const FractionalParams& params) {
  ProtocolSuite s{build_fractional(params), {}, {}};
  const Element one = Element::integer(1);
  const Element zero = Element::integer(0);
  s.facts.push_back(fact("frac-alloc", "0", FactKind::Complete, zero, zero));
  s.queries.push_back(query("frac-withdraw", "1", RelationKind::Exchange, one, zero, zero, one));
  s.queries.push_back(query("frac-deposit", "1", RelationKind::Exchange, zero, one, one, zero));
  for (auto [n, d] : std::vector<std::pair<int, int>>{{1, 12}, {1, 4}, {1, 3}, {1, 2}, {1, 1},
                                                      {3, 2}, {4, 1}}) {
    const std::string q = std::to_string(n) + "/" + std::to_string(d);
    s.queries.push_back(query("frac-guard", q, RelationKind::Guard, frac(n, d), one, frac(n, d), zero));
  }
  add_control(s, query("frac-withdraw/half", "1/2", RelationKind::Exchange, frac(1, 2), zero, zero,
                       one, false));
  add_control(s, query("frac-deposit/half", "1/2", RelationKind::Exchange, zero, one, frac(1, 2),
                       zero, false));
  add_control(s, query("frac-guard/zero", "0", RelationKind::Guard, zero, one, zero, zero, false));
  add_control(s, query("frac-guard/two", "1", RelationKind::Guard, one, Element::integer(2), one,
                       zero, false));
  return s;
}

ProtocolSuite frac_heap_suite(const FracHeapParams& params) {
  ProtocolSuite s{build_frac_heap(params), {}, {}};
  const auto& named = s.built.named;
  const Element empty = Element::map({});
  auto pt = [&](const Element& cell, std::int64_t n, std::int64_t d) {
    const std::vector<Element> a{cell.items()[0], cell.items()[1], Element::integer(n),
                                 Element::integer(d)};
    return named.at("pt")(a);
  };
  auto stored = [&](const Element& cell, std::int64_t n) {
    const std::vector<Element> a{cell.items()[0], cell.items()[1], Element::integer(n)};
    return named.at("cell")(a);
  };
  s.facts.push_back(fact("heap-alloc", "empty", FactKind::Complete, empty, empty));
  for (const auto& c : params.cells) {
    const std::string cs = c.to_string();
    s.queries.push_back(query("heap-deposit", cs, RelationKind::Deposit, empty, stored(c, 1),
                              pt(c, 1, 1), empty));
    s.queries.push_back(query("heap-withdraw", cs, RelationKind::Withdraw, pt(c, 1, 1), empty, empty,
                              stored(c, 1)));
    for (auto [n, d] : std::vector<std::pair<int, int>>{{1, 2}, {1, 1}, {3, 2}}) {
      s.queries.push_back(query("heap-guard", cs + ", " + std::to_string(n) + "/" + std::to_string(d),
                                RelationKind::Guard, pt(c, n, d), stored(c, 1), empty, empty));
    }
    s.facts.push_back(fact("heap-split", cs + ", 1/2 + 1/2", FactKind::Equal, pt(c, 1, 2),
                           pt(c, 1, 2), pt(c, 1, 1)));
    s.facts.push_back(fact("heap-split", cs + ", 1/2 + 3/2", FactKind::Equal, pt(c, 1, 2),
                           pt(c, 3, 2), pt(c, 2, 1)));
    add_control(s, query("heap-deposit/half", cs, RelationKind::Deposit, empty, stored(c, 1),
                         pt(c, 1, 2), empty, false));
    add_control(s, query("heap-withdraw/half", cs, RelationKind::Withdraw, pt(c, 1, 2), empty, empty,
                         stored(c, 1), false));
    s.facts.push_back(fact("heap-split/wrong-sum", cs, FactKind::Equal, pt(c, 1, 2), pt(c, 1, 2),
                           pt(c, 2, 1), false));
  }
  if (params.cells.size() >= 2) {
    const auto& c0 = params.cells[0];
    const auto& c1 = params.cells[1];
    add_control(s, query("heap-guard/other-cell", c0.to_string() + " for " + c1.to_string(),
                         RelationKind::Guard, pt(c0, 1, 2), stored(c1, 1), empty, empty, false));
  }
  return s;
}

ProtocolSuite counting_suite(const CountingParams& params) {
  ProtocolSuite s{build_counting(params), {}, {}};
  const Element eps = counting_element(0, 0);
  const Element ref = counting_element(-1, 0);
  auto counter = [](std::int64_t r) { return counting_element(r, 1); };
  const Element zero = Element::integer(0);
  const Element one = Element::integer(1);
  s.facts.push_back(fact("count-alloc", "counter(0)", FactKind::Complete, counter(0), one));
  for (std::int64_t r = params.r_min + 1; r <= params.r_max; ++r) {
    s.facts.push_back(fact("count-ref-counter", std::to_string(r), FactKind::Equal, ref, counter(r),
                           counter(r - 1)));
  }
  s.facts.push_back(fact("count-ref-counter/no-change", "1", FactKind::Equal, ref, counter(1),
                         counter(1), false));
  s.queries.push_back(query("count-deposit", "", RelationKind::Exchange, eps, one, counter(0), zero));
  s.queries.push_back(query("count-withdraw", "", RelationKind::Exchange, counter(0), zero, eps, one));
  s.queries.push_back(query("count-guard", "ref", RelationKind::Guard, ref, one, ref, zero));
  add_control(s, query("count-deposit/off-by-one", "", RelationKind::Exchange, eps, one, counter(1),
                       zero, false));
  add_control(s, query("count-withdraw/outstanding-ref", "", RelationKind::Exchange, counter(1), zero,
                       eps, one, false));
  add_control(s, query("count-guard/two", "ref", RelationKind::Guard, ref, Element::integer(2), ref,
                       zero, false));
  return s;
}

ProtocolSuite counting_unconstrained_suite(const CountingParams& params) {
  CountingParams p = params;
  p.carrier_constraint = false;
  ProtocolSuite s{build_counting(p), {}, {}};
  const Element ref = counting_element(-1, 0, false);
  add_control(s, query("count-guard/dropped-constraint", "ref", RelationKind::Guard, ref,
                       Element::integer(1), ref, Element::integer(0), false));
  return s;
}

ProtocolSuite forever_suite() {
  ProtocolSuite s{build_forever(), {}, {}};
  s.facts.push_back(fact("forever-alloc", "eps", FactKind::Complete, kEps, ex_unit()));
  s.queries.push_back(query("forever-guard", "eps", RelationKind::Guard, kEps, ex_unit(), kEps, kEps));
  s.queries.push_back(update("forever-update", "eps", kEps, kEps));
  add_control(s, query("forever-guard/bottom", "eps", RelationKind::Guard, kEps, Element::bottom(),
                       kEps, kEps, false));
  add_control(s, query("forever-withdraw", "eps", RelationKind::Withdraw, kEps, kEps, kEps, ex_unit(),
                       false));
  return s;
}

ProtocolSuite rwlock_suite(const RwLockParams& params) {
  ProtocolSuite s{build_rwlock(params), {}, {}};
  const auto& P = s.built.spec.protocol;
  auto c = [&](const Element& a, const Element& b) { return compose(P, a, b); };
  auto in = [&](std::int64_t rc) { return rc >= params.rc_min && rc <= params.rc_max; };
  const Element ep = rw_exc_pending();
  const Element e = rw_exc();
  const Element shp = rw_sh_pending();
  for (const auto& x : params.values) {
    s.facts.push_back(
        fact("rw-init", "x=" + x.to_string(), FactKind::Complete, rw_fields(false, 0, x), ex(x)));
  }
  for (bool exc : {false, true}) {
    for (std::int64_t rc = params.rc_min; rc <= params.rc_max; ++rc) {
      for (const auto& x : params.values) {
        const std::string a = "exc=" + bool_str(exc) + ", rc=" + std::to_string(rc) + ", x=" + x.to_string();
        const Element f = rw_fields(exc, rc, x);
        if (!exc) {
          s.queries.push_back(update("rw-exc-begin", a, f, c(rw_fields(true, rc, x), ep)));
          s.queries.push_back(
              update("rw-shared-acquire", a, c(f, shp), c(f, rw_sh(x))));
        } else {
          add_control(s, update("rw-exc-begin/swapped-exc", a, f, c(f, ep), false));
          add_control(s, update("rw-shared-acquire/swapped-exc", a, c(f, shp), c(f, rw_sh(x)), false));
        }
        if (in(rc + 1)) {
          s.queries.push_back(update("rw-shared-begin", a, f, c(rw_fields(exc, rc + 1, x), shp)));
        }
        add_control(s, update("rw-shared-begin/no-increment", a, f, c(f, shp), false));
        if (in(rc - 1)) {
          s.queries.push_back(update("rw-shared-retry", a, c(f, shp), rw_fields(exc, rc - 1, x)));
        }
        add_control(s, update("rw-shared-retry/rc-unchanged", a, c(f, shp), f, false));
        for (const auto& y : params.values) {
          const std::string ay = a + ", y=" + y.to_string();
          if (in(rc - 1)) {
            s.queries.push_back(
                update("rw-shared-release", ay, c(f, rw_sh(y)), rw_fields(exc, rc - 1, x)));
          }
          add_control(s, update("rw-shared-release/rc-unchanged", ay, c(f, rw_sh(y)), f, false));
          if (!exc && y != x) {
            add_control(s, update("rw-shared-acquire/wrong-value", ay, c(f, shp), c(f, rw_sh(y)), false));
          }
          // Deposit: (fields(exc, rc, y)·exc, ex(x)) into fields(False, rc, x).
          const std::string ad = "exc=" + bool_str(exc) + ", rc=" + std::to_string(rc) +
                                 ", y=" + x.to_string() + ", x=" + y.to_string();
          s.queries.push_back(query("rw-exc-release", ad, RelationKind::Deposit, c(f, e), ex(y),
                                    rw_fields(false, rc, y), kEps));
          add_control(s, query("rw-exc-release/swapped-exc", ad, RelationKind::Deposit, c(f, e), ex(y),
                               rw_fields(true, rc, y), kEps, false));
        }
      }
    }
  }
  for (bool exc : {false, true}) {
    for (const auto& x : params.values) {
      const std::string a = "exc=" + bool_str(exc) + ", x=" + x.to_string();
      const Element f0 = rw_fields(exc, 0, x);
      s.queries.push_back(query("rw-exc-acquire", a, RelationKind::Withdraw, c(f0, ep), kEps,
                                c(f0, e), ex(x)));
      if (in(1)) {
        const Element f1 = rw_fields(exc, 1, x);
        add_control(s, query("rw-exc-acquire/rc-one", a, RelationKind::Withdraw, c(f1, ep), kEps,
                             c(f1, e), ex(x), false));
      }
      for (const auto& y : params.values) {
        if (y == x) continue;
        add_control(s, query("rw-exc-acquire/wrong-value", a + ", y=" + y.to_string(),
                             RelationKind::Withdraw, c(f0, ep), kEps, c(f0, e), ex(y), false));
      }
    }
  }
  for (const auto& x : params.values) {
    const std::string a = "x=" + x.to_string();
    s.queries.push_back(query("rw-shared-guard", a, RelationKind::Guard, rw_sh(x), ex(x), kEps, kEps));
    add_control(s, query("rw-shared-guard/from-shPending", a, RelationKind::Guard, shp, ex(x), kEps,
                         kEps, false));
    for (const auto& y : params.values) {
      if (y == x) continue;
      add_control(s, query("rw-shared-guard/wrong-value", a + ", y=" + y.to_string(),
                           RelationKind::Guard, rw_sh(x), ex(y), kEps, kEps, false));
    }
  }
  return s;
}

ProtocolSuite rwlock_multi_suite(const RwLockMultiParams& params, const MultiInstances& inst) {
  ProtocolSuite s{build_rwlock_multi(params), {}, {}};
  const auto& P = s.built.spec.protocol;
  const int K = params.k;
  auto c = [&](const Element& a, const Element& b) { return compose(P, a, b); };
  auto in = [&](std::int64_t rc) { return rc >= params.rc_min && rc <= params.rc_max; };
  auto vec_str = [](const std::vector<std::int64_t>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out + "]";
  };
  std::vector<std::vector<std::int64_t>> vectors{{}};
  for (int i = 0; i < K; ++i) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& v : vectors) {
      for (std::int64_t rc = inst.rc_min; rc <= inst.rc_max; ++rc) {
        auto w = v;
        w.push_back(rc);
        next.push_back(std::move(w));
      }
    }
    vectors = std::move(next);
  }
  const Element e = rwm_exc(K);
  for (const auto& x : params.values) {
    s.facts.push_back(fact("xrw-init", "x=" + x.to_string(), FactKind::Complete,
                           rwm_fields(false, std::vector<std::int64_t>(K, 0), x), ex(x)));
  }
  for (bool exc : {false, true}) {
    for (const auto& rcs : vectors) {
      for (const auto& x : params.values) {
        const std::string a = "exc=" + bool_str(exc) + ", rcs=" + vec_str(rcs) + ", x=" + x.to_string();
        const Element f = rwm_fields(exc, rcs, x);
        if (!exc) {
          s.queries.push_back(
              update("xrw-exc-begin", a, f, c(rwm_fields(true, rcs, x), rwm_exc_pending(K, 0))));
        } else {
          add_control(s, update("xrw-exc-begin/swapped-exc", a, f, c(f, rwm_exc_pending(K, 0)), false));
        }
        for (int j = 0; j < K; ++j) {
          const std::string aj = a + ", j=" + std::to_string(j);
          const Element from = c(f, rwm_exc_pending(K, j));
          const Element to = c(f, rwm_exc_pending(K, j + 1));
          if (rcs[static_cast<std::size_t>(j)] == 0) {
            s.queries.push_back(update("xrw-exc-progress", aj, from, to));
          } else if (exc) {
            add_control(s, update("xrw-exc-progress/nonzero-counter", aj, from, to, false));
          }
        }
        s.queries.push_back(query("xrw-exc-acquire", a, RelationKind::Withdraw,
                                  c(f, rwm_exc_pending(K, K)), kEps, c(f, e), ex(x)));
        if (exc && rcs[static_cast<std::size_t>(K - 1)] > 0) {
          add_control(s, query("xrw-exc-acquire/early", a, RelationKind::Withdraw,
                               c(f, rwm_exc_pending(K, K - 1)), kEps, c(f, e), ex(x), false));
        }
        for (const auto& y : params.values) {
          const std::string ad = "exc=" + bool_str(exc) + ", rcs=" + vec_str(rcs) +
                                 ", y=" + x.to_string() + ", x=" + y.to_string();
          s.queries.push_back(query("xrw-exc-release", ad, RelationKind::Deposit, c(f, e), ex(y),
                                    rwm_fields(false, rcs, y), kEps));
          add_control(s, query("xrw-exc-release/swapped-exc", ad, RelationKind::Deposit, c(f, e),
                               ex(y), rwm_fields(true, rcs, y), kEps, false));
        }
        for (int k = 0; k < K; ++k) {
          const auto ku = static_cast<std::size_t>(k);
          const std::string ak = a + ", k=" + std::to_string(k);
          const Element shp = rwm_sh_pending(K, k);
          auto up = rcs;
          ++up[ku];
          auto down = rcs;
          --down[ku];
          if (in(up[ku])) {
            s.queries.push_back(update("xrw-shared-begin", ak, f, c(rwm_fields(exc, up, x), shp)));
          }
          add_control(s, update("xrw-shared-begin/no-increment", ak, f, c(f, shp), false));
          if (!exc) {
            s.queries.push_back(update("xrw-shared-acquire", ak, c(f, shp), c(f, rwm_sh(K, k, x))));
          } else {
            add_control(s, update("xrw-shared-acquire/swapped-exc", ak, c(f, shp),
                                  c(f, rwm_sh(K, k, x)), false));
          }
          if (in(down[ku])) {
            s.queries.push_back(update("xrw-shared-retry", ak, c(f, shp), rwm_fields(exc, down, x)));
          }
          add_control(s, update("xrw-shared-retry/rc-unchanged", ak, c(f, shp), f, false));
          for (const auto& y : params.values) {
            const std::string aky = ak + ", y=" + y.to_string();
            if (in(down[ku])) {
              s.queries.push_back(update("xrw-shared-release", aky, c(f, rwm_sh(K, k, y)),
                                         rwm_fields(exc, down, x)));
            }
            add_control(s, update("xrw-shared-release/rc-unchanged", aky, c(f, rwm_sh(K, k, y)), f,
                                  false));
          }
        }
      }
    }
  }
  for (int k = 0; k < K; ++k) {
    for (const auto& x : params.values) {
      const std::string a = "k=" + std::to_string(k) + ", x=" + x.to_string();
      s.queries.push_back(
          query("xrw-shared-guard", a, RelationKind::Guard, rwm_sh(K, k, x), ex(x), kEps, kEps));
      add_control(s, query("xrw-shared-guard/from-shPending", a, RelationKind::Guard,
                           rwm_sh_pending(K, k), ex(x), kEps, kEps, false));
    }
  }
  return s;
}

MonoidSuite hashtable_suite(const HashTableParams& params) {
  MonoidSuite s{build_hashtable_monoid(params), {}};
  const auto& M = s.built.spec;
  const std::int64_t L = params.length;
  auto c = [&](const Element& a, const Element& b) { return compose(M, a, b); };
  std::vector<Element> opt_values{none()};
  for (const auto& v : params.values) opt_values.push_back(some(v));
  std::vector<Element> opt_entries{none()};
  for (const auto& k : params.keys) {
    for (const auto& v : params.values) opt_entries.push_back(some(ht_entry(k, v)));
  }
  auto add = [&](MonoidFact f) {
    // Controls must start from a valid state to be meaningful.
    if (f.control && f.kind == FactKind::Update && !M.valid(f.a)) return;
    s.facts.push_back(std::move(f));
  };

  // Runs of occupied slots [from, to) whose keys differ from `key`.
  std::function<void(std::int64_t, std::int64_t, const Element&, Element,
                     const std::function<void(const Element&, const std::string&)>&, std::string)>
      runs = [&](std::int64_t j, std::int64_t to, const Element& key, Element acc,
                 const std::function<void(const Element&, const std::string&)>& emit,
                 std::string desc) {
        if (j == to) {
          emit(acc, desc);
          return;
        }
        for (const auto& k2 : params.keys) {
          if (k2 == key) continue;
          for (const auto& v2 : params.values) {
            runs(j + 1, to, key, c(acc, ht_slot(j, some(ht_entry(k2, v2)))),
                 emit, desc + " " + std::to_string(j) + ":" + k2.to_string() + "=" + v2.to_string());
          }
        }
      };

  for (const auto& k : params.keys) {
    const std::int64_t h = params.hash_of(k);
    const std::string ks = "k=" + k.to_string();
    for (std::int64_t j = 0; j < L; ++j) {
      for (const auto& vj : params.values) {
        const Element slot = ht_slot(j, some(ht_entry(k, vj)));
        const std::string a = ks + ", j=" + std::to_string(j) + ", vj=" + vj.to_string();
        for (const auto& v : opt_values) {
          const Element mk = ht_m(k, v);
          if (v != some(vj)) {
            add(fact("ht-query-found", a + ", v=" + v.to_string(), FactKind::Invalid, c(mk, slot),
                     Element::unit()));
          }
          for (const auto& v2 : params.values) {
            add(fact("ht-update-existing", a + ", v=" + v.to_string() + ", v'=" + v2.to_string(),
                     FactKind::Update, c(mk, slot), c(ht_m(k, some(v2)), ht_slot(j, some(ht_entry(k, v2))))));
          }
        }
        if (j == h) {
          add(fact("ht-query-found/consistent", a, FactKind::Invalid, c(ht_m(k, some(vj)), slot),
                   Element::unit(), Element::unit(), false));
          for (const auto& v2 : params.values) {
            if (v2 == vj) continue;
            add(fact("ht-update-existing/map-only", a + ", v'=" + v2.to_string(), FactKind::Update,
                     c(ht_m(k, some(vj)), slot), c(ht_m(k, some(v2)), slot), Element::unit(), false));
          }
        }
      }
    }
    for (std::int64_t i = h; i < L; ++i) {
      const std::string ai = ks + ", i=" + std::to_string(i);
      runs(h, i, k, Element::tuple({Element::map({}), Element::map({})}),
           [&](const Element& prefix, const std::string& desc) {
             const Element base = c(prefix, ht_slot(i, none()));
             for (const auto& v : opt_values) {
               if (v != none()) {
                 add(fact("ht-query-not-found", ai + ", v=" + v.to_string() + "," + desc,
                          FactKind::Invalid, c(ht_m(k, v), base), Element::unit()));
               }
               for (const auto& v2 : params.values) {
                 add(fact("ht-update-insert", ai + ", v=" + v.to_string() + ", v'=" + v2.to_string() + "," + desc,
                          FactKind::Update, c(ht_m(k, v), base),
                          c(c(ht_m(k, some(v2)), ht_slot(i, some(ht_entry(k, v2)))), prefix)));
               }
             }
           },
           "");
    }
    // Controls: the key already sits in the probe run.
    if (h + 1 < L) {
      for (const auto& w : params.values) {
        const Element occupied = ht_slot(h, some(ht_entry(k, w)));
        const Element base = c(occupied, ht_slot(h + 1, none()));
        const std::string a = ks + ", w=" + w.to_string();
        add(fact("ht-query-not-found/key-in-run", a, FactKind::Invalid, c(ht_m(k, some(w)), base),
                 Element::unit(), Element::unit(), false));
        for (const auto& v2 : params.values) {
          add(fact("ht-update-insert/key-in-run", a + ", v'=" + v2.to_string(), FactKind::Update,
                   c(ht_m(k, some(w)), base),
                   c(c(ht_m(k, some(v2)), ht_slot(h + 1, some(ht_entry(k, v2)))), occupied),
                   Element::unit(), false));
        }
      }
    }
  }

  // Addendum: map/slot pieces with disjoint domains compose under ∧.
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  for (std::int64_t a = 0; a < L; ++a) {
    for (std::int64_t b = a; b < L; ++b) ranges.emplace_back(a, b);
  }
  std::function<void(std::int64_t, std::int64_t, Element, std::string,
                     const std::function<void(const Element&, const std::string&)>&)>
      slot_runs = [&](std::int64_t j, std::int64_t b, Element acc, std::string desc,
                      const std::function<void(const Element&, const std::string&)>& emit) {
        if (j > b) {
          emit(acc, desc);
          return;
        }
        for (const auto& sj : opt_entries) {
          slot_runs(j + 1, b, c(acc, ht_slot(j, sj)), desc + " " + std::to_string(j) + ":" + sj.to_string(),
                    emit);
        }
      };
  const Element empty = Element::tuple({Element::map({}), Element::map({})});
  for (const auto& k : params.keys) {
    for (const auto& v : opt_values) {
      const Element mk = ht_m(k, v);
      const std::string a = "k=" + k.to_string() + ", v=" + v.to_string();
      for (std::int64_t j = 0; j < L; ++j) {
        for (const auto& sj : opt_entries) {
          const Element sl = ht_slot(j, sj);
          add(fact("ht-and-m-slot", a + ", j=" + std::to_string(j) + ", s=" + sj.to_string(),
                   FactKind::AndPremise, mk, sl, c(mk, sl)));
        }
      }
      for (auto [lo, hi] : ranges) {
        slot_runs(lo, hi, empty, "", [&](const Element& run, const std::string& desc) {
          add(fact("ht-and-m-run", a + ", run=[" + std::to_string(lo) + "," + std::to_string(hi) + "]" + desc,
                   FactKind::AndPremise, mk, run, c(mk, run)));
        });
      }
      add(fact("ht-and/overlap", a, FactKind::AndPremise, mk, mk, c(mk, mk), false));
    }
  }
  for (auto [lo, hi] : ranges) {
    if (hi + 1 >= L) continue;
    slot_runs(lo, hi, empty, "", [&](const Element& run, const std::string& desc) {
      for (const auto& sb : opt_entries) {
        const Element next = ht_slot(hi + 1, sb);
        add(fact("ht-and-run-extend",
                 "run=[" + std::to_string(lo) + "," + std::to_string(hi) + "]" + desc + ", next=" + sb.to_string(),
                 FactKind::AndPremise, next, run, c(next, run)));
      }
    });
  }
  // Two slots holding the same key can never be valid.
  if (L >= 2 && params.values.size() >= 2) {
    const auto& k = params.keys.front();
    add(fact("ht-keys-distinct", "k=" + k.to_string(), FactKind::Invalid,
             c(ht_slot(0, some(ht_entry(k, params.values[0]))), ht_slot(1, some(ht_entry(k, params.values[1])))),
             Element::unit()));
  }
  return s;
}

std::vector<ProtocolSuite> standard_protocol_suites() {
  std::vector<ProtocolSuite> out;
  out.push_back(fractional_suite());
  out.push_back(frac_heap_suite());
  out.push_back(counting_suite());
  out.push_back(counting_unconstrained_suite());
  out.push_back(forever_suite());
  out.push_back(rwlock_suite());
  out.push_back(rwlock_multi_suite());
  return out;
}

}  // namespace sharecheck
