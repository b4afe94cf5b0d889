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

#include "sharecheck/protocols.hpp"

#include <algorithm>
#include <unordered_set>

namespace sharecheck {

namespace {

void need_args(std::span<const Element> args, std::size_t n, const char* what) {
  if (args.size() != n) {
    throw EncodingError(std::string(what) + " takes " + std::to_string(n) + " argument(s)");
  }
}

Element zeros(int k) {
  return Element::tuple(std::vector<Element>(static_cast<std::size_t>(k), Element::integer(0)));
}

std::int64_t count_of(const Element& s) {
  return s.is_unit() ? 0 : s.items()[1].as_int();
}

std::int64_t count_of(const Element& s, std::size_t k) {
  return s.is_unit() ? 0 : s.items()[1].items()[k].as_int();
}

}  // namespace

// ---------------------------------------------------------------- fractional

BuiltProtocol build_fractional(const FractionalParams& params) {
  BuiltProtocol b;
  auto& sp = b.spec;
  sp.name = "fractional";
  sp.protocol = build_frac(params.denominator_bound, params.max);
  sp.storage = build_nat(params.storage_max);
  sp.complete = [](const Element& p) { return p.kind() == ElementKind::Int; };
  sp.stored_of = [](const Element& p) { return Element::integer(p.as_int()); };
  b.named["q"] = [](std::span<const Element> a) {
    need_args(a, 2, "q");
    return frac(a[0].as_int(), a[1].as_int());
  };
  return b;
}

// ------------------------------------------------------------------ counting

Element counting_element(std::int64_t r, std::int64_t c, bool carrier_constraint) {
  if (c < 0) throw EncodingError("counting element needs c >= 0");
  if (carrier_constraint && c == 0 && r > 0) {
    throw EncodingError("(" + std::to_string(r) + ", 0) is outside the counting carrier");
  }
  return Element::tuple({Element::integer(r), Element::integer(c)});
}

MonoidSpec build_counting_monoid(const CountingParams& params) {
  const bool constrained = params.carrier_constraint;
  auto in_carrier = [constrained](std::int64_t r, std::int64_t c) {
    return c >= 0 && (!constrained || c > 0 || r <= 0);
  };
  MonoidSpec m;
  m.name = constrained ? "Counting" : "Counting(unconstrained)";
  m.unit = counting_element(0, 0);
  m.compose = [](const Element& a, const Element& b) {
    return Element::tuple({Element::integer(a.items()[0].as_int() + b.items()[0].as_int()),
                           Element::integer(a.items()[1].as_int() + b.items()[1].as_int())});
  };
  m.valid = [](const Element&) { return true; };
  m.divides = [in_carrier](const Element& a, const Element& b) {
    return in_carrier(b.items()[0].as_int() - a.items()[0].as_int(),
                      b.items()[1].as_int() - a.items()[1].as_int());
  };
  m.accepts = [in_carrier](const Element& a) {
    return a.kind() == ElementKind::Tuple && a.items().size() == 2 &&
           a.items()[0].kind() == ElementKind::Int && a.items()[1].kind() == ElementKind::Int &&
           in_carrier(a.items()[0].as_int(), a.items()[1].as_int());
  };
  std::vector<Element> els;
  for (std::int64_t r = params.r_min; r <= params.r_max; ++r) {
    for (std::int64_t c = 0; c <= params.c_max; ++c) {
      if (in_carrier(r, c)) els.push_back(counting_element(r, c, false));
    }
  }
  m.enumerator = ElementEnumerator::bounded(
      std::move(els), "r in [" + std::to_string(params.r_min) + ", " + std::to_string(params.r_max) +
                          "], c in [0, " + std::to_string(params.c_max) + "]");
  return m;
}

BuiltProtocol build_counting(const CountingParams& params) {
  BuiltProtocol b;
  auto& sp = b.spec;
  sp.name = params.carrier_constraint ? "counting" : "counting(unconstrained)";
  sp.protocol = build_counting_monoid(params);
  sp.storage = build_nat(params.storage_max);
  sp.complete = [](const Element& p) { return p.items()[0].as_int() == 0; };
  sp.stored_of = [](const Element& p) { return p.items()[1]; };
  const bool constrained = params.carrier_constraint;
  b.named["ref"] = [](std::span<const Element> a) {
    need_args(a, 0, "ref");
    return counting_element(-1, 0);
  };
  b.named["counter"] = [](std::span<const Element> a) {
    need_args(a, 1, "counter");
    return counting_element(a[0].as_int(), 1);
  };
  b.named["pair"] = [constrained](std::span<const Element> a) {
    need_args(a, 2, "pair");
    return counting_element(a[0].as_int(), a[1].as_int(), constrained);
  };
  return b;
}

// ------------------------------------------------------------------- forever

BuiltProtocol build_forever() {
  BuiltProtocol b;
  auto& sp = b.spec;
  sp.name = "forever";
  sp.protocol = build_trivial();
  sp.storage = build_excl({Element::integer(1)});
  sp.complete = [](const Element&) { return true; };
  sp.stored_of = [](const Element&) { return ex_unit(); };
  b.named["ex"] = [](std::span<const Element> a) {
    need_args(a, 0, "ex");
    return ex_unit();
  };
  return b;
}

// -------------------------------------------------------------------- rwlock

Element rw_fields(bool exc, std::int64_t rc, const Element& x) {
  return Element::tuple({ex(Element::tuple({Element::boolean(exc), Element::integer(rc), x})),
                         Element::unit(), Element::unit(), Element::integer(0), Element::unit()});
}
Element rw_exc_pending() {
  return Element::tuple(
      {Element::unit(), ex_unit(), Element::unit(), Element::integer(0), Element::unit()});
}
Element rw_exc() {
  return Element::tuple(
      {Element::unit(), Element::unit(), ex_unit(), Element::integer(0), Element::unit()});
}
Element rw_sh_pending() {
  return Element::tuple(
      {Element::unit(), Element::unit(), Element::unit(), Element::integer(1), Element::unit()});
}
Element rw_sh(const Element& x) {
  return Element::tuple(
      {Element::unit(), Element::unit(), Element::unit(), Element::integer(0), agn(x, 1)});
}

std::optional<RwView> rw_view(const Element& p) {
  if (p.is_bottom()) return std::nullopt;
  const auto it = p.items();
  if (it.size() != 5) throw EncodingError("rwlock element must have 5 components");
  RwView v;
  if (!it[0].is_unit()) {
    const auto f = it[0].items()[0].items();
    v.has_fields = true;
    v.exc = f[0].as_bool();
    v.rc = f[1];
    v.x = f[2];
  }
  v.ep = it[1];
  v.e = it[2];
  v.sp = it[3];
  v.s = it[4];
  return v;
}

BuiltProtocol build_rwlock(const RwLockParams& params) {
  std::vector<Element> field_base;
  for (bool b : {false, true}) {
    for (std::int64_t rc = params.rc_min; rc <= params.rc_max; ++rc) {
      for (const auto& x : params.values) {
        field_base.push_back(Element::tuple({Element::boolean(b), Element::integer(rc), x}));
      }
    }
  }
  BuiltProtocol b;
  auto& sp = b.spec;
  sp.name = "rwlock";
  sp.protocol = build_product({build_excl(field_base), build_excl({Element::integer(1)}),
                               build_excl({Element::integer(1)}), build_nat(params.pending_max),
                               build_agn(params.values, params.count_max)});
  sp.protocol.enumerator = ElementEnumerator::bounded(
      std::vector<Element>(sp.protocol.enumerator.elements().begin(),
                           sp.protocol.enumerator.elements().end()),
      "rc in [" + std::to_string(params.rc_min) + ", " + std::to_string(params.rc_max) +
          "], shPending <= " + std::to_string(params.pending_max) + ", sh count <= " +
          std::to_string(params.count_max));
  sp.storage = build_excl(params.values);
  sp.complete = [](const Element& p) {
    const auto v = rw_view(p);
    if (!v || !v->has_fields) return false;
    if (v->rc.as_int() != v->sp.as_int() + count_of(v->s)) return false;
    const bool ep = !v->ep.is_unit();
    const bool e = !v->e.is_unit();
    if (!v->exc && (ep || e)) return false;
    if (v->exc && ep == e) return false;
    if (e && !v->s.is_unit()) return false;
    if (!v->s.is_unit() && v->s.items()[0] != v->x) return false;
    return true;
  };
  sp.stored_of = [](const Element& p) {
    const auto v = rw_view(p);
    if (!v || !v->has_fields) throw DomainError("rwlock storage needs a fields component");
    return v->e.is_unit() ? ex(v->x) : Element::unit();
  };
  b.named["fields"] = [](std::span<const Element> a) {
    need_args(a, 3, "fields");
    return rw_fields(a[0].as_bool(), a[1].as_int(), a[2]);
  };
  b.named["excPending"] = [](std::span<const Element> a) {
    need_args(a, 0, "excPending");
    return rw_exc_pending();
  };
  b.named["exc"] = [](std::span<const Element> a) {
    need_args(a, 0, "exc");
    return rw_exc();
  };
  b.named["shPending"] = [](std::span<const Element> a) {
    need_args(a, 0, "shPending");
    return rw_sh_pending();
  };
  b.named["sh"] = [](std::span<const Element> a) {
    need_args(a, 1, "sh");
    return rw_sh(a[0]);
  };
  b.named["ex"] = [](std::span<const Element> a) {
    need_args(a, 1, "ex");
    return ex(a[0]);
  };
  return b;
}

// ------------------------------------------------------- multi-counter rwlock

Element rwm_fields(bool exc, const std::vector<std::int64_t>& rcs, const Element& x) {
  std::vector<Element> r;
  for (auto c : rcs) r.push_back(Element::integer(c));
  return Element::tuple({ex(Element::tuple({Element::boolean(exc), Element::tuple(r), x})),
                         Element::unit(), Element::unit(), zeros(static_cast<int>(rcs.size())),
                         Element::unit()});
}
Element rwm_exc_pending(int k, std::int64_t j) {
  return Element::tuple(
      {Element::unit(), ex(Element::integer(j)), Element::unit(), zeros(k), Element::unit()});
}
Element rwm_exc(int k) {
  return Element::tuple({Element::unit(), Element::unit(), ex_unit(), zeros(k), Element::unit()});
}
Element rwm_sh_pending(int k, int index) {
  std::vector<Element> v(static_cast<std::size_t>(k), Element::integer(0));
  v.at(static_cast<std::size_t>(index)) = Element::integer(1);
  return Element::tuple(
      {Element::unit(), Element::unit(), Element::unit(), Element::tuple(v), Element::unit()});
}
Element rwm_sh(int k, int index, const Element& x) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(k), 0);
  c.at(static_cast<std::size_t>(index)) = 1;
  return Element::tuple(
      {Element::unit(), Element::unit(), Element::unit(), zeros(k), agnvec(x, c)});
}

BuiltProtocol build_rwlock_multi(const RwLockMultiParams& params) {
  const int k = params.k;
  if (k < 1) throw EncodingError("multi-counter rwlock needs K >= 1");
  std::vector<std::vector<std::int64_t>> rc_vectors{{}};
  for (int i = 0; i < k; ++i) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& v : rc_vectors) {
      for (std::int64_t rc = params.rc_min; rc <= params.rc_max; ++rc) {
        auto w = v;
        w.push_back(rc);
        next.push_back(std::move(w));
      }
    }
    rc_vectors = std::move(next);
  }
  std::vector<Element> field_base;
  for (bool b : {false, true}) {
    for (const auto& rcs : rc_vectors) {
      std::vector<Element> r;
      for (auto c : rcs) r.push_back(Element::integer(c));
      for (const auto& x : params.values) {
        field_base.push_back(Element::tuple({Element::boolean(b), Element::tuple(r), x}));
      }
    }
  }
  std::vector<Element> progress;
  for (int j = 0; j <= k; ++j) progress.push_back(Element::integer(j));
  std::vector<MonoidSpec> pending;
  for (int i = 0; i < k; ++i) pending.push_back(build_nat(params.pending_max));

  BuiltProtocol b;
  auto& sp = b.spec;
  sp.name = "rwlock-multi";
  sp.protocol = build_product({build_excl(field_base), build_excl(progress),
                               build_excl({Element::integer(1)}), build_product(pending),
                               build_agnvec(params.values, k, params.count_max)});
  sp.protocol.enumerator = ElementEnumerator::bounded(
      std::vector<Element>(sp.protocol.enumerator.elements().begin(),
                           sp.protocol.enumerator.elements().end()),
      "K = " + std::to_string(k) + ", rc in [" + std::to_string(params.rc_min) + ", " +
          std::to_string(params.rc_max) + "], shPending <= " + std::to_string(params.pending_max) +
          ", sh counts <= " + std::to_string(params.count_max));
  sp.storage = build_excl(params.values);
  sp.complete = [](const Element& p) {
    const auto v = rw_view(p);
    if (!v || !v->has_fields) return false;
    const auto rcs = v->rc.items();
    const auto sps = v->sp.items();
    for (std::size_t i = 0; i < rcs.size(); ++i) {
      if (rcs[i].as_int() != sps[i].as_int() + count_of(v->s, i)) return false;
    }
    const bool ep = !v->ep.is_unit();
    const bool e = !v->e.is_unit();
    if (!v->exc && (ep || e)) return false;
    if (v->exc && ep == e) return false;
    if (e && !v->s.is_unit()) return false;
    if (!v->s.is_unit() && v->s.items()[0] != v->x) return false;
    if (ep) {
      const auto checked = static_cast<std::size_t>(v->ep.items()[0].as_int());
      for (std::size_t i = 0; i < checked && i < rcs.size(); ++i) {
        if (count_of(v->s, i) != 0) return false;
      }
    }
    return true;
  };
  sp.stored_of = [](const Element& p) {
    const auto v = rw_view(p);
    if (!v || !v->has_fields) throw DomainError("rwlock storage needs a fields component");
    return v->e.is_unit() ? ex(v->x) : Element::unit();
  };
  b.named["fields"] = [](std::span<const Element> a) {
    need_args(a, 3, "fields");
    std::vector<std::int64_t> rcs;
    for (const auto& c : a[1].items()) rcs.push_back(c.as_int());
    return rwm_fields(a[0].as_bool(), rcs, a[2]);
  };
  b.named["excPending"] = [k](std::span<const Element> a) {
    need_args(a, 1, "excPending");
    return rwm_exc_pending(k, a[0].as_int());
  };
  b.named["exc"] = [k](std::span<const Element> a) {
    need_args(a, 0, "exc");
    return rwm_exc(k);
  };
  b.named["shPending"] = [k](std::span<const Element> a) {
    need_args(a, 1, "shPending");
    return rwm_sh_pending(k, static_cast<int>(a[0].as_int()));
  };
  b.named["sh"] = [k](std::span<const Element> a) {
    need_args(a, 2, "sh");
    return rwm_sh(k, static_cast<int>(a[0].as_int()), a[1]);
  };
  b.named["ex"] = [](std::span<const Element> a) {
    need_args(a, 1, "ex");
    return ex(a[0]);
  };
  return b;
}

// ---------------------------------------------------------------- hash table

std::int64_t HashTableParams::hash_of(const Element& key) const {
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i] == key) return hash.at(i);
  }
  throw EncodingError("key " + key.to_string() + " is not in the hash table's key set");
}

Element ht_entry(const Element& key, const Element& value) { return Element::tuple({key, value}); }

Element ht_m(const Element& key, const Element& opt_value) {
  return Element::tuple({Element::map({{key, ex(opt_value)}}), Element::map({})});
}

Element ht_slot(std::int64_t index, const Element& opt_entry) {
  return Element::tuple({Element::map({}), Element::map({{Element::integer(index), ex(opt_entry)}})});
}

namespace {

// Dense code of a hash-table element restricted to keys and slots [0, n):
// per key 0 = absent, 1 = ex(None), 2 + v = ex(Some(value v)); per slot
// 0 = absent, 1 = ex(None), 2 + key * |V| + v = ex(Some((key, value v))).
struct HtCoder {
  const HashTableParams* params;

  std::size_t nk() const { return params->keys.size(); }
  std::size_t nv() const { return params->values.size(); }

  int index_of(const std::vector<Element>& xs, const Element& x) const {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == x) return static_cast<int>(i);
    }
    return -1;
  }

  // Returns false if z mentions slots at or beyond `n` or unknown symbols.
  bool encode(const Element& z, std::size_t n, std::vector<int>& out) const {
    out.assign(nk() + n, 0);
    const auto mf = z.items()[0].map_flat();
    for (std::size_t i = 0; i < mf.size(); i += 2) {
      const int k = index_of(params->keys, mf[i]);
      const Element& opt = mf[i + 1].items()[0];
      if (k < 0) return false;
      if (opt.is_ctor("none")) {
        out[static_cast<std::size_t>(k)] = 1;
      } else {
        const int v = index_of(params->values, opt.items()[0]);
        if (v < 0) return false;
        out[static_cast<std::size_t>(k)] = 2 + v;
      }
    }
    const auto sf = z.items()[1].map_flat();
    for (std::size_t i = 0; i < sf.size(); i += 2) {
      const auto idx = sf[i].as_int();
      if (idx < 0 || static_cast<std::size_t>(idx) >= n) return false;
      const Element& opt = sf[i + 1].items()[0];
      int code = 1;
      if (!opt.is_ctor("none")) {
        const int k = index_of(params->keys, opt.items()[0].items()[0]);
        const int v = index_of(params->values, opt.items()[0].items()[1]);
        if (k < 0 || v < 0) return false;
        code = 2 + k * static_cast<int>(nv()) + v;
      }
      out[nk() + static_cast<std::size_t>(idx)] = code;
    }
    return true;
  }

  bool full_state(const std::vector<int>& st, std::size_t n) const {
    const int V = static_cast<int>(nv());
    std::vector<int> slot_of_key(nk(), -1);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = st[nk() + i];
      if (c < 2) continue;
      const int k = (c - 2) / V;
      const int v = (c - 2) % V;
      // KeysDistinct.
      if (slot_of_key[static_cast<std::size_t>(k)] >= 0) return false;
      slot_of_key[static_cast<std::size_t>(k)] = static_cast<int>(i);
      // SlotsConsistent: key present in the map and not None.
      const int mk = st[static_cast<std::size_t>(k)];
      if (mk == 0 || mk == 1) return false;
      (void)v;
      // Contiguous.
      const auto h = static_cast<std::size_t>(params->hash.at(static_cast<std::size_t>(k)));
      if (h > i) return false;
      for (std::size_t j = h; j <= i; ++j) {
        if (st[nk() + j] < 2) return false;
      }
    }
    // MapConsistent.
    for (std::size_t k = 0; k < nk(); ++k) {
      const int mk = st[k];
      if (mk < 2) continue;
      const int s = slot_of_key[k];
      if (s < 0) return false;
      const int c = st[nk() + static_cast<std::size_t>(s)];
      if ((c - 2) % V != mk - 2) return false;
    }
    return true;
  }

  std::uint64_t pack(const std::vector<int>& st, std::size_t len) const {
    const std::uint64_t base = 2 + nk() * nv();
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < len; ++i) code = code * base + static_cast<std::uint64_t>(st[i]);
    return code;
  }
};

}  // namespace

bool ht_full_state_ok(const HashTableParams& params, const Element& z) {
  if (z.is_bottom()) return false;
  HtCoder coder{&params};
  std::size_t n = 0;
  for (const auto& idx : z.items()[1].map_flat()) {
    if (idx.kind() == ElementKind::Int) n = std::max(n, static_cast<std::size_t>(idx.as_int()) + 1);
  }
  std::vector<int> st;
  if (!coder.encode(z, n, st)) return false;
  return coder.full_state(st, n);
}

BuiltMonoid build_hashtable_monoid(const HashTableParams& params) {
  if (params.length < 1) throw EncodingError("hash table length must be positive");
  if (params.hash.size() != params.keys.size()) throw EncodingError("hash must cover every key");
  for (auto h : params.hash) {
    if (h < 0 || h >= params.length) throw EncodingError("hash values must lie in [0, L)");
  }
  auto prm = std::make_shared<const HashTableParams>(params);
  std::vector<Element> opt_values{none()};
  for (const auto& v : params.values) opt_values.push_back(some(v));
  std::vector<Element> opt_entries{none()};
  for (const auto& k : params.keys) {
    for (const auto& v : params.values) opt_entries.push_back(some(ht_entry(k, v)));
  }
  std::vector<Element> slots;
  for (std::int64_t i = 0; i < params.length; ++i) slots.push_back(Element::integer(i));

  BuiltMonoid b;
  MonoidSpec& m = b.spec;
  m = build_product({build_finmap(params.keys, build_excl(opt_values)),
                     build_finmap(slots, build_excl(opt_entries))});
  m.name = "HashTable(L=" + std::to_string(params.length) + ")";

  // A witness completion never needs an occupied slot at index L + |keys|
  // or beyond (its probe range would need more distinct keys than exist),
  // so searching that window decides validity exactly.
  const std::size_t L = static_cast<std::size_t>(params.length);
  const std::size_t window = L + params.keys.size();
  HtCoder coder{prm.get()};
  const std::size_t nk = params.keys.size();
  const int key_opts = 2 + static_cast<int>(params.values.size());
  const int slot_opts = 2 + static_cast<int>(nk * params.values.size());
  auto projections = std::make_shared<std::unordered_set<std::uint64_t>>();
  std::vector<int> st(nk + window, 0);
  while (true) {
    if (coder.full_state(st, window)) projections->insert(coder.pack(st, nk + L));
    std::size_t i = 0;
    while (i < st.size()) {
      const int lim = i < nk ? key_opts : slot_opts;
      if (++st[i] < lim) break;
      st[i++] = 0;
    }
    if (i == st.size()) break;
  }
  // Downward closure: every sub-element of a restricted full state is valid.
  auto valid_codes = std::make_shared<std::unordered_set<std::uint64_t>>();
  const std::uint64_t base = static_cast<std::uint64_t>(slot_opts);
  for (const auto code : *projections) {
    std::vector<int> digits(nk + L);
    std::uint64_t c = code;
    for (std::size_t i = digits.size(); i-- > 0;) {
      digits[i] = static_cast<int>(c % base);
      c /= base;
    }
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (digits[i] != 0) present.push_back(i);
    }
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << present.size()); ++mask) {
      auto d = digits;
      for (std::size_t j = 0; j < present.size(); ++j) {
        if (mask & (std::uint64_t{1} << j)) d[present[j]] = 0;
      }
      valid_codes->insert(coder.pack(d, d.size()));
    }
  }
  m.valid = [prm, valid_codes, L](const Element& z) {
    if (z.is_bottom()) return false;
    HtCoder c{prm.get()};
    std::vector<int> st;
    if (!c.encode(z, L, st)) return false;
    return valid_codes->count(c.pack(st, st.size())) > 0;
  };

  b.named["m"] = [](std::span<const Element> a) {
    need_args(a, 2, "m");
    return ht_m(a[0], a[1]);
  };
  b.named["slot"] = [](std::span<const Element> a) {
    need_args(a, 2, "slot");
    return ht_slot(a[0].as_int(), a[1]);
  };
  b.named["entry"] = [](std::span<const Element> a) {
    need_args(a, 2, "entry");
    return ht_entry(a[0], a[1]);
  };
  return b;
}

// ------------------------------------------------------------ fractional heap

BuiltProtocol build_frac_heap(const FracHeapParams& params) {
  BuiltProtocol b;
  auto& sp = b.spec;
  sp.name = "frac-heap";
  sp.protocol = build_finmap(params.cells, build_frac(params.denominator_bound, params.max));
  sp.storage = build_finmap(params.cells, build_nat(params.storage_max));
  sp.complete = [](const Element& p) {
    if (p.is_bottom()) return false;
    const auto f = p.map_flat();
    for (std::size_t i = 1; i < f.size(); i += 2) {
      if (f[i].kind() != ElementKind::Int) return false;
    }
    return true;
  };
  // Integral entries map to themselves; the zero entries are already absent.
  sp.stored_of = [](const Element& p) { return p; };
  b.named["pt"] = [](std::span<const Element> a) {
    need_args(a, 4, "pt");
    const Element q = frac(a[2].as_int(), a[3].as_int());
    if (q == Element::integer(0)) return Element::map({});
    return Element::map({{Element::tuple({a[0], a[1]}), q}});
  };
  b.named["cell"] = [](std::span<const Element> a) {
    need_args(a, 3, "cell");
    if (a[2].as_int() == 0) return Element::map({});
    return Element::map({{Element::tuple({a[0], a[1]}), Element::integer(a[2].as_int())}});
  };
  return b;
}

}  // namespace sharecheck
