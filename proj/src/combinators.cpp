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

#include "sharecheck/combinators.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace sharecheck {

Element ex(const Element& x) { return Element::ctor("ex", {x}); }
Element ex_unit() { return ex(Element::integer(1)); }
Element agn(const Element& x, std::int64_t n) {
  if (n < 1) throw EncodingError("agn count must be at least 1");
  return Element::ctor("agn", {x, Element::integer(n)});
}
Element agnvec(const Element& x, std::vector<std::int64_t> counts) {
  if (std::all_of(counts.begin(), counts.end(), [](auto c) { return c == 0; })) {
    throw EncodingError("agn count vector must be nonzero");
  }
  std::vector<Element> items;
  for (auto c : counts) {
    if (c < 0) throw EncodingError("agn counts must be nonnegative");
    items.push_back(Element::integer(c));
  }
  return Element::ctor("agn", {x, Element::tuple(std::move(items))});
}
Element frac(std::int64_t num, std::int64_t den) { return Element::rational(num, den); }
Element none() { return Element::ctor("none"); }
Element some(const Element& x) { return Element::ctor("some", {x}); }
Element sym(std::string name) { return Element::ctor(std::move(name)); }

namespace {

using ElementSet = std::set<Element>;

std::string join_bounds(const std::vector<MonoidSpec>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (p.enumerator.is_exhaustive()) continue;
    if (!out.empty()) out += "; ";
    out += p.name + ": " + p.enumerator.bound();
  }
  return out;
}

ElementEnumerator make_enum(std::vector<Element> els, bool exhaustive, std::string bound) {
  return exhaustive ? ElementEnumerator::exhaustive(std::move(els))
                    : ElementEnumerator::bounded(std::move(els), std::move(bound));
}

std::string list_name(const std::vector<Element>& base) {
  std::string s = "{";
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i > 0) s += ",";
    s += base[i].to_string();
  }
  return s + "}";
}

bool is_nonneg_number(const Element& e) {
  return (e.kind() == ElementKind::Int || e.kind() == ElementKind::Rational) && e.num() >= 0;
}

}  // namespace

MonoidSpec build_excl(std::vector<Element> base) {
  auto members = std::make_shared<ElementSet>(base.begin(), base.end());
  MonoidSpec m;
  m.name = "Excl" + list_name(base);
  m.unit = Element::unit();
  m.has_bottom = true;
  m.compose = [](const Element& a, const Element& b) {
    if (a.is_unit()) return b;
    if (b.is_unit()) return a;
    return Element::bottom();
  };
  m.valid = [](const Element& a) { return !a.is_bottom(); };
  m.divides = [](const Element& a, const Element& b) {
    return a.is_unit() || b.is_bottom() || a == b;
  };
  m.accepts = [members](const Element& a) {
    if (a.is_unit() || a.is_bottom()) return true;
    return a.is_ctor("ex") && a.items().size() == 1 && members->count(a.items()[0]) > 0;
  };
  std::vector<Element> els{Element::unit(), Element::bottom()};
  for (const auto& x : base) els.push_back(ex(x));
  m.enumerator = ElementEnumerator::exhaustive(std::move(els));
  return m;
}

MonoidSpec build_agn(std::vector<Element> base, std::int64_t max_count) {
  auto members = std::make_shared<ElementSet>(base.begin(), base.end());
  MonoidSpec m;
  m.name = "AgN" + list_name(base);
  m.unit = Element::unit();
  m.has_bottom = true;
  m.compose = [](const Element& a, const Element& b) {
    if (a.is_unit()) return b;
    if (b.is_unit()) return a;
    if (a.is_bottom() || b.is_bottom()) return Element::bottom();
    if (a.items()[0] != b.items()[0]) return Element::bottom();
    return agn(a.items()[0], a.items()[1].as_int() + b.items()[1].as_int());
  };
  m.valid = [](const Element& a) { return !a.is_bottom(); };
  m.divides = [](const Element& a, const Element& b) {
    if (a.is_unit() || b.is_bottom()) return true;
    if (a.is_bottom() || b.is_unit()) return false;
    return a.items()[0] == b.items()[0] && a.items()[1].as_int() <= b.items()[1].as_int();
  };
  m.accepts = [members](const Element& a) {
    if (a.is_unit() || a.is_bottom()) return true;
    return a.is_ctor("agn") && a.items().size() == 2 && members->count(a.items()[0]) > 0 &&
           a.items()[1].kind() == ElementKind::Int && a.items()[1].as_int() >= 1;
  };
  std::vector<Element> els{Element::unit(), Element::bottom()};
  for (const auto& x : base) {
    for (std::int64_t n = 1; n <= max_count; ++n) els.push_back(agn(x, n));
  }
  m.enumerator = ElementEnumerator::bounded(std::move(els), "counts <= " + std::to_string(max_count));
  return m;
}

MonoidSpec build_agnvec(std::vector<Element> base, int k, std::int64_t max_count) {
  if (k < 1) throw EncodingError("AgNVec needs at least one counter");
  auto members = std::make_shared<ElementSet>(base.begin(), base.end());
  MonoidSpec m;
  m.name = "AgNVec" + std::to_string(k) + list_name(base);
  m.unit = Element::unit();
  m.has_bottom = true;
  auto counts = [](const Element& a) {
    std::vector<std::int64_t> c;
    for (const auto& it : a.items()[1].items()) c.push_back(it.as_int());
    return c;
  };
  m.compose = [counts](const Element& a, const Element& b) {
    if (a.is_unit()) return b;
    if (b.is_unit()) return a;
    if (a.is_bottom() || b.is_bottom()) return Element::bottom();
    if (a.items()[0] != b.items()[0]) return Element::bottom();
    auto ca = counts(a);
    const auto cb = counts(b);
    if (ca.size() != cb.size()) throw EncodingError("AgNVec arity mismatch");
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] += cb[i];
    return agnvec(a.items()[0], ca);
  };
  m.valid = [](const Element& a) { return !a.is_bottom(); };
  m.divides = [counts](const Element& a, const Element& b) {
    if (a.is_unit() || b.is_bottom()) return true;
    if (a.is_bottom() || b.is_unit()) return false;
    if (a.items()[0] != b.items()[0]) return false;
    const auto ca = counts(a);
    const auto cb = counts(b);
    for (std::size_t i = 0; i < ca.size(); ++i) {
      if (ca[i] > cb[i]) return false;
    }
    return true;
  };
  m.accepts = [members, k](const Element& a) {
    if (a.is_unit() || a.is_bottom()) return true;
    if (!a.is_ctor("agn") || a.items().size() != 2 || members->count(a.items()[0]) == 0) return false;
    const auto& v = a.items()[1];
    if (v.kind() != ElementKind::Tuple || v.items().size() != static_cast<std::size_t>(k)) return false;
    bool nonzero = false;
    for (const auto& c : v.items()) {
      if (c.kind() != ElementKind::Int || c.as_int() < 0) return false;
      nonzero = nonzero || c.as_int() > 0;
    }
    return nonzero;
  };
  std::vector<Element> els{Element::unit(), Element::bottom()};
  std::vector<std::int64_t> vec(static_cast<std::size_t>(k), 0);
  for (const auto& x : base) {
    // Odometer over [0, max_count]^k, skipping the zero vector.
    std::fill(vec.begin(), vec.end(), 0);
    while (true) {
      std::size_t i = 0;
      while (i < vec.size() && vec[i] == max_count) vec[i++] = 0;
      if (i == vec.size()) break;
      ++vec[i];
      els.push_back(agnvec(x, vec));
    }
  }
  m.enumerator = ElementEnumerator::bounded(std::move(els), "counts <= " + std::to_string(max_count));
  return m;
}

MonoidSpec build_nat(std::int64_t max) {
  MonoidSpec m;
  m.name = "Nat";
  m.unit = Element::integer(0);
  m.compose = [](const Element& a, const Element& b) {
    return Element::integer(a.as_int() + b.as_int());
  };
  m.valid = [](const Element&) { return true; };
  m.divides = [](const Element& a, const Element& b) { return a.as_int() <= b.as_int(); };
  m.accepts = [](const Element& a) { return a.kind() == ElementKind::Int && a.as_int() >= 0; };
  std::vector<Element> els;
  for (std::int64_t i = 0; i <= max; ++i) els.push_back(Element::integer(i));
  m.enumerator = ElementEnumerator::bounded(std::move(els), "n in [0, " + std::to_string(max) + "]");
  return m;
}

MonoidSpec build_int(std::int64_t min, std::int64_t max) {
  MonoidSpec m;
  m.name = "Int";
  m.unit = Element::integer(0);
  m.compose = [](const Element& a, const Element& b) {
    return Element::integer(a.as_int() + b.as_int());
  };
  m.valid = [](const Element&) { return true; };
  m.divides = [](const Element&, const Element&) { return true; };
  m.accepts = [](const Element& a) { return a.kind() == ElementKind::Int; };
  std::vector<Element> els;
  for (std::int64_t i = min; i <= max; ++i) els.push_back(Element::integer(i));
  els.push_back(Element::integer(0));
  m.enumerator = ElementEnumerator::bounded(
      std::move(els), "n in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
  return m;
}

MonoidSpec build_frac(std::int64_t denominator_bound, std::int64_t max) {
  MonoidSpec m;
  m.name = "Frac";
  m.unit = Element::integer(0);
  m.compose = [](const Element& a, const Element& b) {
    return Element::rational(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
  };
  m.valid = [](const Element&) { return true; };
  m.divides = [](const Element& a, const Element& b) {
    return static_cast<__int128>(a.num()) * b.den() <= static_cast<__int128>(b.num()) * a.den();
  };
  m.accepts = is_nonneg_number;
  std::vector<Element> els;
  for (std::int64_t d = 1; d <= denominator_bound; ++d) {
    for (std::int64_t n = 0; n <= max * d; ++n) {
      if (std::gcd(n, d) == 1 || (n == 0 && d == 1)) els.push_back(Element::rational(n, d));
    }
  }
  m.enumerator = ElementEnumerator::bounded(
      std::move(els), "q in [0, " + std::to_string(max) + "], denominator <= " +
                          std::to_string(denominator_bound));
  return m;
}

MonoidSpec build_trivial() {
  MonoidSpec m;
  m.name = "Trivial";
  m.unit = Element::unit();
  m.compose = [](const Element&, const Element&) { return Element::unit(); };
  m.valid = [](const Element&) { return true; };
  m.divides = [](const Element&, const Element&) { return true; };
  m.accepts = [](const Element& a) { return a.is_unit(); };
  m.enumerator = ElementEnumerator::exhaustive({Element::unit()});
  return m;
}

MonoidSpec build_product(std::vector<MonoidSpec> components) {
  if (components.empty()) throw EncodingError("product needs at least one component");
  auto comps = std::make_shared<const std::vector<MonoidSpec>>(components);
  MonoidSpec m;
  m.name = "(";
  std::vector<Element> units;
  bool exhaustive = true;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i > 0) m.name += " x ";
    m.name += components[i].name;
    units.push_back(components[i].unit);
    m.has_bottom = m.has_bottom || components[i].has_bottom;
    exhaustive = exhaustive && components[i].enumerator.is_exhaustive();
  }
  m.name += ")";
  m.unit = Element::tuple(units);
  m.compose = [comps](const Element& a, const Element& b) {
    if (a.is_bottom() || b.is_bottom()) return Element::bottom();
    const auto xs = a.items();
    const auto ys = b.items();
    if (xs.size() != comps->size() || ys.size() != comps->size()) {
      throw EncodingError("product arity mismatch");
    }
    std::vector<Element> out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Element c = (*comps)[i].compose(xs[i], ys[i]);
      if (c.is_bottom()) return Element::bottom();
      out.push_back(std::move(c));
    }
    return Element::tuple(std::move(out));
  };
  m.valid = [comps](const Element& a) {
    if (a.is_bottom()) return false;
    const auto xs = a.items();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(*comps)[i].valid(xs[i])) return false;
    }
    return true;
  };
  m.divides = [comps](const Element& a, const Element& b) {
    if (b.is_bottom()) return true;
    if (a.is_bottom()) return false;
    const auto xs = a.items();
    const auto ys = b.items();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!leq((*comps)[i], xs[i], ys[i])) return false;
    }
    return true;
  };
  m.accepts = [comps](const Element& a) {
    if (a.is_bottom()) return true;
    if (a.kind() != ElementKind::Tuple || a.items().size() != comps->size()) return false;
    for (std::size_t i = 0; i < comps->size(); ++i) {
      const auto& c = (*comps)[i];
      if (a.items()[i].is_bottom()) return false;
      if (c.accepts && !c.accepts(a.items()[i])) return false;
    }
    return true;
  };

  std::vector<Element> els;
  if (m.has_bottom) els.push_back(Element::bottom());
  std::vector<std::vector<Element>> pools;
  for (const auto& c : components) {
    std::vector<Element> pool;
    for (const auto& e : c.enumerator.elements()) {
      if (!e.is_bottom()) pool.push_back(e);
    }
    pools.push_back(std::move(pool));
  }
  std::vector<std::size_t> idx(pools.size(), 0);
  const bool any_empty = std::any_of(pools.begin(), pools.end(), [](const auto& p) { return p.empty(); });
  while (!any_empty) {
    std::vector<Element> items;
    for (std::size_t i = 0; i < pools.size(); ++i) items.push_back(pools[i][idx[i]]);
    els.push_back(Element::tuple(std::move(items)));
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == pools[i].size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  m.enumerator = make_enum(std::move(els), exhaustive, join_bounds(components));
  return m;
}

namespace {

Element make_finmap(std::vector<std::pair<Element, Element>> entries, const Element& vunit) {
  std::erase_if(entries, [&](const auto& kv) { return kv.second == vunit; });
  return Element::map(std::move(entries));
}

}  // namespace

MonoidSpec build_finmap(std::vector<Element> keys, MonoidSpec value) {
  auto v = std::make_shared<const MonoidSpec>(value);
  auto keyset = std::make_shared<const ElementSet>(keys.begin(), keys.end());
  MonoidSpec m;
  m.name = "Map" + list_name(keys) + "->" + value.name;
  m.unit = Element::map({});
  m.has_bottom = value.has_bottom;
  m.compose = [v](const Element& a, const Element& b) {
    if (a.is_bottom() || b.is_bottom()) return Element::bottom();
    const auto fa = a.map_flat();
    const auto fb = b.map_flat();
    std::vector<std::pair<Element, Element>> out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < fa.size() || j < fb.size()) {
      if (j >= fb.size() || (i < fa.size() && fa[i] < fb[j])) {
        out.emplace_back(fa[i], fa[i + 1]);
        i += 2;
      } else if (i >= fa.size() || fb[j] < fa[i]) {
        out.emplace_back(fb[j], fb[j + 1]);
        j += 2;
      } else {
        Element c = v->compose(fa[i + 1], fb[j + 1]);
        if (c.is_bottom()) return Element::bottom();
        out.emplace_back(fa[i], std::move(c));
        i += 2;
        j += 2;
      }
    }
    return make_finmap(std::move(out), v->unit);
  };
  m.valid = [v](const Element& a) {
    if (a.is_bottom()) return false;
    const auto fa = a.map_flat();
    for (std::size_t i = 1; i < fa.size(); i += 2) {
      if (!v->valid(fa[i])) return false;
    }
    return true;
  };
  m.divides = [v](const Element& a, const Element& b) {
    if (b.is_bottom()) return true;
    if (a.is_bottom()) return false;
    const auto fa = a.map_flat();
    for (std::size_t i = 0; i < fa.size(); i += 2) {
      const Element* bv = b.map_find(fa[i]);
      if (!leq(*v, fa[i + 1], bv ? *bv : v->unit)) return false;
    }
    // Keys only in b are fine: unit ≼ anything.
    return true;
  };
  m.accepts = [v, keyset](const Element& a) {
    if (a.is_bottom()) return true;
    if (a.kind() != ElementKind::Map) return false;
    const auto fa = a.map_flat();
    for (std::size_t i = 0; i < fa.size(); i += 2) {
      if (keyset->count(fa[i]) == 0) return false;
      if (fa[i + 1].is_bottom() || fa[i + 1] == v->unit) return false;
      if (v->accepts && !v->accepts(fa[i + 1])) return false;
    }
    return true;
  };

  std::vector<Element> pool;
  for (const auto& e : value.enumerator.elements()) {
    if (!e.is_bottom()) pool.push_back(e);
  }
  std::vector<Element> els;
  if (m.has_bottom) els.push_back(Element::bottom());
  std::vector<std::size_t> idx(keys.size(), 0);
  while (!pool.empty()) {
    std::vector<std::pair<Element, Element>> entries;
    for (std::size_t i = 0; i < keys.size(); ++i) entries.emplace_back(keys[i], pool[idx[i]]);
    els.push_back(make_finmap(std::move(entries), value.unit));
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == pool.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
  m.enumerator = make_enum(std::move(els), value.enumerator.is_exhaustive(),
                           value.enumerator.is_exhaustive() ? "" : value.enumerator.bound());
  return m;
}

MonoidSpec build_custom_table(const CustomTable& t) {
  struct PairHash {
    std::size_t operator()(const std::pair<Element, Element>& p) const {
      return hash_combine(p.first.hash(), p.second.hash());
    }
  };
  auto table = std::make_shared<std::unordered_map<std::pair<Element, Element>, Element, PairHash>>();
  for (const auto& row : t.table) {
    (*table)[{row[0], row[1]}] = row[2];
    if (t.symmetric) table->emplace(std::make_pair(row[1], row[0]), row[2]);
  }
  auto invalid = std::make_shared<const ElementSet>(t.invalid.begin(), t.invalid.end());
  auto members = std::make_shared<ElementSet>(t.elements.begin(), t.elements.end());
  members->insert(t.unit);
  members->insert(Element::bottom());
  const Element unit = t.unit;
  MonoidSpec m;
  m.name = t.name;
  m.unit = unit;
  m.has_bottom = true;
  m.compose = [table, unit](const Element& a, const Element& b) {
    if (a == unit) return b;
    if (b == unit) return a;
    auto it = table->find({a, b});
    return it == table->end() ? Element::bottom() : it->second;
  };
  m.valid = [invalid](const Element& a) { return !a.is_bottom() && invalid->count(a) == 0; };
  m.accepts = [members](const Element& a) { return members->count(a) > 0; };
  std::vector<Element> els(members->begin(), members->end());
  m.enumerator = ElementEnumerator::exhaustive(std::move(els));
  return m;
}

}  // namespace sharecheck
