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

#include "sharecheck/registry.hpp"

#include <functional>
#include <set>

#include "sharecheck/combinators.hpp"

namespace sharecheck {

using nlohmann::json;

Element element_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return parse_element(j.get<std::string>());
    if (j.is_boolean()) return Element::boolean(j.get<bool>());
    if (j.is_number_integer()) return Element::integer(j.get<std::int64_t>());
  } catch (const std::exception& e) {
    throw SchemaError(where + ": " + e.what());
  }
  throw SchemaError(where + ": expected an element (string, integer or boolean)");
}

json element_to_json(const Element& e) { return e.to_string(); }

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (j.is_null()) return;
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.contains(k)) throw SchemaError(where + ": unknown field '" + k + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (j.is_null() || !j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw SchemaError(where + "." + key + ": wrong type");
  }
}

void read_elements(const json& j, const char* key, std::vector<Element>& out, const std::string& where) {
  if (j.is_null() || !j.contains(key)) return;
  const json& a = j.at(key);
  if (!a.is_array()) throw SchemaError(where + "." + key + ": expected an array");
  out.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(element_from_json(a[i], where + "." + key + "[" + std::to_string(i) + "]"));
  }
}

}  // namespace

FractionalParams fractional_params_from_json(const json& j) {
  FractionalParams p;
  const std::string w = "fractional.params";
  check_keys(j, {"denominator_bound", "max", "storage_max"}, w);
  read(j, "denominator_bound", p.denominator_bound, w);
  read(j, "max", p.max, w);
  read(j, "storage_max", p.storage_max, w);
  return p;
}

CountingParams counting_params_from_json(const json& j) {
  CountingParams p;
  const std::string w = "counting.params";
  check_keys(j, {"r_min", "r_max", "c_max", "storage_max", "carrier_constraint"}, w);
  read(j, "r_min", p.r_min, w);
  read(j, "r_max", p.r_max, w);
  read(j, "c_max", p.c_max, w);
  read(j, "storage_max", p.storage_max, w);
  read(j, "carrier_constraint", p.carrier_constraint, w);
  return p;
}

RwLockParams rwlock_params_from_json(const json& j) {
  RwLockParams p;
  const std::string w = "rwlock.params";
  check_keys(j, {"values", "rc_min", "rc_max", "pending_max", "count_max"}, w);
  read_elements(j, "values", p.values, w);
  read(j, "rc_min", p.rc_min, w);
  read(j, "rc_max", p.rc_max, w);
  read(j, "pending_max", p.pending_max, w);
  read(j, "count_max", p.count_max, w);
  return p;
}

RwLockMultiParams rwlock_multi_params_from_json(const json& j) {
  RwLockMultiParams p;
  const std::string w = "rwlock-multi.params";
  check_keys(j, {"k", "values", "rc_min", "rc_max", "pending_max", "count_max"}, w);
  read(j, "k", p.k, w);
  read_elements(j, "values", p.values, w);
  read(j, "rc_min", p.rc_min, w);
  read(j, "rc_max", p.rc_max, w);
  read(j, "pending_max", p.pending_max, w);
  read(j, "count_max", p.count_max, w);
  if (p.k < 1) throw SchemaError(w + ".k: must be at least 1");
  return p;
}

FracHeapParams frac_heap_params_from_json(const json& j) {
  FracHeapParams p;
  const std::string w = "frac-heap.params";
  check_keys(j, {"cells", "denominator_bound", "max", "storage_max"}, w);
  read_elements(j, "cells", p.cells, w);
  read(j, "denominator_bound", p.denominator_bound, w);
  read(j, "max", p.max, w);
  read(j, "storage_max", p.storage_max, w);
  return p;
}

HashTableParams hashtable_params_from_json(const json& j) {
  HashTableParams p;
  const std::string w = "hashtable.params";
  check_keys(j, {"length", "keys", "values", "hash"}, w);
  read(j, "length", p.length, w);
  read_elements(j, "keys", p.keys, w);
  read_elements(j, "values", p.values, w);
  read(j, "hash", p.hash, w);
  if (p.hash.size() != p.keys.size()) throw SchemaError(w + ".hash: needs one entry per key");
  for (const auto h : p.hash) {
    if (h < 0 || h >= p.length) throw SchemaError(w + ".hash: " + std::to_string(h) + " is outside [0, length)");
  }
  return p;
}

json to_json(const HashTableParams& p) {
  json keys = json::array();
  json values = json::array();
  for (const auto& k : p.keys) keys.push_back(element_to_json(k));
  for (const auto& v : p.values) values.push_back(element_to_json(v));
  return json{{"length", p.length}, {"keys", keys}, {"values", values}, {"hash", p.hash}};
}

namespace {

BuiltProtocol table_protocol(const json& j) {
  const std::string w = "table.params";
  check_keys(j, {"name", "unit", "elements", "table", "symmetric", "invalid"}, w);
  if (!j.is_object()) throw SchemaError(w + ": expected an object");
  CustomTable t;
  read(j, "name", t.name, w);
  if (j.contains("unit")) t.unit = element_from_json(j.at("unit"), w + ".unit");
  read_elements(j, "elements", t.elements, w);
  read_elements(j, "invalid", t.invalid, w);
  read(j, "symmetric", t.symmetric, w);
  if (j.contains("table")) {
    const json& rows = j.at("table");
    if (!rows.is_array()) throw SchemaError(w + ".table: expected an array");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string rw = w + ".table[" + std::to_string(i) + "]";
      if (!rows[i].is_array() || rows[i].size() != 3) throw SchemaError(rw + ": expected [a, b, a.b]");
      t.table.push_back({element_from_json(rows[i][0], rw), element_from_json(rows[i][1], rw),
                         element_from_json(rows[i][2], rw)});
    }
  }
  BuiltProtocol b;
  b.spec = pcm_as_protocol(build_custom_table(t));
  return b;
}

using Builder = std::function<BuiltProtocol(const json&)>;

const std::vector<std::pair<std::string, Builder>>& builders() {
  static const std::vector<std::pair<std::string, Builder>> table = {
      {"fractional", [](const json& p) { return build_fractional(fractional_params_from_json(p)); }},
      {"counting", [](const json& p) { return build_counting(counting_params_from_json(p)); }},
      {"forever",
       [](const json& p) {
         check_keys(p, {}, "forever.params");
         return build_forever();
       }},
      {"rwlock", [](const json& p) { return build_rwlock(rwlock_params_from_json(p)); }},
      {"rwlock-multi", [](const json& p) { return build_rwlock_multi(rwlock_multi_params_from_json(p)); }},
      {"frac-heap", [](const json& p) { return build_frac_heap(frac_heap_params_from_json(p)); }},
      {"hashtable",
       [](const json& p) {
         BuiltMonoid m = build_hashtable_monoid(hashtable_params_from_json(p));
         BuiltProtocol b;
         b.spec = pcm_as_protocol(m.spec);
         b.named = std::move(m.named);
         return b;
       }},
      {"table", table_protocol},
  };
  return table;
}

}  // namespace

std::vector<std::string> builtin_protocol_names() {
  std::vector<std::string> out;
  for (const auto& [name, b] : builders()) out.push_back(name);
  return out;
}

BuiltProtocol build_protocol(const json& decl) {
  if (!decl.is_object()) throw SchemaError("protocol: expected an object");
  check_keys(decl, {"builtin", "params"}, "protocol");
  if (!decl.contains("builtin") || !decl.at("builtin").is_string()) {
    throw SchemaError("protocol.builtin: missing or not a string");
  }
  const std::string name = decl.at("builtin").get<std::string>();
  const json params = decl.value("params", json::object());
  for (const auto& [n, b] : builders()) {
    if (n == name) return b(params);
  }
  std::string known;
  for (const auto& n : builtin_protocol_names()) known += (known.empty() ? "" : ", ") + n;
  throw SchemaError("protocol.builtin: unknown protocol '" + name + "' (known: " + known + ")");
}

RuleSet build_rule_set(const json& decl) {
  if (!decl.is_object()) throw SchemaError("rules: expected an object");
  check_keys(decl, {"set", "params"}, "rules");
  const std::string name = decl.value("set", "");
  const json params = decl.value("params", json::object());
  if (name == "rwlock") return rwlock_rules();
  if (name == "rwlock-multi") {
    int k = 2;
    check_keys(params, {"k"}, "rules.params");
    read(params, "k", k, "rules.params");
    if (k < 1) throw SchemaError("rules.params.k: must be at least 1");
    return rwlock_multi_rules(k);
  }
  if (name == "hashtable") return hashtable_rules(hashtable_params_from_json(params));
  throw SchemaError("rules.set: unknown rule set '" + name + "' (known: rwlock, rwlock-multi, hashtable)");
}

}  // namespace sharecheck
