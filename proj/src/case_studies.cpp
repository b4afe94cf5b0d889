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

#include "sharecheck/case_studies.hpp"

#include <functional>
#include <stdexcept>
#include <string>

#include "sharecheck/combinators.hpp"
#include "sharecheck/registry.hpp"

namespace sharecheck {

using nlohmann::json;

namespace {

std::string num(std::int64_t v) { return std::to_string(v); }

ScriptAction act(std::string rule, Ref instance, Ref region = Ref::lit("lock"),
                 std::map<std::string, ArgSource> args = {}) {
  ScriptAction a;
  a.rule = std::move(rule);
  a.instance = std::move(instance);
  a.region = std::move(region);
  a.args = std::move(args);
  return a;
}

ScriptEntry on(std::string label, std::vector<ScriptAction> actions) {
  ScriptEntry e;
  e.label = std::move(label);
  e.actions = std::move(actions);
  return e;
}

ScriptEntry when(ScriptEntry e, Element result) {
  e.when_result = std::move(result);
  return e;
}

ScriptEntry marking(ScriptEntry e, Ref mark) {
  e.mark = std::move(mark);
  return e;
}

ScriptEntry unmarking(ScriptEntry e, Ref mark) {
  e.unmark = std::move(mark);
  return e;
}

// Lock code over location expressions `exc` and `rc`; `arg` is the
// parameter the functions take.
struct LockCode {
  std::string lock_exc;
  std::string unlock_exc;
  std::string lock_shared;
  std::string unlock_shared;
};

LockCode single_lock(const std::string& arg, const std::string& exc, const std::string& rc) {
  LockCode c;
  c.lock_exc = "(fun (" + arg + ") (seq (do ok (@ \"exc-cas\" (cas " + exc + " false true)) ok)" +
               " (do r (@ \"exc-rc\" (load " + rc + ")) (= r 0)) ()))";
  c.unlock_exc = "(fun (" + arg + ") (@ \"exc-release\" (store " + exc + " false)))";
  c.lock_shared = "(fun (" + arg + ") (seq (do e (seq (@ \"sh-inc\" (faa " + rc + " 1))" +
                  " (let e (@ \"sh-check\" (load " + exc + "))" + " (seq (when e (@ \"sh-retry\" (faa " + rc +
                  " -1))) e))) (not e)) ()))";
  c.unlock_shared = "(fun (" + arg + ") (@ \"sh-release\" (faa " + rc + " -1)))";
  return c;
}

std::string lets(const std::vector<std::pair<std::string, std::string>>& defs, const std::string& body) {
  std::string out;
  for (const auto& [name, value] : defs) out += "(let " + name + " " + value + "\n";
  out += body;
  out += std::string(defs.size(), ')');
  return out;
}

std::set<std::int64_t> subset_sums(std::int64_t base, const std::vector<std::int64_t>& deltas) {
  std::set<std::int64_t> sums = {base};
  for (const auto d : deltas) {
    std::set<std::int64_t> next = sums;
    for (const auto s : sums) next.insert(s + d);
    sums = std::move(next);
  }
  return sums;
}

json element_array(const std::set<std::int64_t>& xs) {
  json a = json::array();
  for (const auto x : xs) a.push_back(Element::integer(x).to_string());
  return a;
}

}  // namespace

Scenario build_rwlock_scenario(const RwLockScenarioParams& p) {
  if (p.counters < 1) throw std::invalid_argument("counters must be at least 1");
  for (const int k : p.reader_counters) {
    if (k < 0 || k >= p.counters) throw std::invalid_argument("reader counter index outside [0, counters)");
  }
  const bool multi = p.counters > 1;
  const int K = p.counters;
  Scenario s;
  s.name = !p.locks ? "rwlock-unlocked" : multi ? "rwlock-multi" : "rwlock";
  s.description = std::to_string(p.writer_deltas.size()) + " writer(s) and " +
                  std::to_string(p.reader_counters.size()) + " reader(s) around one cell, " + std::to_string(K) +
                  " counter(s)" + (p.locks ? "" : ", locks removed");
  s.heap.push_back({"exc", "false"});
  if (multi) {
    for (int k = 0; k < K; ++k) s.heap.push_back({"rc" + std::to_string(k), "0"});
  } else {
    s.heap.push_back({"rc", "0"});
  }
  s.heap.push_back({"cell", num(p.initial)});
  for (std::size_t j = 0; j < p.reader_counters.size(); ++j) s.heap.push_back({"seen" + std::to_string(j), "-1"});

  // Writers take the exclusive lock, readers the shared lock.
  std::string lock_exc;
  if (multi) {
    lock_exc = "(fun (u) (seq (do ok (@ \"exc-cas\" (cas @exc false true)) ok)";
    for (int k = 0; k < K; ++k) {
      lock_exc += " (do r (@ \"exc-rc" + std::to_string(k) + "\" (load @rc" + std::to_string(k) + ")) (= r 0))";
    }
    lock_exc += " ()))";
  } else {
    lock_exc = single_lock("u", "@exc", "@rc").lock_exc;
  }
  const std::string unlock_exc = single_lock("u", "@exc", "@rc").unlock_exc;
  const auto shared_for = [&](int k) {
    if (!multi) return single_lock("u", "@exc", "@rc");
    const std::string ks = std::to_string(k);
    LockCode c;
    const std::string rc = "@rc" + ks;
    c.lock_shared = "(fun (u) (seq (do e (seq (@ \"sh-inc" + ks + "\" (faa " + rc + " 1))" +
                    " (let e (@ \"sh-check" + ks + "\" (load @exc))" + " (seq (when e (@ \"sh-retry" + ks +
                    "\" (faa " + rc + " -1))) e))) (not e)) ()))";
    c.unlock_shared = "(fun (u) (@ \"sh-release" + ks + "\" (faa " + rc + " -1)))";
    return c;
  };

  for (std::size_t w = 0; w < p.writer_deltas.size(); ++w) {
    const std::string body = "(let x (@ \"w-read\" (load-na @cell)) (@ \"w-write\" (store-na @cell (+ x " +
                             num(p.writer_deltas[w]) + "))))";
    std::string prog;
    if (p.locks) {
      prog = lets({{"lock_exc", lock_exc}, {"unlock_exc", unlock_exc}},
                  "(seq (lock_exc ()) " + body + " (unlock_exc ()))");
    } else {
      prog = body;
    }
    s.threads.push_back({"writer" + std::to_string(w), prog});
  }
  for (std::size_t j = 0; j < p.reader_counters.size(); ++j) {
    const std::string body = "(let v (@ \"sh-read\" (load-na @cell)) (store @seen" + std::to_string(j) + " v))";
    std::string prog;
    if (p.locks) {
      const LockCode c = shared_for(p.reader_counters[j]);
      prog = lets({{"lock_shared", c.lock_shared}, {"unlock_shared", c.unlock_shared}},
                  "(seq (lock_shared ()) " + body + " (unlock_shared ()))");
    } else {
      prog = body;
    }
    s.threads.push_back({"reader" + std::to_string(j), prog});
  }

  const std::int64_t final_value = [&] {
    std::int64_t v = p.initial;
    for (const auto d : p.writer_deltas) v += d;
    return v;
  }();
  const auto reachable = subset_sums(p.initial, p.writer_deltas);
  s.outcome_cells.push_back("cell");
  for (std::size_t j = 0; j < p.reader_counters.size(); ++j) s.outcome_cells.push_back("seen" + std::to_string(j));

  if (!p.locks) {
    s.expect = Expectation::StuckReachable;
    return s;
  }

  const Ref rw = Ref::lit("rw");
  const Element x0 = Element::integer(p.initial);
  InstanceDecl inst;
  inst.id = "rw";
  if (multi) {
    inst.protocol = {{"builtin", "rwlock-multi"}, {"params", {{"k", K}, {"values", element_array(reachable)}}}};
    inst.fragments["lock"] = rwm_fields(false, std::vector<std::int64_t>(static_cast<std::size_t>(K), 0), x0);
    s.rule_sets.push_back({{"set", "rwlock-multi"}, {"params", {{"k", K}}}});
  } else {
    inst.protocol = {{"builtin", "rwlock"}, {"params", {{"values", element_array(reachable)}}}};
    inst.fragments["lock"] = rw_fields(false, 0, x0);
    s.rule_sets.push_back({{"set", "rwlock"}});
  }
  inst.stored = ex(x0);
  s.instances.push_back(inst);

  const std::string pre = multi ? "xrw-" : "rw-";
  const Element yes = Element::boolean(true);
  const Element no = Element::boolean(false);
  const Element zero = Element::integer(0);
  if (!p.writer_deltas.empty()) {
    s.script.push_back(when(on("exc-cas", {act(pre + "exc-begin", rw)}), yes));
    if (multi) {
      for (int k = 0; k < K; ++k) {
        std::vector<ScriptAction> as = {act("xrw-exc-progress", rw)};
        if (k == K - 1) as.push_back(act("xrw-exc-acquire", rw));
        ScriptEntry e = when(on("exc-rc" + std::to_string(k), as), zero);
        if (k == K - 1) e = marking(e, Ref::lit("exclusive"));
        s.script.push_back(e);
      }
    } else {
      s.script.push_back(marking(when(on("exc-rc", {act("rw-exc-acquire", rw)}), zero), Ref::lit("exclusive")));
    }
    s.script.push_back(unmarking(
        on("exc-release", {act(pre + "exc-release", rw, Ref::lit("lock"), {{"x", ArgSource::heap_at(Ref::lit("cell"))}})}),
        Ref::lit("exclusive")));
  }
  std::set<int> used(p.reader_counters.begin(), p.reader_counters.end());
  for (const int k : used) {
    const std::string ks = multi ? std::to_string(k) : "";
    std::map<std::string, ArgSource> args;
    if (multi) args["k"] = ArgSource::lit(Element::integer(k));
    s.script.push_back(on("sh-inc" + ks, {act(pre + "shared-begin", rw, Ref::lit("lock"), args)}));
    s.script.push_back(
        marking(when(on("sh-check" + ks, {act(pre + "shared-acquire", rw, Ref::lit("lock"), args)}), no),
                Ref::lit("shared")));
    s.script.push_back(on("sh-retry" + ks, {act(pre + "shared-retry", rw, Ref::lit("lock"), args)}));
    s.script.push_back(unmarking(on("sh-release" + ks, {act(pre + "shared-release", rw, Ref::lit("lock"), args)}),
                                 Ref::lit("shared")));
  }
  if (!p.reader_counters.empty()) s.script.push_back(on("sh-read", {act(pre + "shared-guard", rw)}));

  s.properties.push_back({"ghost-invariant", "ghost-invariant", json::object()});
  s.properties.push_back({"mutual-exclusion", "mutual-exclusion", {{"exclusive", "exclusive"}, {"shared", "shared"}}});
  s.properties.push_back(
      {"reader-agreement", "reader-agreement",
       {{"locks", json::array({{{"instance", "rw"}, {"region", "lock"}, {"cell", "cell"}}})}}});
  if (!p.reader_counters.empty()) {
    s.properties.push_back({"guarded-read", "guarded-read", {{"label", "sh-read"}, {"instance", "rw"}}});
  }
  s.properties.push_back({"final-cell", "heap-predicate",
                          {{"cell", "cell"}, {"values", json::array({Element::integer(final_value).to_string()})},
                           {"when", "terminal"}}});
  // Readers see a value some prefix of the writers produced, never a torn one.
  for (std::size_t j = 0; j < p.reader_counters.size(); ++j) {
    s.properties.push_back({"reader" + std::to_string(j) + "-value", "heap-predicate",
                            {{"cell", "seen" + std::to_string(j)}, {"values", element_array(reachable)},
                             {"when", "terminal"}}});
  }
  return s;
}

HashTableScenarioParams collision_params() {
  HashTableScenarioParams p;
  p.table.length = 3;
  p.table.keys = {Element::integer(0), Element::integer(1)};
  p.table.values = {Element::integer(1), Element::integer(2)};
  p.table.hash = {0, 0};
  p.threads = {{HtOp::update(0, 1), HtOp::update(1, 2)}, {HtOp::query(0)}};
  return p;
}

namespace {

std::string nested_array(const std::string& prefix, std::int64_t n) {
  std::string out;
  for (std::int64_t i = 0; i < n; ++i) out += "(pair @" + prefix + num(i) + " ";
  out += "()";
  out += std::string(static_cast<std::size_t>(n), ')');
  return out;
}

}  // namespace

Scenario build_hashtable_scenario(const HashTableScenarioParams& p) {
  const auto& t = p.table;
  std::vector<std::int64_t> keys;
  for (const auto& k : t.keys) {
    if (k.kind() != ElementKind::Int) throw std::invalid_argument("hash-table scenario keys must be integers");
    keys.push_back(k.as_int());
  }
  for (const auto& v : t.values) {
    if (v.kind() != ElementKind::Int) throw std::invalid_argument("hash-table scenario values must be integers");
  }
  // The thread that updates a key owns its map fragment.
  std::map<std::int64_t, std::string> key_owner;
  for (std::size_t th = 0; th < p.threads.size(); ++th) {
    for (const auto& op : p.threads[th]) {
      if (op.kind != HtOp::Kind::Update) continue;
      const auto [it, fresh] = key_owner.emplace(op.key, "t" + std::to_string(th));
      if (!fresh && it->second != "t" + std::to_string(th)) {
        throw std::invalid_argument("two threads update key " + num(op.key) + "; each key needs one updating thread");
      }
    }
  }
  const std::int64_t L = t.length;
  Scenario s;
  s.name = "hashtable";
  s.description = "linear probing over " + num(L) + " slots, one reader-writer lock per slot";
  for (std::int64_t i = 0; i < L; ++i) {
    s.heap.push_back({"slot" + num(i), "(none)"});
    s.heap.push_back({"exc" + num(i), "false"});
    s.heap.push_back({"rc" + num(i), "0"});
  }
  std::vector<std::string> result_cells;
  for (std::size_t th = 0; th < p.threads.size(); ++th) {
    for (std::size_t j = 0; j < p.threads[th].size(); ++j) {
      if (p.threads[th][j].kind != HtOp::Kind::Query) continue;
      const std::string cell = "res" + std::to_string(th) + "_" + std::to_string(j);
      s.heap.push_back({cell, "()"});
      result_cells.push_back(cell);
    }
  }

  std::string hash_fn = "(abort)";
  for (std::size_t i = keys.size(); i-- > 0;) {
    hash_fn = "(if (= k " + num(keys[i]) + ") " + num(t.hash[i]) + " " + hash_fn + ")";
  }
  const LockCode lc = single_lock("i", "(nth excs i)", "(nth rcs i)");
  const std::string L_s = num(L);
  const std::string query_iter =
      "(rec query_iter (k i) (if (<= " + L_s + " i) (abort) (seq (lock_shared i)"
      " (let r (case (@ \"q-read\" (load-na (nth slots i))) (none (none))"
      " (some e (if (= k (fst e)) (some (snd e)) (query_iter k (+ i 1)))))"
      " (seq (unlock_shared i) r)))))";
  const std::string update_iter =
      "(rec update_iter (k v i) (if (<= " + L_s + " i) (abort) (seq (lock_exc i)"
      " (case (@ \"u-read\" (load-na (nth slots i)))"
      " (none (@ \"u-write\" (store-na (nth slots i) (some (pair k v)))))"
      " (some e (if (= k (fst e)) (@ \"u-write\" (store-na (nth slots i) (some (pair k v))))"
      " (update_iter k v (+ i 1)))))"
      " (unlock_exc i))))";

  for (std::size_t th = 0; th < p.threads.size(); ++th) {
    std::vector<std::string> steps;
    bool queries = false;
    bool updates = false;
    for (std::size_t j = 0; j < p.threads[th].size(); ++j) {
      const HtOp& op = p.threads[th][j];
      if (op.kind == HtOp::Kind::Query) {
        queries = true;
        steps.push_back("(store @res" + std::to_string(th) + "_" + std::to_string(j) + " (query_iter " + num(op.key) +
                        " (H " + num(op.key) + ")))");
      } else {
        updates = true;
        steps.push_back("(update_iter " + num(op.key) + " " + num(op.value) + " (H " + num(op.key) + "))");
      }
    }
    std::string body;
    if (steps.empty()) {
      body = "()";
    } else if (steps.size() == 1) {
      body = steps[0];
    } else {
      body = "(seq";
      for (const auto& st : steps) body += " " + st;
      body += ")";
    }
    std::vector<std::pair<std::string, std::string>> defs = {
        {"slots", nested_array("slot", L)},
        {"excs", nested_array("exc", L)},
        {"rcs", nested_array("rc", L)},
        {"H", "(fun (k) " + hash_fn + ")"},
    };
    if (updates) {
      defs.push_back({"lock_exc", lc.lock_exc});
      defs.push_back({"unlock_exc", lc.unlock_exc});
      defs.push_back({"update_iter", update_iter});
    }
    if (queries) {
      defs.push_back({"lock_shared", lc.lock_shared});
      defs.push_back({"unlock_shared", lc.unlock_shared});
      defs.push_back({"query_iter", query_iter});
    }
    s.threads.push_back({"t" + std::to_string(th), lets(defs, body)});
  }

  // Ghost state: one rwlock per slot whose protected value is the slot
  // content, and the table instance whose slot fragments the locks hold.
  std::vector<Element> slot_values = {none()};
  for (const auto& k : t.keys) {
    for (const auto& v : t.values) slot_values.push_back(some(ht_entry(k, v)));
  }
  json lock_values = json::array();
  for (const auto& v : slot_values) lock_values.push_back(v.to_string());
  const json lock_protocol = {
      {"builtin", "rwlock"},
      {"params", {{"values", lock_values}, {"rc_min", -1}, {"rc_max", 2}, {"pending_max", 2}, {"count_max", 2}}}};
  std::map<std::string, std::string> lock_of;
  std::map<std::string, std::string> slot_region_of;
  std::map<std::string, std::string> slot_cell_of;
  std::vector<std::string> slot_names;
  std::vector<std::string> exc_names;
  std::vector<std::string> rc_names;
  std::vector<std::string> regions;
  json agreement = json::array();
  for (std::int64_t i = 0; i < L; ++i) {
    const std::string lock = "lock" + num(i);
    for (const auto& loc : {"slot" + num(i), "exc" + num(i), "rc" + num(i)}) {
      lock_of[loc] = lock;
      slot_region_of[loc] = "slot" + num(i);
      slot_cell_of[loc] = "slot" + num(i);
    }
    slot_names.push_back("slot" + num(i));
    exc_names.push_back("exc" + num(i));
    rc_names.push_back("rc" + num(i));
    regions.push_back("slot" + num(i));
    InstanceDecl li;
    li.id = lock;
    li.protocol = lock_protocol;
    li.fragments["lock"] = rw_fields(false, 0, none());
    li.stored = ex(none());
    s.instances.push_back(li);
    agreement.push_back({{"instance", lock}, {"region", "lock"}, {"cell", "slot" + num(i)}});
  }
  const json table_json = to_json(t);
  InstanceDecl ht;
  ht.id = "ht";
  ht.protocol = {{"builtin", "hashtable"}, {"params", table_json}};
  const MonoidSpec hm = build_hashtable_monoid(t).spec;
  std::map<std::string, Element> owned;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto it = key_owner.find(keys[i]);
    const std::string owner = it == key_owner.end() ? "keys" : it->second;
    auto& f = owned.try_emplace(owner, hm.unit).first->second;
    f = hm.compose(f, ht_m(t.keys[i], none()));
  }
  for (std::int64_t i = 0; i < L; ++i) owned["slot" + num(i)] = ht_slot(i, none());
  ht.fragments = owned;
  ht.stored = Element::unit();
  s.instances.push_back(ht);
  s.rule_sets.push_back({{"set", "rwlock"}});
  s.rule_sets.push_back({{"set", "hashtable"}, {"params", table_json}});

  const Ref lock = Ref::loc_table(lock_of);
  const Ref slot_region = Ref::loc_table(slot_region_of);
  std::map<std::string, std::string> exclusive_mark;
  std::map<std::string, std::string> shared_mark;
  for (const auto& [loc, l] : lock_of) {
    exclusive_mark[loc] = "exclusive@" + l;
    shared_mark[loc] = "shared@" + l;
  }
  const Element yes = Element::boolean(true);
  const Element no = Element::boolean(false);
  s.script.push_back(when(on("exc-cas", {act("rw-exc-begin", lock)}), yes));
  s.script.push_back(marking(
      when(on("exc-rc", {act("rw-exc-acquire", lock), act("ht-take-slot", Ref::lit("ht"), slot_region)}),
           Element::integer(0)),
      Ref::loc_table(exclusive_mark)));
  {
    ScriptEntry w = on("u-write", {act("ht-update", Ref::lit("ht"), Ref::lit(""),
                                       {{"index", ArgSource::loc_index(slot_names)}, {"entry", ArgSource::written()}})});
    w.when_phase = Phase::End;
    s.script.push_back(w);
  }
  s.script.push_back(unmarking(
      on("exc-release", {act("rw-exc-release", lock, Ref::lit("lock"),
                             {{"x", ArgSource::heap_at(Ref::loc_table(slot_cell_of))}}),
                         act("ht-return-slot", Ref::lit("ht"), slot_region, {{"index", ArgSource::loc_index(exc_names)}})}),
      Ref::loc_table(exclusive_mark)));
  s.script.push_back(on("sh-inc", {act("rw-shared-begin", lock)}));
  s.script.push_back(marking(when(on("sh-check", {act("rw-shared-acquire", lock)}), no), Ref::loc_table(shared_mark)));
  s.script.push_back(on("sh-retry", {act("rw-shared-retry", lock)}));
  s.script.push_back(unmarking(on("sh-release", {act("rw-shared-release", lock)}), Ref::loc_table(shared_mark)));
  s.script.push_back(on("q-read", {act("rw-shared-guard", lock)}));
  // Drop script entries whose labels no thread contains.
  std::erase_if(s.script, [&](const ScriptEntry& e) {
    for (const auto& th : s.threads) {
      if (th.program.find("\"" + e.label + "\"") != std::string::npos) return false;
    }
    return true;
  });

  json allowed = json::array();
  for (const auto& o : sequential_oracle(p.threads)) allowed.push_back(oracle_outcome_json(o));
  s.properties.push_back({"ghost-invariant", "ghost-invariant", json::object()});
  s.properties.push_back({"mutual-exclusion", "mutual-exclusion", {{"exclusive", "exclusive"}, {"shared", "shared"}}});
  s.properties.push_back({"reader-agreement", "reader-agreement", {{"locks", agreement}}});
  s.properties.push_back({"guarded-read", "guarded-read", {{"label", "q-read"}, {"instance", {{"by_loc", lock_of}}}}});
  s.properties.push_back({"table-valid", "ht-valid",
                          {{"instance", "ht"}, {"table", table_json}, {"slots", slot_names}, {"regions", regions}}});
  s.properties.push_back(
      {"linearizable", "ht-oracle", {{"instance", "ht"}, {"results", result_cells}, {"allowed", allowed}}});
  s.outcome_cells = result_cells;
  for (const auto& n : slot_names) s.outcome_cells.push_back(n);
  return s;
}

Scenario build_abort_scenario() {
  HashTableScenarioParams p;
  p.table.length = 1;
  p.table.keys = {Element::integer(0), Element::integer(1)};
  p.table.values = {Element::integer(1)};
  p.table.hash = {0, 0};
  p.threads = {{HtOp::update(0, 1), HtOp::update(1, 1)}};
  Scenario s = build_hashtable_scenario(p);
  s.name = "hashtable-overflow";
  s.description = "two colliding keys in a one-slot table: the second probe runs off the end";
  s.expect = Expectation::StuckReachable;
  // The terminal oracle is vacuous here; the run ends stuck.
  std::erase_if(s.properties, [](const PropertyDecl& d) { return d.kind == "ht-oracle"; });
  return s;
}

std::set<OracleOutcome> sequential_oracle(const std::vector<std::vector<HtOp>>& threads) {
  std::set<OracleOutcome> out;
  std::vector<std::size_t> pc(threads.size(), 0);
  std::map<std::int64_t, std::int64_t> table;
  // results[t][j] for query j of thread t
  std::vector<std::vector<std::optional<std::int64_t>>> results(threads.size());
  for (std::size_t t = 0; t < threads.size(); ++t) results[t].resize(threads[t].size());
  std::function<void()> go = [&] {
    bool any = false;
    for (std::size_t t = 0; t < threads.size(); ++t) {
      if (pc[t] == threads[t].size()) continue;
      any = true;
      const HtOp& op = threads[t][pc[t]];
      const auto saved_table = table;
      const auto saved_result = results[t][pc[t]];
      if (op.kind == HtOp::Kind::Update) {
        table[op.key] = op.value;
      } else {
        const auto it = table.find(op.key);
        results[t][pc[t]] = it == table.end() ? std::nullopt : std::optional<std::int64_t>(it->second);
      }
      ++pc[t];
      go();
      --pc[t];
      table = saved_table;
      results[t][pc[t]] = saved_result;
    }
    if (!any) {
      OracleOutcome o;
      for (std::size_t t = 0; t < threads.size(); ++t) {
        for (std::size_t j = 0; j < threads[t].size(); ++j) {
          if (threads[t][j].kind == HtOp::Kind::Query) o.results.push_back(results[t][j]);
        }
      }
      o.table = table;
      out.insert(std::move(o));
    }
  };
  go();
  return out;
}

json oracle_outcome_json(const OracleOutcome& o) {
  json results = json::array();
  for (const auto& r : o.results) results.push_back(r ? some(Element::integer(*r)).to_string() : none().to_string());
  std::vector<std::pair<Element, Element>> entries;
  for (const auto& [k, v] : o.table) entries.emplace_back(Element::integer(k), Element::integer(v));
  return json{{"results", results}, {"map", Element::map(std::move(entries)).to_string()}};
}

}  // namespace sharecheck
