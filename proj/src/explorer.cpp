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

#include "sharecheck/explorer.hpp"

#include <deque>
#include <functional>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "sharecheck/combinators.hpp"
#include "sharecheck/registry.hpp"

namespace sharecheck {

using nlohmann::json;

Ref Ref::lit(std::string s) {
  Ref r;
  r.text = std::move(s);
  return r;
}

Ref Ref::self() {
  Ref r;
  r.kind = Kind::Self;
  return r;
}

Ref Ref::loc_table(std::map<std::string, std::string> table) {
  Ref r;
  r.kind = Kind::ByLoc;
  r.by_loc = std::move(table);
  return r;
}

ArgSource ArgSource::lit(Element e) {
  ArgSource a;
  a.literal = std::move(e);
  return a;
}

ArgSource ArgSource::heap_at(Ref r) {
  ArgSource a;
  a.kind = Kind::Heap;
  a.heap = std::move(r);
  return a;
}

ArgSource ArgSource::result() {
  ArgSource a;
  a.kind = Kind::Result;
  return a;
}

ArgSource ArgSource::written() {
  ArgSource a;
  a.kind = Kind::Written;
  return a;
}

ArgSource ArgSource::loc_index(std::vector<std::string> names) {
  ArgSource a;
  a.kind = Kind::LocIndex;
  a.names = std::move(names);
  return a;
}

std::string to_string(Expectation e) { return e == Expectation::NoStuck ? "no-stuck" : "stuck-reachable"; }

std::optional<Expectation> expectation_from_string(std::string_view s) {
  if (s == "no-stuck") return Expectation::NoStuck;
  if (s == "stuck-reachable") return Expectation::StuckReachable;
  return std::nullopt;
}

// ------------------------------------------------------------------ JSON

namespace {

json ref_to_json(const Ref& r) {
  switch (r.kind) {
    case Ref::Kind::Self:
      return "$self";
    case Ref::Kind::ByLoc:
      return json{{"by_loc", r.by_loc}};
    case Ref::Kind::Literal:
      break;
  }
  return r.text;
}

Ref ref_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    return s == "$self" ? Ref::self() : Ref::lit(s);
  }
  if (j.is_object() && j.size() == 1 && j.contains("by_loc") && j.at("by_loc").is_object()) {
    std::map<std::string, std::string> table;
    for (const auto& [k, v] : j.at("by_loc").items()) {
      if (!v.is_string()) throw ScenarioError(where + ".by_loc." + k + ": expected a string");
      table[k] = v.get<std::string>();
    }
    return Ref::loc_table(std::move(table));
  }
  throw ScenarioError(where + ": expected a name, \"$self\" or {\"by_loc\": {...}}");
}

json arg_to_json(const ArgSource& a) {
  switch (a.kind) {
    case ArgSource::Kind::Literal:
      return json{{"lit", a.literal.to_string()}};
    case ArgSource::Kind::Heap:
      return json{{"heap", ref_to_json(a.heap)}};
    case ArgSource::Kind::Result:
      return json{{"result", true}};
    case ArgSource::Kind::Written:
      return json{{"written", true}};
    case ArgSource::Kind::LocIndex:
      return json{{"loc_index", a.names}};
  }
  return nullptr;
}

ArgSource arg_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || j.size() != 1) throw ScenarioError(where + ": expected a one-field object");
  const auto& [k, v] = *j.items().begin();
  if (k == "lit") return ArgSource::lit(element_from_json(v, where + ".lit"));
  if (k == "heap") return ArgSource::heap_at(ref_from_json(v, where + ".heap"));
  if (k == "result") return ArgSource::result();
  if (k == "written") return ArgSource::written();
  if (k == "loc_index") {
    if (!v.is_array()) throw ScenarioError(where + ".loc_index: expected an array of names");
    return ArgSource::loc_index(v.get<std::vector<std::string>>());
  }
  throw ScenarioError(where + ": unknown argument source '" + k + "'");
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ScenarioError(where + ": missing field '" + key + "'");
  return j.at(key);
}

std::string string_field(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw ScenarioError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

const json& array_field(const json& j, const char* key, const std::string& where) {
  static const json empty = json::array();
  if (!j.contains(key)) return empty;
  const json& v = j.at(key);
  if (!v.is_array()) throw ScenarioError(where + "." + key + ": expected an array");
  return v;
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : keys) ok = ok || k == a;
    if (!ok) throw ScenarioError(where + ": unknown field '" + k + "'");
  }
}

}  // namespace

json to_json(const Scenario& s) {
  json heap = json::array();
  for (const auto& h : s.heap) heap.push_back({{"name", h.name}, {"value", h.value}});
  json threads = json::array();
  for (const auto& t : s.threads) threads.push_back({{"name", t.name}, {"program", t.program}});
  json instances = json::array();
  for (const auto& i : s.instances) {
    json frags = json::object();
    for (const auto& [o, f] : i.fragments) frags[o] = f.to_string();
    instances.push_back(
        {{"id", i.id}, {"protocol", i.protocol}, {"fragments", frags}, {"stored", i.stored.to_string()}});
  }
  json script = json::array();
  for (const auto& e : s.script) {
    json entry{{"label", e.label}};
    json when = json::object();
    if (e.when_result) when["result"] = e.when_result->to_string();
    if (e.when_phase) when["phase"] = to_string(*e.when_phase);
    if (!when.empty()) entry["when"] = when;
    json actions = json::array();
    for (const auto& a : e.actions) {
      json args = json::object();
      for (const auto& [n, src] : a.args) args[n] = arg_to_json(src);
      json act{{"rule", a.rule}, {"instance", ref_to_json(a.instance)}, {"owner", ref_to_json(a.owner)}};
      if (!(a.region.kind == Ref::Kind::Literal && a.region.text.empty())) act["region"] = ref_to_json(a.region);
      if (!args.empty()) act["args"] = args;
      actions.push_back(std::move(act));
    }
    entry["actions"] = actions;
    if (e.mark) entry["mark"] = ref_to_json(*e.mark);
    if (e.unmark) entry["unmark"] = ref_to_json(*e.unmark);
    script.push_back(std::move(entry));
  }
  json props = json::array();
  for (const auto& p : s.properties) props.push_back({{"name", p.name}, {"kind", p.kind}, {"params", p.params}});
  return json{{"name", s.name},
              {"description", s.description},
              {"heap", heap},
              {"threads", threads},
              {"instances", instances},
              {"rules", s.rule_sets},
              {"script", script},
              {"properties", props},
              {"outcome_cells", s.outcome_cells},
              {"expect", to_string(s.expect)},
              {"bounds", {{"max_states", s.bounds.max_states}, {"max_steps", s.bounds.max_steps}}}};
}

Scenario scenario_from_json(const json& j) {
  const std::string w = "scenario";
  only_keys(j, {"name", "description", "heap", "threads", "instances", "rules", "script", "properties",
                "outcome_cells", "expect", "bounds"},
            w);
  Scenario s;
  s.name = string_field(j, "name", w);
  if (j.contains("description")) s.description = string_field(j, "description", w);
  const auto& heap = array_field(j, "heap", w);
  for (std::size_t i = 0; i < heap.size(); ++i) {
    const std::string hw = w + ".heap[" + std::to_string(i) + "]";
    only_keys(heap[i], {"name", "value"}, hw);
    s.heap.push_back({string_field(heap[i], "name", hw), string_field(heap[i], "value", hw)});
  }
  const auto& threads = array_field(j, "threads", w);
  for (std::size_t i = 0; i < threads.size(); ++i) {
    const std::string tw = w + ".threads[" + std::to_string(i) + "]";
    only_keys(threads[i], {"name", "program"}, tw);
    s.threads.push_back({string_field(threads[i], "name", tw), string_field(threads[i], "program", tw)});
  }
  const auto& instances = array_field(j, "instances", w);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const std::string iw = w + ".instances[" + std::to_string(i) + "]";
    const json& d = instances[i];
    only_keys(d, {"id", "protocol", "fragments", "stored"}, iw);
    InstanceDecl decl;
    decl.id = string_field(d, "id", iw);
    decl.protocol = field(d, "protocol", iw);
    if (d.contains("fragments")) {
      if (!d.at("fragments").is_object()) throw ScenarioError(iw + ".fragments: expected an object");
      for (const auto& [o, f] : d.at("fragments").items()) {
        decl.fragments[o] = element_from_json(f, iw + ".fragments." + o);
      }
    }
    if (d.contains("stored")) decl.stored = element_from_json(d.at("stored"), iw + ".stored");
    s.instances.push_back(std::move(decl));
  }
  for (const auto& r : array_field(j, "rules", w)) s.rule_sets.push_back(r);
  const auto& script = array_field(j, "script", w);
  for (std::size_t i = 0; i < script.size(); ++i) {
    const std::string sw = w + ".script[" + std::to_string(i) + "]";
    const json& e = script[i];
    only_keys(e, {"label", "when", "actions", "mark", "unmark"}, sw);
    ScriptEntry entry;
    entry.label = string_field(e, "label", sw);
    if (e.contains("when")) {
      const json& when = e.at("when");
      only_keys(when, {"result", "phase"}, sw + ".when");
      if (when.contains("result")) entry.when_result = element_from_json(when.at("result"), sw + ".when.result");
      if (when.contains("phase")) {
        const std::string ph = string_field(when, "phase", sw + ".when");
        if (ph == "atomic") {
          entry.when_phase = Phase::Atomic;
        } else if (ph == "begin") {
          entry.when_phase = Phase::Begin;
        } else if (ph == "end") {
          entry.when_phase = Phase::End;
        } else {
          throw ScenarioError(sw + ".when.phase: expected atomic, begin or end");
        }
      }
    }
    const auto& actions = array_field(e, "actions", sw);
    for (std::size_t k = 0; k < actions.size(); ++k) {
      const std::string aw = sw + ".actions[" + std::to_string(k) + "]";
      const json& a = actions[k];
      only_keys(a, {"rule", "instance", "owner", "region", "args"}, aw);
      ScriptAction act;
      act.rule = string_field(a, "rule", aw);
      act.instance = ref_from_json(field(a, "instance", aw), aw + ".instance");
      if (a.contains("owner")) act.owner = ref_from_json(a.at("owner"), aw + ".owner");
      if (a.contains("region")) act.region = ref_from_json(a.at("region"), aw + ".region");
      if (a.contains("args")) {
        if (!a.at("args").is_object()) throw ScenarioError(aw + ".args: expected an object");
        for (const auto& [n, v] : a.at("args").items()) act.args[n] = arg_from_json(v, aw + ".args." + n);
      }
      entry.actions.push_back(std::move(act));
    }
    if (e.contains("mark")) entry.mark = ref_from_json(e.at("mark"), sw + ".mark");
    if (e.contains("unmark")) entry.unmark = ref_from_json(e.at("unmark"), sw + ".unmark");
    s.script.push_back(std::move(entry));
  }
  const auto& props = array_field(j, "properties", w);
  for (std::size_t i = 0; i < props.size(); ++i) {
    const std::string pw = w + ".properties[" + std::to_string(i) + "]";
    only_keys(props[i], {"name", "kind", "params"}, pw);
    s.properties.push_back({string_field(props[i], "name", pw), string_field(props[i], "kind", pw),
                            props[i].value("params", json::object())});
  }
  if (j.contains("outcome_cells")) {
    try {
      s.outcome_cells = j.at("outcome_cells").get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw ScenarioError(w + ".outcome_cells: expected an array of names");
    }
  }
  if (j.contains("expect")) {
    const auto e = expectation_from_string(string_field(j, "expect", w));
    if (!e) throw ScenarioError(w + ".expect: expected no-stuck or stuck-reachable");
    s.expect = *e;
  }
  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    only_keys(b, {"max_states", "max_steps"}, w + ".bounds");
    try {
      s.bounds.max_states = b.value("max_states", s.bounds.max_states);
      s.bounds.max_steps = b.value("max_steps", s.bounds.max_steps);
    } catch (const json::exception&) {
      throw ScenarioError(w + ".bounds: expected non-negative integers");
    }
  }
  return s;
}

// --------------------------------------------------------------- compile

std::size_t ExplorerState::hash() const {
  std::size_t h = hash_combine(canonical_hash(cfg), ledger_hash(ledger));
  const std::hash<std::string> sh;
  for (const auto& m : marks) {
    h = hash_combine(h, m.size());
    for (const auto& s : m) h = hash_combine(h, sh(s));
  }
  return h;
}

bool operator==(const ExplorerState& a, const ExplorerState& b) {
  return a.marks == b.marks && a.cfg == b.cfg && a.ledger == b.ledger;
}

namespace {

// Protocols are shared across scenarios so their memoized checks are too.
ProtocolRef shared_protocol(const json& decl) {
  static std::mutex mu;
  static std::map<std::string, ProtocolRef> cache;
  const std::string key = decl.dump();
  {
    std::lock_guard lock(mu);
    if (const auto it = cache.find(key); it != cache.end()) return it->second;
  }
  ProtocolRef p = make_protocol(build_protocol(decl).spec);
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(p)).first->second;
}

void collect_labels(const ExprPtr& e, std::set<std::string>& out) {
  if (e->op == Op::Label) out.insert(e->name);
  for (const auto& k : e->kids) collect_labels(k, out);
}

const std::set<std::string>& known_property_kinds() {
  static const std::set<std::string> kinds = {"ghost-invariant", "mutual-exclusion", "reader-agreement",
                                              "heap-predicate",  "guarded-read",     "ht-valid",
                                              "ht-oracle"};
  return kinds;
}

}  // namespace

CompiledScenario compile(const Scenario& s, AdmissionMode mode) {
  CompiledScenario c;
  c.source = s;
  for (const auto& h : s.heap) {
    if (c.names.contains(h.name)) throw ScenarioError("heap: duplicate location name '" + h.name + "'");
    const auto l = static_cast<std::int64_t>(c.names.size());
    c.names.emplace(h.name, l);
    c.loc_names.emplace(l, h.name);
  }
  MachineConfig& cfg = c.initial.cfg;
  for (const auto& h : s.heap) {
    ExprPtr v;
    try {
      v = parse_program(h.value, c.names);
    } catch (const std::exception& e) {
      throw ScenarioError("heap." + h.name + ": " + e.what());
    }
    if (!v->is_value) throw ScenarioError("heap." + h.name + ": initial content is not a value");
    cfg.alloc(v);
  }
  std::set<std::string> thread_names;
  for (const auto& t : s.threads) {
    if (!thread_names.insert(t.name).second) throw ScenarioError("threads: duplicate name '" + t.name + "'");
    ExprPtr p;
    try {
      p = parse_program(t.program, c.names);
    } catch (const std::exception& e) {
      throw ScenarioError("threads." + t.name + ": " + e.what());
    }
    collect_labels(p, c.labels);
    spawn(cfg, p);
  }
  c.initial.marks.resize(cfg.threads.size());

  for (const auto& r : s.rule_sets) {
    for (auto& [name, t] : build_rule_set(r)) {
      if (c.rules.contains(name)) throw ScenarioError("rules: '" + name + "' is defined twice");
      c.rules.emplace(name, std::move(t));
    }
  }
  for (const auto& e : s.script) {
    if (!c.labels.contains(e.label)) {
      throw ScenarioError("script: label '" + e.label + "' does not occur in any thread");
    }
    for (const auto& a : e.actions) {
      if (!c.rules.contains(a.rule)) throw ScenarioError("script: unknown rule '" + a.rule + "'");
    }
  }
  std::set<std::string> prop_names;
  for (const auto& p : s.properties) {
    if (!prop_names.insert(p.name).second) throw ScenarioError("properties: duplicate name '" + p.name + "'");
    if (!known_property_kinds().contains(p.kind)) {
      throw ScenarioError("properties." + p.name + ": unknown kind '" + p.kind + "'");
    }
  }
  for (const auto& n : s.outcome_cells) {
    if (!c.names.contains(n)) throw ScenarioError("outcome_cells: unknown location '" + n + "'");
  }

  for (const auto& d : s.instances) {
    ProtocolRef p;
    try {
      p = shared_protocol(d.protocol);
    } catch (const SchemaError& e) {
      throw ScenarioError("instances." + d.id + ": " + e.what());
    }
    std::vector<FragmentChange> init;
    for (const auto& [owner, f] : d.fragments) init.push_back({owner, Element::unit(), f});
    ApplyOutcome o;
    try {
      o = apply_action(c.initial.ledger, GhostAction::alloc(d.id, p, init, d.stored), mode);
    } catch (const GhostUsageError& e) {
      throw ScenarioError("instances." + d.id + ": " + e.what());
    }
    if (!o.admitted) throw ScenarioError("instances." + d.id + ": " + o.violation->reason);
    c.initial.ledger = std::move(o.ledger);
  }
  return c;
}

// ------------------------------------------------------------ properties

namespace {

std::optional<Element> cell_value(const CompiledScenario& c, const MachineConfig& cfg, const std::string& name,
                                  std::string* why) {
  const auto it = c.names.find(name);
  if (it == c.names.end()) {
    *why = "unknown location '" + name + "'";
    return std::nullopt;
  }
  const auto h = cfg.heap.find(it->second);
  if (h == cfg.heap.end()) {
    *why = "location '" + name + "' has been freed";
    return std::nullopt;
  }
  return to_element(*h->second.value);
}

std::string thread_name(const CompiledScenario& c, std::size_t tid) {
  if (tid < c.source.threads.size()) return c.source.threads[tid].name;
  return "fork" + std::to_string(tid);
}

std::string loc_name(const CompiledScenario& c, std::optional<std::int64_t> l) {
  if (!l) return "";
  const auto it = c.loc_names.find(*l);
  return it == c.loc_names.end() ? "#" + std::to_string(*l) : it->second;
}

// x of the agreement token an owner holds, if any.
std::optional<Element> shared_token(const GhostInstance& inst, const std::string& owner) {
  const Element f = inst.fragment(owner);
  if (f.is_unit()) return std::nullopt;
  const auto v = rw_view(f);
  if (!v || v->s.is_unit()) return std::nullopt;
  return v->s.items()[0];
}

std::optional<std::string> mutual_exclusion(const ExplorerState& st, const json& params) {
  const std::string exc = params.value("exclusive", "exclusive");
  const std::string sh = params.value("shared", "shared");
  const auto scope_of = [](const std::string& mark, const std::string& prefix) -> std::optional<std::string> {
    if (mark == prefix) return std::string();
    if (mark.size() > prefix.size() && mark.compare(0, prefix.size(), prefix) == 0 && mark[prefix.size()] == '@') {
      return mark.substr(prefix.size() + 1);
    }
    return std::nullopt;
  };
  std::map<std::string, std::vector<std::size_t>> holders;
  std::map<std::string, std::vector<std::size_t>> readers;
  for (std::size_t t = 0; t < st.marks.size(); ++t) {
    for (const auto& m : st.marks[t]) {
      if (auto s = scope_of(m, exc)) holders[*s].push_back(t);
      if (auto s = scope_of(m, sh)) readers[*s].push_back(t);
    }
  }
  for (const auto& [scope, ts] : holders) {
    const std::string where = scope.empty() ? "" : " of " + scope;
    if (ts.size() > 1) return "threads " + std::to_string(ts[0]) + " and " + std::to_string(ts[1]) + " both hold the exclusive lock" + where;
    if (const auto it = readers.find(scope); it != readers.end() && !it->second.empty()) {
      return "thread " + std::to_string(ts[0]) + " holds the exclusive lock" + where + " while thread " +
             std::to_string(it->second[0]) + " reads";
    }
  }
  return std::nullopt;
}

std::optional<std::string> reader_agreement(const CompiledScenario& c, const ExplorerState& st, const json& params) {
  for (const auto& lk : params.value("locks", json::array())) {
    const std::string id = lk.at("instance").get<std::string>();
    const std::string region = lk.at("region").get<std::string>();
    const auto it = st.ledger.instances.find(id);
    if (it == st.ledger.instances.end()) return "no ghost instance '" + id + "'";
    const GhostInstance& inst = it->second;
    const Element rf = inst.fragment(region);
    const auto rv = rf.is_unit() ? std::nullopt : rw_view(rf);
    if (!rv || !rv->has_fields) return region + " holds no fields in " + id;
    for (const auto& [owner, f] : inst.fragments) {
      if (owner == region) continue;
      const auto x = shared_token(inst, owner);
      if (!x) continue;
      if (*x != rv->x) {
        return owner + " reads " + x->to_string() + " but " + id + " protects " + rv->x.to_string();
      }
      if (lk.contains("cell")) {
        std::string why;
        const auto v = cell_value(c, st.cfg, lk.at("cell").get<std::string>(), &why);
        if (!v) return why;
        if (*v != *x) return owner + " reads " + x->to_string() + " but the cell holds " + v->to_string();
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> heap_predicate(const CompiledScenario& c, const ExplorerState& st, const json& params) {
  const bool terminal_only = params.value("when", "always") == "terminal";
  if (terminal_only) {
    for (const auto& t : st.cfg.threads) {
      if (t.status != ThreadStatus::Finished) return std::nullopt;
    }
  }
  std::string why;
  const std::string cell = params.at("cell").get<std::string>();
  const auto v = cell_value(c, st.cfg, cell, &why);
  if (!v) return why;
  for (const auto& a : params.at("values")) {
    if (element_from_json(a, "heap-predicate.values") == *v) return std::nullopt;
  }
  return cell + " holds " + v->to_string() + ", outside " + params.at("values").dump();
}

std::optional<std::string> resolve_ref(const CompiledScenario& c, const Ref& r, std::size_t tid,
                                       const StepEvent& ev, std::string* out) {
  switch (r.kind) {
    case Ref::Kind::Literal:
      *out = r.text;
      return std::nullopt;
    case Ref::Kind::Self:
      *out = thread_name(c, tid);
      return std::nullopt;
    case Ref::Kind::ByLoc: {
      const std::string n = loc_name(c, ev.loc);
      const auto it = r.by_loc.find(n);
      if (it == r.by_loc.end()) return "no entry for location '" + n + "' in by_loc table";
      *out = it->second;
      return std::nullopt;
    }
  }
  return "bad reference";
}

std::optional<std::string> guarded_read(const CompiledScenario& c, const ExplorerState& st, const json& params,
                                        const std::vector<StepEvent>& events) {
  const std::string label = params.at("label").get<std::string>();
  const Ref inst_ref = ref_from_json(params.at("instance"), "guarded-read.instance");
  for (const auto& ev : events) {
    if (ev.label != label || ev.phase == Phase::Begin || !ev.result) continue;
    std::string id;
    if (auto e = resolve_ref(c, inst_ref, ev.tid, ev, &id)) return *e;
    const auto it = st.ledger.instances.find(id);
    if (it == st.ledger.instances.end()) return "no ghost instance '" + id + "'";
    const std::string owner = thread_name(c, ev.tid);
    const auto x = shared_token(it->second, owner);
    if (!x) return owner + " read at " + label + " without a shared token of " + id;
    const Element got = to_element(*ev.result);
    if (got != *x) return owner + " read " + got.to_string() + " but its token of " + id + " says " + x->to_string();
  }
  return std::nullopt;
}

std::optional<std::string> ht_valid(const CompiledScenario& c, const ExplorerState& st, const json& params) {
  const HashTableParams hp = hashtable_params_from_json(params.at("table"));
  const std::string id = params.at("instance").get<std::string>();
  const auto it = st.ledger.instances.find(id);
  if (it == st.ledger.instances.end()) return "no ghost instance '" + id + "'";
  const Element joint = it->second.joint();
  if (!ht_full_state_ok(hp, joint)) return "joint table state " + joint.to_string() + " breaks the table predicate";
  // A slot the lock invariant holds agrees with the heap.
  const auto slots = params.value("slots", std::vector<std::string>{});
  const auto regions = params.value("regions", std::vector<std::string>{});
  for (std::size_t i = 0; i < slots.size() && i < regions.size(); ++i) {
    const Element f = it->second.fragment(regions[i]);
    if (f.kind() != ElementKind::Tuple) continue;
    const Element* g = f.items()[1].map_find(Element::integer(static_cast<std::int64_t>(i)));
    if (!g) continue;
    std::string why;
    const auto v = cell_value(c, st.cfg, slots[i], &why);
    if (!v) return why;
    if (g->items()[0] != *v) return slots[i] + " holds " + v->to_string() + " but its ghost slot says " + g->to_string();
  }
  return std::nullopt;
}

// Terminal map of a hash-table joint state: key -> value for present keys.
Element ht_terminal_map(const Element& joint) {
  std::vector<std::pair<Element, Element>> out;
  if (joint.kind() != ElementKind::Tuple) return Element::map({});
  const auto flat = joint.items()[0].map_flat();
  for (std::size_t i = 0; i < flat.size(); i += 2) {
    const Element& opt = flat[i + 1].items()[0];
    if (opt.is_ctor("some")) out.emplace_back(flat[i], opt.items()[0]);
  }
  return Element::map(std::move(out));
}

std::optional<std::string> ht_oracle(const CompiledScenario& c, const ExplorerState& st, const json& params) {
  for (const auto& t : st.cfg.threads) {
    if (t.status != ThreadStatus::Finished) return std::nullopt;
  }
  const std::string id = params.at("instance").get<std::string>();
  const auto it = st.ledger.instances.find(id);
  if (it == st.ledger.instances.end()) return "no ghost instance '" + id + "'";
  json results = json::array();
  for (const auto& cell : params.value("results", std::vector<std::string>{})) {
    std::string why;
    const auto v = cell_value(c, st.cfg, cell, &why);
    if (!v) return why;
    results.push_back(v->to_string());
  }
  const json observed{{"results", results}, {"map", ht_terminal_map(it->second.joint()).to_string()}};
  for (const auto& a : params.at("allowed")) {
    if (a == observed) return std::nullopt;
  }
  return "outcome " + observed.dump() + " is not a sequential outcome";
}

}  // namespace

std::optional<std::string> check_property(const CompiledScenario& c, const ExplorerState& state,
                                          const PropertyDecl& decl, const std::vector<StepEvent>& events) {
  PropertyDecl p = decl;
  if (p.params.is_null()) p.params = json::object();
  try {
    if (p.kind == "ghost-invariant") return check_ledger_invariants(state.ledger);
    if (p.kind == "mutual-exclusion") return mutual_exclusion(state, p.params);
    if (p.kind == "reader-agreement") return reader_agreement(c, state, p.params);
    if (p.kind == "heap-predicate") return heap_predicate(c, state, p.params);
    if (p.kind == "guarded-read") return guarded_read(c, state, p.params, events);
    if (p.kind == "ht-valid") return ht_valid(c, state, p.params);
    if (p.kind == "ht-oracle") return ht_oracle(c, state, p.params);
  } catch (const json::exception& e) {
    return std::string("bad parameters: ") + e.what();
  } catch (const std::exception& e) {
    return std::string("evaluation failed: ") + e.what();
  }
  return "unknown property kind '" + p.kind + "'";
}

// -------------------------------------------------------------- stepping

std::string outcome_summary(const CompiledScenario& c, const ExplorerState& state) {
  json out = json::object();
  const auto add = [&](const std::string& name) {
    std::string why;
    const auto v = cell_value(c, state.cfg, name, &why);
    out[name] = v ? v->to_string() : "<freed>";
  };
  if (c.source.outcome_cells.empty()) {
    for (const auto& [name, l] : c.names) add(name);
  } else {
    for (const auto& name : c.source.outcome_cells) add(name);
  }
  return out.dump();
}

json state_snapshot(const CompiledScenario& c, const ExplorerState& st) {
  json heap = json::object();
  for (const auto& [l, cell] : st.cfg.heap) {
    std::string state = cell.writing ? "writing" : "reading(" + std::to_string(cell.readers) + ")";
    heap[loc_name(c, l)] = {{"value", to_string(cell.value)}, {"state", state}};
  }
  json threads = json::array();
  for (std::size_t t = 0; t < st.cfg.threads.size(); ++t) {
    const auto& th = st.cfg.threads[t];
    const char* status = th.status == ThreadStatus::Running ? "running"
                         : th.status == ThreadStatus::Finished ? "finished"
                                                               : "stuck";
    json j{{"name", thread_name(c, t)}, {"status", status}, {"marks", st.marks.size() > t ? st.marks[t] : std::set<std::string>{}}};
    if (th.status == ThreadStatus::Finished) j["value"] = to_string(th.expr);
    if (th.stuck) j["stuck"] = to_string(th.stuck->kind) + " (" + th.stuck->rule + ")";
    threads.push_back(std::move(j));
  }
  return json{{"heap", heap}, {"threads", threads}, {"ghost", ledger_snapshot(st.ledger)}};
}

namespace {

struct Transition {
  ExplorerState next;
  std::vector<StepEvent> events;
  std::vector<std::string> ghost_log;
  std::optional<Violation> violation;
  bool stuck = false;
  bool step_bound = false;
  std::size_t micro_steps = 0;
  std::size_t heap_steps = 0;
};

// Pure computation between two heap steps; longer runs count as a bound.
constexpr std::size_t kLocalRun = 100000;

std::string describe_event(const CompiledScenario& c, const StepEvent& ev) {
  std::string s = ev.rule;
  if (ev.label) s = "@" + *ev.label + " " + s;
  if (ev.phase != Phase::Atomic) s += " [" + to_string(ev.phase) + "]";
  if (ev.loc) s += " " + loc_name(c, ev.loc);
  if (ev.result) s += " -> " + to_string(ev.result);
  if (ev.written) s += " := " + to_string(ev.written);
  return s;
}

bool entry_matches(const ScriptEntry& e, const StepEvent& ev) {
  if (ev.label != e.label) return false;
  if (e.when_phase && *e.when_phase != ev.phase) return false;
  if (e.when_result) {
    if (!ev.result) return false;
    if (to_element(*ev.result) != *e.when_result) return false;
  }
  return true;
}

std::optional<std::string> resolve_arg(const CompiledScenario& c, const ExplorerState& st, const ArgSource& a,
                                       std::size_t tid, const StepEvent& ev, Element* out) {
  switch (a.kind) {
    case ArgSource::Kind::Literal:
      *out = a.literal;
      return std::nullopt;
    case ArgSource::Kind::Result:
      if (!ev.result) return "the step produced no result";
      *out = to_element(*ev.result);
      return std::nullopt;
    case ArgSource::Kind::Written:
      if (!ev.written) return "the step wrote nothing";
      *out = to_element(*ev.written);
      return std::nullopt;
    case ArgSource::Kind::LocIndex: {
      const std::string n = loc_name(c, ev.loc);
      for (std::size_t i = 0; i < a.names.size(); ++i) {
        if (a.names[i] == n) {
          *out = Element::integer(static_cast<std::int64_t>(i));
          return std::nullopt;
        }
      }
      return "location '" + n + "' is not in the index list";
    }
    case ArgSource::Kind::Heap: {
      std::string name;
      if (auto e = resolve_ref(c, a.heap, tid, ev, &name)) return e;
      std::string why;
      const auto v = cell_value(c, st.cfg, name, &why);
      if (!v) return why;
      *out = *v;
      return std::nullopt;
    }
  }
  return "bad argument source";
}

// Fires the script for one micro-step. Returns the violation, if any.
std::optional<Violation> run_script(const CompiledScenario& c, ExplorerState& st, const StepEvent& ev,
                                    AdmissionMode mode, std::uint64_t step_index, std::vector<std::string>& log) {
  if (!ev.label) return std::nullopt;
  const std::size_t tid = ev.tid;
  for (const auto& entry : c.source.script) {
    if (!entry_matches(entry, ev)) continue;
    for (const auto& sa : entry.actions) {
      const auto fail = [&](std::string why) { return Violation{"ghost", sa.rule, std::move(why), {}}; };
      RuleContext ctx{st.ledger, "", "", "", {}};
      if (auto e = resolve_ref(c, sa.instance, tid, ev, &ctx.instance)) return fail(*e);
      if (auto e = resolve_ref(c, sa.owner, tid, ev, &ctx.owner)) return fail(*e);
      if (auto e = resolve_ref(c, sa.region, tid, ev, &ctx.region)) return fail(*e);
      for (const auto& [name, src] : sa.args) {
        Element v;
        if (auto e = resolve_arg(c, st, src, tid, ev, &v)) return fail("argument " + name + ": " + *e);
        ctx.args.emplace(name, std::move(v));
      }
      std::vector<GhostAction> actions;
      try {
        actions = c.rules.at(sa.rule)(ctx);
      } catch (const RuleError& e) {
        return fail(e.what());
      } catch (const GhostUsageError& e) {
        return fail(e.what());
      }
      for (const auto& a : actions) {
        ApplyOutcome o;
        try {
          o = apply_action(st.ledger, a, mode, step_index);
        } catch (const GhostUsageError& e) {
          return fail(e.what());
        }
        if (!o.admitted) {
          std::string why = o.violation->action + ": " + o.violation->reason;
          if (o.violation->witness) why += " (witness " + o.violation->witness->to_string() + ")";
          return fail(std::move(why));
        }
        log.push_back(describe(a));
        st.ledger = std::move(o.ledger);
      }
    }
    if (entry.mark || entry.unmark) {
      std::string m;
      if (entry.mark) {
        if (auto e = resolve_ref(c, *entry.mark, tid, ev, &m)) return Violation{"ghost", "mark", *e, {}};
        st.marks[tid].insert(m);
      }
      if (entry.unmark) {
        if (auto e = resolve_ref(c, *entry.unmark, tid, ev, &m)) return Violation{"ghost", "unmark", *e, {}};
        st.marks[tid].erase(m);
      }
    }
  }
  return std::nullopt;
}

void close_windows(GhostLedger& l) {
  for (auto& [id, inst] : l.instances) inst.window.reset();
}

Transition take(const CompiledScenario& c, const ExplorerState& from, std::size_t tid, std::size_t steps_used,
                const ExploreOptions& o, std::uint64_t step_index) {
  Transition t;
  t.next = from;
  std::size_t used = steps_used;
  while (true) {
    const bool local = next_step_is_local(t.next.cfg, tid);
    if ((!local && used >= c.source.bounds.max_steps) || t.micro_steps >= kLocalRun) {
      t.step_bound = true;
      break;
    }
    StepOutcome out = step(t.next.cfg, tid);
    if (!local) {
      ++used;
      ++t.heap_steps;
    }
    ++t.micro_steps;
    t.next.cfg = std::move(out.cfg);
    if (t.next.marks.size() < t.next.cfg.threads.size()) t.next.marks.resize(t.next.cfg.threads.size());
    if (out.kind == StepOutcome::Kind::Stuck) {
      t.events.push_back(out.event);
      t.stuck = true;
      t.violation = Violation{"stuck", to_string(out.stuck->kind),
                              thread_name(c, tid) + ": " + out.stuck->rule + ": " + out.stuck->reason, {}};
      return t;
    }
    if (out.kind == StepOutcome::Kind::ThreadDone) break;
    t.events.push_back(out.event);
    auto v = run_script(c, t.next, out.event, o.mode, step_index, t.ghost_log);
    close_windows(t.next.ledger);
    if (v) {
      t.violation = std::move(v);
      return t;
    }
    if (!o.collapse_local || !next_step_is_local(t.next.cfg, tid)) break;
  }
  for (const auto& p : c.source.properties) {
    if (p.kind != "guarded-read") continue;
    if (auto why = check_property(c, t.next, p, t.events)) {
      t.violation = Violation{"property", p.name, *why, {}};
      return t;
    }
  }
  return t;
}

std::optional<Violation> state_properties(const CompiledScenario& c, const ExplorerState& st) {
  for (const auto& p : c.source.properties) {
    if (p.kind == "guarded-read") continue;
    if (auto why = check_property(c, st, p)) return Violation{"property", p.name, *why, {}};
  }
  return std::nullopt;
}

bool terminal(const ExplorerState& st) {
  for (const auto& t : st.cfg.threads) {
    if (t.status != ThreadStatus::Finished) return false;
  }
  return true;
}

class Memo {
 public:
  // True if `s` was new.
  bool insert(const ExplorerState& s) {
    auto& bucket = index_[s.hash()];
    for (const auto i : bucket) {
      if (states_[i] == s) return false;
    }
    bucket.push_back(states_.size());
    states_.push_back(s);
    return true;
  }

 private:
  std::unordered_map<std::size_t, std::vector<std::size_t>> index_;
  std::vector<ExplorerState> states_;
};

class Explorer {
 public:
  Explorer(const CompiledScenario& c, const ExploreOptions& o, ExplorationResult& r) : c_(c), o_(o), r_(r) {}

  void run() {
    std::vector<std::size_t> steps(c_.initial.cfg.threads.size(), 0);
    if (o_.memoize) memo_.insert(c_.initial);
    r_.states = 1;
    if (auto v = state_properties(c_, c_.initial)) {
      record(std::move(*v));
      ++r_.schedules;
      return;
    }
    visit(c_.initial, steps);
  }

  std::set<std::string> fired;

 private:
  void record(Violation v) {
    v.trace = path_;
    const auto key = v.key();
    if (!found_.contains(key)) found_.emplace(key, std::move(v));
  }

  void visit(const ExplorerState& st, std::vector<std::size_t>& steps) {
    const auto enabled = enabled_threads(st.cfg);
    if (enabled.empty()) {
      ++r_.schedules;
      if (terminal(st)) r_.outcomes.insert(outcome_summary(c_, st));
      return;
    }
    for (const auto tid : enabled) {
      if (r_.bound_exceeded && stop_) return;
      Transition t = take(c_, st, tid, steps[tid], o_, path_.size());
      ++r_.transitions;
      for (const auto& ev : t.events) {
        if (ev.label) fired.insert(*ev.label);
      }
      path_.push_back(tid);
      if (t.violation) {
        if (t.stuck) ++r_.stuck_states;
        record(std::move(*t.violation));
        ++r_.schedules;
      } else if (t.step_bound && t.micro_steps == 0) {
        bound("a thread exceeded " + std::to_string(c_.source.bounds.max_steps) + " heap steps");
        ++r_.schedules;
      } else if (o_.memoize && !memo_.insert(t.next)) {
        ++r_.memo_hits;
      } else if (r_.states >= c_.source.bounds.max_states) {
        bound("more than " + std::to_string(c_.source.bounds.max_states) + " states");
        stop_ = true;
      } else {
        ++r_.states;
        if (t.step_bound) bound("a thread exceeded " + std::to_string(c_.source.bounds.max_steps) + " heap steps");
        if (auto v = state_properties(c_, t.next)) {
          record(std::move(*v));
          ++r_.schedules;
        } else {
          std::vector<std::size_t> next_steps = steps;
          next_steps.resize(t.next.cfg.threads.size(), 0);
          next_steps[tid] += t.heap_steps;
          visit(t.next, next_steps);
        }
      }
      path_.pop_back();
    }
  }

  void bound(std::string why) {
    if (!r_.bound_exceeded) r_.bound_reason = std::move(why);
    r_.bound_exceeded = true;
  }

  const CompiledScenario& c_;
  const ExploreOptions& o_;
  ExplorationResult& r_;
  Memo memo_;
  std::vector<std::size_t> path_;
  bool stop_ = false;

 public:
  std::map<std::string, Violation> found_;
};

// Breadth-first search for the first (hence shortest) trace of each key.
void shortest_traces(const CompiledScenario& c, const ExploreOptions& o, std::map<std::string, Violation>& found) {
  struct Node {
    ExplorerState st;
    std::vector<std::size_t> steps;
    std::size_t parent;
    std::size_t tid;
  };
  std::vector<Node> nodes;
  nodes.push_back({c.initial, std::vector<std::size_t>(c.initial.cfg.threads.size(), 0), 0, 0});
  Memo memo;
  memo.insert(c.initial);
  std::set<std::string> pending;
  for (const auto& [k, v] : found) pending.insert(k);
  const auto path_to = [&](std::size_t i) {
    std::vector<std::size_t> p;
    while (i != 0) {
      p.push_back(nodes[i].tid);
      i = nodes[i].parent;
    }
    return std::vector<std::size_t>(p.rbegin(), p.rend());
  };
  const auto hit = [&](const Violation& v, std::vector<std::size_t> trace) {
    if (!pending.erase(v.key())) return;
    Violation& slot = found.at(v.key());
    if (trace.size() < slot.trace.size()) {
      slot.trace = std::move(trace);
      slot.detail = v.detail;
    }
  };
  if (auto v = state_properties(c, c.initial)) hit(*v, {});
  for (std::size_t i = 0; i < nodes.size() && !pending.empty(); ++i) {
    if (nodes.size() > c.source.bounds.max_states) break;
    for (const auto tid : enabled_threads(nodes[i].st.cfg)) {
      Transition t = take(c, nodes[i].st, tid, nodes[i].steps[tid], o, path_to(i).size());
      auto trace = path_to(i);
      trace.push_back(tid);
      if (t.violation) {
        hit(*t.violation, std::move(trace));
        continue;
      }
      if (t.step_bound && t.micro_steps == 0) continue;
      if (!memo.insert(t.next)) continue;
      if (auto v = state_properties(c, t.next)) {
        hit(*v, std::move(trace));
        continue;
      }
      std::vector<std::size_t> steps = nodes[i].steps;
      steps.resize(t.next.cfg.threads.size(), 0);
      steps[tid] += t.heap_steps;
      nodes.push_back({std::move(t.next), std::move(steps), i, tid});
    }
  }
}

}  // namespace

ExplorationResult explore(const Scenario& s, const ExploreOptions& options) {
  const CompiledScenario c = compile(s, options.mode);
  ExplorationResult r;
  r.scenario = s.name;
  r.mode = options.mode;
  r.memoize = options.memoize;
  r.expect = s.expect;
  Explorer ex(c, options, r);
  ex.run();
  if (options.shortest_traces && !ex.found_.empty()) shortest_traces(c, options, ex.found_);
  for (auto& [k, v] : ex.found_) r.violations.push_back(std::move(v));
  for (const auto& l : c.labels) {
    bool scripted = false;
    for (const auto& e : s.script) scripted = scripted || e.label == l;
    if (scripted && !ex.fired.contains(l)) r.warnings.push_back("script label '" + l + "' is never crossed");
  }
  return r;
}

bool ExplorationResult::expectation_met() const {
  if (expect == Expectation::NoStuck) return violations.empty();
  for (const auto& v : violations) {
    if (v.kind == "stuck") return true;
  }
  return false;
}

json ExplorationResult::to_json() const {
  json vs = json::array();
  for (const auto& v : violations) {
    vs.push_back({{"kind", v.kind}, {"name", v.name}, {"detail", v.detail}, {"trace", v.trace}});
  }
  json outs = json::array();
  for (const auto& o : outcomes) outs.push_back(json::parse(o));
  return json{{"scenario", scenario},
              {"mode", sharecheck::to_string(mode)},
              {"memoize", memoize},
              {"states", states},
              {"transitions", transitions},
              {"schedules", schedules},
              {"memo_hits", memo_hits},
              {"stuck_states", stuck_states},
              {"bound_exceeded", bound_exceeded},
              {"bound_reason", bound_reason},
              {"expect", sharecheck::to_string(expect)},
              {"expectation_met", expectation_met()},
              {"outcomes", outs},
              {"violations", vs},
              {"warnings", warnings}};
}

std::string ExplorationResult::to_text() const {
  std::ostringstream out;
  out << "scenario " << scenario << " (" << sharecheck::to_string(mode) << " mode)\n";
  out << "  states " << states << ", transitions " << transitions << ", schedules " << schedules
      << ", memo hits " << memo_hits << "\n";
  if (bound_exceeded) out << "  BOUND EXCEEDED: " << bound_reason << "\n";
  out << "  terminal outcomes: " << outcomes.size() << "\n";
  for (const auto& o : outcomes) out << "    " << o << "\n";
  out << "  violations: " << violations.size() << "\n";
  for (const auto& v : violations) {
    out << "    " << v.key() << ": " << v.detail << "\n      trace [";
    for (std::size_t i = 0; i < v.trace.size(); ++i) out << (i ? " " : "") << v.trace[i];
    out << "]\n";
  }
  for (const auto& w : warnings) out << "  warning: " << w << "\n";
  out << "  expectation " << sharecheck::to_string(expect) << ": " << (expectation_met() ? "met" : "NOT met") << "\n";
  return out.str();
}

json Trace::to_json() const {
  json ss = json::array();
  for (const auto& s : steps) {
    ss.push_back({{"thread", s.thread}, {"tid", s.tid}, {"events", s.events}, {"ghost", s.ghost}, {"state", s.state}});
  }
  json j{{"initial", initial}, {"steps", ss}, {"terminal", terminal}};
  if (violation) j["violation"] = {{"kind", violation->kind}, {"name", violation->name}, {"detail", violation->detail}};
  if (outcome) j["outcome"] = json::parse(*outcome);
  return j;
}

Trace replay(const Scenario& s, const std::vector<std::size_t>& schedule, const ExploreOptions& options) {
  const CompiledScenario c = compile(s, options.mode);
  Trace tr;
  tr.initial = state_snapshot(c, c.initial);
  ExplorerState st = c.initial;
  std::vector<std::size_t> steps(st.cfg.threads.size(), 0);
  if (auto v = state_properties(c, st)) {
    tr.violation = std::move(v);
    return tr;
  }
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const std::size_t tid = schedule[i];
    const auto en = enabled_threads(st.cfg);
    if (std::find(en.begin(), en.end(), tid) == en.end()) {
      throw ReplayError(i, "schedule entry " + std::to_string(i) + ": thread " + std::to_string(tid) +
                               " is not enabled");
    }
    if (tr.violation) throw ReplayError(i, "schedule continues past a violation at entry " + std::to_string(i - 1));
    Transition t = take(c, st, tid, steps[tid], options, i);
    TraceStep ts;
    ts.tid = tid;
    ts.thread = thread_name(c, tid);
    for (const auto& ev : t.events) ts.events.push_back(describe_event(c, ev));
    ts.ghost = t.ghost_log;
    ts.state = state_snapshot(c, t.next);
    tr.steps.push_back(std::move(ts));
    steps.resize(t.next.cfg.threads.size(), 0);
    steps[tid] += t.heap_steps;
    st = std::move(t.next);
    if (t.violation) {
      tr.violation = std::move(t.violation);
      tr.violation->trace.assign(schedule.begin(), schedule.begin() + static_cast<std::ptrdiff_t>(i) + 1);
      continue;
    }
    if (auto v = state_properties(c, st)) {
      tr.violation = std::move(v);
      tr.violation->trace.assign(schedule.begin(), schedule.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }
  tr.terminal = terminal(st);
  if (tr.terminal) tr.outcome = outcome_summary(c, st);
  return tr;
}

}  // namespace sharecheck
