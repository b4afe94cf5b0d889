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

#include "sharecheck/ghost_engine.hpp"

#include <set>

#include "sharecheck/combinators.hpp"

namespace sharecheck {

// ------------------------------------------------------------- Protocol

namespace {

// Guess at b minus a for tuples and maps; callers verify a.c = b.
std::optional<Element> structural_residual(const Element& a, const Element& b) {
  if (a == b) {
    switch (b.kind()) {
      case ElementKind::Map:
        return Element::map({});
      case ElementKind::Int:
        return Element::integer(0);
      default:
        return Element::unit();
    }
  }
  if (a.is_unit()) return b;
  if (a.kind() == ElementKind::Tuple && b.kind() == ElementKind::Tuple && a.items().size() == b.items().size()) {
    std::vector<Element> out;
    for (std::size_t i = 0; i < a.items().size(); ++i) {
      auto r = structural_residual(a.items()[i], b.items()[i]);
      if (!r) return std::nullopt;
      out.push_back(std::move(*r));
    }
    return Element::tuple(std::move(out));
  }
  if (a.kind() == ElementKind::Map && b.kind() == ElementKind::Map) {
    std::vector<std::pair<Element, Element>> out;
    const auto bf = b.map_flat();
    for (std::size_t i = 0; i < bf.size(); i += 2) {
      const Element* av = a.map_find(bf[i]);
      if (!av) {
        out.emplace_back(bf[i], bf[i + 1]);
      } else if (*av != bf[i + 1]) {
        auto r = structural_residual(*av, bf[i + 1]);
        if (!r) return std::nullopt;
        out.emplace_back(bf[i], std::move(*r));
      }
    }
    return Element::map(std::move(out));
  }
  if (a.kind() == ElementKind::Int && b.kind() == ElementKind::Int) {
    return Element::integer(b.as_int() - a.as_int());
  }
  return std::nullopt;
}

}  // namespace

CheckResult Protocol::exchange(const ExchangeQuery& q) const {
  const ExchangeQuery n = normalized(spec_, q);
  const Element key = Element::tuple({Element::integer(static_cast<std::int64_t>(n.kind)), n.p, n.s,
                                      n.p_after, n.s_after});
  {
    std::lock_guard lock(mu_);
    if (const auto it = exchange_cache_.find(key); it != exchange_cache_.end()) return it->second;
  }
  CheckResult r = exchange_holds(spec_, n);
  std::lock_guard lock(mu_);
  return exchange_cache_.emplace(key, std::move(r)).first->second;
}

CheckResult Protocol::guard(const Element& p, const Element& s) const {
  const Element key = Element::tuple({p, s});
  {
    std::lock_guard lock(mu_);
    if (const auto it = guard_cache_.find(key); it != guard_cache_.end()) return it->second;
  }
  CheckResult r = guard_holds(spec_, p, s);
  std::lock_guard lock(mu_);
  return guard_cache_.emplace(key, std::move(r)).first->second;
}

CheckResult Protocol::guard_completions(const Element& joint, const Element& s) const {
  const Element key = Element::tuple({joint, s});
  {
    std::lock_guard lock(mu_);
    if (const auto it = completion_cache_.find(key); it != completion_cache_.end()) return it->second;
  }
  const auto& m = spec_.protocol;
  CheckResult r;
  std::size_t n = 0;
  for (const auto& q : m.enumerator.elements()) {
    ++n;
    const Element full = m.compose(joint, q);
    if (!m.valid(full) || !spec_.complete(full)) continue;
    if (!leq(spec_.storage, s, spec_.stored_of(full))) {
      r = fails_with(q, "a completion stores " + spec_.stored_of(full).to_string(), n);
      break;
    }
  }
  if (r.ok()) r = holds_over(m.enumerator, n);
  std::lock_guard lock(mu_);
  return completion_cache_.emplace(key, std::move(r)).first->second;
}

std::optional<Element> Protocol::residual(const Element& a, const Element& b) const {
  const auto& m = spec_.protocol;
  if (a == m.unit || a.is_unit()) return b;
  if (a == b) return m.unit;
  const Element key = Element::tuple({a, b});
  {
    std::lock_guard lock(mu_);
    if (const auto it = residual_cache_.find(key); it != residual_cache_.end()) return it->second;
  }
  std::optional<Element> r;
  if (!m.divides || m.divides(a, b)) {
    r = structural_residual(a, b);
    if (r && m.compose(a, *r) != b) r.reset();
    if (!r) r = leq_witness(m, a, b);
  }
  std::lock_guard lock(mu_);
  return residual_cache_.emplace(key, std::move(r)).first->second;
}

ProtocolRef make_protocol(StorageProtocolSpec spec) {
  return std::make_shared<const Protocol>(std::move(spec));
}

std::string to_string(AdmissionMode m) { return m == AdmissionMode::Rule ? "rule" : "concrete"; }

std::optional<AdmissionMode> admission_mode_from_string(std::string_view s) {
  if (s == "rule") return AdmissionMode::Rule;
  if (s == "concrete") return AdmissionMode::Concrete;
  return std::nullopt;
}

// --------------------------------------------------------------- ledger

Element GhostInstance::fragment(const std::string& owner) const {
  const auto it = fragments.find(owner);
  return it == fragments.end() ? protocol->spec().protocol.unit : it->second;
}

Element GhostInstance::joint() const {
  const auto& m = protocol->spec().protocol;
  Element j = m.unit;
  for (const auto& [owner, f] : fragments) j = m.compose(j, f);
  return j;
}

const GhostInstance& GhostLedger::at(const std::string& id) const {
  const auto it = instances.find(id);
  if (it == instances.end()) throw GhostUsageError("unknown ghost instance '" + id + "'");
  return it->second;
}

bool operator==(const GhostLedger& a, const GhostLedger& b) {
  if (a.instances.size() != b.instances.size()) return false;
  for (auto ia = a.instances.begin(), ib = b.instances.begin(); ia != a.instances.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    const auto& x = ia->second;
    const auto& y = ib->second;
    if (x.protocol != y.protocol || x.fragments != y.fragments || x.stored != y.stored ||
        x.window != y.window) {
      return false;
    }
  }
  return true;
}

GhostAction GhostAction::alloc(std::string instance, ProtocolRef protocol,
                               std::vector<FragmentChange> initial, Element stored) {
  GhostAction a;
  a.kind = Kind::Alloc;
  a.rule = "alloc";
  a.instance = std::move(instance);
  a.protocol = std::move(protocol);
  a.parts = std::move(initial);
  a.deposited = std::move(stored);
  return a;
}

GhostAction GhostAction::exchange(Kind kind, std::string instance, std::vector<FragmentChange> parts,
                                  Element deposited, Element withdrawn) {
  GhostAction a;
  a.kind = kind;
  a.rule = to_string(kind);
  a.instance = std::move(instance);
  a.parts = std::move(parts);
  a.deposited = std::move(deposited);
  a.withdrawn = std::move(withdrawn);
  return a;
}

GhostAction GhostAction::open_guard(std::string instance, std::string owner, Element s) {
  GhostAction a;
  a.kind = Kind::OpenGuard;
  a.rule = "guard";
  a.instance = std::move(instance);
  a.owner = std::move(owner);
  a.element = std::move(s);
  return a;
}

GhostAction GhostAction::close_guard(std::string instance) {
  GhostAction a;
  a.kind = Kind::CloseGuard;
  a.rule = "close-guard";
  a.instance = std::move(instance);
  return a;
}

GhostAction GhostAction::transfer(std::string instance, std::string from, std::string to,
                                  std::optional<Element> piece) {
  GhostAction a;
  a.kind = Kind::Transfer;
  a.rule = "transfer";
  a.instance = std::move(instance);
  a.owner = std::move(from);
  a.to_owner = std::move(to);
  a.element = std::move(piece);
  return a;
}

namespace {

constexpr std::pair<GhostAction::Kind, const char*> kKindNames[] = {
    {GhostAction::Kind::Alloc, "alloc"},         {GhostAction::Kind::Exchange, "exchange"},
    {GhostAction::Kind::Deposit, "deposit"},     {GhostAction::Kind::Withdraw, "withdraw"},
    {GhostAction::Kind::Update, "update"},       {GhostAction::Kind::OpenGuard, "open-guard"},
    {GhostAction::Kind::CloseGuard, "close-guard"}, {GhostAction::Kind::Transfer, "transfer"},
};

}  // namespace

std::string to_string(GhostAction::Kind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<GhostAction::Kind> ghost_action_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kKindNames) {
    if (s == name) return kind;
  }
  return std::nullopt;
}

std::string describe(const GhostAction& a) {
  std::string out = a.rule.empty() ? to_string(a.kind) : a.rule;
  out += " on " + a.instance;
  switch (a.kind) {
    case GhostAction::Kind::OpenGuard:
      out += " by " + a.owner + " for " + (a.element ? a.element->to_string() : "eps");
      break;
    case GhostAction::Kind::Transfer:
      out += " from " + a.owner + " to " + a.to_owner;
      if (a.element) out += " of " + a.element->to_string();
      break;
    case GhostAction::Kind::CloseGuard:
      break;
    default:
      for (const auto& p : a.parts) {
        out += "; " + p.owner + ": " + p.before.to_string() + " -> " + p.after.to_string();
      }
      if (!a.deposited.is_unit()) out += "; deposit " + a.deposited.to_string();
      if (!a.withdrawn.is_unit()) out += "; withdraw " + a.withdrawn.to_string();
      break;
  }
  return out;
}

namespace {

ApplyOutcome admit(GhostLedger ledger) {
  ApplyOutcome o;
  o.admitted = true;
  o.ledger = std::move(ledger);
  return o;
}

ApplyOutcome reject(const GhostLedger& ledger, const GhostAction& a, std::string reason,
                    std::optional<Element> witness = std::nullopt) {
  ApplyOutcome o;
  o.ledger = ledger;
  o.violation = GhostViolation{describe(a), std::move(reason), std::move(witness)};
  return o;
}

Element storage_value(const StorageProtocolSpec& sp, const Element& s) {
  return s.is_unit() ? sp.storage.unit : s;
}

Element protocol_value(const StorageProtocolSpec& sp, const Element& p) {
  return p.is_unit() ? sp.protocol.unit : p;
}

void set_fragment(GhostInstance& inst, const std::string& owner, Element f) {
  if (f == inst.protocol->spec().protocol.unit || f.is_unit()) {
    inst.fragments.erase(owner);
  } else {
    inst.fragments[owner] = std::move(f);
  }
}

GhostInstance& mutable_instance(GhostLedger& l, const std::string& id) {
  const auto it = l.instances.find(id);
  if (it == l.instances.end()) throw GhostUsageError("unknown ghost instance '" + id + "'");
  return it->second;
}

void distinct_owners(const GhostAction& a) {
  std::set<std::string> seen;
  for (const auto& p : a.parts) {
    if (!seen.insert(p.owner).second) {
      throw GhostUsageError("owner '" + p.owner + "' appears twice in " + describe(a));
    }
  }
}

RelationKind relation_of(GhostAction::Kind k) {
  switch (k) {
    case GhostAction::Kind::Deposit:
      return RelationKind::Deposit;
    case GhostAction::Kind::Withdraw:
      return RelationKind::Withdraw;
    case GhostAction::Kind::Update:
      return RelationKind::Update;
    default:
      return RelationKind::Exchange;
  }
}

ApplyOutcome apply_alloc(const GhostLedger& ledger, const GhostAction& a) {
  if (!a.protocol) throw GhostUsageError("alloc of '" + a.instance + "' names no protocol");
  if (ledger.instances.contains(a.instance)) {
    throw GhostUsageError("ghost instance '" + a.instance + "' already exists");
  }
  distinct_owners(a);
  const auto& sp = a.protocol->spec();
  GhostLedger next = ledger;
  GhostInstance inst;
  inst.protocol = a.protocol;
  for (const auto& p : a.parts) set_fragment(inst, p.owner, protocol_value(sp, p.after));
  const Element joint = inst.joint();
  if (!sp.complete(joint)) return reject(ledger, a, "initial state " + joint.to_string() + " is not complete");
  inst.stored = sp.stored_of(joint);
  if (inst.stored != storage_value(sp, a.deposited)) {
    return reject(ledger, a, "initial stored content " + storage_value(sp, a.deposited).to_string() +
                                 " differs from the stored image " + inst.stored.to_string());
  }
  next.instances.emplace(a.instance, std::move(inst));
  return admit(std::move(next));
}

ApplyOutcome apply_exchange(const GhostLedger& ledger, const GhostAction& a, AdmissionMode mode) {
  const GhostInstance& inst = ledger.at(a.instance);
  const auto& proto = *inst.protocol;
  const auto& sp = proto.spec();
  const auto& m = sp.protocol;
  distinct_owners(a);
  const Element dep = storage_value(sp, a.deposited);
  const Element wd = storage_value(sp, a.withdrawn);
  if ((a.kind == GhostAction::Kind::Withdraw || a.kind == GhostAction::Kind::Update) && dep != sp.storage.unit) {
    throw GhostUsageError(describe(a) + " cannot deposit");
  }
  if ((a.kind == GhostAction::Kind::Deposit || a.kind == GhostAction::Kind::Update) && wd != sp.storage.unit) {
    throw GhostUsageError(describe(a) + " cannot withdraw");
  }

  std::map<std::string, Element> rest;  // each involved owner's untouched remainder
  Element p = m.unit;
  Element p_after = m.unit;
  for (const auto& part : a.parts) {
    const Element before = protocol_value(sp, part.before);
    const Element held = inst.fragment(part.owner);
    const auto r = proto.residual(before, held);
    if (!r) {
      return reject(ledger, a, part.owner + " does not hold " + before.to_string() + " (holds " +
                                   held.to_string() + ")");
    }
    rest[part.owner] = *r;
    p = m.compose(p, before);
    p_after = m.compose(p_after, protocol_value(sp, part.after));
  }
  Element frame = m.unit;
  for (const auto& [owner, f] : inst.fragments) {
    const auto it = rest.find(owner);
    frame = m.compose(frame, it == rest.end() ? f : it->second);
  }
  if (!sp.complete(m.compose(p, frame))) {
    return reject(ledger, a, "ledger state is not complete before the action");
  }
  try {
    if (mode == AdmissionMode::Rule) {
      const auto r = proto.exchange({relation_of(a.kind), p, dep, p_after, wd});
      if (!r.ok()) {
        return reject(ledger, a, "relation fails: " + r.reason, r.frame);
      }
    }
    if (const auto why = exchange_body(sp, p, dep, p_after, wd, frame)) {
      return reject(ledger, a, "fails against the actual frame: " + *why, frame);
    }
  } catch (const DomainError& e) {
    return reject(ledger, a, std::string("domain error: ") + e.what(), frame);
  }

  GhostLedger next = ledger;
  GhostInstance& out = mutable_instance(next, a.instance);
  for (const auto& part : a.parts) {
    set_fragment(out, part.owner, m.compose(rest[part.owner], protocol_value(sp, part.after)));
  }
  const Element stored_after = sp.stored_of(out.joint());
  if (sp.storage.compose(inst.stored, dep) != sp.storage.compose(stored_after, wd)) {
    return reject(ledger, a, "stored content " + inst.stored.to_string() + " does not account for the exchange");
  }
  out.stored = stored_after;
  return admit(std::move(next));
}

}  // namespace

std::variant<GuardWindow, GhostViolation> open_guard(const GhostLedger& ledger, const std::string& instance,
                                                     const std::string& owner, const Element& s,
                                                     AdmissionMode mode, GhostLedger* out) {
  const GhostInstance& inst = ledger.at(instance);
  const auto& sp = inst.protocol->spec();
  const Element guarded = storage_value(sp, s);
  const std::string what = "guard on " + instance + " by " + owner + " for " + guarded.to_string();
  if (inst.window) {
    return GhostViolation{what, "a guard window is already open on " + instance + " (held by " +
                                    inst.window->owner + ")", std::nullopt};
  }
  const Element p = inst.fragment(owner);
  if (mode == AdmissionMode::Rule) {
    const auto r = inst.protocol->guard(p, guarded);
    if (!r.ok()) return GhostViolation{what, owner + "'s fragment does not guard it: " + r.reason, r.frame};
  }
  if (!leq(sp.storage, guarded, inst.stored)) {
    return GhostViolation{what, "not included in the stored content " + inst.stored.to_string(), std::nullopt};
  }
  if (mode == AdmissionMode::Concrete) {
    const auto r = inst.protocol->guard_completions(inst.joint(), guarded);
    if (!r.ok()) return GhostViolation{what, r.reason, r.frame};
  }
  GuardWindow w{instance, owner, guarded, 0};
  if (out) {
    *out = ledger;
    mutable_instance(*out, instance).window = w;
  }
  return w;
}

ApplyOutcome apply_action(const GhostLedger& ledger, const GhostAction& a, AdmissionMode mode,
                          std::uint64_t step) {
  switch (a.kind) {
    case GhostAction::Kind::Alloc:
      return apply_alloc(ledger, a);
    case GhostAction::Kind::Exchange:
    case GhostAction::Kind::Deposit:
    case GhostAction::Kind::Withdraw:
    case GhostAction::Kind::Update:
      return apply_exchange(ledger, a, mode);
    case GhostAction::Kind::OpenGuard: {
      GhostLedger next;
      auto r = open_guard(ledger, a.instance, a.owner, a.element.value_or(Element::unit()), mode, &next);
      if (auto* v = std::get_if<GhostViolation>(&r)) {
        ApplyOutcome o;
        o.ledger = ledger;
        o.violation = std::move(*v);
        return o;
      }
      mutable_instance(next, a.instance).window->step = step;
      return admit(std::move(next));
    }
    case GhostAction::Kind::CloseGuard: {
      GhostLedger next = ledger;
      GhostInstance& inst = mutable_instance(next, a.instance);
      if (!inst.window) throw GhostUsageError("no guard window is open on '" + a.instance + "'");
      inst.window.reset();
      return admit(std::move(next));
    }
    case GhostAction::Kind::Transfer: {
      const GhostInstance& inst = ledger.at(a.instance);
      if (a.owner == a.to_owner) throw GhostUsageError("transfer from " + a.owner + " to itself");
      const auto& m = inst.protocol->spec().protocol;
      const Element held = inst.fragment(a.owner);
      const Element piece = a.element ? protocol_value(inst.protocol->spec(), *a.element) : held;
      const auto r = inst.protocol->residual(piece, held);
      if (!r) {
        return reject(ledger, a, a.owner + " does not hold " + piece.to_string() + " (holds " +
                                     held.to_string() + ")");
      }
      GhostLedger next = ledger;
      GhostInstance& out = mutable_instance(next, a.instance);
      set_fragment(out, a.owner, *r);
      set_fragment(out, a.to_owner, m.compose(inst.fragment(a.to_owner), piece));
      return admit(std::move(next));
    }
  }
  throw GhostUsageError("unknown ghost action kind");
}

std::optional<std::string> check_ledger_invariants(const GhostLedger& ledger) {
  for (const auto& [id, inst] : ledger.instances) {
    const auto& sp = inst.protocol->spec();
    const Element j = inst.joint();
    if (!sp.complete(j)) return id + ": joint state " + j.to_string() + " is not complete";
    if (!valid_fragment(sp, j)) return id + ": joint state " + j.to_string() + " has no completion";
    if (!sp.storage.valid(inst.stored)) return id + ": stored " + inst.stored.to_string() + " is not valid";
    const Element image = sp.stored_of(j);
    if (image != inst.stored) {
      return id + ": stored " + inst.stored.to_string() + " differs from the stored image " + image.to_string();
    }
    if (inst.window && !leq(sp.storage, inst.window->guarded, inst.stored)) {
      return id + ": open window guards " + inst.window->guarded.to_string() + " which is not stored";
    }
  }
  return std::nullopt;
}

nlohmann::json ledger_snapshot(const GhostLedger& ledger) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [id, inst] : ledger.instances) {
    nlohmann::json frags = nlohmann::json::object();
    for (const auto& [owner, f] : inst.fragments) frags[owner] = f.to_string();
    nlohmann::json j{{"protocol", inst.protocol->name()},
                     {"fragments", std::move(frags)},
                     {"stored", inst.stored.to_string()},
                     {"window", nullptr}};
    if (inst.window) {
      j["window"] = {{"owner", inst.window->owner}, {"guarded", inst.window->guarded.to_string()}};
    }
    out[id] = std::move(j);
  }
  return out;
}

std::size_t ledger_hash(const GhostLedger& ledger) {
  std::size_t h = 0x6a09e667f3bcc908ULL;
  const std::hash<std::string> sh;
  for (const auto& [id, inst] : ledger.instances) {
    h = hash_combine(h, sh(id));
    for (const auto& [owner, f] : inst.fragments) {
      h = hash_combine(h, sh(owner));
      h = hash_combine(h, f.hash());
    }
    h = hash_combine(h, inst.stored.hash());
    if (inst.window) h = hash_combine(h, hash_combine(sh(inst.window->owner), inst.window->guarded.hash()));
  }
  return h;
}

// ------------------------------------------------------------ templates

const Element& RuleContext::arg(const std::string& name) const {
  const auto it = args.find(name);
  if (it == args.end()) throw RuleError("rule argument '" + name + "' is missing");
  return it->second;
}

namespace {

RwView view_of(const Element& f) {
  if (f.is_unit()) {
    RwView v;
    v.ep = v.e = v.s = Element::unit();
    return v;
  }
  const auto v = rw_view(f);
  if (!v) throw RuleError("fragment " + f.to_string() + " is invalid");
  return *v;
}

RwView region_view(const RuleContext& c) {
  const RwView v = view_of(c.ledger.at(c.instance).fragment(c.region));
  if (!v.has_fields) throw RuleError(c.region + " holds no fields fragment in " + c.instance);
  return v;
}

RwView owner_view(const RuleContext& c) { return view_of(c.ledger.at(c.instance).fragment(c.owner)); }

// The value x of an agreement component agn(x, n).
Element shared_value(const RuleContext& c) {
  const RwView v = owner_view(c);
  if (v.s.is_unit()) throw RuleError(c.owner + " holds no shared token in " + c.instance);
  return v.s.items()[0];
}

GhostAction named(GhostAction a, std::string rule) {
  a.rule = std::move(rule);
  return a;
}

using K = GhostAction::Kind;

}  // namespace

RuleSet rwlock_rules() {
  RuleSet r;
  const Element eps = Element::unit();
  r["rw-exc-begin"] = [eps](const RuleContext& c) {
    const RwView f = region_view(c);
    const std::int64_t rc = f.rc.as_int();
    return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                   {{c.region, rw_fields(f.exc, rc, f.x), rw_fields(true, rc, f.x)},
                                                    {c.owner, eps, rw_exc_pending()}}),
                             "rw-exc-begin")};
  };
  r["rw-exc-acquire"] = [eps](const RuleContext& c) {
    const RwView f = region_view(c);
    const Element fields = rw_fields(f.exc, f.rc.as_int(), f.x);
    return std::vector{named(GhostAction::exchange(K::Withdraw, c.instance,
                                                   {{c.region, fields, fields}, {c.owner, rw_exc_pending(), rw_exc()}},
                                                   eps, ex(f.x)),
                             "rw-exc-acquire")};
  };
  r["rw-exc-release"] = [eps](const RuleContext& c) {
    const RwView f = region_view(c);
    const Element& x = c.arg("x");
    const std::int64_t rc = f.rc.as_int();
    return std::vector{named(GhostAction::exchange(K::Deposit, c.instance,
                                                   {{c.region, rw_fields(f.exc, rc, f.x), rw_fields(false, rc, x)},
                                                    {c.owner, rw_exc(), eps}},
                                                   ex(x), eps),
                             "rw-exc-release")};
  };
  r["rw-shared-begin"] = [eps](const RuleContext& c) {
    const RwView f = region_view(c);
    const std::int64_t rc = f.rc.as_int();
    return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                   {{c.region, rw_fields(f.exc, rc, f.x), rw_fields(f.exc, rc + 1, f.x)},
                                                    {c.owner, eps, rw_sh_pending()}}),
                             "rw-shared-begin")};
  };
  r["rw-shared-acquire"] = [](const RuleContext& c) {
    const RwView f = region_view(c);
    const Element fields = rw_fields(f.exc, f.rc.as_int(), f.x);
    return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                   {{c.region, fields, fields}, {c.owner, rw_sh_pending(), rw_sh(f.x)}}),
                             "rw-shared-acquire")};
  };
  r["rw-shared-retry"] = [eps](const RuleContext& c) {
    const RwView f = region_view(c);
    const std::int64_t rc = f.rc.as_int();
    return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                   {{c.region, rw_fields(f.exc, rc, f.x), rw_fields(f.exc, rc - 1, f.x)},
                                                    {c.owner, rw_sh_pending(), eps}}),
                             "rw-shared-retry")};
  };
  r["rw-shared-release"] = [eps](const RuleContext& c) {
    const RwView f = region_view(c);
    const Element y = shared_value(c);
    const std::int64_t rc = f.rc.as_int();
    return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                   {{c.region, rw_fields(f.exc, rc, f.x), rw_fields(f.exc, rc - 1, f.x)},
                                                    {c.owner, rw_sh(y), eps}}),
                             "rw-shared-release")};
  };
  r["rw-shared-guard"] = [](const RuleContext& c) {
    return std::vector{named(GhostAction::open_guard(c.instance, c.owner, ex(shared_value(c))), "rw-shared-guard")};
  };
  return r;
}

namespace {

std::vector<std::int64_t> counters(const RwView& f) {
  std::vector<std::int64_t> out;
  for (const auto& e : f.rc.items()) out.push_back(e.as_int());
  return out;
}

int counter_arg(const RuleContext& c, int k) {
  const std::int64_t i = c.arg("k").as_int();
  if (i < 0 || i >= k) throw RuleError("counter index " + std::to_string(i) + " is outside [0, K)");
  return static_cast<int>(i);
}

}  // namespace

RuleSet rwlock_multi_rules(int k) {
  RuleSet r;
  const Element eps = Element::unit();
  r["xrw-exc-begin"] = [eps, k](const RuleContext& c) {
    const RwView f = region_view(c);
    const auto rcs = counters(f);
    return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                   {{c.region, rwm_fields(f.exc, rcs, f.x), rwm_fields(true, rcs, f.x)},
                                                    {c.owner, eps, rwm_exc_pending(k, 0)}}),
                             "xrw-exc-begin")};
  };
  r["xrw-exc-progress"] = [k](const RuleContext& c) {
    const RwView f = region_view(c);
    const RwView o = owner_view(c);
    if (o.ep.is_unit()) throw RuleError(c.owner + " holds no pending exclusive token in " + c.instance);
    const std::int64_t j = o.ep.items()[0].as_int();
    const Element fields = rwm_fields(f.exc, counters(f), f.x);
    return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                   {{c.region, fields, fields},
                                                    {c.owner, rwm_exc_pending(k, j), rwm_exc_pending(k, j + 1)}}),
                             "xrw-exc-progress")};
  };
  r["xrw-exc-acquire"] = [eps, k](const RuleContext& c) {
    const RwView f = region_view(c);
    const Element fields = rwm_fields(f.exc, counters(f), f.x);
    return std::vector{named(GhostAction::exchange(K::Withdraw, c.instance,
                                                   {{c.region, fields, fields}, {c.owner, rwm_exc_pending(k, k), rwm_exc(k)}},
                                                   eps, ex(f.x)),
                             "xrw-exc-acquire")};
  };
  r["xrw-exc-release"] = [eps, k](const RuleContext& c) {
    const RwView f = region_view(c);
    const auto rcs = counters(f);
    const Element& x = c.arg("x");
    return std::vector{named(GhostAction::exchange(K::Deposit, c.instance,
                                                   {{c.region, rwm_fields(f.exc, rcs, f.x), rwm_fields(false, rcs, x)},
                                                    {c.owner, rwm_exc(k), eps}},
                                                   ex(x), eps),
                             "xrw-exc-release")};
  };
  const auto counter_step = [eps, k](const char* name, std::int64_t delta, bool to_pending) {
    return [=](const RuleContext& c) {
      const RwView f = region_view(c);
      const int i = counter_arg(c, k);
      auto rcs = counters(f);
      const Element before = rwm_fields(f.exc, rcs, f.x);
      rcs[static_cast<std::size_t>(i)] += delta;
      Element owner_before = eps;
      Element owner_after = eps;
      if (to_pending) {
        owner_after = rwm_sh_pending(k, i);
      } else if (std::string_view(name) == "xrw-shared-retry") {
        owner_before = rwm_sh_pending(k, i);
      } else {
        owner_before = rwm_sh(k, i, shared_value(c));
      }
      return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                     {{c.region, before, rwm_fields(f.exc, rcs, f.x)},
                                                      {c.owner, owner_before, owner_after}}),
                               name)};
    };
  };
  r["xrw-shared-begin"] = counter_step("xrw-shared-begin", 1, true);
  r["xrw-shared-retry"] = counter_step("xrw-shared-retry", -1, false);
  r["xrw-shared-release"] = counter_step("xrw-shared-release", -1, false);
  r["xrw-shared-acquire"] = [k](const RuleContext& c) {
    const RwView f = region_view(c);
    const int i = counter_arg(c, k);
    const Element fields = rwm_fields(f.exc, counters(f), f.x);
    return std::vector{named(GhostAction::exchange(K::Update, c.instance,
                                                   {{c.region, fields, fields},
                                                    {c.owner, rwm_sh_pending(k, i), rwm_sh(k, i, f.x)}}),
                             "xrw-shared-acquire")};
  };
  r["xrw-shared-guard"] = [](const RuleContext& c) {
    return std::vector{named(GhostAction::open_guard(c.instance, c.owner, ex(shared_value(c))), "xrw-shared-guard")};
  };
  return r;
}

namespace {

// The option inside ex(...) that `owner` holds at `key` of component `which`.
Element held_entry(const RuleContext& c, std::size_t which, const Element& key, const char* what) {
  const Element f = c.ledger.at(c.instance).fragment(c.owner);
  if (f.kind() != ElementKind::Tuple || f.items().size() != 2) {
    throw RuleError(c.owner + " holds no " + what + " " + key.to_string() + " in " + c.instance);
  }
  const Element* e = f.items()[which].map_find(key);
  if (!e || !e->is_ctor("ex")) {
    throw RuleError(c.owner + " holds no " + what + " " + key.to_string() + " in " + c.instance);
  }
  return e->items()[0];
}

}  // namespace

RuleSet hashtable_rules(const HashTableParams& params) {
  RuleSet r;
  // Covers both UpdateExisting and UpdateInsert: the owner must hold m(k, _)
  // and every slot from H(k) to the written index.
  r["ht-update"] = [params](const RuleContext& c) {
    const std::int64_t i = c.arg("index").as_int();
    const Element& entry = c.arg("entry");
    if (!entry.is_ctor("some") || entry.items()[0].kind() != ElementKind::Tuple) {
      throw RuleError("written slot value " + entry.to_string() + " is not Some((k, v))");
    }
    const Element key = entry.items()[0].items()[0];
    const Element value = entry.items()[0].items()[1];
    const auto& m = c.ledger.at(c.instance).protocol->spec().protocol;
    const std::int64_t h = params.hash_of(key);
    if (i < h) throw RuleError("slot " + std::to_string(i) + " precedes H(" + key.to_string() + ")");
    Element before = ht_m(key, held_entry(c, 0, key, "map entry"));
    Element after = ht_m(key, some(value));
    for (std::int64_t j = h; j <= i; ++j) {
      const Element s = held_entry(c, 1, Element::integer(j), "slot");
      before = m.compose(before, ht_slot(j, s));
      after = m.compose(after, ht_slot(j, j == i ? entry : s));
    }
    return std::vector{named(GhostAction::exchange(K::Update, c.instance, {{c.owner, before, after}}), "ht-update")};
  };
  r["ht-take-slot"] = [](const RuleContext& c) {
    return std::vector{named(GhostAction::transfer(c.instance, c.region, c.owner), "ht-take-slot")};
  };
  r["ht-return-slot"] = [](const RuleContext& c) {
    const std::int64_t i = c.arg("index").as_int();
    const Element s = held_entry(c, 1, Element::integer(i), "slot");
    return std::vector{named(GhostAction::transfer(c.instance, c.owner, c.region, ht_slot(i, s)), "ht-return-slot")};
  };
  return r;
}

}  // namespace sharecheck
