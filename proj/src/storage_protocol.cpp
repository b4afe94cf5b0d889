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

#include "sharecheck/storage_protocol.hpp"

#include "sharecheck/combinators.hpp"

namespace sharecheck {

Element stored(const StorageProtocolSpec& sp, const Element& p) {
  if (!sp.complete(p)) throw DomainError("storage function applied outside C at " + p.to_string());
  return sp.stored_of(p);
}

std::string to_string(RelationKind k) {
  switch (k) {
    case RelationKind::Exchange:
      return "exchange";
    case RelationKind::Deposit:
      return "deposit";
    case RelationKind::Withdraw:
      return "withdraw";
    case RelationKind::Update:
      return "update";
    case RelationKind::Guard:
      return "guard";
  }
  return "?";
}

std::optional<RelationKind> relation_kind_from_string(std::string_view s) {
  for (auto k : {RelationKind::Exchange, RelationKind::Deposit, RelationKind::Withdraw,
                 RelationKind::Update, RelationKind::Guard}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

ExchangeQuery normalized(const StorageProtocolSpec& sp, ExchangeQuery q) {
  const Element& u = sp.storage.unit;
  switch (q.kind) {
    case RelationKind::Deposit:
      q.s_after = u;
      break;
    case RelationKind::Withdraw:
      q.s = u;
      break;
    case RelationKind::Update:
      q.s = u;
      q.s_after = u;
      break;
    case RelationKind::Guard:
      q.p_after = q.p;
      q.s_after = u;
      break;
    case RelationKind::Exchange:
      break;
  }
  return q;
}

std::optional<std::string> exchange_body(const StorageProtocolSpec& sp, const Element& p,
                                         const Element& s, const Element& p_after,
                                         const Element& s_after, const Element& frame) {
  const Element pq = sp.protocol.compose(p, frame);
  if (!sp.complete(pq)) return std::nullopt;
  const Element pq2 = sp.protocol.compose(p_after, frame);
  if (!sp.complete(pq2)) return "C(p.q) holds but C(p'.q) does not";
  const Element before = sp.storage.compose(sp.stored_of(pq), s);
  if (!sp.storage.valid(before)) return "S(p.q).s is not valid";
  const Element after = sp.storage.compose(sp.stored_of(pq2), s_after);
  if (before != after) {
    return "S(p.q).s = " + before.to_string() + " but S(p'.q).s' = " + after.to_string();
  }
  return std::nullopt;
}

std::optional<std::string> guard_body(const StorageProtocolSpec& sp, const Element& p,
                                      const Element& s, const Element& frame) {
  const Element pq = sp.protocol.compose(p, frame);
  if (!sp.complete(pq)) return std::nullopt;
  const Element st = sp.stored_of(pq);
  if (leq(sp.storage, s, st)) return std::nullopt;
  return "C(p.q) holds but s is not included in S(p.q) = " + st.to_string();
}

std::optional<std::string> query_body(const StorageProtocolSpec& sp, const ExchangeQuery& q,
                                      const Element& frame) {
  const ExchangeQuery n = normalized(sp, q);
  if (n.kind == RelationKind::Guard) return guard_body(sp, n.p, n.s, frame);
  return exchange_body(sp, n.p, n.s, n.p_after, n.s_after, frame);
}

CheckResult exchange_holds(const StorageProtocolSpec& sp, const ExchangeQuery& q) {
  const ExchangeQuery n = normalized(sp, q);
  std::size_t count = 0;
  for (const auto& frame : sp.protocol.enumerator.elements()) {
    ++count;
    if (auto why = query_body(sp, n, frame)) return fails_with(frame, *why, count);
  }
  return holds_over(sp.protocol.enumerator, count);
}

CheckResult deposit_holds(const StorageProtocolSpec& sp, const Element& p, const Element& s,
                          const Element& p_after) {
  return exchange_holds(sp, {RelationKind::Deposit, p, s, p_after, sp.storage.unit});
}

CheckResult withdraw_holds(const StorageProtocolSpec& sp, const Element& p,
                           const Element& p_after, const Element& s_after) {
  return exchange_holds(sp, {RelationKind::Withdraw, p, sp.storage.unit, p_after, s_after});
}

CheckResult update_holds(const StorageProtocolSpec& sp, const Element& p, const Element& p_after) {
  return exchange_holds(sp, {RelationKind::Update, p, sp.storage.unit, p_after, sp.storage.unit});
}

CheckResult guard_holds(const StorageProtocolSpec& sp, const Element& p, const Element& s) {
  return exchange_holds(sp, {RelationKind::Guard, p, s, p, sp.storage.unit});
}

std::optional<Element> completion_witness(const StorageProtocolSpec& sp, const Element& p) {
  for (const auto& q : sp.protocol.enumerator.elements()) {
    if (sp.complete(sp.protocol.compose(p, q))) return q;
  }
  return std::nullopt;
}

bool valid_fragment(const StorageProtocolSpec& sp, const Element& p) {
  return completion_witness(sp, p).has_value();
}

LawReport check_wellformed(const StorageProtocolSpec& sp, const LawOptions& options) {
  LawReport report;
  report.subject = sp.name;
  for (auto [prefix, m] : {std::pair{"protocol", &sp.protocol}, std::pair{"storage", &sp.storage}}) {
    for (auto& l : check_pcm_laws(*m, options).laws) {
      l.law = std::string(prefix) + ":" + l.law;
      report.laws.push_back(std::move(l));
    }
  }
  LawResult lr;
  lr.law = "complete-implies-valid-storage";
  std::size_t n = 0;
  for (const auto& p : sp.protocol.enumerator.elements()) {
    ++n;
    if (!sp.complete(p)) continue;
    std::string why;
    try {
      if (!sp.storage.valid(sp.stored_of(p))) why = "S(p) is not valid";
    } catch (const DomainError& e) {
      why = std::string("domain error: ") + e.what();
    } catch (const EncodingError& e) {
      why = std::string("encoding error: ") + e.what();
    }
    if (!why.empty()) {
      lr.result = fails_with(p, why, n);
      lr.witness = {p};
      break;
    }
  }
  if (lr.result.ok()) lr.result = holds_over(sp.protocol.enumerator, n);
  report.laws.push_back(std::move(lr));
  return report;
}

MonoidSpec completion_graph(const StorageProtocolSpec& sp) {
  auto pcopy = std::make_shared<const StorageProtocolSpec>(sp);
  MonoidSpec g = build_product({sp.protocol, sp.storage});
  g.name = "Graph(" + sp.name + ")";
  g.valid = [pcopy](const Element& a) {
    if (a.is_bottom()) return false;
    const Element& p = a.items()[0];
    return pcopy->complete(p) && pcopy->stored_of(p) == a.items()[1];
  };
  return g;
}

UpdateAgreement cross_validate_updates(const StorageProtocolSpec& sp,
                                       std::span<const std::pair<Element, Element>> pairs) {
  UpdateAgreement out;
  const MonoidSpec graph = completion_graph(sp);
  const Element su = sp.storage.unit;
  for (const auto& [p, p2] : pairs) {
    ++out.pairs;
    const bool by_protocol = update_holds(sp, p, p2).ok();
    const bool by_graph =
        frame_preserving_update(graph, Element::tuple({p, su}), Element::tuple({p2, su})).ok();
    if (by_protocol != by_graph) {
      out.disagreements.push_back(p.to_string() + " ~> " + p2.to_string() + ": update " +
                                  (by_protocol ? "holds" : "fails") + ", graph update " +
                                  (by_graph ? "holds" : "fails"));
    }
  }
  return out;
}

StorageProtocolSpec pcm_as_protocol(const MonoidSpec& m) {
  StorageProtocolSpec sp;
  sp.name = "PCM(" + m.name + ")";
  sp.protocol = m;
  sp.storage = build_trivial();
  auto v = m.valid;
  sp.complete = v;
  sp.stored_of = [](const Element&) { return Element::unit(); };
  return sp;
}

}  // namespace sharecheck
