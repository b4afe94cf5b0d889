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

#include "sharecheck/monoid.hpp"

#include <algorithm>
#include <unordered_set>

namespace sharecheck {

namespace {

std::vector<Element> normalize_order(std::vector<Element> elements) {
  std::sort(elements.begin(), elements.end(), rank_less);
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  return elements;
}

}  // namespace

ElementEnumerator ElementEnumerator::exhaustive(std::vector<Element> elements) {
  ElementEnumerator e;
  e.mode_ = EnumerationMode::Exhaustive;
  e.elements_ = std::make_shared<const std::vector<Element>>(normalize_order(std::move(elements)));
  return e;
}

ElementEnumerator ElementEnumerator::bounded(std::vector<Element> elements, std::string bound) {
  ElementEnumerator e;
  e.mode_ = EnumerationMode::Bounded;
  e.bound_ = std::move(bound);
  e.elements_ = std::make_shared<const std::vector<Element>>(normalize_order(std::move(elements)));
  return e;
}

std::span<const Element> ElementEnumerator::prefix(std::size_t n) const {
  return elements().first(std::min(n, size()));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::FailsWithWitness:
      return "fails";
    case Verdict::HoldsUpToBound:
      return "holds-up-to-bound";
  }
  return "?";
}

CheckResult holds_over(const ElementEnumerator& frames, std::size_t examined) {
  CheckResult r;
  r.frames_examined = examined;
  if (frames.is_exhaustive()) {
    r.verdict = Verdict::Holds;
  } else {
    r.verdict = Verdict::HoldsUpToBound;
    r.bound = frames.bound();
  }
  return r;
}

CheckResult fails_with(Element frame, std::string reason, std::size_t examined) {
  CheckResult r;
  r.verdict = Verdict::FailsWithWitness;
  r.frame = std::move(frame);
  r.reason = std::move(reason);
  r.frames_examined = examined;
  return r;
}

Element compose(const MonoidSpec& spec, const Element& a, const Element& b) {
  if (spec.accepts && !spec.accepts(a)) {
    throw EncodingError(a.to_string() + " is not an element of " + spec.name);
  }
  if (spec.accepts && !spec.accepts(b)) {
    throw EncodingError(b.to_string() + " is not an element of " + spec.name);
  }
  return spec.compose(a, b);
}

Element compose_all(const MonoidSpec& spec, std::span<const Element> parts) {
  Element acc = spec.unit;
  for (const auto& p : parts) acc = spec.compose(acc, p);
  return acc;
}

std::optional<Element> leq_witness(const MonoidSpec& spec, const Element& a, const Element& b) {
  for (const auto& c : spec.enumerator.elements()) {
    if (spec.compose(a, c) == b) return c;
  }
  return std::nullopt;
}

bool leq(const MonoidSpec& spec, const Element& a, const Element& b) {
  if (spec.divides) return spec.divides(a, b);
  return leq_witness(spec, a, b).has_value();
}

bool fpu_body(const MonoidSpec& spec, const Element& a, const Element& b, const Element& c) {
  return !spec.valid(spec.compose(a, c)) || spec.valid(spec.compose(b, c));
}

CheckResult frame_preserving_update(const MonoidSpec& spec, const Element& a, const Element& b) {
  std::size_t n = 0;
  for (const auto& c : spec.enumerator.elements()) {
    ++n;
    if (!fpu_body(spec, a, b, c)) {
      return fails_with(c, "valid(a.c) but not valid(b.c)", n);
    }
  }
  return holds_over(spec.enumerator, n);
}

bool and_premise_body(const MonoidSpec& spec, const Element& x, const Element& y,
                      const Element& z, const Element& t) {
  if (!spec.valid(t)) return true;
  if (!leq(spec, x, t) || !leq(spec, y, t)) return true;
  return leq(spec, z, t);
}

CheckResult and_premise(const MonoidSpec& spec, const Element& x, const Element& y,
                        const Element& z) {
  std::size_t n = 0;
  for (const auto& t : spec.enumerator.elements()) {
    ++n;
    if (!and_premise_body(spec, x, y, z, t)) {
      return fails_with(t, "x <= t and y <= t and valid(t) but not z <= t", n);
    }
  }
  return holds_over(spec.enumerator, n);
}

bool LawReport::all_hold() const {
  return std::all_of(laws.begin(), laws.end(), [](const LawResult& l) { return l.result.ok(); });
}

const LawResult* LawReport::find(std::string_view law) const {
  for (const auto& l : laws) {
    if (l.law == law) return &l;
  }
  return nullptr;
}

LawReport check_pcm_laws(const MonoidSpec& spec, const LawOptions& options) {
  LawReport report;
  report.subject = spec.name;
  const auto& en = spec.enumerator;
  const bool small = en.size() <= options.triple_limit;
  const auto singles = en.elements();
  const auto pairs = small ? en.elements() : en.prefix(options.pair_limit);
  const auto triples = small ? en.elements() : en.prefix(options.triple_limit);
  const bool complete = en.is_exhaustive() && small;

  auto finish = [&](std::string law, std::size_t examined, std::optional<std::vector<Element>> bad,
                    std::string reason, bool full) {
    LawResult lr;
    lr.law = std::move(law);
    if (bad) {
      lr.witness = *bad;
      lr.result = fails_with(Element::tuple(*bad), std::move(reason), examined);
    } else {
      lr.result.frames_examined = examined;
      if (full) {
        lr.result.verdict = Verdict::Holds;
      } else {
        lr.result.verdict = Verdict::HoldsUpToBound;
        lr.result.bound = en.is_exhaustive()
                              ? "leading " + std::to_string(pairs.size()) + " elements (pairs), " +
                                    std::to_string(triples.size()) + " (triples) of " +
                                    std::to_string(en.size())
                              : en.bound();
      }
    }
    report.laws.push_back(std::move(lr));
  };

  {
    std::size_t n = 0;
    std::optional<std::vector<Element>> bad;
    for (const auto& a : singles) {
      ++n;
      if (spec.compose(a, spec.unit) != a) {
        bad = std::vector<Element>{a};
        break;
      }
    }
    finish("unit", n, bad, "a . unit != a", en.is_exhaustive());
  }
  {
    std::size_t n = 0;
    std::optional<std::vector<Element>> bad;
    for (const auto& a : pairs) {
      for (const auto& b : pairs) {
        ++n;
        if (spec.compose(a, b) != spec.compose(b, a)) {
          bad = std::vector<Element>{a, b};
          break;
        }
      }
      if (bad) break;
    }
    finish("commutativity", n, bad, "a . b != b . a", en.is_exhaustive() && pairs.size() == en.size());
  }
  {
    std::size_t n = 0;
    std::optional<std::vector<Element>> bad;
    for (const auto& a : triples) {
      for (const auto& b : triples) {
        const Element ab = spec.compose(a, b);
        for (const auto& c : triples) {
          ++n;
          if (spec.compose(ab, c) != spec.compose(a, spec.compose(b, c))) {
            bad = std::vector<Element>{a, b, c};
            break;
          }
        }
        if (bad) break;
      }
      if (bad) break;
    }
    finish("associativity", n, bad, "(a . b) . c != a . (b . c)", complete);
  }
  {
    std::optional<std::vector<Element>> bad;
    if (!spec.valid(spec.unit)) bad = std::vector<Element>{spec.unit};
    finish("valid-unit", 1, bad, "unit is not valid", true);
  }
  {
    // a ≼ a·c and valid(a·c) must give valid(a).
    std::size_t n = 0;
    std::optional<std::vector<Element>> bad;
    for (const auto& a : pairs) {
      if (spec.valid(a)) continue;
      for (const auto& c : pairs) {
        ++n;
        if (spec.valid(spec.compose(a, c))) {
          bad = std::vector<Element>{a, c};
          break;
        }
      }
      if (bad) break;
    }
    finish("valid-downward-closed", n, bad, "valid(a . c) but not valid(a)",
           en.is_exhaustive() && pairs.size() == en.size());
  }
  return report;
}

}  // namespace sharecheck
