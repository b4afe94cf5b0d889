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

#include "sharecheck/element.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <numeric>
#include <sstream>

namespace sharecheck {

struct Element::Node {
  ElementKind kind = ElementKind::Unit;
  std::int64_t a = 0;  // integer value / numerator
  std::int64_t b = 1;  // denominator
  std::string tag;
  std::vector<Element> items;
  std::size_t hash = 0;
};

namespace {

std::size_t compute_hash(const ElementKind kind, std::int64_t a, std::int64_t b,
                         const std::string& tag, const std::vector<Element>& items) {
  std::size_t h = std::hash<int>{}(static_cast<int>(kind));
  h = hash_combine(h, std::hash<std::int64_t>{}(a));
  h = hash_combine(h, std::hash<std::int64_t>{}(b));
  h = hash_combine(h, std::hash<std::string>{}(tag));
  for (const auto& it : items) h = hash_combine(h, it.hash());
  return h;
}

}  // namespace

Element::Element(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Element::Element() : Element(unit()) {}

Element Element::unit() {
  static const Element u = [] {
    auto n = std::make_shared<Node>();
    n->kind = ElementKind::Unit;
    n->hash = compute_hash(n->kind, 0, 1, {}, {});
    return Element(std::shared_ptr<const Node>(std::move(n)));
  }();
  return u;
}

Element Element::bottom() {
  static const Element bot = [] {
    auto n = std::make_shared<Node>();
    n->kind = ElementKind::Bottom;
    n->hash = compute_hash(n->kind, 0, 1, {}, {});
    return Element(std::shared_ptr<const Node>(std::move(n)));
  }();
  return bot;
}

Element Element::integer(std::int64_t value) {
  auto n = std::make_shared<Node>();
  n->kind = ElementKind::Int;
  n->a = value;
  n->hash = compute_hash(n->kind, value, 1, {}, {});
  return Element(std::shared_ptr<const Node>(std::move(n)));
}

Element Element::rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw EncodingError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (den == 1) return integer(num);
  auto n = std::make_shared<Node>();
  n->kind = ElementKind::Rational;
  n->a = num;
  n->b = den;
  n->hash = compute_hash(n->kind, num, den, {}, {});
  return Element(std::shared_ptr<const Node>(std::move(n)));
}

Element Element::boolean(bool value) { return ctor(value ? "true" : "false"); }

Element Element::ctor(std::string tag, std::vector<Element> args) {
  auto n = std::make_shared<Node>();
  n->kind = ElementKind::Ctor;
  n->tag = std::move(tag);
  n->items = std::move(args);
  n->hash = compute_hash(n->kind, 0, 1, n->tag, n->items);
  return Element(std::shared_ptr<const Node>(std::move(n)));
}

Element Element::tuple(std::vector<Element> items) {
  auto n = std::make_shared<Node>();
  n->kind = ElementKind::Tuple;
  n->items = std::move(items);
  n->hash = compute_hash(n->kind, 0, 1, {}, n->items);
  return Element(std::shared_ptr<const Node>(std::move(n)));
}

Element Element::map(std::vector<std::pair<Element, Element>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  auto n = std::make_shared<Node>();
  n->kind = ElementKind::Map;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0 && entries[i].first == entries[i - 1].first) {
      throw EncodingError("duplicate map key " + entries[i].first.to_string());
    }
    if (entries[i].second.is_unit()) continue;
    n->items.push_back(entries[i].first);
    n->items.push_back(entries[i].second);
  }
  n->hash = compute_hash(n->kind, 0, 1, {}, n->items);
  return Element(std::shared_ptr<const Node>(std::move(n)));
}

ElementKind Element::kind() const { return node_->kind; }

bool Element::is_ctor(std::string_view tag) const {
  return node_->kind == ElementKind::Ctor && node_->tag == tag;
}

std::int64_t Element::as_int() const {
  if (node_->kind != ElementKind::Int) throw EncodingError("expected integer, got " + to_string());
  return node_->a;
}

std::int64_t Element::num() const {
  if (node_->kind != ElementKind::Int && node_->kind != ElementKind::Rational) {
    throw EncodingError("expected number, got " + to_string());
  }
  return node_->a;
}

std::int64_t Element::den() const {
  if (node_->kind != ElementKind::Int && node_->kind != ElementKind::Rational) {
    throw EncodingError("expected number, got " + to_string());
  }
  return node_->b;
}

bool Element::as_bool() const {
  if (is_ctor("true")) return true;
  if (is_ctor("false")) return false;
  throw EncodingError("expected boolean, got " + to_string());
}

const std::string& Element::tag() const {
  if (node_->kind != ElementKind::Ctor) throw EncodingError("expected constructor, got " + to_string());
  return node_->tag;
}

std::span<const Element> Element::items() const {
  if (node_->kind != ElementKind::Ctor && node_->kind != ElementKind::Tuple) {
    throw EncodingError("expected constructor or tuple, got " + to_string());
  }
  return node_->items;
}

std::span<const Element> Element::map_flat() const {
  if (node_->kind != ElementKind::Map) throw EncodingError("expected map, got " + to_string());
  return node_->items;
}

const Element* Element::map_find(const Element& key) const {
  const auto flat = map_flat();
  std::size_t lo = 0;
  std::size_t hi = flat.size() / 2;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const auto c = flat[2 * mid] <=> key;
    if (c == 0) return &flat[2 * mid + 1];
    if (c < 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return nullptr;
}

std::size_t Element::hash() const { return node_->hash; }

std::string Element::to_string() const {
  std::ostringstream os;
  switch (node_->kind) {
    case ElementKind::Unit:
      os << "eps";
      break;
    case ElementKind::Bottom:
      os << "bot";
      break;
    case ElementKind::Int:
      os << node_->a;
      break;
    case ElementKind::Rational:
      os << node_->a;
      if (node_->b != 1) os << "/" << node_->b;
      break;
    case ElementKind::Ctor:
      os << node_->tag;
      if (!node_->items.empty()) {
        os << "(";
        for (std::size_t i = 0; i < node_->items.size(); ++i) {
          if (i > 0) os << ", ";
          os << node_->items[i].to_string();
        }
        os << ")";
      }
      break;
    case ElementKind::Tuple:
      os << "(";
      for (std::size_t i = 0; i < node_->items.size(); ++i) {
        if (i > 0) os << ", ";
        os << node_->items[i].to_string();
      }
      os << ")";
      break;
    case ElementKind::Map:
      os << "{";
      for (std::size_t i = 0; i < node_->items.size(); i += 2) {
        if (i > 0) os << ", ";
        os << node_->items[i].to_string() << ": " << node_->items[i + 1].to_string();
      }
      os << "}";
      break;
  }
  return os.str();
}

bool operator==(const Element& a, const Element& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->hash != b.node_->hash) return false;
  return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const Element& a, const Element& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return static_cast<int>(x.kind) <=> static_cast<int>(y.kind);
  switch (x.kind) {
    case ElementKind::Unit:
    case ElementKind::Bottom:
      return std::strong_ordering::equal;
    case ElementKind::Int:
      return x.a <=> y.a;
    case ElementKind::Rational: {
      const __int128 l = static_cast<__int128>(x.a) * y.b;
      const __int128 r = static_cast<__int128>(y.a) * x.b;
      if (l < r) return std::strong_ordering::less;
      if (l > r) return std::strong_ordering::greater;
      return std::strong_ordering::equal;
    }
    case ElementKind::Ctor:
      if (auto c = x.tag <=> y.tag; c != 0) return c;
      [[fallthrough]];
    case ElementKind::Tuple:
    case ElementKind::Map:
      if (auto c = x.items.size() <=> y.items.size(); c != 0) return c;
      for (std::size_t i = 0; i < x.items.size(); ++i) {
        if (auto c = x.items[i] <=> y.items[i]; c != 0) return c;
      }
      return std::strong_ordering::equal;
  }
  return std::strong_ordering::equal;
}

std::int64_t element_rank(const Element& e) {
  switch (e.kind()) {
    case ElementKind::Unit:
      return 0;
    case ElementKind::Bottom:
      return std::int64_t{1} << 40;
    case ElementKind::Int: {
      const auto v = e.as_int();
      return v < 0 ? -v : v;
    }
    case ElementKind::Rational: {
      // Ceiling of the magnitude, so 1/2 ranks with 1.
      const auto n = e.num() < 0 ? -e.num() : e.num();
      return (n + e.den() - 1) / e.den();
    }
    case ElementKind::Ctor:
    case ElementKind::Tuple: {
      std::int64_t r = e.kind() == ElementKind::Ctor ? 1 : 0;
      for (const auto& it : e.items()) r += element_rank(it);
      return r;
    }
    case ElementKind::Map: {
      std::int64_t r = 0;
      const auto flat = e.map_flat();
      for (std::size_t i = 1; i < flat.size(); i += 2) r += 1 + element_rank(flat[i]);
      return r;
    }
  }
  return 0;
}

bool rank_less(const Element& a, const Element& b) {
  const auto ra = element_rank(a);
  const auto rb = element_rank(b);
  if (ra != rb) return ra < rb;
  return a < b;
}

namespace {

class TermReader {
 public:
  explicit TermReader(std::string_view text) : text_(text) {}

  Element read_all() {
    Element e = read();
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw EncodingError("term '" + std::string(text_) + "': " + what + " at offset " +
                        std::to_string(pos_));
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::int64_t number() {
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::int64_t v = 0;
    const auto r = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (r.ec != std::errc() || r.ptr != text_.data() + pos_) fail("bad number");
    return v;
  }

  // Comma-separated terms up to `close`; the opening bracket is consumed.
  std::vector<Element> items(char close) {
    std::vector<Element> out;
    if (eat(close)) return out;
    do {
      out.push_back(read());
    } while (eat(','));
    expect(close);
    return out;
  }

  Element read() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      return Element::tuple(items(')'));
    }
    if (c == '{') {
      ++pos_;
      std::vector<std::pair<Element, Element>> entries;
      if (!eat('}')) {
        do {
          Element k = read();
          expect(':');
          entries.emplace_back(std::move(k), read());
        } while (eat(','));
        expect('}');
      }
      return Element::map(std::move(entries));
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      const std::int64_t n = number();
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        const std::int64_t d = number();
        if (d <= 0) fail("denominator must be positive");
        return Element::rational(n, d);
      }
      return Element::integer(n);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size()) {
        const char d = text_[pos_];
        if (!(std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '-' || d == '.' ||
              d == '\'')) {
          break;
        }
        ++pos_;
      }
      std::string tag(text_.substr(start, pos_ - start));
      if (tag == "eps") return Element::unit();
      if (tag == "bot") return Element::bottom();
      if (pos_ < text_.size() && text_[pos_] == '(') {
        ++pos_;
        return Element::ctor(std::move(tag), items(')'));
      }
      return Element::ctor(std::move(tag));
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Element parse_element(std::string_view text) { return TermReader(text).read_all(); }

}  // namespace sharecheck
