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

#include "sharecheck/heap_lang.hpp"

#include <cctype>
#include <charconv>
#include <functional>
#include <set>

#include "sharecheck/combinators.hpp"

namespace sharecheck {

namespace {

std::size_t str_hash(const std::string& s) { return std::hash<std::string>{}(s); }

ExprPtr make(Expr e) {
  bool value = false;
  switch (e.op) {
    case Op::Unit:
    case Op::Bool:
    case Op::Int:
    case Op::Loc:
    case Op::Rec:
      value = true;
      break;
    case Op::Pair:
    case Op::InjL:
    case Op::InjR:
      value = true;
      for (const auto& k : e.kids) value = value && k->is_value;
      break;
    default:
      break;
  }
  e.is_value = value;
  std::size_t h = static_cast<std::size_t>(e.op) * 0x100000001b3ULL;
  h = hash_combine(h, static_cast<std::size_t>(e.bop));
  h = hash_combine(h, static_cast<std::size_t>(e.access));
  h = hash_combine(h, static_cast<std::size_t>(e.n));
  if (!e.name.empty()) h = hash_combine(h, str_hash(e.name));
  if (!e.name2.empty()) h = hash_combine(h, str_hash(e.name2));
  for (const auto& k : e.kids) h = hash_combine(h, k->hash);
  e.hash = h;
  return std::make_shared<const Expr>(std::move(e));
}

Expr node(Op op, std::vector<ExprPtr> kids = {}) {
  Expr e;
  e.op = op;
  e.kids = std::move(kids);
  return e;
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  if (&a == &b) return true;
  if (a.hash != b.hash || a.op != b.op || a.bop != b.bop || a.access != b.access || a.n != b.n ||
      a.name != b.name || a.name2 != b.name2 || a.kids.size() != b.kids.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (!same(a.kids[i], b.kids[i])) return false;
  }
  return true;
}

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

namespace ast {

ExprPtr unit() {
  static const ExprPtr u = make(node(Op::Unit));
  return u;
}
ExprPtr boolean(bool b) {
  Expr e = node(Op::Bool);
  e.n = b ? 1 : 0;
  return make(std::move(e));
}
ExprPtr integer(std::int64_t v) {
  Expr e = node(Op::Int);
  e.n = v;
  return make(std::move(e));
}
ExprPtr loc(std::int64_t l) {
  Expr e = node(Op::Loc);
  e.n = l;
  return make(std::move(e));
}
ExprPtr rec(std::string f, std::string x, ExprPtr body) {
  Expr e = node(Op::Rec, {std::move(body)});
  e.name = std::move(f);
  e.name2 = std::move(x);
  return make(std::move(e));
}
ExprPtr pair(ExprPtr a, ExprPtr b) { return make(node(Op::Pair, {std::move(a), std::move(b)})); }
ExprPtr inl(ExprPtr e) { return make(node(Op::InjL, {std::move(e)})); }
ExprPtr inr(ExprPtr e) { return make(node(Op::InjR, {std::move(e)})); }
ExprPtr var(std::string name) {
  Expr e = node(Op::Var);
  e.name = std::move(name);
  return make(std::move(e));
}
ExprPtr app(ExprPtr f, ExprPtr a) { return make(node(Op::App, {std::move(f), std::move(a)})); }
ExprPtr let(std::string x, ExprPtr e1, ExprPtr e2) {
  Expr e = node(Op::Let, {std::move(e1), std::move(e2)});
  e.name = std::move(x);
  return make(std::move(e));
}
ExprPtr seq(ExprPtr e1, ExprPtr e2) { return make(node(Op::Seq, {std::move(e1), std::move(e2)})); }
ExprPtr fst(ExprPtr e) { return make(node(Op::Fst, {std::move(e)})); }
ExprPtr snd(ExprPtr e) { return make(node(Op::Snd, {std::move(e)})); }
ExprPtr match(ExprPtr e, std::string x, ExprPtr on_inl, std::string y, ExprPtr on_inr) {
  Expr m = node(Op::Match, {std::move(e), std::move(on_inl), std::move(on_inr)});
  m.name = std::move(x);
  m.name2 = std::move(y);
  return make(std::move(m));
}
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e) {
  return make(node(Op::If, {std::move(c), std::move(t), std::move(e)}));
}
ExprPtr fork(ExprPtr e) { return make(node(Op::Fork, {std::move(e)})); }
ExprPtr binop(BinOpKind k, ExprPtr a, ExprPtr b) {
  Expr e = node(Op::BinOp, {std::move(a), std::move(b)});
  e.bop = k;
  return make(std::move(e));
}
ExprPtr abort_() { return make(node(Op::Abort)); }
ExprPtr ref(ExprPtr e) { return make(node(Op::Ref, {std::move(e)})); }
ExprPtr free_(ExprPtr e) { return make(node(Op::Free, {std::move(e)})); }
ExprPtr load(Access a, ExprPtr l) {
  Expr e = node(Op::Load, {std::move(l)});
  e.access = a;
  return make(std::move(e));
}
ExprPtr store(Access a, ExprPtr l, ExprPtr v) {
  Expr e = node(Op::Store, {std::move(l), std::move(v)});
  e.access = a;
  return make(std::move(e));
}
ExprPtr cas(ExprPtr l, ExprPtr expected, ExprPtr desired) {
  return make(node(Op::Cas, {std::move(l), std::move(expected), std::move(desired)}));
}
ExprPtr fetch_add(ExprPtr l, ExprPtr delta) {
  return make(node(Op::FetchAdd, {std::move(l), std::move(delta)}));
}
ExprPtr label(std::string name, ExprPtr e) {
  Expr l = node(Op::Label, {std::move(e)});
  l.name = std::move(name);
  return make(std::move(l));
}

}  // namespace ast

namespace {

ExprPtr load_na2(std::int64_t l) { return make(node(Op::LoadNa2, {ast::loc(l)})); }
ExprPtr store_na2(std::int64_t l, ExprPtr v) {
  return make(node(Op::StoreNa2, {ast::loc(l), std::move(v)}));
}

ExprPtr rebuild(const Expr& e, std::size_t i, ExprPtr kid) {
  Expr copy = e;
  copy.kids[i] = std::move(kid);
  return make(std::move(copy));
}

// Which children a binder scopes over: Rec binds in kid 0, Let in kid 1,
// Match binds name in kid 1 and name2 in kid 2.
bool binds(const Expr& e, std::size_t kid, const std::string& x) {
  switch (e.op) {
    case Op::Rec:
      return e.name == x || e.name2 == x;
    case Op::Let:
      return kid == 1 && e.name == x;
    case Op::Match:
      return (kid == 1 && e.name == x) || (kid == 2 && e.name2 == x);
    default:
      return false;
  }
}

void free_vars(const ExprPtr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  if (e->op == Op::Var) {
    if (!bound.contains(e->name)) out.insert(e->name);
    return;
  }
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    std::vector<std::string> added;
    auto bind = [&](const std::string& x) {
      if (bound.insert(x).second) added.push_back(x);
    };
    if (e->op == Op::Rec) {
      bind(e->name);
      bind(e->name2);
    } else if (e->op == Op::Let && i == 1) {
      bind(e->name);
    } else if (e->op == Op::Match && i == 1) {
      bind(e->name);
    } else if (e->op == Op::Match && i == 2) {
      bind(e->name2);
    }
    free_vars(e->kids[i], bound, out);
    for (const auto& x : added) bound.erase(x);
  }
}

}  // namespace

ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& v) {
  if (e->op == Op::Var) return e->name == x ? v : e;
  if (e->kids.empty()) return e;
  Expr copy = *e;
  bool changed = false;
  for (std::size_t i = 0; i < copy.kids.size(); ++i) {
    if (binds(*e, i, x)) continue;
    ExprPtr k = subst(copy.kids[i], x, v);
    if (k != copy.kids[i]) {
      copy.kids[i] = std::move(k);
      changed = true;
    }
  }
  return changed ? make(std::move(copy)) : e;
}

bool is_closed(const ExprPtr& e) {
  std::set<std::string> bound, out;
  free_vars(e, bound, out);
  return out.empty();
}

bool contains_internal_forms(const ExprPtr& e) {
  if (e->op == Op::LoadNa2 || e->op == Op::StoreNa2) return true;
  for (const auto& k : e->kids) {
    if (contains_internal_forms(k)) return true;
  }
  return false;
}

namespace {

const char* binop_symbol(BinOpKind k) {
  switch (k) {
    case BinOpKind::Add:
      return "+";
    case BinOpKind::Sub:
      return "-";
    case BinOpKind::Eq:
      return "=";
    case BinOpKind::Lt:
      return "<";
    case BinOpKind::Le:
      return "<=";
  }
  return "?";
}

void print(const Expr& e, std::string& out) {
  auto list = [&](const char* head, std::initializer_list<const Expr*> parts) {
    out += '(';
    out += head;
    for (const Expr* p : parts) {
      out += ' ';
      print(*p, out);
    }
    out += ')';
  };
  const auto k = [&](std::size_t i) { return e.kids[i].get(); };
  switch (e.op) {
    case Op::Unit:
      out += "()";
      return;
    case Op::Bool:
      out += e.as_bool() ? "true" : "false";
      return;
    case Op::Int:
      out += std::to_string(e.n);
      return;
    case Op::Loc:
      out += "(loc " + std::to_string(e.n) + ")";
      return;
    case Op::Rec:
      out += "(rec " + e.name + " " + e.name2 + " ";
      print(*k(0), out);
      out += ')';
      return;
    case Op::Pair:
      return list("pair", {k(0), k(1)});
    case Op::InjL:
      return list("inl", {k(0)});
    case Op::InjR:
      return list("inr", {k(0)});
    case Op::Var:
      out += e.name;
      return;
    case Op::App:
      out += '(';
      print(*k(0), out);
      out += ' ';
      print(*k(1), out);
      out += ')';
      return;
    case Op::Let:
      out += "(let " + e.name + " ";
      print(*k(0), out);
      out += ' ';
      print(*k(1), out);
      out += ')';
      return;
    case Op::Seq:
      return list("seq", {k(0), k(1)});
    case Op::Fst:
      return list("fst", {k(0)});
    case Op::Snd:
      return list("snd", {k(0)});
    case Op::Match:
      out += "(match ";
      print(*k(0), out);
      out += " (inl " + e.name + " ";
      print(*k(1), out);
      out += ") (inr " + e.name2 + " ";
      print(*k(2), out);
      out += "))";
      return;
    case Op::If:
      return list("if", {k(0), k(1), k(2)});
    case Op::Fork:
      return list("fork", {k(0)});
    case Op::BinOp:
      return list(binop_symbol(e.bop), {k(0), k(1)});
    case Op::Abort:
      out += "(abort)";
      return;
    case Op::Ref:
      return list("ref", {k(0)});
    case Op::Free:
      return list("free", {k(0)});
    case Op::Load:
      return list(e.access == Access::Sc ? "load" : "load-na", {k(0)});
    case Op::Store:
      return list(e.access == Access::Sc ? "store" : "store-na", {k(0), k(1)});
    case Op::LoadNa2:
      return list("load-na'", {k(0)});
    case Op::StoreNa2:
      return list("store-na'", {k(0), k(1)});
    case Op::Cas:
      return list("cas", {k(0), k(1), k(2)});
    case Op::FetchAdd:
      return list("faa", {k(0), k(1)});
    case Op::Label:
      out += "(@ \"" + e.name + "\" ";
      print(*k(0), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

Element to_element(const Expr& v) {
  switch (v.op) {
    case Op::Unit:
      return Element::unit();
    case Op::Bool:
      return Element::boolean(v.as_bool());
    case Op::Int:
      return Element::integer(v.n);
    case Op::Loc:
      return Element::ctor("loc", {Element::integer(v.n)});
    case Op::Pair:
      return Element::tuple({to_element(*v.kids[0]), to_element(*v.kids[1])});
    case Op::InjL:
      if (v.kids[0]->op == Op::Unit) return none();
      return Element::ctor("inl", {to_element(*v.kids[0])});
    case Op::InjR:
      return some(to_element(*v.kids[0]));
    case Op::Rec:
      return Element::ctor("fun");
    default:
      throw EncodingError("not a value: " + to_string(v));
  }
}

// ---------------------------------------------------------------- parser

namespace {

struct SNode {
  bool is_list = false;
  bool is_string = false;
  std::string atom;
  std::vector<SNode> items;
  std::size_t offset = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  SNode read_top() {
    SNode n = read();
    skip_space();
    if (pos_ != src_.size()) fail("trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  SNode read() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    SNode n;
    n.offset = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      n.is_list = true;
      while (true) {
        skip_space();
        if (pos_ >= src_.size()) fail("unclosed '('");
        if (src_[pos_] == ')') {
          ++pos_;
          return n;
        }
        n.items.push_back(read());
      }
    }
    if (c == ')') fail("unexpected ')'");
    if (c == '"') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '"') ++pos_;
      if (pos_ >= src_.size()) fail("unterminated string");
      n.is_string = true;
      n.atom = std::string(src_.substr(start, pos_ - start));
      ++pos_;
      return n;
    }
    const std::size_t start = pos_;
    while (pos_ < src_.size()) {
      const char d = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '"' ||
          d == ';') {
        break;
      }
      ++pos_;
    }
    n.atom = std::string(src_.substr(start, pos_ - start));
    return n;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k = {
      "rec",  "fun",   "let",   "seq",     "pair", "fst",   "snd",      "inl",   "inr",
      "none", "some",  "match", "case",    "if",   "when",  "fork",     "+",     "-",
      "=",    "<",     "<=",    "not",     "abort", "ref",  "free",     "load",  "load-na",
      "store", "store-na", "cas", "faa",   "@",    "do",    "nth",      "loc",   "true",
      "false", "app"};
  return k;
}

class Builder {
 public:
  explicit Builder(const LocationNames& names) : names_(names) {}

  ExprPtr build(const SNode& n) {
    if (!n.is_list) return atom(n);
    if (n.items.empty()) return ast::unit();
    const SNode& head = n.items.front();
    if (!head.is_list && !head.is_string && keywords().contains(head.atom)) return form(n);
    if (n.items.size() < 2) fail(n, "application needs an argument");
    ExprPtr f = build(head);
    for (std::size_t i = 1; i < n.items.size(); ++i) f = ast::app(f, build(n.items[i]));
    return f;
  }

 private:
  [[noreturn]] static void fail(const SNode& n, const std::string& what) {
    throw ParseError(what + " at offset " + std::to_string(n.offset));
  }

  static void arity(const SNode& n, std::size_t want) {
    if (n.items.size() != want + 1) {
      fail(n, "'" + n.items.front().atom + "' expects " + std::to_string(want) + " operand(s)");
    }
  }

  static std::string ident(const SNode& n) {
    if (n.is_list || n.is_string || n.atom.empty()) fail(n, "expected an identifier");
    const char c = n.atom.front();
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
      fail(n, "bad identifier '" + n.atom + "'");
    }
    if (keywords().contains(n.atom)) fail(n, "keyword '" + n.atom + "' used as identifier");
    return n.atom;
  }

  static std::vector<std::string> params(const SNode& n) {
    if (!n.is_list) return {ident(n)};
    if (n.items.empty()) fail(n, "empty parameter list");
    std::vector<std::string> out;
    for (const auto& p : n.items) out.push_back(ident(p));
    return out;
  }

  ExprPtr atom(const SNode& n) {
    if (n.is_string) fail(n, "string literal outside a label");
    const std::string& a = n.atom;
    if (a == "true") return ast::boolean(true);
    if (a == "false") return ast::boolean(false);
    if (a.front() == '@') {
      const auto it = names_.find(std::string_view(a).substr(1));
      if (it == names_.end()) fail(n, "unknown location name '" + a + "'");
      return ast::loc(it->second);
    }
    if (std::isdigit(static_cast<unsigned char>(a.front())) ||
        (a.size() > 1 && a.front() == '-' && std::isdigit(static_cast<unsigned char>(a[1])))) {
      std::int64_t v = 0;
      const auto* end = a.data() + a.size();
      const auto r = std::from_chars(a.data(), end, v);
      if (r.ec != std::errc() || r.ptr != end) fail(n, "bad integer '" + a + "'");
      return ast::integer(v);
    }
    return ast::var(ident(n));
  }

  // Curried function: (rec f (x y) body) is rec f x. rec _ y. body.
  ExprPtr lambda(std::string f, const std::vector<std::string>& xs, ExprPtr body) {
    for (std::size_t i = xs.size(); i-- > 1;) body = ast::rec("_", xs[i], body);
    return ast::rec(std::move(f), xs.front(), body);
  }

  ExprPtr form(const SNode& n) {
    const std::string& h = n.items.front().atom;
    const auto b = [&](std::size_t i) { return build(n.items[i]); };
    if (h == "rec") {
      arity(n, 3);
      return lambda(ident(n.items[1]), params(n.items[2]), b(3));
    }
    if (h == "fun") {
      arity(n, 2);
      return lambda("_", params(n.items[1]), b(2));
    }
    if (h == "let") {
      arity(n, 3);
      return ast::let(ident(n.items[1]), b(2), b(3));
    }
    if (h == "seq") {
      if (n.items.size() < 3) fail(n, "'seq' expects at least 2 operands");
      ExprPtr e = b(n.items.size() - 1);
      for (std::size_t i = n.items.size() - 1; i-- > 1;) e = ast::seq(b(i), e);
      return e;
    }
    if (h == "pair") {
      arity(n, 2);
      return ast::pair(b(1), b(2));
    }
    if (h == "fst" || h == "snd" || h == "inl" || h == "inr" || h == "some" || h == "fork" ||
        h == "ref" || h == "free" || h == "load" || h == "load-na" || h == "not") {
      arity(n, 1);
      ExprPtr e = b(1);
      if (h == "fst") return ast::fst(e);
      if (h == "snd") return ast::snd(e);
      if (h == "inl") return ast::inl(e);
      if (h == "inr" || h == "some") return ast::inr(e);
      if (h == "fork") return ast::fork(e);
      if (h == "ref") return ast::ref(e);
      if (h == "free") return ast::free_(e);
      if (h == "load") return ast::load(Access::Sc, e);
      if (h == "load-na") return ast::load(Access::Na, e);
      return ast::if_(e, ast::boolean(false), ast::boolean(true));
    }
    if (h == "none") {
      arity(n, 0);
      return ast::inl(ast::unit());
    }
    if (h == "loc") {
      arity(n, 1);
      const ExprPtr v = b(1);
      if (v->op != Op::Int || v->n < 0) fail(n, "'loc' expects a nonnegative integer");
      return ast::loc(v->n);
    }
    if (h == "match" || h == "case") {
      arity(n, 3);
      const std::string left = h == "match" ? "inl" : "none";
      const std::string right = h == "match" ? "inr" : "some";
      const SNode& l = n.items[2];
      const SNode& r = n.items[3];
      if (!l.is_list || l.items.empty() || l.items.front().atom != left) {
        fail(l, "expected (" + left + " ...) branch");
      }
      if (!r.is_list || r.items.size() != 3 || r.items.front().atom != right) {
        fail(r, "expected (" + right + " x e) branch");
      }
      std::string x = "_";
      ExprPtr on_l;
      if (h == "match") {
        if (l.items.size() != 3) fail(l, "expected (inl x e) branch");
        x = ident(l.items[1]);
        on_l = build(l.items[2]);
      } else {
        if (l.items.size() != 2) fail(l, "expected (none e) branch");
        on_l = build(l.items[1]);
      }
      return ast::match(b(1), x, on_l, ident(r.items[1]), build(r.items[2]));
    }
    if (h == "if") {
      arity(n, 3);
      return ast::if_(b(1), b(2), b(3));
    }
    if (h == "when") {
      arity(n, 2);
      return ast::if_(b(1), b(2), ast::unit());
    }
    if (h == "+" || h == "-" || h == "=" || h == "<" || h == "<=") {
      arity(n, 2);
      BinOpKind k = BinOpKind::Add;
      if (h == "-") k = BinOpKind::Sub;
      if (h == "=") k = BinOpKind::Eq;
      if (h == "<") k = BinOpKind::Lt;
      if (h == "<=") k = BinOpKind::Le;
      return ast::binop(k, b(1), b(2));
    }
    if (h == "abort") {
      arity(n, 0);
      return ast::abort_();
    }
    if (h == "store" || h == "store-na") {
      arity(n, 2);
      return ast::store(h == "store" ? Access::Sc : Access::Na, b(1), b(2));
    }
    if (h == "cas") {
      arity(n, 3);
      return ast::cas(b(1), b(2), b(3));
    }
    if (h == "faa") {
      arity(n, 2);
      return ast::fetch_add(b(1), b(2));
    }
    if (h == "@") {
      arity(n, 2);
      if (!n.items[1].is_string || n.items[1].atom.empty()) fail(n, "'@' expects a label string");
      return ast::label(n.items[1].atom, b(2));
    }
    if (h == "do") {
      // (do x e c): evaluate e into x until c holds; the result is x.
      arity(n, 3);
      const std::string x = ident(n.items[1]);
      const ExprPtr loop_body = ast::let(
          x, b(2), ast::if_(b(3), ast::var(x), ast::app(ast::var("%loop"), ast::unit())));
      return ast::app(ast::rec("%loop", "_", loop_body), ast::unit());
    }
    if (h == "nth") {
      // Arrays are nested pairs (a0, (a1, ...)).
      arity(n, 2);
      const ExprPtr nth = ast::rec(
          "%nth", "%a",
          ast::rec("_", "%i",
                   ast::if_(ast::binop(BinOpKind::Eq, ast::var("%i"), ast::integer(0)),
                            ast::fst(ast::var("%a")),
                            ast::app(ast::app(ast::var("%nth"), ast::snd(ast::var("%a"))),
                                     ast::binop(BinOpKind::Sub, ast::var("%i"),
                                                ast::integer(1))))));
      return ast::app(ast::app(nth, b(1)), b(2));
    }
    if (h == "app") {
      if (n.items.size() < 3) fail(n, "'app' expects a function and arguments");
      ExprPtr f = b(1);
      for (std::size_t i = 2; i < n.items.size(); ++i) f = ast::app(f, b(i));
      return f;
    }
    fail(n, "'" + h + "' cannot start an expression");
  }

  const LocationNames& names_;
};

}  // namespace

ExprPtr parse_program(std::string_view source, const LocationNames& names) {
  Reader r(source);
  const SNode top = r.read_top();
  ExprPtr e = Builder(names).build(top);
  if (!is_closed(e)) {
    std::set<std::string> bound, out;
    free_vars(e, bound, out);
    throw ParseError("unbound variable '" + *out.begin() + "'");
  }
  return e;
}

// ------------------------------------------------------------- machine

bool operator==(const HeapCell& a, const HeapCell& b) {
  return a.writing == b.writing && a.readers == b.readers && same(a.value, b.value);
}

bool operator==(const ThreadState& a, const ThreadState& b) {
  return a.status == b.status && same(a.expr, b.expr) && a.stuck == b.stuck;
}

bool operator==(const MachineConfig& a, const MachineConfig& b) {
  return a.next_loc == b.next_loc && a.heap == b.heap && a.threads == b.threads;
}

std::int64_t MachineConfig::alloc(ExprPtr value) {
  const std::int64_t l = next_loc++;
  heap[l] = HeapCell{std::move(value), false, 0};
  return l;
}

std::size_t spawn(MachineConfig& cfg, ExprPtr program) {
  ThreadState t;
  t.expr = std::move(program);
  if (t.expr->is_value) t.status = ThreadStatus::Finished;
  cfg.threads.push_back(std::move(t));
  return cfg.threads.size() - 1;
}

std::string to_string(StuckKind k) {
  switch (k) {
    case StuckKind::DataRace:
      return "data-race";
    case StuckKind::NoSuchLocation:
      return "no-such-location";
    case StuckKind::Abort:
      return "abort";
    case StuckKind::TypeError:
      return "type-error";
    case StuckKind::Overflow:
      return "overflow";
  }
  return "?";
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Atomic:
      return "atomic";
    case Phase::Begin:
      return "begin";
    case Phase::End:
      return "end";
  }
  return "?";
}

namespace {

struct StuckSignal {
  StuckInfo info;
};

[[noreturn]] void stuck(StuckKind k, std::string rule, std::string reason) {
  throw StuckSignal{StuckInfo{k, std::move(rule), std::move(reason)}};
}

std::size_t eval_kids(Op op) {
  switch (op) {
    case Op::App:
    case Op::Pair:
    case Op::BinOp:
    case Op::Store:
    case Op::FetchAdd:
      return 2;
    case Op::Cas:
      return 3;
    case Op::InjL:
    case Op::InjR:
    case Op::Let:
    case Op::Seq:
    case Op::Fst:
    case Op::Snd:
    case Op::Match:
    case Op::If:
    case Op::Ref:
    case Op::Free:
    case Op::Load:
    case Op::Label:
      return 1;
    default:
      return 0;
  }
}

// Index of the child to evaluate next, or -1 when e is a head redex.
int next_kid(const Expr& e) {
  const std::size_t n = eval_kids(e.op);
  for (std::size_t i = 0; i < n; ++i) {
    if (!e.kids[i]->is_value) return static_cast<int>(i);
  }
  return -1;
}

bool is_redex(const Expr& e) { return !e.is_value && next_kid(e) < 0; }

const Expr* find_redex(const Expr* e) {
  while (true) {
    if (e->op == Op::Label) {
      const Expr* c = e->kids[0].get();
      if (c->is_value || is_redex(*c)) return e;
      e = c->kids[static_cast<std::size_t>(next_kid(*c))].get();
      continue;
    }
    const int i = next_kid(*e);
    if (i < 0) return e;
    e = e->kids[static_cast<std::size_t>(i)].get();
  }
}

bool touches_shared_state(Op op) {
  switch (op) {
    case Op::Ref:
    case Op::Free:
    case Op::Load:
    case Op::Store:
    case Op::LoadNa2:
    case Op::StoreNa2:
    case Op::Cas:
    case Op::FetchAdd:
    case Op::Fork:
      return true;
    default:
      return false;
  }
}

class Stepper {
 public:
  Stepper(MachineConfig& cfg, StepEvent& ev) : cfg_(cfg), ev_(ev) {}

  ExprPtr step_in(const ExprPtr& e) {
    if (e->op == Op::Label) {
      const ExprPtr& c = e->kids[0];
      if (c->is_value || is_redex(*c)) return labeled(*e);
      const auto i = static_cast<std::size_t>(next_kid(*c));
      return rebuild(*e, 0, rebuild(*c, i, step_in(c->kids[i])));
    }
    const int i = next_kid(*e);
    if (i < 0) {
      ExprPtr r = head(*e);
      if (r->is_value) ev_.result = r;
      return r;
    }
    const auto k = static_cast<std::size_t>(i);
    return rebuild(*e, k, step_in(e->kids[k]));
  }

 private:
  ExprPtr labeled(const Expr& l) {
    const ExprPtr& c = l.kids[0];
    ev_.label = l.name;
    if (c->is_value) {
      ev_.rule = "label";
      ev_.result = c;
      return c;
    }
    const bool second_half = c->op == Op::LoadNa2 || c->op == Op::StoreNa2;
    ExprPtr r = head(*c);
    if (r->op == Op::LoadNa2 || r->op == Op::StoreNa2) {
      ev_.phase = Phase::Begin;
      return ast::label(l.name, r);
    }
    ev_.phase = second_half ? Phase::End : Phase::Atomic;
    if (r->is_value) ev_.result = r;
    return r;
  }

  static std::int64_t need_loc(const Expr& v, const char* rule) {
    if (v.op != Op::Loc) stuck(StuckKind::TypeError, rule, "expected a location, got " + to_string(v));
    return v.n;
  }
  static std::int64_t need_int(const Expr& v, const char* rule) {
    if (v.op != Op::Int) stuck(StuckKind::TypeError, rule, "expected an integer, got " + to_string(v));
    return v.n;
  }

  HeapCell& cell(std::int64_t l, const char* rule) {
    const auto it = cfg_.heap.find(l);
    if (it == cfg_.heap.end()) {
      stuck(StuckKind::NoSuchLocation, rule,
            "location " + std::to_string(l) + (cfg_.freed(l) ? " was freed" : " is not allocated"));
    }
    ev_.loc = l;
    return it->second;
  }

  // Side condition shared by sc writes, CAS, FetchAdd and na-write begin.
  static void need_exclusive(const HeapCell& c, std::int64_t l, const char* rule) {
    if (c.writing) {
      stuck(StuckKind::DataRace, rule, "location " + std::to_string(l) + " is being written");
    }
    if (c.readers > 0) {
      stuck(StuckKind::DataRace, rule,
            "location " + std::to_string(l) + " has " + std::to_string(c.readers) +
                " non-atomic read(s) in flight");
    }
  }

  static std::int64_t checked(std::int64_t a, std::int64_t b, bool sub, const char* rule) {
    std::int64_t r = 0;
    const bool overflow = sub ? __builtin_sub_overflow(a, b, &r) : __builtin_add_overflow(a, b, &r);
    if (overflow) {
      stuck(StuckKind::Overflow, rule,
            std::to_string(a) + (sub ? " - " : " + ") + std::to_string(b) + " overflows 64 bits");
    }
    return r;
  }

  ExprPtr head(const Expr& e) {
    const auto k = [&](std::size_t i) -> const ExprPtr& { return e.kids[i]; };
    switch (e.op) {
      case Op::App: {
        ev_.rule = "beta";
        const Expr& f = *k(0);
        if (f.op != Op::Rec) stuck(StuckKind::TypeError, "beta", "applying a non-function " + to_string(f));
        ExprPtr body = f.kids[0];
        if (f.name != "_") body = subst(body, f.name, k(0));
        if (f.name2 != "_") body = subst(body, f.name2, k(1));
        return body;
      }
      case Op::Let:
        ev_.rule = "let";
        return e.name == "_" ? k(1) : subst(k(1), e.name, k(0));
      case Op::Seq:
        ev_.rule = "seq";
        return k(1);
      case Op::Fst:
      case Op::Snd: {
        const char* rule = e.op == Op::Fst ? "fst" : "snd";
        ev_.rule = rule;
        if (k(0)->op != Op::Pair) stuck(StuckKind::TypeError, rule, "projecting a non-pair " + to_string(k(0)));
        return k(0)->kids[e.op == Op::Fst ? 0 : 1];
      }
      case Op::Match: {
        const Expr& v = *k(0);
        if (v.op == Op::InjL) {
          ev_.rule = "match-inl";
          return e.name == "_" ? k(1) : subst(k(1), e.name, v.kids[0]);
        }
        if (v.op == Op::InjR) {
          ev_.rule = "match-inr";
          return e.name2 == "_" ? k(2) : subst(k(2), e.name2, v.kids[0]);
        }
        stuck(StuckKind::TypeError, "match", "matching on a non-sum " + to_string(v));
      }
      case Op::If: {
        if (k(0)->op != Op::Bool) stuck(StuckKind::TypeError, "if", "branching on a non-boolean " + to_string(k(0)));
        ev_.rule = k(0)->as_bool() ? "if-true" : "if-false";
        return k(0)->as_bool() ? k(1) : k(2);
      }
      case Op::Fork: {
        ev_.rule = "fork";
        ev_.spawned = spawn(cfg_, k(0));
        return ast::unit();
      }
      case Op::BinOp: {
        ev_.rule = "binop";
        const Expr& a = *k(0);
        const Expr& b = *k(1);
        switch (e.bop) {
          case BinOpKind::Eq:
            return ast::boolean(a == b);
          case BinOpKind::Add:
            return ast::integer(checked(need_int(a, "binop"), need_int(b, "binop"), false, "binop"));
          case BinOpKind::Sub:
            return ast::integer(checked(need_int(a, "binop"), need_int(b, "binop"), true, "binop"));
          case BinOpKind::Lt:
            return ast::boolean(need_int(a, "binop") < need_int(b, "binop"));
          case BinOpKind::Le:
            return ast::boolean(need_int(a, "binop") <= need_int(b, "binop"));
        }
        break;
      }
      case Op::Abort:
        stuck(StuckKind::Abort, "abort", "abort reached");
      case Op::Ref: {
        ev_.rule = "alloc";
        const std::int64_t l = cfg_.alloc(k(0));
        ev_.loc = l;
        ev_.written = k(0);
        return ast::loc(l);
      }
      case Op::Free: {
        ev_.rule = "free";
        const std::int64_t l = need_loc(*k(0), "free");
        const HeapCell& c = cell(l, "free");
        need_exclusive(c, l, "free");
        cfg_.heap.erase(l);
        return ast::unit();
      }
      case Op::Load: {
        const char* rule = e.access == Access::Sc ? "load-sc" : "load-na-begin";
        ev_.rule = rule;
        const std::int64_t l = need_loc(*k(0), rule);
        HeapCell& c = cell(l, rule);
        if (c.writing) stuck(StuckKind::DataRace, rule, "location " + std::to_string(l) + " is being written");
        if (e.access == Access::Sc) return c.value;
        ++c.readers;
        return load_na2(l);
      }
      case Op::LoadNa2: {
        ev_.rule = "load-na-end";
        const std::int64_t l = k(0)->n;
        HeapCell& c = cell(l, "load-na-end");
        if (c.writing || c.readers < 1) {
          stuck(StuckKind::DataRace, "load-na-end", "read of location " + std::to_string(l) + " was not in flight");
        }
        --c.readers;
        return c.value;
      }
      case Op::Store: {
        const char* rule = e.access == Access::Sc ? "store-sc" : "store-na-begin";
        ev_.rule = rule;
        const std::int64_t l = need_loc(*k(0), rule);
        HeapCell& c = cell(l, rule);
        need_exclusive(c, l, rule);
        ev_.written = k(1);
        if (e.access == Access::Sc) {
          c.value = k(1);
          return ast::unit();
        }
        c.writing = true;
        return store_na2(l, k(1));
      }
      case Op::StoreNa2: {
        ev_.rule = "store-na-end";
        const std::int64_t l = k(0)->n;
        HeapCell& c = cell(l, "store-na-end");
        if (!c.writing) {
          stuck(StuckKind::DataRace, "store-na-end", "write of location " + std::to_string(l) + " was not in flight");
        }
        c.writing = false;
        c.value = k(1);
        ev_.written = k(1);
        return ast::unit();
      }
      case Op::Cas: {
        ev_.rule = "cas";
        const std::int64_t l = need_loc(*k(0), "cas");
        HeapCell& c = cell(l, "cas");
        need_exclusive(c, l, "cas");
        if (same(c.value, k(1))) {
          ev_.rule = "cas-succ";
          c.value = k(2);
          ev_.written = k(2);
          return ast::boolean(true);
        }
        ev_.rule = "cas-fail";
        return ast::boolean(false);
      }
      case Op::FetchAdd: {
        ev_.rule = "faa";
        const std::int64_t l = need_loc(*k(0), "faa");
        const std::int64_t delta = need_int(*k(1), "faa");
        HeapCell& c = cell(l, "faa");
        need_exclusive(c, l, "faa");
        const ExprPtr old = c.value;
        c.value = ast::integer(checked(need_int(*old, "faa"), delta, false, "faa"));
        ev_.written = c.value;
        return old;
      }
      default:
        break;
    }
    stuck(StuckKind::TypeError, "head", "no reduction for " + to_string(e));
  }

  MachineConfig& cfg_;
  StepEvent& ev_;
};

}  // namespace

StepOutcome step(const MachineConfig& cfg, std::size_t tid) {
  if (tid >= cfg.threads.size()) throw UsageError("thread " + std::to_string(tid) + " does not exist");
  if (cfg.threads[tid].status != ThreadStatus::Running) {
    throw UsageError("thread " + std::to_string(tid) + " is not running");
  }
  StepOutcome out;
  out.event.tid = tid;
  const ExprPtr e = cfg.threads[tid].expr;
  if (e->is_value) {
    out.kind = StepOutcome::Kind::ThreadDone;
    out.cfg = cfg;
    out.cfg.threads[tid].status = ThreadStatus::Finished;
    out.done_value = e;
    return out;
  }
  MachineConfig next = cfg;
  try {
    Stepper s(next, out.event);
    ExprPtr r = s.step_in(e);
    ThreadState& t = next.threads[tid];
    t.expr = std::move(r);
    if (t.expr->is_value) t.status = ThreadStatus::Finished;
    out.kind = StepOutcome::Kind::Next;
    out.cfg = std::move(next);
  } catch (const StuckSignal& sig) {
    out.kind = StepOutcome::Kind::Stuck;
    out.stuck = sig.info;
    out.event.rule = sig.info.rule;
    out.cfg = cfg;
    out.cfg.threads[tid].status = ThreadStatus::Stuck;
    out.cfg.threads[tid].stuck = sig.info;
  }
  return out;
}

std::vector<std::size_t> enabled_threads(const MachineConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cfg.threads.size(); ++i) {
    if (cfg.threads[i].status == ThreadStatus::Running) out.push_back(i);
  }
  return out;
}

bool next_step_is_local(const MachineConfig& cfg, std::size_t tid) {
  const ThreadState& t = cfg.threads.at(tid);
  if (t.status != ThreadStatus::Running || t.expr->is_value) return false;
  const Expr* r = find_redex(t.expr.get());
  if (r->op == Op::Label) {
    const Expr& c = *r->kids[0];
    return c.is_value || !touches_shared_state(c.op);
  }
  return !touches_shared_state(r->op);
}

std::size_t canonical_hash(const MachineConfig& cfg) {
  std::size_t h = hash_combine(0x51ed270b27f2ULL, static_cast<std::size_t>(cfg.next_loc));
  for (const auto& [l, c] : cfg.heap) {
    h = hash_combine(h, static_cast<std::size_t>(l));
    h = hash_combine(h, c.value->hash);
    h = hash_combine(h, c.writing ? 0x9bULL : static_cast<std::size_t>(c.readers));
  }
  for (const auto& t : cfg.threads) {
    h = hash_combine(h, static_cast<std::size_t>(t.status));
    h = hash_combine(h, t.expr ? t.expr->hash : 0);
    if (t.stuck) h = hash_combine(h, str_hash(t.stuck->rule));
  }
  return h;
}

}  // namespace sharecheck
