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

// Small-step interpreter for a call-by-value heap language with fork,
// atomic heap operations and two-step non-atomic reads and writes.

#ifndef SHARECHECK_HEAP_LANG_HPP
#define SHARECHECK_HEAP_LANG_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sharecheck/element.hpp"

namespace sharecheck {

enum class Op : std::uint8_t {
  // values
  Unit,
  Bool,
  Int,
  Loc,
  Rec,
  // Pair/InjL/InjR are values once their children are.
  Pair,
  InjL,
  InjR,
  // expressions
  Var,
  App,
  Let,
  Seq,
  Fst,
  Snd,
  Match,
  If,
  Fork,
  BinOp,
  Abort,
  Ref,
  Free,
  Load,
  Store,
  LoadNa2,   // internal: second half of a non-atomic read
  StoreNa2,  // internal: second half of a non-atomic write
  Cas,
  FetchAdd,
  Label,
};

enum class BinOpKind : std::uint8_t { Add, Sub, Eq, Lt, Le };
enum class Access : std::uint8_t { Sc, Na };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable AST node. Build through the factory functions in namespace ast.
struct Expr {
  Op op = Op::Unit;
  BinOpKind bop = BinOpKind::Add;
  Access access = Access::Sc;
  std::int64_t n = 0;  // Int payload, Loc id, Bool as 0/1
  // Rec: name = f, name2 = x. Let: name. Match: name = inl binder, name2 = inr binder.
  // Var: name. Label: name.
  std::string name;
  std::string name2;
  std::vector<ExprPtr> kids;
  bool is_value = false;
  std::size_t hash = 0;

  bool as_bool() const { return n != 0; }
};

bool operator==(const Expr& a, const Expr& b);
bool same(const ExprPtr& a, const ExprPtr& b);

namespace ast {
ExprPtr unit();
ExprPtr boolean(bool b);
ExprPtr integer(std::int64_t v);
ExprPtr loc(std::int64_t l);
ExprPtr rec(std::string f, std::string x, ExprPtr body);
ExprPtr pair(ExprPtr a, ExprPtr b);
ExprPtr inl(ExprPtr e);
ExprPtr inr(ExprPtr e);
ExprPtr var(std::string name);
ExprPtr app(ExprPtr f, ExprPtr a);
ExprPtr let(std::string x, ExprPtr e1, ExprPtr e2);
ExprPtr seq(ExprPtr e1, ExprPtr e2);
ExprPtr fst(ExprPtr e);
ExprPtr snd(ExprPtr e);
ExprPtr match(ExprPtr e, std::string x, ExprPtr on_inl, std::string y, ExprPtr on_inr);
ExprPtr if_(ExprPtr c, ExprPtr t, ExprPtr e);
ExprPtr fork(ExprPtr e);
ExprPtr binop(BinOpKind k, ExprPtr a, ExprPtr b);
ExprPtr abort_();
ExprPtr ref(ExprPtr e);
ExprPtr free_(ExprPtr e);
ExprPtr load(Access a, ExprPtr l);
ExprPtr store(Access a, ExprPtr l, ExprPtr v);
ExprPtr cas(ExprPtr l, ExprPtr expected, ExprPtr desired);
ExprPtr fetch_add(ExprPtr l, ExprPtr delta);
ExprPtr label(std::string name, ExprPtr e);
}  // namespace ast

/// Replaces free occurrences of `x` by the closed value `v`.
ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& v);
bool is_closed(const ExprPtr& e);
bool contains_internal_forms(const ExprPtr& e);

std::string to_string(const Expr& e);
inline std::string to_string(const ExprPtr& e) { return to_string(*e); }

/// Values to algebra elements: unit, booleans, integers, pairs as tuples,
/// inl () as none, inr v as some(v), other inl as ctor "inl", locations as
/// ctor "loc", closures as ctor "fun".
Element to_element(const Expr& v);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named heap locations the parser resolves `@name` against.
using LocationNames = std::map<std::string, std::int64_t, std::less<>>;

/// Parses the s-expression syntax (documented in README.md) into core AST.
/// Internal na' forms are not accepted.
ExprPtr parse_program(std::string_view source, const LocationNames& names = {});

struct HeapCell {
  ExprPtr value;
  bool writing = false;
  std::int64_t readers = 0;  // Reading(n) when !writing

  friend bool operator==(const HeapCell& a, const HeapCell& b);
};

enum class ThreadStatus : std::uint8_t { Running, Finished, Stuck };

enum class StuckKind : std::uint8_t { DataRace, NoSuchLocation, Abort, TypeError, Overflow };
std::string to_string(StuckKind k);

struct StuckInfo {
  StuckKind kind = StuckKind::Abort;
  std::string rule;  // head-reduction rule whose side condition failed
  std::string reason;

  friend bool operator==(const StuckInfo&, const StuckInfo&) = default;
};

struct ThreadState {
  ThreadStatus status = ThreadStatus::Running;
  ExprPtr expr;  // current expression, or the final value once Finished
  std::optional<StuckInfo> stuck;

  friend bool operator==(const ThreadState& a, const ThreadState& b);
};

struct MachineConfig {
  std::map<std::int64_t, HeapCell> heap;
  std::vector<ThreadState> threads;
  std::int64_t next_loc = 0;

  /// Allocates a cell at the cursor in Reading(0).
  std::int64_t alloc(ExprPtr value);
  bool freed(std::int64_t l) const { return l < next_loc && !heap.contains(l); }

  friend bool operator==(const MachineConfig& a, const MachineConfig& b);
};

/// Adds a thread; a program that is already a value starts Finished.
std::size_t spawn(MachineConfig& cfg, ExprPtr program);

enum class Phase : std::uint8_t { Atomic, Begin, End };
std::string to_string(Phase p);

/// Observable description of one head reduction.
struct StepEvent {
  std::size_t tid = 0;
  std::string rule;
  std::optional<std::string> label;
  Phase phase = Phase::Atomic;
  ExprPtr result;  // the redex's value when it reduced to one
  std::optional<std::int64_t> loc;
  ExprPtr written;
  std::optional<std::size_t> spawned;
};

struct StepOutcome {
  enum class Kind : std::uint8_t { Next, Stuck, ThreadDone };
  Kind kind = Kind::Next;
  MachineConfig cfg;  // the successor; on Stuck the thread is marked Stuck
  StepEvent event;
  std::optional<StuckInfo> stuck;
  ExprPtr done_value;
};

class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

StepOutcome step(const MachineConfig& cfg, std::size_t tid);
std::vector<std::size_t> enabled_threads(const MachineConfig& cfg);

/// True when the thread's next reduction touches neither the heap nor the
/// thread pool, so it commutes with every other thread's step.
bool next_step_is_local(const MachineConfig& cfg, std::size_t tid);

/// Best-effort fingerprint; confirm hits with operator==.
std::size_t canonical_hash(const MachineConfig& cfg);

}  // namespace sharecheck

#endif  // SHARECHECK_HEAP_LANG_HPP
