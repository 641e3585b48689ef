// Copyright 2026 The rulesynth Authors. All rights reserved.
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

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rulesynth/bv.hpp"
#include "rulesynth/component.hpp"

namespace rulesynth {

class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an equivalence class exceeds the enumeration cap.
class ClassOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kClassCap = 20000;

struct ValueRef {
  enum class Kind : std::uint8_t { Input, Line };
  Kind kind = Kind::Input;
  unsigned index = 0;

  static ValueRef input(unsigned i) { return {Kind::Input, i}; }
  static ValueRef line(unsigned j) { return {Kind::Line, j}; }
  bool isInput() const { return kind == Kind::Input; }

  friend auto operator<=>(const ValueRef&, const ValueRef&) = default;
};

struct Line {
  ComponentRef component;
  std::vector<ValueRef> args;

  friend bool operator==(const Line& a, const Line& b) {
    return a.component->name() == b.component->name() && a.args == b.args;
  }
};

/// SSA program. The last line is the result. The constructor rejects
/// structural errors (arity, forward or out-of-range references).
class ConcreteProgram {
 public:
  ConcreteProgram() = default;
  ConcreteProgram(unsigned numInputs, std::vector<Line> lines);

  unsigned numInputs() const { return numInputs_; }
  const std::vector<Line>& lines() const { return lines_; }
  std::size_t size() const { return lines_.size(); }
  unsigned width() const;

  /// Components in line order.
  Multiset components() const;

  /// Checks that every input and every non-final line is used. Returns an
  /// explanation on failure.
  std::optional<std::string> validate() const;
  bool valid() const { return !validate(); }

  std::string toString() const;

  friend bool operator==(const ConcreteProgram&, const ConcreteProgram&) = default;

 private:
  unsigned numInputs_ = 0;
  std::vector<Line> lines_;
};

struct RewriteRule {
  ConcreteProgram ir;
  ConcreteProgram isa;

  unsigned numInputs() const { return ir.numInputs(); }
  friend bool operator==(const RewriteRule&, const RewriteRule&) = default;
};

BVValue evalProgram(const ConcreteProgram& p, std::span<const BVValue> inputs);
std::uint64_t evalProgramRaw(const ConcreteProgram& p, std::span<const std::uint64_t> inputs);

/// Output for every input tuple, row r holding input i in bits [i*W, (i+1)*W).
std::vector<std::uint32_t> truthTable(const ConcreteProgram& p);

/// Exhaustive equivalence check over all 2^(W*n) inputs.
bool verifyRule(const RewriteRule& r);

/// Parses `t0 = add(x0, x1)` lines (newline or `;` separated).
ConcreteProgram parseProgram(std::string_view text, const ComponentLibrary& lib, unsigned numInputs);
/// Same, with the input count taken as one past the largest `x<i>`.
ConcreteProgram parseProgram(std::string_view text, const ComponentLibrary& lib);

/// Canonical dependency-graph encoding. Two programs compare equal exactly
/// when they differ only by symmetric argument order, same-kind line
/// interchange, or topological reordering. Input names are kept.
struct DepDag {
  std::vector<std::string> kinds;  // sorted distinct component names
  std::vector<std::int32_t> code;

  friend auto operator<=>(const DepDag&, const DepDag&) = default;
};

DepDag canonicalize(const ConcreteProgram& p);
/// Canonical form after renaming input i to perm[i].
DepDag canonicalize(const ConcreteProgram& p, std::span<const unsigned> perm);

/// Canonical key for a rule class, minimised over consistent input renaming.
struct RuleKey {
  DepDag ir;
  DepDag isa;
  friend auto operator<=>(const RuleKey&, const RuleKey&) = default;
};

RuleKey canonicalRule(const RewriteRule& r);
/// Canonical key for the IR side alone, minimised over input renaming.
DepDag canonicalIrLc(const ConcreteProgram& p);

/// All programs equal to `p` up to symmetric arguments and reordering,
/// without renaming inputs.
std::vector<ConcreteProgram> programVariants(const ConcreteProgram& p, std::size_t cap = kClassCap);

/// Applies input renaming i -> perm[i].
ConcreteProgram renameInputs(const ConcreteProgram& p, std::span<const unsigned> perm);

/// Every permutation of [0, n).
std::vector<std::vector<unsigned>> allPermutations(unsigned n);

std::vector<RewriteRule> enumerateRuleClass(const RewriteRule& r, std::size_t cap = kClassCap);
std::vector<ConcreteProgram> enumerateIrClass(const ConcreteProgram& p, std::size_t cap = kClassCap);

/// A found rule together with the multisets it was synthesized for.
struct FoundRule {
  RewriteRule rule;
  std::vector<std::string> irKey;   // multisetKey of the IR side
  std::vector<std::string> isaKey;  // multisetKey of the ISA side
  Millicost cost = 0;
};

/// Composite construction policy.
enum class SpecializationPolicy {
  /// A single rule may be specialized (inputs identified) only when its IR
  /// side is a single instruction. Default.
  SingleInstruction,
  /// Every specialization of every rule counts as composite.
  Strict,
};

struct CompositeQuery {
  std::span<const ComponentRef> ir;
  unsigned numInputs = 0;
  /// Unique mode: the ISA multiset the composite must use exactly.
  std::optional<std::vector<std::string>> isaKey;
  /// Lowest-cost mode: upper bound on the composite ISA cost.
  std::optional<Millicost> maxCost;
  SpecializationPolicy policy = SpecializationPolicy::SingleInstruction;
};

/// Rules buildable by tiling the IR multiset with already-found rules, each
/// with the ISA program obtained by applying those rules. The result is
/// keyed by canonicalRule and by canonicalIrLc respectively, so each rule
/// class appears once.
std::map<RuleKey, RewriteRule> composites(std::span<const FoundRule> rules, const CompositeQuery& q);
std::map<DepDag, RewriteRule> compositesLc(std::span<const FoundRule> rules, const CompositeQuery& q);

}  // namespace rulesynth
