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

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rulesynth/component.hpp"
#include "rulesynth/program.hpp"

namespace rulesynth {

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Side { IR, ISA };

/// Location variables for one side. Instance k is components[k]; it has one
/// output location and arity-many input locations.
struct SideLayout {
  Multiset components;
  unsigned locWidth = 1;

  std::size_t size() const { return components.size(); }
};

struct LocationLayout {
  unsigned numInputs = 0;
  unsigned width = kDefaultWidth;
  SideLayout ir;
  SideLayout isa;

  const SideLayout& side(Side s) const { return s == Side::IR ? ir : isa; }
  /// Location of the program output on a side (its last line).
  unsigned outputLocation(Side s) const;
};

/// Location values for one side: out[k] and in[k][j] for instance k.
struct SideAssignment {
  std::vector<unsigned> out;
  std::vector<std::vector<unsigned>> in;

  friend auto operator<=>(const SideAssignment&, const SideAssignment&) = default;
};

struct Assignment {
  SideAssignment ir;
  SideAssignment isa;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// Per-query formula state. `base` holds declarations, well-formedness and
/// dead-code constraints; `blocking` grows as rules are excluded.
struct SynthesisQuery {
  LocationLayout layout;
  std::vector<std::string> base;
  std::vector<std::string> blocking;
};

/// Largest feasible shared input count for a multiset (0 if none).
unsigned inputBound(std::span<const ComponentRef> m);

SynthesisQuery buildQuery(const Multiset& ir, const Multiset& isa, unsigned numInputs);

/// SMT symbol names.
std::string outLocName(Side s, std::size_t k);
std::string inLocName(Side s, std::size_t k, std::size_t j);
struct LocationVar {
  std::string name;
  unsigned width;
};
std::vector<LocationVar> locationVariables(const LocationLayout& layout);
/// Rebuilds an assignment from solver values keyed by locationVariables names.
Assignment assignmentFromValues(const LocationLayout& layout, const std::map<std::string, std::uint64_t>& values);

/// Declarations for one unrolling (fresh value variables tagged `tag`).
std::vector<std::string> unrollDeclarations(const LocationLayout& layout, Side s, std::string_view tag);
/// Instance semantics: each output value equals the component applied to
/// its input values.
std::string componentSemantics(const LocationLayout& layout, Side s, std::string_view tag);
/// Dataflow for one unrolling: equal locations imply equal values. `inputs`
/// are the terms bound to the program inputs.
std::string connectionConstraint(const LocationLayout& layout, Side s, std::string_view tag,
                                 std::span<const std::string> inputs);
/// Name of the program-output value of an unrolling, with its defining
/// constraint.
std::string resultName(Side s, std::string_view tag);
std::string resultConstraint(const LocationLayout& layout, Side s, std::string_view tag);

/// Full synthesis-step constraint for one concrete input tuple.
std::vector<std::string> exampleConstraint(const LocationLayout& layout, std::string_view tag,
                                           std::span<const std::uint64_t> inputs);

/// Program as a closed term over the given input terms.
std::string programTerm(const ConcreteProgram& p, std::span<const std::string> inputs);

std::pair<ConcreteProgram, ConcreteProgram> decodeModel(const LocationLayout& layout, const Assignment& a);
ConcreteProgram decodeSide(const LocationLayout& layout, Side s, const SideAssignment& a);

/// Every location assignment of `s` that decodes to `p`: one per way of
/// mapping lines onto same-kind component instances.
std::vector<SideAssignment> encodeProgram(const LocationLayout& layout, Side s, const ConcreteProgram& p);

/// Conjunction fixing the locations of one side.
std::string sideEquals(const LocationLayout& layout, Side s, const SideAssignment& a);

/// Excludes every member of the rule's equivalence class. Throws
/// ClassOverflowError when the class is too large to enumerate.
void blockRule(SynthesisQuery& q, const RewriteRule& r, std::size_t cap = kClassCap);
/// Excludes every IR program in the class of `p`, whatever the ISA side.
void blockIrProgram(SynthesisQuery& q, const ConcreteProgram& p, std::size_t cap = kClassCap);
/// Excludes a rule and its input renamings only, without symmetric or
/// reordered variants. Used as the fallback for oversized classes.
void blockRuleOrbit(SynthesisQuery& q, const RewriteRule& r);
void blockIrOrbit(SynthesisQuery& q, const ConcreteProgram& p);
/// Excludes exactly one location assignment.
void blockAssignment(SynthesisQuery& q, const Assignment& a);

}  // namespace rulesynth
