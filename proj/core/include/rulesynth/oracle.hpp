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
#include <set>
#include <span>
#include <vector>

#include "rulesynth/component.hpp"
#include "rulesynth/program.hpp"
#include "rulesynth/rulegen.hpp"

namespace rulesynth {

/// Every dead-code-free program using each component of `m` once and all
/// `numInputs` inputs.
std::vector<ConcreteProgram> enumeratePrograms(std::span<const ComponentRef> m, unsigned numInputs);

/// Equivalent program pairs found by truth-table comparison.
std::vector<RewriteRule> oraclePairs(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa,
                                     unsigned numInputs);

/// Distinct location assignments the encoder admits for these pairs: pairs
/// times the same-kind instance permutations of both sides.
std::uint64_t oracleAssignmentCount(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa,
                                    unsigned numInputs);

std::map<RuleKey, RewriteRule> oracleRuleClassSet(std::span<const ComponentRef> ir,
                                                  std::span<const ComponentRef> isa, unsigned numInputs);
std::size_t oracleRuleClasses(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa,
                              unsigned numInputs);
/// IR classes that have at least one equivalent ISA program.
std::set<DepDag> oracleIrClasses(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa,
                                 unsigned numInputs);

struct OracleLibrary {
  std::vector<FoundRule> rules;
  std::map<Cell, unsigned> counts;
};

/// Enumerative counterpart of genAll and genAllLC: same iteration order and
/// composite exclusion, but rules come from oraclePairs.
OracleLibrary oracleGenAll(const ComponentLibrary& ir, const ComponentLibrary& isa, unsigned maxIR, unsigned maxISA,
                           SpecializationPolicy policy = SpecializationPolicy::SingleInstruction);
OracleLibrary oracleGenAllLC(const ComponentLibrary& ir, const ComponentLibrary& isa, unsigned maxIR,
                             unsigned maxISA, const CostMetric& metric,
                             SpecializationPolicy policy = SpecializationPolicy::SingleInstruction);

}  // namespace rulesynth
