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

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rulesynth/cegis.hpp"
#include "rulesynth/component.hpp"
#include "rulesynth/program.hpp"

namespace rulesynth {

enum class GenMode { All, Unique, LowestCost };

std::string_view modeName(GenMode m);
std::optional<GenMode> parseMode(std::string_view s);

struct QueryRecord {
  std::vector<std::string> ir;
  std::vector<std::string> isa;
  unsigned numInputs = 0;
  unsigned found = 0;
  unsigned invocations = 0;
  unsigned redundant = 0;
  unsigned iterations = 0;
  unsigned composites = 0;
  unsigned overflows = 0;
  bool timedOut = false;
  double millis = 0;
};

struct GenConfig {
  unsigned maxIR = 1;
  unsigned maxISA = 1;
  GenMode mode = GenMode::Unique;
  std::optional<CostMetric> metric;
  std::chrono::milliseconds timeout = kDefaultTimeout;
  std::uint64_t seed = 0;
  SpecializationPolicy policy = SpecializationPolicy::SingleInstruction;
  SolverConfig solver = SolverConfig::fromEnvironment();
  /// Called after every query.
  std::function<void(const QueryRecord&)> progress;
};

struct RuleRecord {
  RewriteRule rule;
  unsigned irSize = 0;
  unsigned isaSize = 0;
  Millicost cost = 0;
  /// Baseline only: false for returns the post-filter removes.
  bool kept = true;
};

using Cell = std::pair<unsigned, unsigned>;

struct RuleLibraryReport {
  std::string irLibrary;
  std::string isaLibrary;
  std::string irLibraryJson;
  std::string isaLibraryJson;
  GenMode mode = GenMode::Unique;
  std::optional<std::string> metric;
  std::uint64_t seed = 0;
  unsigned width = kDefaultWidth;
  std::int64_t timeoutMs = 0;
  SpecializationPolicy policy = SpecializationPolicy::SingleInstruction;

  std::vector<RuleRecord> rules;
  /// Unique and lowest-cost modes: rules per cell. Baseline: post-filtered.
  std::map<Cell, unsigned> counts;
  /// Baseline only: raw returns per cell (distinct location assignments).
  std::map<Cell, unsigned> rawCounts;
  std::vector<QueryRecord> queries;
  unsigned redundantReturns = 0;

  std::vector<QueryRecord> timeouts() const;
  /// Counts summed over all cells with irSize <= cell.first and
  /// isaSize <= cell.second.
  unsigned cumulative(Cell cell, bool raw = false) const;

  std::string toJson(bool withTiming = true) const;
  static RuleLibraryReport fromJson(std::string_view text);
};

/// Size-n multisets over the library in lexicographic order of component
/// indices.
std::vector<Multiset> multicomb(const ComponentLibrary& lib, unsigned n);

/// Feasible shared input counts, largest first.
std::vector<unsigned> allInputs(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa);

/// (n1, n2) cells in visiting order: by n1 + n2, then n1.
std::vector<Cell> cellOrder(unsigned maxIR, unsigned maxISA);

/// ISA multisets up to maxSize, ordered by cost, then size, then names.
std::vector<Multiset> isaMultisetsByCost(const ComponentLibrary& isa, unsigned maxSize, const CostMetric& metric);

RuleLibraryReport genAll(const ComponentLibrary& ir, const ComponentLibrary& isa, const GenConfig& cfg);
RuleLibraryReport genAllLC(const ComponentLibrary& ir, const ComponentLibrary& isa, const GenConfig& cfg);
RuleLibraryReport iterativeBaseline(const ComponentLibrary& ir, const ComponentLibrary& isa, const GenConfig& cfg);
/// Dispatches on cfg.mode.
RuleLibraryReport generate(const ComponentLibrary& ir, const ComponentLibrary& isa, const GenConfig& cfg);

}  // namespace rulesynth
