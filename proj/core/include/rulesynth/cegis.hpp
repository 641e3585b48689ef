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
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "rulesynth/encoder.hpp"
#include "rulesynth/program.hpp"
#include "rulesynth/smt.hpp"

namespace rulesynth {

inline constexpr std::chrono::milliseconds kDefaultTimeout{12000};

/// Two solver processes: one for synthesis steps, one for verification.
/// Reused across queries; each query starts from a reset.
class SolverBackend {
 public:
  explicit SolverBackend(SolverConfig config = SolverConfig::fromEnvironment());

  SmtSolver& synth() { return synth_; }
  SmtSolver& verify() { return verify_; }
  const SolverConfig& config() const { return config_; }

 private:
  SolverConfig config_;
  SmtSolver synth_;
  SmtSolver verify_;
};

struct CegisOptions {
  std::chrono::milliseconds timeout = kDefaultTimeout;
  std::uint64_t seed = 0;
  unsigned randomSeeds = 4;
};

enum class CegisOutcome { Rule, Exhausted, Timeout };

struct CegisResult {
  CegisOutcome outcome = CegisOutcome::Exhausted;
  Assignment assignment;
  std::optional<RewriteRule> rule;
  unsigned iterations = 0;
};

/// CEGIS state for one query. Counterexamples are kept across invocations,
/// and blocking clauses added to the query between invocations are sent
/// before the next synthesis step.
class CegisSession {
 public:
  CegisSession(SynthesisQuery& query, SolverBackend& backend, CegisOptions options);

  /// One CEGIS invocation. After a timeout the session is finished.
  CegisResult next();

  std::size_t counterexamples() const { return examples_.size(); }
  bool finished() const { return finished_; }

 private:
  void addExample(const std::vector<std::uint64_t>& inputs);

  SynthesisQuery& q_;
  SolverBackend& backend_;
  CegisOptions options_;
  std::size_t sentBlocking_ = 0;
  std::set<std::vector<std::uint64_t>> examples_;
  std::vector<std::string> locNames_;
  std::vector<std::string> inputNames_;
  bool finished_ = false;
};

/// Single invocation on a fresh session.
CegisResult cegis(SynthesisQuery& q, SolverBackend& backend, CegisOptions options = {});

enum class BlockPolicy {
  /// Block the whole rule class.
  FullRule,
  /// Block the IR program class, whatever the ISA side.
  IrOnly,
  /// Block only the returned location assignment (baseline).
  Exact,
};

struct SynthesizedRule {
  RewriteRule rule;
  Assignment assignment;
};

struct CegisAllResult {
  std::vector<SynthesizedRule> rules;
  bool timedOut = false;
  unsigned invocations = 0;
  /// Invocations that returned a member of an already-known class.
  unsigned redundant = 0;
  /// Classes too large to enumerate, blocked lazily instead.
  unsigned overflows = 0;
  unsigned iterations = 0;
  std::size_t counterexamples = 0;
};

/// Classes already excluded before the loop (such as composites); a return
/// from one of them counts as redundant.
struct KnownClasses {
  std::set<RuleKey> rules;
  std::set<DepDag> ir;
};

CegisAllResult cegisAll(SynthesisQuery& q, SolverBackend& backend, BlockPolicy policy, CegisOptions options = {},
                        const KnownClasses* known = nullptr);

}  // namespace rulesynth
