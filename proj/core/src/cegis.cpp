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

#include "rulesynth/cegis.hpp"

#include <random>

namespace rulesynth {

SolverBackend::SolverBackend(SolverConfig config) : config_(config), synth_(config), verify_(std::move(config)) {}

CegisSession::CegisSession(SynthesisQuery& query, SolverBackend& backend, CegisOptions options)
    : q_(query), backend_(backend), options_(options) {
  const auto& L = q_.layout;
  for (const auto& v : locationVariables(L)) locNames_.push_back(v.name);
  for (unsigned i = 0; i < L.numInputs; ++i) inputNames_.push_back("x" + std::to_string(i));

  auto& s = backend_.synth();
  s.reset();
  std::string script;
  for (const auto& c : q_.base) script += c + "\n";
  s.send(script);

  auto& v = backend_.verify();
  v.reset();
  std::string decl;
  for (const auto& x : inputNames_) decl += "(declare-fun " + x + " () (_ BitVec " + std::to_string(L.width) + "))\n";
  v.send(decl);

  addExample(std::vector<std::uint64_t>(L.numInputs, 0));
  std::mt19937_64 rng(options_.seed);
  const std::uint64_t space = L.numInputs * L.width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << (L.numInputs * L.width));
  for (unsigned k = 0; k < options_.randomSeeds && examples_.size() < space; ++k) {
    std::vector<std::uint64_t> x(L.numInputs);
    for (auto& xi : x) xi = rng() & widthMask(L.width);
    if (!examples_.count(x)) addExample(x);
  }
}

void CegisSession::addExample(const std::vector<std::uint64_t>& inputs) {
  const std::string tag = "e" + std::to_string(examples_.size());
  examples_.insert(inputs);
  std::string script;
  for (const auto& c : exampleConstraint(q_.layout, tag, inputs)) script += c + "\n";
  backend_.synth().send(script);
}

CegisResult CegisSession::next() {
  CegisResult res;
  if (finished_) {
    res.outcome = CegisOutcome::Timeout;
    return res;
  }
  auto& s = backend_.synth();
  auto& v = backend_.verify();
  const auto deadline = Clock::now() + options_.timeout;
  auto timeout = [&] {
    finished_ = true;
    // A killed process is restarted so the backend stays usable.
    if (!s.alive()) s.restart();
    if (!v.alive()) v.restart();
    res.outcome = CegisOutcome::Timeout;
    return res;
  };

  std::string pending;
  for (; sentBlocking_ < q_.blocking.size(); ++sentBlocking_) pending += q_.blocking[sentBlocking_] + "\n";
  if (!pending.empty()) s.send(pending);

  while (true) {
    ++res.iterations;
    auto sat = s.checkSat(deadline);
    if (!sat || *sat == SatResult::Unknown) return timeout();
    if (*sat == SatResult::Unsat) {
      res.outcome = CegisOutcome::Exhausted;
      return res;
    }
    auto values = s.getValues(locNames_, deadline);
    if (!values) return timeout();
    res.assignment = assignmentFromValues(q_.layout, *values);
    auto [ir, isa] = decodeModel(q_.layout, res.assignment);

    v.push();
    v.send("(assert (distinct " + programTerm(ir, inputNames_) + " " + programTerm(isa, inputNames_) + "))\n");
    auto vsat = v.checkSat(deadline);
    if (!vsat || *vsat == SatResult::Unknown) return timeout();
    if (*vsat == SatResult::Unsat) {
      v.pop();
      RewriteRule rule{std::move(ir), std::move(isa)};
      if (!verifyRule(rule)) throw SolverError("solver-verified rule fails exhaustive check:\n" + rule.ir.toString());
      res.rule = std::move(rule);
      res.outcome = CegisOutcome::Rule;
      return res;
    }
    auto cex = v.getValues(inputNames_, deadline);
    if (!cex) return timeout();
    v.pop();
    std::vector<std::uint64_t> x;
    for (const auto& name : inputNames_) x.push_back(cex->at(name));
    if (examples_.count(x)) throw SolverError("counterexample repeated; synthesis step ignored an example");
    addExample(x);
  }
}

CegisResult cegis(SynthesisQuery& q, SolverBackend& backend, CegisOptions options) {
  CegisSession session(q, backend, options);
  return session.next();
}

CegisAllResult cegisAll(SynthesisQuery& q, SolverBackend& backend, BlockPolicy policy, CegisOptions options,
                        const KnownClasses* known) {
  CegisAllResult out;
  CegisSession session(q, backend, options);
  std::set<RuleKey> foundRules;
  std::set<DepDag> foundIr;
  while (true) {
    auto r = session.next();
    ++out.invocations;
    out.iterations += r.iterations;
    if (r.outcome == CegisOutcome::Exhausted) break;
    if (r.outcome == CegisOutcome::Timeout) {
      out.timedOut = true;
      break;
    }
    auto& rule = *r.rule;
    if (policy == BlockPolicy::Exact) {
      blockAssignment(q, r.assignment);
      out.rules.push_back({std::move(rule), r.assignment});
      continue;
    }
    if (policy == BlockPolicy::FullRule) {
      auto key = canonicalRule(rule);
      if (foundRules.count(key) || (known && known->rules.count(key))) {
        ++out.redundant;
        blockRuleOrbit(q, rule);
        continue;
      }
      foundRules.insert(std::move(key));
      try {
        blockRule(q, rule);
      } catch (const ClassOverflowError&) {
        ++out.overflows;
        blockRuleOrbit(q, rule);
      }
    } else {
      auto key = canonicalIrLc(rule.ir);
      if (foundIr.count(key) || (known && known->ir.count(key))) {
        ++out.redundant;
        blockIrOrbit(q, rule.ir);
        continue;
      }
      foundIr.insert(std::move(key));
      try {
        blockIrProgram(q, rule.ir);
      } catch (const ClassOverflowError&) {
        ++out.overflows;
        blockIrOrbit(q, rule.ir);
      }
    }
    out.rules.push_back({std::move(rule), r.assignment});
  }
  out.counterexamples = session.counterexamples();
  return out;
}

}  // namespace rulesynth
