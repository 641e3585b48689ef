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

#include "rulesynth/oracle.hpp"

#include <algorithm>
#include <functional>

#include "rulesynth/encoder.hpp"

namespace rulesynth {

std::vector<ConcreteProgram> enumeratePrograms(std::span<const ComponentRef> m, unsigned numInputs) {
  std::vector<ConcreteProgram> out;
  if (m.empty()) return out;
  // Distinct line orders of the multiset, as indices into a name-sorted copy.
  Multiset sorted(m.begin(), m.end());
  std::sort(sorted.begin(), sorted.end(), [](const ComponentRef& a, const ComponentRef& b) { return a->name() < b->name(); });
  std::vector<std::size_t> order(sorted.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = static_cast<std::size_t>(
        std::find_if(sorted.begin(), sorted.end(), [&](const ComponentRef& c) { return c->name() == sorted[i]->name(); }) -
        sorted.begin());
  }
  const std::size_t N = sorted.size();
  do {
    std::vector<Line> lines(N);
    std::function<void(std::size_t)> rec = [&](std::size_t j) {
      if (j == N) {
        ConcreteProgram p(numInputs, lines);
        if (p.valid()) out.push_back(std::move(p));
        return;
      }
      const auto& c = sorted[order[j]];
      const unsigned refs = numInputs + static_cast<unsigned>(j);
      const unsigned k = c->arity();
      lines[j].component = c;
      lines[j].args.assign(k, ValueRef::input(0));
      if (refs == 0 && k > 0) return;
      std::vector<unsigned> idx(k, 0);
      while (true) {
        for (unsigned a = 0; a < k; ++a) {
          lines[j].args[a] = idx[a] < numInputs ? ValueRef::input(idx[a]) : ValueRef::line(idx[a] - numInputs);
        }
        rec(j + 1);
        unsigned a = 0;
        while (a < k && ++idx[a] == refs) idx[a++] = 0;
        if (a == k) break;
      }
    };
    rec(0);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

std::vector<RewriteRule> oraclePairs(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa,
                                     unsigned numInputs) {
  std::vector<RewriteRule> out;
  const auto irProgs = enumeratePrograms(ir, numInputs);
  if (irProgs.empty()) return out;
  std::map<std::vector<std::uint32_t>, std::vector<ConcreteProgram>> byTable;
  for (auto& p : enumeratePrograms(isa, numInputs)) byTable[truthTable(p)].push_back(std::move(p));
  for (const auto& p : irProgs) {
    auto it = byTable.find(truthTable(p));
    if (it == byTable.end()) continue;
    for (const auto& q : it->second) out.push_back({p, q});
  }
  return out;
}

namespace {

std::uint64_t instancePermutations(std::span<const ComponentRef> m) {
  std::map<std::string, unsigned> counts;
  for (const auto& c : m) ++counts[c->name()];
  std::uint64_t f = 1;
  for (const auto& [_, r] : counts) {
    for (unsigned i = 2; i <= r; ++i) f *= i;
  }
  return f;
}

}  // namespace

std::uint64_t oracleAssignmentCount(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa,
                                    unsigned numInputs) {
  return oraclePairs(ir, isa, numInputs).size() * instancePermutations(ir) * instancePermutations(isa);
}

std::map<RuleKey, RewriteRule> oracleRuleClassSet(std::span<const ComponentRef> ir,
                                                  std::span<const ComponentRef> isa, unsigned numInputs) {
  std::map<RuleKey, RewriteRule> out;
  for (auto& r : oraclePairs(ir, isa, numInputs)) {
    auto key = canonicalRule(r);
    out.try_emplace(std::move(key), std::move(r));
  }
  return out;
}

std::size_t oracleRuleClasses(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa,
                              unsigned numInputs) {
  return oracleRuleClassSet(ir, isa, numInputs).size();
}

std::set<DepDag> oracleIrClasses(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa,
                                 unsigned numInputs) {
  std::set<DepDag> out;
  for (const auto& r : oraclePairs(ir, isa, numInputs)) out.insert(canonicalIrLc(r.ir));
  return out;
}

OracleLibrary oracleGenAll(const ComponentLibrary& ir, const ComponentLibrary& isa, unsigned maxIR, unsigned maxISA,
                           SpecializationPolicy policy) {
  OracleLibrary lib;
  for (const auto& cell : cellOrder(maxIR, maxISA)) {
    for (const auto& mi : multicomb(ir, cell.first)) {
      for (const auto& ma : multicomb(isa, cell.second)) {
        for (const unsigned n : allInputs(mi, ma)) {
          auto classes = oracleRuleClassSet(mi, ma, n);
          if (classes.empty()) continue;
          const auto comps = composites(lib.rules, CompositeQuery{mi, n, multisetKey(ma), std::nullopt, policy});
          for (auto& [key, rule] : classes) {
            if (comps.count(key)) continue;
            lib.rules.push_back({rule, multisetKey(mi), multisetKey(ma), 0});
            ++lib.counts[cell];
          }
        }
      }
    }
  }
  return lib;
}

OracleLibrary oracleGenAllLC(const ComponentLibrary& ir, const ComponentLibrary& isa, unsigned maxIR,
                             unsigned maxISA, const CostMetric& metric, SpecializationPolicy policy) {
  OracleLibrary lib;
  const auto isams = isaMultisetsByCost(isa, maxISA, metric);
  for (unsigned n1 = 1; n1 <= maxIR; ++n1) {
    for (const auto& mi : multicomb(ir, n1)) {
      for (const auto& ma : isams) {
        const auto cost = multisetCost(metric, ma);
        for (const unsigned n : allInputs(mi, ma)) {
          const auto pairs = oraclePairs(mi, ma, n);
          if (pairs.empty()) continue;
          const auto comps = compositesLc(lib.rules, CompositeQuery{mi, n, std::nullopt, cost, policy});
          std::set<DepDag> seen;
          for (const auto& r : pairs) {
            auto key = canonicalIrLc(r.ir);
            if (comps.count(key) || !seen.insert(key).second) continue;
            lib.rules.push_back({r, multisetKey(mi), multisetKey(ma), cost});
            ++lib.counts[{n1, static_cast<unsigned>(ma.size())}];
          }
        }
      }
    }
  }
  return lib;
}

}  // namespace rulesynth
