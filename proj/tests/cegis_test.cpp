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

#include <set>

#include <gtest/gtest.h>

#include "rulesynth/cegis.hpp"
#include "rulesynth/oracle.hpp"
#include "support.hpp"

namespace rulesynth {
namespace {

using namespace std::chrono_literals;

const ComponentLibrary& ir() {
  static const auto l = presetLibrary(PresetId::IR);
  return l;
}
const ComponentLibrary& isa1a() {
  static const auto l = presetLibrary(PresetId::ISA1a);
  return l;
}
const ComponentLibrary& isa2() {
  static const auto l = presetLibrary(PresetId::ISA2);
  return l;
}

Multiset ms(const ComponentLibrary& lib, std::initializer_list<const char*> names) {
  Multiset m;
  for (auto n : names) m.push_back(lib.at(n));
  return m;
}

class Cegis : public ::testing::Test {
 protected:
  void SetUp() override {
    REQUIRE_SOLVER();
    backend_ = std::make_unique<SolverBackend>();
  }
  SolverBackend& backend() { return *backend_; }

 private:
  std::unique_ptr<SolverBackend> backend_;
};

TEST_F(Cegis, NotBecomesNand) {
  auto q = buildQuery(ms(ir(), {"not"}), ms(isa1a(), {"nand"}), 1);
  auto r = cegis(q, backend());
  ASSERT_EQ(r.outcome, CegisOutcome::Rule);
  ASSERT_TRUE(r.rule);
  EXPECT_EQ(r.rule->ir.toString(), "t0 = not(x0)");
  EXPECT_EQ(r.rule->isa.toString(), "t0 = nand(x0, x0)");
  EXPECT_TRUE(verifyRule(*r.rule));
  EXPECT_GE(r.iterations, 1u);
  EXPECT_EQ(decodeModel(q.layout, r.assignment), std::make_pair(r.rule->ir, r.rule->isa));
}

TEST_F(Cegis, AddIsNotMul) {
  auto q = buildQuery(ms(ir(), {"add"}), ms(isa2(), {"mul"}), 2);
  EXPECT_EQ(cegis(q, backend()).outcome, CegisOutcome::Exhausted);
}

TEST_F(Cegis, EnumeratesEveryClassOnce) {
  auto q = buildQuery(ms(ir(), {"sub"}), ms(isa1a(), {"sub"}), 2);
  auto all = cegisAll(q, backend(), BlockPolicy::FullRule);
  EXPECT_FALSE(all.timedOut);
  ASSERT_EQ(all.rules.size(), 1u);
  EXPECT_EQ(all.redundant, 0u);
  EXPECT_EQ(all.invocations, 2u);
  EXPECT_EQ(canonicalRule(all.rules[0].rule), canonicalRule({parseProgram("t0 = sub(x1, x0)", ir(), 2),
                                                             parseProgram("t0 = sub(x1, x0)", isa1a(), 2)}));
}

TEST_F(Cegis, KnownClassesCountAsRedundant) {
  auto q = buildQuery(ms(ir(), {"not"}), ms(isa1a(), {"nand"}), 1);
  KnownClasses known;
  known.rules.insert(
      canonicalRule({parseProgram("t0 = not(x0)", ir(), 1), parseProgram("t0 = nand(x0, x0)", isa1a(), 1)}));
  auto all = cegisAll(q, backend(), BlockPolicy::FullRule, {}, &known);
  EXPECT_TRUE(all.rules.empty());
  EXPECT_EQ(all.redundant, 1u);
}

TEST_F(Cegis, ExactBlockingReturnsEveryAssignment) {
  for (auto [irm, isam, n] : {std::tuple{ms(ir(), {"add"}), ms(isa2(), {"add"}), 2u},
                              std::tuple{ms(ir(), {"and"}), ms(isa1a(), {"nand", "nand"}), 2u},
                              std::tuple{ms(ir(), {"neg"}), ms(isa2(), {"neg"}), 1u}}) {
    auto q = buildQuery(irm, isam, n);
    auto all = cegisAll(q, backend(), BlockPolicy::Exact);
    std::set<Assignment> distinct;
    for (const auto& r : all.rules) distinct.insert(r.assignment);
    EXPECT_EQ(distinct.size(), all.rules.size());
    EXPECT_EQ(all.rules.size(), oracleAssignmentCount(irm, isam, n)) << multisetToString(isam);
  }
}

TEST_F(Cegis, AgreesWithOracleOnSmallCells) {
  const std::vector<std::tuple<Multiset, Multiset, unsigned>> cells{
      {ms(ir(), {"and"}), ms(isa1a(), {"nand", "nand"}), 2},
      {ms(ir(), {"not"}), ms(isa1a(), {"nand", "nand"}), 1},
      {ms(ir(), {"or"}), ms(isa1a(), {"nand", "nand"}), 1},
      {ms(ir(), {"sub"}), ms(isa1a(), {"sub"}), 1},
      {ms(ir(), {"sub"}), ms(isa2(), {"add", "neg"}), 2},
      {ms(ir(), {"mul", "add"}), ms(isa2(), {"mac"}), 3},
      {ms(ir(), {"add"}), ms(isa2(), {"add", "neg", "neg"}), 2},
      {ms(ir(), {"neg", "neg"}), ms(isa2(), {"neg"}), 1},
      {ms(ir(), {"add"}), ms(isa2(), {"add", "neg"}), 2},
  };
  unsigned full = 0, irOnly = 0;
  for (const auto& [irm, isam, n] : cells) {
    auto q1 = buildQuery(irm, isam, n);
    auto a = cegisAll(q1, backend(), BlockPolicy::FullRule);
    EXPECT_EQ(a.rules.size(), oracleRuleClasses(irm, isam, n)) << multisetToString(irm) << multisetToString(isam);
    std::set<RuleKey> keys;
    for (const auto& r : a.rules) {
      EXPECT_TRUE(verifyRule(r.rule));
      keys.insert(canonicalRule(r.rule));
    }
    EXPECT_EQ(keys.size(), a.rules.size());
    EXPECT_EQ(a.redundant, 0u);

    auto q2 = buildQuery(irm, isam, n);
    auto b = cegisAll(q2, backend(), BlockPolicy::IrOnly);
    EXPECT_EQ(b.rules.size(), oracleIrClasses(irm, isam, n).size()) << multisetToString(irm) << multisetToString(isam);
    std::set<DepDag> irKeys;
    for (const auto& r : b.rules) irKeys.insert(canonicalIrLc(r.rule.ir));
    EXPECT_EQ(irKeys.size(), b.rules.size());
    full += static_cast<unsigned>(a.rules.size());
    irOnly += static_cast<unsigned>(b.rules.size());
  }
  EXPECT_LT(irOnly, full);
}

TEST_F(Cegis, ShortTimeoutFinishesSession) {
  auto q = buildQuery(ms(ir(), {"xor", "and"}), ms(isa1a(), {"nand", "nand", "sub", "sub"}), 2);
  CegisOptions opts;
  opts.timeout = 1ms;
  CegisSession session(q, backend(), opts);
  auto r = session.next();
  EXPECT_EQ(r.outcome, CegisOutcome::Timeout);
  EXPECT_TRUE(session.finished());
  EXPECT_EQ(session.next().outcome, CegisOutcome::Timeout);

  // The backend is usable again afterwards.
  auto q2 = buildQuery(ms(ir(), {"not"}), ms(isa1a(), {"nand"}), 1);
  EXPECT_EQ(cegis(q2, backend()).outcome, CegisOutcome::Rule);
}

TEST_F(Cegis, SeedDoesNotChangeTheRuleSet) {
  std::set<RuleKey> first;
  for (std::uint64_t seed : {0u, 7u}) {
    auto q = buildQuery(ms(ir(), {"and"}), ms(isa1a(), {"nand", "nand"}), 2);
    CegisOptions opts;
    opts.seed = seed;
    std::set<RuleKey> keys;
    for (const auto& r : cegisAll(q, backend(), BlockPolicy::FullRule, opts).rules) keys.insert(canonicalRule(r.rule));
    if (seed == 0) first = keys;
    else EXPECT_EQ(keys, first);
  }
}

}  // namespace
}  // namespace rulesynth
