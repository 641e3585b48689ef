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

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "rulesynth/oracle.hpp"
#include "rulesynth/program.hpp"

namespace rulesynth {
namespace {

const ComponentLibrary& ir() {
  static const auto l = presetLibrary(PresetId::IR);
  return l;
}
const ComponentLibrary& isa1a() {
  static const auto l = presetLibrary(PresetId::ISA1a);
  return l;
}

ConcreteProgram P(std::string_view text, unsigned n) { return parseProgram(text, ir(), n); }

TEST(Program, EvalExamples) {
  const std::uint64_t in[] = {3, 5};
  EXPECT_EQ(evalProgramRaw(P("t0 = add(x0, x1); t1 = neg(t0)", 2), in), 8u);
  EXPECT_EQ(evalProgramRaw(P("t0 = sub(x0, x1)", 2), in), 14u);
  EXPECT_EQ(evalProgramRaw(P("t0 = c1()", 0), {}), 1u);
  const BVValue bv[] = {BVValue::make(4, 3), BVValue::make(4, 5)};
  EXPECT_EQ(evalProgram(P("t0 = mul(x0, x1)", 2), bv).value, 15u);
}

TEST(Program, ParseAndPrint) {
  auto p = P("t0 = add(x0, x1)\nt1 = neg(t0)", 2);
  EXPECT_EQ(p.toString(), "t0 = add(x0, x1)\nt1 = neg(t0)");
  EXPECT_EQ(parseProgram(p.toString(), ir(), 2), p);
  EXPECT_EQ(parseProgram("t0 = add(x0, x1)", ir()).numInputs(), 2u);
  EXPECT_THROW(P("t0 = frob(x0)", 1), ProgramError);
  EXPECT_THROW(P("t0 = add(x0)", 1), ProgramError);
  EXPECT_THROW(P("t0 = neg(t0)", 1), ProgramError);
  EXPECT_THROW(P("t0 = neg(x3)", 1), ProgramError);
}

TEST(Program, Validate) {
  EXPECT_TRUE(P("t0 = neg(x0)", 1).valid());
  EXPECT_FALSE(P("t0 = neg(x0)", 2).valid());
  EXPECT_FALSE(P("t0 = neg(x0); t1 = not(x0)", 1).valid());
}

TEST(Program, TruthTable) {
  auto t = truthTable(P("t0 = neg(x0)", 1));
  ASSERT_EQ(t.size(), 16u);
  for (unsigned r = 0; r < 16; ++r) EXPECT_EQ(t[r], (16 - r) & 15u);
  auto s = truthTable(P("t0 = sub(x0, x1)", 2));
  ASSERT_EQ(s.size(), 256u);
  EXPECT_EQ(s[3 | (5 << 4)], 14u);
}

TEST(Canonical, Examples) {
  EXPECT_EQ(canonicalize(P("t0 = add(x0, x1)", 2)), canonicalize(P("t0 = add(x1, x0)", 2)));
  EXPECT_NE(canonicalize(P("t0 = sub(x0, x1)", 2)), canonicalize(P("t0 = sub(x1, x0)", 2)));
  EXPECT_EQ(canonicalIrLc(P("t0 = sub(x0, x1)", 2)), canonicalIrLc(P("t0 = sub(x1, x0)", 2)));
  EXPECT_EQ(canonicalize(P("t0 = neg(x0); t1 = not(x1); t2 = add(t0, t1)", 2)),
            canonicalize(P("t0 = not(x1); t1 = neg(x0); t2 = add(t1, t0)", 2)));
  EXPECT_NE(canonicalize(P("t0 = neg(x0); t1 = not(t0)", 1)), canonicalize(P("t0 = not(x0); t1 = neg(t0)", 1)));
  auto d = canonicalize(P("t0 = mul(x0, x0); t1 = add(t0, x0)", 1));
  EXPECT_EQ(d.kinds, (std::vector<std::string>{"add", "mul"}));
}

TEST(Canonical, RuleKeyIgnoresRenamingOnBothSides) {
  auto a = RewriteRule{P("t0 = sub(x0, x1)", 2), parseProgram("t0 = sub(x0, x1)", isa1a(), 2)};
  auto b = RewriteRule{P("t0 = sub(x1, x0)", 2), parseProgram("t0 = sub(x1, x0)", isa1a(), 2)};
  auto bad = RewriteRule{P("t0 = sub(x1, x0)", 2), parseProgram("t0 = sub(x0, x1)", isa1a(), 2)};
  EXPECT_EQ(canonicalRule(a), canonicalRule(b));
  EXPECT_NE(canonicalRule(a), canonicalRule(bad));
}

TEST(Class, Examples) {
  EXPECT_EQ(enumerateIrClass(P("t0 = add(x0, x1)", 2)).size(), 2u);
  EXPECT_EQ(programVariants(P("t0 = add(x0, x1)", 2)).size(), 2u);
  EXPECT_EQ(programVariants(P("t0 = sub(x0, x1)", 2)).size(), 1u);
  EXPECT_EQ(enumerateIrClass(P("t0 = sub(x0, x1)", 2)).size(), 2u);
  EXPECT_EQ(programVariants(P("t0 = neg(x0); t1 = not(x1); t2 = sub(t0, t1)", 2)).size(), 2u);
  auto r = RewriteRule{P("t0 = add(x0, x1)", 2), parseProgram("t0 = sub(x0, x1)", isa1a(), 2)};
  EXPECT_EQ(enumerateRuleClass(r).size(), 4u);
  EXPECT_EQ(allPermutations(3).size(), 6u);
  EXPECT_THROW(programVariants(P("t0 = neg(x0); t1 = not(x1); t2 = sub(t0, t1)", 2), 1), ClassOverflowError);
}

TEST(Verify, Examples) {
  EXPECT_TRUE(verifyRule({P("t0 = or(x0, x1); t1 = not(t0)", 2),
                          parseProgram("t0 = nand(x1, x1); t1 = nand(x0, t0); t2 = sub(t1, x1)", isa1a(), 2)}));
  EXPECT_TRUE(verifyRule({P("t0 = not(x0)", 1), parseProgram("t0 = nand(x0, x0)", isa1a(), 1)}));
  EXPECT_FALSE(verifyRule({P("t0 = and(x0, x1)", 2), parseProgram("t0 = nand(x0, x1)", isa1a(), 2)}));
  EXPECT_FALSE(verifyRule({P("t0 = sub(x0, x1)", 2), parseProgram("t0 = sub(x1, x0)", isa1a(), 2)}));
}

FoundRule found(RewriteRule r) {
  return {r, multisetKey(r.ir.components()), multisetKey(r.isa.components()), 0};
}

TEST(Composites, SpecializationOfSingleInstructionRule) {
  auto isa2 = presetLibrary(PresetId::ISA2);
  std::vector<FoundRule> rules{found({P("t0 = add(x0, x1)", 2), parseProgram("t0 = add(x0, x1)", isa2, 2)})};
  const Multiset add{ir().at("add")};
  CompositeQuery q{add, 1, std::vector<std::string>{"add"}, std::nullopt, SpecializationPolicy::SingleInstruction};
  auto c = composites(rules, q);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.begin()->second.ir.toString(), "t0 = add(x0, x0)");
  q.policy = SpecializationPolicy::Strict;
  EXPECT_EQ(composites(rules, q).size(), 1u);
  // A single tile wired to all inputs reproduces the rule's own class.
  q.numInputs = 2;
  auto self = composites(rules, q);
  ASSERT_EQ(self.size(), 1u);
  EXPECT_EQ(self.begin()->first, canonicalRule(rules[0].rule));
}

TEST(Composites, MultiInstructionRuleIsNotSpecialized) {
  std::vector<FoundRule> rules{found({P("t0 = or(x0, x1); t1 = not(t0)", 2),
                                      parseProgram("t0 = nand(x1, x1); t1 = nand(x0, t0); t2 = sub(t1, x1)",
                                                   isa1a(), 2)})};
  const Multiset m{ir().at("or"), ir().at("not")};
  CompositeQuery q{m, 1, std::vector<std::string>{"nand", "nand", "sub"}, std::nullopt,
                   SpecializationPolicy::SingleInstruction};
  EXPECT_TRUE(composites(rules, q).empty());
  q.policy = SpecializationPolicy::Strict;
  auto c = composites(rules, q);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_TRUE(verifyRule(c.begin()->second));
}

TEST(Composites, TwoTiles) {
  auto isa2 = presetLibrary(PresetId::ISA2);
  std::vector<FoundRule> rules{found({P("t0 = add(x0, x1)", 2), parseProgram("t0 = add(x0, x1)", isa2, 2)}),
                               found({P("t0 = neg(x0)", 1), parseProgram("t0 = neg(x0)", isa2, 1)})};
  const Multiset m{ir().at("add"), ir().at("neg")};
  CompositeQuery q{m, 2, std::vector<std::string>{"add", "neg"}, std::nullopt,
                   SpecializationPolicy::SingleInstruction};
  auto c = composites(rules, q);
  // neg(add(x0,x1)) and add(neg(x0),x1)
  EXPECT_EQ(c.size(), 2u);
  for (const auto& [k, r] : c) {
    EXPECT_TRUE(verifyRule(r));
    EXPECT_EQ(canonicalRule(r), k);
  }
  q.isaKey = std::vector<std::string>{"add", "add"};
  EXPECT_TRUE(composites(rules, q).empty());
  q.isaKey.reset();
  q.maxCost = 5000;
  auto lc = compositesLc(rules, q);
  EXPECT_EQ(lc.size(), 2u);
  for (const auto& [k, r] : lc) EXPECT_EQ(canonicalIrLc(r.ir), k);
}

// Every program over at most two components with at most two inputs.
std::vector<ConcreteProgram> smallPrograms() {
  const std::vector<std::string> pick{"c0", "not", "neg", "add", "sub", "and"};
  std::vector<ConcreteProgram> out;
  for (std::size_t a = 0; a < pick.size(); ++a) {
    for (std::size_t b = a; b <= pick.size(); ++b) {
      Multiset m{ir().at(pick[a])};
      if (b < pick.size()) m.push_back(ir().at(pick[b]));
      for (unsigned n = 0; n <= 2; ++n) {
        for (auto& p : enumeratePrograms(m, n)) out.push_back(std::move(p));
      }
    }
  }
  return out;
}

TEST(Property, CanonicalEqualityIffSameClass) {
  const auto progs = smallPrograms();
  ASSERT_GT(progs.size(), 100u);
  std::mt19937 rng(11);
  std::size_t same = 0;
  for (int t = 0; t < 4000; ++t) {
    const auto& p = progs[rng() % progs.size()];
    // Bias towards related pairs by sometimes drawing from p's class.
    auto cls = enumerateIrClass(p);
    const auto& q = (t % 2) ? cls[rng() % cls.size()] : progs[rng() % progs.size()];
    const bool inClass = std::find(cls.begin(), cls.end(), q) != cls.end();
    const bool eq = p.numInputs() == q.numInputs() && canonicalIrLc(p) == canonicalIrLc(q);
    EXPECT_EQ(inClass, eq) << p.toString() << "\nvs\n" << q.toString();
    same += inClass;
  }
  EXPECT_GT(same, 1000u);
}

TEST(Property, VariantsShareCanonicalFormAndSemantics) {
  for (const auto& p : smallPrograms()) {
    const auto d = canonicalize(p);
    const auto t = truthTable(p);
    for (const auto& v : programVariants(p)) {
      EXPECT_EQ(canonicalize(v), d);
      EXPECT_EQ(truthTable(v), t);
    }
  }
}

TEST(Property, RuleClassMembersVerify) {
  auto isa2 = presetLibrary(PresetId::ISA2);
  const Multiset irm{ir().at("add"), ir().at("neg")};
  const Multiset isam{isa2.at("add"), isa2.at("neg")};
  for (unsigned n = 1; n <= 2; ++n) {
    for (const auto& [k, r] : oracleRuleClassSet(irm, isam, n)) {
      for (const auto& m : enumerateRuleClass(r)) {
        EXPECT_TRUE(verifyRule(m));
        EXPECT_EQ(canonicalRule(m), k);
      }
    }
  }
}

}  // namespace
}  // namespace rulesynth
