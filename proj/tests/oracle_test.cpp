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

#include "rulesynth/encoder.hpp"
#include "rulesynth/oracle.hpp"

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

Multiset ms(const ComponentLibrary& lib, std::initializer_list<const char*> names) {
  Multiset m;
  for (auto n : names) m.push_back(lib.at(n));
  return m;
}

TEST(Enumerate, Examples) {
  EXPECT_EQ(enumeratePrograms(ms(ir(), {"add"}), 2).size(), 2u);
  EXPECT_EQ(enumeratePrograms(ms(ir(), {"add"}), 1).size(), 1u);
  EXPECT_EQ(enumeratePrograms(ms(ir(), {"add"}), 3).size(), 0u);
  EXPECT_EQ(enumeratePrograms(ms(ir(), {"neg", "not"}), 1).size(), 2u);
  EXPECT_EQ(enumeratePrograms(ms(ir(), {"c0"}), 0).size(), 1u);
  for (const auto& p : enumeratePrograms(ms(ir(), {"add", "sub", "neg"}), 2)) EXPECT_TRUE(p.valid());
}

// Brute force over the whole location box, keeping what decodes.
std::set<std::string> decodedPrograms(const Multiset& m, unsigned n) {
  auto q = buildQuery(m, ms(isa1a(), {"nand"}), 1);
  q.layout.numInputs = n;
  std::vector<unsigned*> slots;
  SideAssignment a;
  a.out.assign(m.size(), 0);
  a.in.resize(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    a.in[k].assign(m[k]->arity(), 0);
    slots.push_back(&a.out[k]);
    for (auto& x : a.in[k]) slots.push_back(&x);
  }
  const unsigned range = n + static_cast<unsigned>(m.size());
  std::set<std::string> out;
  while (true) {
    try {
      out.insert(decodeSide(q.layout, Side::IR, a).toString());
    } catch (const EncodeError&) {
    }
    std::size_t i = 0;
    while (i < slots.size() && ++*slots[i] == range) *slots[i++] = 0;
    if (i == slots.size()) break;
  }
  return out;
}

TEST(Enumerate, MatchesDecoderBruteForce) {
  for (const auto& m : {ms(isa1a(), {"nand", "nand"}), ms(ir(), {"neg", "add"}), ms(ir(), {"sub", "sub"}),
                        ms(ir(), {"not", "and", "neg"})}) {
    for (unsigned n = 1; n <= inputBound(m); ++n) {
      std::set<std::string> mine;
      for (const auto& p : enumeratePrograms(m, n)) EXPECT_TRUE(mine.insert(p.toString()).second);
      EXPECT_EQ(mine, decodedPrograms(m, n)) << multisetToString(m) << " n=" << n;
    }
  }
}

TEST(Oracle, PairsAndClasses) {
  EXPECT_EQ(oraclePairs(ms(ir(), {"not"}), ms(isa1a(), {"nand"}), 1).size(), 1u);
  EXPECT_EQ(oraclePairs(ms(ir(), {"and"}), ms(isa1a(), {"nand"}), 2).size(), 0u);
  auto isa2 = presetLibrary(PresetId::ISA2);
  EXPECT_EQ(oraclePairs(ms(ir(), {"add"}), ms(isa2, {"add"}), 2).size(), 4u);
  EXPECT_EQ(oracleAssignmentCount(ms(ir(), {"add"}), ms(isa2, {"add"}), 2), 4u);
  EXPECT_EQ(oracleAssignmentCount(ms(ir(), {"add", "add"}), ms(isa2, {"add3"}), 3), 12u * 2u * 6u);  // programs x instance orders x add3 orders
  EXPECT_EQ(oracleRuleClasses(ms(ir(), {"add"}), ms(isa2, {"add"}), 2), 1u);
  EXPECT_EQ(oracleRuleClasses(ms(ir(), {"sub"}), ms(isa1a(), {"sub"}), 2), 1u);
  EXPECT_EQ(oracleRuleClasses(ms(ir(), {"add", "add"}), ms(isa2, {"add3"}), 3), 1u);
  EXPECT_EQ(oracleIrClasses(ms(ir(), {"add"}), ms(isa2, {"add", "neg", "neg"}), 2).size(), 1u);
  for (const auto& [k, r] : oracleRuleClassSet(ms(ir(), {"or", "not"}), ms(isa1a(), {"nand", "nand", "sub"}), 2)) {
    EXPECT_TRUE(verifyRule(r));
    EXPECT_EQ(canonicalRule(r), k);
  }
}

TEST(Oracle, GenAllSmall) {
  auto lib = oracleGenAll(presetLibrary(PresetId::IR2), presetLibrary(PresetId::ISA2), 1, 1);
  EXPECT_EQ(lib.counts.at({1, 1}), 3u);
  auto lib1b = oracleGenAll(presetLibrary(PresetId::IR1b), presetLibrary(PresetId::ISA1b), 1, 1);
  EXPECT_EQ(lib1b.counts.at({1, 1}), 9u);
}

}  // namespace
}  // namespace rulesynth
