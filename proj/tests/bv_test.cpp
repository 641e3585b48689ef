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

#include <random>

#include <gtest/gtest.h>

#include "rulesynth/bv.hpp"
#include "rulesynth/smt.hpp"
#include "support.hpp"

namespace rulesynth {
namespace {

SemExpr x(unsigned i, unsigned w = 4) { return SemExpr::input(i, w); }

BVValue v4(std::uint64_t v) { return BVValue::make(4, v); }

TEST(Eval, AddWraps) {
  auto e = SemExpr::binary(BinaryOp::Add, x(0), x(1));
  const BVValue args[] = {v4(3), v4(14)};
  EXPECT_EQ(evalExpr(e, args).value, 1u);
}

TEST(Eval, NandOfOnes) {
  auto e = SemExpr::unary(UnaryOp::Not, SemExpr::binary(BinaryOp::And, x(0), x(1)));
  const BVValue args[] = {v4(15), v4(15)};
  EXPECT_EQ(evalExpr(e, args).value, 0u);
}

TEST(Eval, StrictLessOnEqual) {
  auto e = SemExpr::binary(BinaryOp::Ult, x(0), x(1));
  const BVValue args[] = {v4(2), v4(2)};
  EXPECT_EQ(evalExpr(e, args), v4(0));
}

TEST(Eval, ComparisonHasOperandWidth) {
  auto e = SemExpr::binary(BinaryOp::Uge, x(0, 8), x(1, 8));
  const BVValue args[] = {BVValue::make(8, 200), BVValue::make(8, 3)};
  EXPECT_EQ(evalExpr(e, args), BVValue::make(8, 1));
}

TEST(Eval, Errors) {
  EXPECT_THROW(SemExpr::binary(BinaryOp::Add, x(0, 4), x(1, 8)), SemanticsError);
  auto e = SemExpr::binary(BinaryOp::Add, x(0), x(1));
  const BVValue one[] = {v4(1)};
  EXPECT_THROW(evalExpr(e, one), SemanticsError);
  const BVValue wide[] = {v4(1), BVValue::make(8, 1)};
  EXPECT_THROW(evalExpr(e, wide), SemanticsError);
  EXPECT_THROW(SemExpr::constant(4, 16), SemanticsError);
}

TEST(Emit, Examples) {
  const std::vector<std::string> ab{"a", "b"};
  EXPECT_EQ(emitSmtTerm(x(0), ab), "a");
  EXPECT_EQ(emitSmtTerm(SemExpr::binary(BinaryOp::Add, x(0), x(1)), ab), "(bvadd a b)");
  EXPECT_EQ(emitSmtTerm(SemExpr::binary(BinaryOp::Eq, x(0), x(1)), ab), "(ite (= a b) #x1 #x0)");
  EXPECT_EQ(smtLiteral(3, 5), "#b101");
}

TEST(Identities, ExhaustiveAtWidth4) {
  auto add = SemExpr::binary(BinaryOp::Add, x(0), x(1));
  auto addSwapped = SemExpr::binary(BinaryOp::Add, x(1), x(0));
  auto mul = SemExpr::binary(BinaryOp::Mul, x(0), x(1));
  auto mulSwapped = SemExpr::binary(BinaryOp::Mul, x(1), x(0));
  auto subSelf = SemExpr::binary(BinaryOp::Sub, x(0), x(0));
  auto notNot = SemExpr::unary(UnaryOp::Not, SemExpr::unary(UnaryOp::Not, x(0)));
  for (std::uint64_t a = 0; a < 16; ++a) {
    const std::uint64_t one[] = {a};
    EXPECT_EQ(evalRaw(subSelf, one), 0u);
    EXPECT_EQ(evalRaw(notNot, one), a);
    for (std::uint64_t b = 0; b < 16; ++b) {
      const std::uint64_t ab[] = {a, b};
      EXPECT_EQ(evalRaw(add, ab), evalRaw(addSwapped, ab));
      EXPECT_EQ(evalRaw(mul, ab), evalRaw(mulSwapped, ab));
    }
  }
}

TEST(Parse, AcceptsBothSpellings) {
  auto a = parseSemExpr("(bvadd (bvmul x0 x1) x2)", 4);
  auto b = parseSemExpr("(add (mul x0 x1) x2)", 4);
  const std::uint64_t in[] = {2, 3, 5};
  EXPECT_EQ(evalRaw(a, in), 11u);
  EXPECT_EQ(evalRaw(b, in), 11u);
  EXPECT_EQ(a.arity(), 3u);
  EXPECT_EQ(evalRaw(parseSemExpr("(_ bv9 4)", 4), {}), 9u);
  EXPECT_EQ(evalRaw(parseSemExpr("#b0110", 4), {}), 6u);
  EXPECT_THROW(parseSemExpr("(bvshl x0 x1)", 4), SemanticsError);
  EXPECT_THROW(parseSemExpr("(bvadd x0", 4), SemanticsError);
  EXPECT_THROW(parseSemExpr("#x1f", 4), SemanticsError);
}

SemExpr randomExpr(std::mt19937_64& rng, unsigned depth, unsigned w) {
  const auto pick = rng() % 10;
  if (depth == 0 || pick < 2) {
    if (rng() % 4 == 0) return SemExpr::constant(w, rng() & widthMask(w));
    return SemExpr::input(static_cast<unsigned>(rng() % 3), w);
  }
  if (pick < 4) {
    return SemExpr::unary(rng() % 2 ? UnaryOp::Not : UnaryOp::Neg, randomExpr(rng, depth - 1, w));
  }
  const auto op = static_cast<BinaryOp>(rng() % 12);
  return SemExpr::binary(op, randomExpr(rng, depth - 1, w), randomExpr(rng, depth - 1, w));
}

TEST(Property, ToStringRoundTrips) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    auto e = randomExpr(rng, 4, 4);
    auto back = parseSemExpr(e.toString(), 4);
    EXPECT_EQ(back.toString(), e.toString());
  }
}

// The evaluator and the emitted SMT term must agree on every sampled
// assignment.
TEST(Property, EvaluatorMatchesSolver) {
  REQUIRE_SOLVER();
  SmtSolver solver(SolverConfig::fromEnvironment());
  std::mt19937_64 rng(11);
  const std::vector<std::string> names{"a", "b", "c"};
  for (unsigned w : {4u, 7u}) {
    for (int i = 0; i < 150; ++i) {
      auto e = randomExpr(rng, 4, w);
      std::uint64_t args[3];
      for (auto& a : args) a = rng() & widthMask(w);
      solver.push();
      std::string script;
      for (int k = 0; k < 3; ++k) {
        script += "(declare-fun " + names[k] + " () (_ BitVec " + std::to_string(w) + "))\n";
        script += "(assert (= " + names[k] + " " + smtLiteral(w, args[k]) + "))\n";
      }
      script += "(declare-fun r () (_ BitVec " + std::to_string(w) + "))\n";
      script += "(assert (= r " + emitSmtTerm(e, names) + "))\n";
      solver.send(script);
      const auto deadline = Clock::now() + std::chrono::seconds(10);
      ASSERT_EQ(solver.checkSat(deadline), SatResult::Sat);
      const std::vector<std::string> r{"r"};
      auto vals = solver.getValues(r, deadline);
      ASSERT_TRUE(vals);
      EXPECT_EQ(vals->at("r"), evalRaw(e, args)) << e.toString();
      solver.pop();
    }
  }
}

}  // namespace
}  // namespace rulesynth
