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

#include "rulesynth/bv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <sstream>

namespace rulesynth {

struct SemExpr::Node {
  Kind kind;
  unsigned width;
  unsigned arity;
  unsigned index = 0;
  std::uint64_t value = 0;
  UnaryOp uop = UnaryOp::Not;
  BinaryOp bop = BinaryOp::And;
  std::vector<SemExpr> operands;
};

namespace {

void checkWidth(unsigned width) {
  if (width == 0 || width > kMaxWidth) {
    throw SemanticsError("bit-vector width must be in [1, " + std::to_string(kMaxWidth) +
                         "], got " + std::to_string(width));
  }
}

constexpr std::array<std::string_view, 2> kUnaryNames = {"not", "neg"};
constexpr std::array<std::string_view, 12> kBinaryNames = {
    "and", "or", "xor", "add", "sub", "mul", "ult", "ule", "ugt", "uge", "eq", "neq"};
constexpr std::array<std::string_view, 2> kUnarySmt = {"bvnot", "bvneg"};
constexpr std::array<std::string_view, 12> kBinarySmt = {
    "bvand", "bvor", "bvxor", "bvadd", "bvsub", "bvmul", "bvult", "bvule", "bvugt", "bvuge",
    "=", "distinct"};

std::uint64_t applyBinary(BinaryOp op, std::uint64_t a, std::uint64_t b, std::uint64_t mask) {
  switch (op) {
    case BinaryOp::And: return a & b;
    case BinaryOp::Or: return a | b;
    case BinaryOp::Xor: return a ^ b;
    case BinaryOp::Add: return (a + b) & mask;
    case BinaryOp::Sub: return (a - b) & mask;
    case BinaryOp::Mul: return (a * b) & mask;
    case BinaryOp::Ult: return a < b;
    case BinaryOp::Ule: return a <= b;
    case BinaryOp::Ugt: return a > b;
    case BinaryOp::Uge: return a >= b;
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Neq: return a != b;
  }
  return 0;
}

}  // namespace

BVValue BVValue::make(unsigned width, std::uint64_t value) {
  checkWidth(width);
  if (value > widthMask(width)) {
    throw SemanticsError("value " + std::to_string(value) + " does not fit in " +
                         std::to_string(width) + " bits");
  }
  return BVValue{width, value};
}

std::string_view opName(UnaryOp op) { return kUnaryNames[static_cast<std::size_t>(op)]; }
std::string_view opName(BinaryOp op) { return kBinaryNames[static_cast<std::size_t>(op)]; }

bool isComparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::Ult:
    case BinaryOp::Ule:
    case BinaryOp::Ugt:
    case BinaryOp::Uge:
    case BinaryOp::Eq:
    case BinaryOp::Neq:
      return true;
    default:
      return false;
  }
}

SemExpr SemExpr::input(unsigned index, unsigned width) {
  checkWidth(width);
  auto node = std::make_shared<Node>(Node{Kind::Input, width, index + 1, 0, 0, {}, {}, {}});
  node->index = index;
  return SemExpr(std::move(node));
}

SemExpr SemExpr::constant(unsigned width, std::uint64_t value) {
  BVValue::make(width, value);
  auto node = std::make_shared<Node>(Node{Kind::Const, width, 0, 0, 0, {}, {}, {}});
  node->value = value;
  return SemExpr(std::move(node));
}

SemExpr SemExpr::unary(UnaryOp op, SemExpr operand) {
  auto node = std::make_shared<Node>(Node{Kind::Unary, operand.width(), operand.arity(), 0, 0, {}, {}, {}});
  node->uop = op;
  node->operands.push_back(std::move(operand));
  return SemExpr(std::move(node));
}

SemExpr SemExpr::binary(BinaryOp op, SemExpr lhs, SemExpr rhs) {
  if (lhs.width() != rhs.width()) {
    throw SemanticsError("operand width mismatch in " + std::string(opName(op)) + ": " +
                         std::to_string(lhs.width()) + " vs " + std::to_string(rhs.width()));
  }
  auto node = std::make_shared<Node>(
      Node{Kind::Binary, lhs.width(), std::max(lhs.arity(), rhs.arity()), 0, 0, {}, {}, {}});
  node->bop = op;
  node->operands.push_back(std::move(lhs));
  node->operands.push_back(std::move(rhs));
  return SemExpr(std::move(node));
}

SemExpr::Kind SemExpr::kind() const { return node_->kind; }
unsigned SemExpr::width() const { return node_->width; }
unsigned SemExpr::arity() const { return node_->arity; }

unsigned SemExpr::inputIndex() const {
  if (kind() != Kind::Input) throw SemanticsError("not an input reference");
  return node_->index;
}

std::uint64_t SemExpr::constValue() const {
  if (kind() != Kind::Const) throw SemanticsError("not a constant");
  return node_->value;
}

UnaryOp SemExpr::unaryOp() const {
  if (kind() != Kind::Unary) throw SemanticsError("not a unary operation");
  return node_->uop;
}

BinaryOp SemExpr::binaryOp() const {
  if (kind() != Kind::Binary) throw SemanticsError("not a binary operation");
  return node_->bop;
}

const SemExpr& SemExpr::operand(unsigned i) const {
  if (i >= node_->operands.size()) throw SemanticsError("operand index out of range");
  return node_->operands[i];
}

std::vector<unsigned> SemExpr::inputsUsed() const {
  std::set<unsigned> used;
  std::vector<const SemExpr*> stack{this};
  while (!stack.empty()) {
    const SemExpr* e = stack.back();
    stack.pop_back();
    if (e->kind() == Kind::Input) used.insert(e->inputIndex());
    for (const auto& child : e->node_->operands) stack.push_back(&child);
  }
  return {used.begin(), used.end()};
}

std::string SemExpr::toString() const {
  switch (kind()) {
    case Kind::Input:
      return "x" + std::to_string(inputIndex());
    case Kind::Const:
      return smtLiteral(width(), constValue());
    case Kind::Unary:
      return "(" + std::string(opName(unaryOp())) + " " + operand(0).toString() + ")";
    case Kind::Binary:
      return "(" + std::string(opName(binaryOp())) + " " + operand(0).toString() + " " +
             operand(1).toString() + ")";
  }
  return {};
}

std::uint64_t evalRaw(const SemExpr& expr, std::span<const std::uint64_t> args) {
  const std::uint64_t mask = widthMask(expr.width());
  switch (expr.kind()) {
    case SemExpr::Kind::Input:
      return args[expr.inputIndex()];
    case SemExpr::Kind::Const:
      return expr.constValue();
    case SemExpr::Kind::Unary: {
      std::uint64_t v = evalRaw(expr.operand(0), args);
      return expr.unaryOp() == UnaryOp::Not ? (~v & mask) : ((~v + 1) & mask);
    }
    case SemExpr::Kind::Binary:
      return applyBinary(expr.binaryOp(), evalRaw(expr.operand(0), args),
                         evalRaw(expr.operand(1), args), mask);
  }
  return 0;
}

BVValue evalExpr(const SemExpr& expr, std::span<const BVValue> args) {
  if (args.size() < expr.arity()) {
    throw SemanticsError("expression references x" + std::to_string(expr.arity() - 1) +
                         " but only " + std::to_string(args.size()) + " arguments given");
  }
  std::vector<std::uint64_t> raw;
  raw.reserve(args.size());
  for (const auto& a : args) {
    if (a.width != expr.width()) {
      throw SemanticsError("argument width " + std::to_string(a.width) +
                           " does not match expression width " + std::to_string(expr.width()));
    }
    raw.push_back(a.value & widthMask(a.width));
  }
  return BVValue{expr.width(), evalRaw(expr, raw)};
}

std::string smtLiteral(unsigned width, std::uint64_t value) {
  std::string out;
  if (width % 4 == 0) {
    out = "#x";
    for (int nib = static_cast<int>(width / 4) - 1; nib >= 0; --nib) {
      out += "0123456789abcdef"[(value >> (4 * nib)) & 0xf];
    }
  } else {
    out = "#b";
    for (int bit = static_cast<int>(width) - 1; bit >= 0; --bit) {
      out += ((value >> bit) & 1) ? '1' : '0';
    }
  }
  return out;
}

std::string emitSmtTerm(const SemExpr& expr, std::span<const std::string> argNames) {
  switch (expr.kind()) {
    case SemExpr::Kind::Input: {
      unsigned i = expr.inputIndex();
      if (i >= argNames.size()) {
        throw SemanticsError("no argument name for x" + std::to_string(i));
      }
      return argNames[i];
    }
    case SemExpr::Kind::Const:
      return smtLiteral(expr.width(), expr.constValue());
    case SemExpr::Kind::Unary:
      return "(" + std::string(kUnarySmt[static_cast<std::size_t>(expr.unaryOp())]) + " " +
             emitSmtTerm(expr.operand(0), argNames) + ")";
    case SemExpr::Kind::Binary: {
      BinaryOp op = expr.binaryOp();
      std::string inner = "(" + std::string(kBinarySmt[static_cast<std::size_t>(op)]) + " " +
                          emitSmtTerm(expr.operand(0), argNames) + " " +
                          emitSmtTerm(expr.operand(1), argNames) + ")";
      if (!isComparison(op)) return inner;
      return "(ite " + inner + " " + smtLiteral(expr.width(), 1) + " " +
             smtLiteral(expr.width(), 0) + ")";
    }
  }
  return {};
}

namespace {

class SExprParser {
 public:
  SExprParser(std::string_view text, unsigned width) : text_(text), width_(width) {}

  SemExpr parseAll() {
    SemExpr e = parse();
    skipSpace();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw SemanticsError("semantics parse error at offset " + std::to_string(pos_) + " in '" +
                         std::string(text_) + "': " + why);
  }

  void skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view atom() {
    skipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    if (start == pos_) fail("expected atom");
    return text_.substr(start, pos_ - start);
  }

  void expect(char c) {
    skipSpace();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::uint64_t number(std::string_view digits, int base) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v, base);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      fail("bad numeral '" + std::string(digits) + "'");
    }
    return v;
  }

  SemExpr literal(unsigned w, std::uint64_t v) {
    if (w != width_) {
      fail("literal width " + std::to_string(w) + " differs from " + std::to_string(width_));
    }
    return SemExpr::constant(w, v);
  }

  SemExpr leaf(std::string_view tok) {
    if (tok.size() > 1 && tok[0] == 'x') {
      return SemExpr::input(static_cast<unsigned>(number(tok.substr(1), 10)), width_);
    }
    if (tok.size() > 2 && tok.substr(0, 2) == "#x") {
      auto digits = tok.substr(2);
      return literal(static_cast<unsigned>(4 * digits.size()), number(digits, 16));
    }
    if (tok.size() > 2 && tok.substr(0, 2) == "#b") {
      auto digits = tok.substr(2);
      return literal(static_cast<unsigned>(digits.size()), number(digits, 2));
    }
    fail("unknown atom '" + std::string(tok) + "'");
  }

  static std::optional<UnaryOp> unaryFor(std::string_view name) {
    for (std::size_t i = 0; i < kUnaryNames.size(); ++i) {
      if (name == kUnaryNames[i] || name == kUnarySmt[i]) return static_cast<UnaryOp>(i);
    }
    return std::nullopt;
  }

  static std::optional<BinaryOp> binaryFor(std::string_view name) {
    for (std::size_t i = 0; i < kBinaryNames.size(); ++i) {
      if (name == kBinaryNames[i] || name == kBinarySmt[i]) return static_cast<BinaryOp>(i);
    }
    return std::nullopt;
  }

  SemExpr parse() {
    skipSpace();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] != '(') return leaf(atom());
    ++pos_;
    std::string_view head = atom();
    if (head == "_") {
      std::string_view bv = atom();
      if (bv.substr(0, 2) != "bv") fail("expected (_ bvN W)");
      std::uint64_t v = number(bv.substr(2), 10);
      unsigned w = static_cast<unsigned>(number(atom(), 10));
      expect(')');
      if (w == 0 || w > kMaxWidth || v > widthMask(w)) fail("literal out of range");
      return literal(w, v);
    }
    if (auto u = unaryFor(head)) {
      SemExpr a = parse();
      expect(')');
      return SemExpr::unary(*u, std::move(a));
    }
    if (auto b = binaryFor(head)) {
      SemExpr l = parse();
      SemExpr r = parse();
      expect(')');
      return SemExpr::binary(*b, std::move(l), std::move(r));
    }
    fail("unknown operator '" + std::string(head) + "'");
  }

  std::string_view text_;
  unsigned width_;
  std::size_t pos_ = 0;
};

}  // namespace

SemExpr parseSemExpr(std::string_view text, unsigned width) {
  checkWidth(width);
  return SExprParser(text, width).parseAll();
}

}  // namespace rulesynth
