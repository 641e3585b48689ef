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
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rulesynth {

/// Raised for malformed or ill-typed bit-vector expressions and values.
class SemanticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr unsigned kMaxWidth = 32;
inline constexpr unsigned kDefaultWidth = 4;

inline std::uint64_t widthMask(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

/// A concrete fixed-width value; `value` is always reduced modulo 2^width.
struct BVValue {
  unsigned width = kDefaultWidth;
  std::uint64_t value = 0;

  static BVValue make(unsigned width, std::uint64_t value);

  friend bool operator==(const BVValue&, const BVValue&) = default;
};

enum class UnaryOp { Not, Neg };
enum class BinaryOp { And, Or, Xor, Add, Sub, Mul, Ult, Ule, Ugt, Uge, Eq, Neq };

std::string_view opName(UnaryOp op);
std::string_view opName(BinaryOp op);
bool isComparison(BinaryOp op);

/// Immutable expression tree over a single bit-vector sort. Comparisons also
/// produce a width-W value (1 for true, 0 for false). Nodes are shared, so
/// copies are cheap and safe to hand across threads.
class SemExpr {
 public:
  enum class Kind { Input, Const, Unary, Binary };

  static SemExpr input(unsigned index, unsigned width);
  static SemExpr constant(unsigned width, std::uint64_t value);
  static SemExpr unary(UnaryOp op, SemExpr operand);
  static SemExpr binary(BinaryOp op, SemExpr lhs, SemExpr rhs);

  Kind kind() const;
  unsigned width() const;
  unsigned inputIndex() const;
  std::uint64_t constValue() const;
  UnaryOp unaryOp() const;
  BinaryOp binaryOp() const;
  const SemExpr& operand(unsigned i) const;

  /// One past the largest InputRef index, 0 for closed terms.
  unsigned arity() const;
  /// Distinct InputRef indices in increasing order.
  std::vector<unsigned> inputsUsed() const;

  /// S-expression form accepted by parseSemExpr.
  std::string toString() const;

 private:
  struct Node;
  explicit SemExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

BVValue evalExpr(const SemExpr& expr, std::span<const BVValue> args);

/// Unchecked evaluation on raw words; args must already be masked to width.
std::uint64_t evalRaw(const SemExpr& expr, std::span<const std::uint64_t> args);

/// QF_BV term text. Comparisons become `(ite cond #b..1 #b..0)` at the
/// expression width so every term is bit-vector sorted.
std::string emitSmtTerm(const SemExpr& expr, std::span<const std::string> argNames);

/// SMT-LIB literal for a value, `#x..` when the width is a multiple of 4.
std::string smtLiteral(unsigned width, std::uint64_t value);

/// Parses `x<i>` references, `#x..`/`#b..`/`(_ bvN w)` literals and the
/// operator set of SemExpr. Operators may be spelled either in SMT-LIB form
/// (`bvadd`, `=`, `distinct`, ...) or by their short names (`add`, `eq`, ...).
SemExpr parseSemExpr(std::string_view text, unsigned width);

}  // namespace rulesynth
