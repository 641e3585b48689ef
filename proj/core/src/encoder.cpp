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

#include "rulesynth/encoder.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace rulesynth {

namespace {

char prefix(Side s) { return s == Side::IR ? 'a' : 'b'; }

unsigned bitsFor(unsigned count) {
  unsigned b = 1;
  while ((1u << b) < count) ++b;
  return b;
}

std::string bvSort(unsigned w) { return "(_ BitVec " + std::to_string(w) + ")"; }

std::string valueName(Side s, std::size_t k, std::string_view tag) {
  return std::string(1, prefix(s)) + "_v" + std::to_string(k) + "_" + std::string(tag);
}

std::string slotName(Side s, std::size_t k, std::size_t j, std::string_view tag) {
  return std::string(1, prefix(s)) + "_in" + std::to_string(k) + "_" + std::to_string(j) + "_" + std::string(tag);
}

std::string conj(const std::vector<std::string>& parts) {
  if (parts.empty()) return "true";
  if (parts.size() == 1) return parts[0];
  std::string out = "(and";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

std::string disj(const std::vector<std::string>& parts) {
  if (parts.empty()) return "false";
  if (parts.size() == 1) return parts[0];
  std::string out = "(or";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

SideLayout makeSide(const Multiset& m, unsigned n) {
  return SideLayout{m, bitsFor(n + static_cast<unsigned>(m.size()))};
}

std::vector<std::string> wellFormed(const LocationLayout& l, Side s) {
  const auto& side = l.side(s);
  const unsigned w = side.locWidth;
  const unsigned n = l.numInputs;
  const unsigned total = n + static_cast<unsigned>(side.size());
  std::vector<std::string> out;
  std::vector<std::string> outs;
  for (std::size_t k = 0; k < side.size(); ++k) {
    const auto o = outLocName(s, k);
    outs.push_back(o);
    out.push_back("(assert (and (bvule " + smtLiteral(w, n) + " " + o + ") (bvule " + o + " " +
                  smtLiteral(w, total - 1) + ")))");
    for (std::size_t j = 0; j < side.components[k]->arity(); ++j) {
      out.push_back("(assert (bvult " + inLocName(s, k, j) + " " + o + "))");
    }
  }
  if (outs.size() > 1) {
    std::string d = "(assert (distinct";
    for (const auto& o : outs) d += " " + o;
    out.push_back(d + "))");
  }
  // Every input and every non-output line feeds some argument slot.
  for (unsigned v = 0; v + 1 < total; ++v) {
    std::vector<std::string> uses;
    for (std::size_t k = 0; k < side.size(); ++k) {
      for (std::size_t j = 0; j < side.components[k]->arity(); ++j) {
        uses.push_back("(= " + inLocName(s, k, j) + " " + smtLiteral(w, v) + ")");
      }
    }
    out.push_back("(assert " + disj(uses) + ")");
  }
  return out;
}

}  // namespace

unsigned LocationLayout::outputLocation(Side s) const {
  return numInputs + static_cast<unsigned>(side(s).size()) - 1;
}

unsigned inputBound(std::span<const ComponentRef> m) {
  long total = 0;
  for (const auto& c : m) total += c->arity();
  total -= static_cast<long>(m.size()) - 1;
  return total > 0 ? static_cast<unsigned>(total) : 0;
}

std::string outLocName(Side s, std::size_t k) { return std::string(1, prefix(s)) + "_o" + std::to_string(k); }

std::string inLocName(Side s, std::size_t k, std::size_t j) {
  return std::string(1, prefix(s)) + "_i" + std::to_string(k) + "_" + std::to_string(j);
}

std::vector<LocationVar> locationVariables(const LocationLayout& layout) {
  std::vector<LocationVar> out;
  for (Side s : {Side::IR, Side::ISA}) {
    const auto& side = layout.side(s);
    for (std::size_t k = 0; k < side.size(); ++k) {
      out.push_back({outLocName(s, k), side.locWidth});
      for (std::size_t j = 0; j < side.components[k]->arity(); ++j) {
        out.push_back({inLocName(s, k, j), side.locWidth});
      }
    }
  }
  return out;
}

Assignment assignmentFromValues(const LocationLayout& layout, const std::map<std::string, std::uint64_t>& values) {
  auto get = [&](const std::string& name) -> unsigned {
    auto it = values.find(name);
    if (it == values.end()) throw EncodeError("model lacks value for " + name);
    return static_cast<unsigned>(it->second);
  };
  Assignment a;
  for (Side s : {Side::IR, Side::ISA}) {
    auto& sa = s == Side::IR ? a.ir : a.isa;
    const auto& side = layout.side(s);
    for (std::size_t k = 0; k < side.size(); ++k) {
      sa.out.push_back(get(outLocName(s, k)));
      std::vector<unsigned> in;
      for (std::size_t j = 0; j < side.components[k]->arity(); ++j) in.push_back(get(inLocName(s, k, j)));
      sa.in.push_back(std::move(in));
    }
  }
  return a;
}

SynthesisQuery buildQuery(const Multiset& ir, const Multiset& isa, unsigned numInputs) {
  if (ir.empty() || isa.empty()) throw EncodeError("empty component multiset");
  if (numInputs == 0) throw EncodeError("at least one input required");
  const unsigned bound = std::min(inputBound(ir), inputBound(isa));
  if (numInputs > bound) {
    throw EncodeError("input count " + std::to_string(numInputs) + " infeasible (bound " + std::to_string(bound) +
                      ")");
  }
  const unsigned w = ir[0]->width();
  for (const auto& c : ir) {
    if (c->width() != w) throw EncodeError("mixed widths");
  }
  for (const auto& c : isa) {
    if (c->width() != w) throw EncodeError("mixed widths");
  }
  SynthesisQuery q;
  q.layout = LocationLayout{numInputs, w, makeSide(ir, numInputs), makeSide(isa, numInputs)};
  for (const auto& v : locationVariables(q.layout)) {
    q.base.push_back("(declare-fun " + v.name + " () " + bvSort(v.width) + ")");
  }
  for (Side s : {Side::IR, Side::ISA}) {
    auto wf = wellFormed(q.layout, s);
    q.base.insert(q.base.end(), wf.begin(), wf.end());
  }
  return q;
}

std::vector<std::string> unrollDeclarations(const LocationLayout& layout, Side s, std::string_view tag) {
  const auto& side = layout.side(s);
  const auto sort = bvSort(layout.width);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < side.size(); ++k) {
    out.push_back("(declare-fun " + valueName(s, k, tag) + " () " + sort + ")");
    for (std::size_t j = 0; j < side.components[k]->arity(); ++j) {
      out.push_back("(declare-fun " + slotName(s, k, j, tag) + " () " + sort + ")");
    }
  }
  out.push_back("(declare-fun " + resultName(s, tag) + " () " + sort + ")");
  return out;
}

std::string componentSemantics(const LocationLayout& layout, Side s, std::string_view tag) {
  const auto& side = layout.side(s);
  std::vector<std::string> parts;
  for (std::size_t k = 0; k < side.size(); ++k) {
    std::vector<std::string> args;
    for (std::size_t j = 0; j < side.components[k]->arity(); ++j) args.push_back(slotName(s, k, j, tag));
    parts.push_back("(= " + valueName(s, k, tag) + " " + emitSmtTerm(side.components[k]->semantics(), args) + ")");
  }
  return conj(parts);
}

std::string connectionConstraint(const LocationLayout& layout, Side s, std::string_view tag,
                                 std::span<const std::string> inputs) {
  if (inputs.size() != layout.numInputs) throw EncodeError("wrong number of input terms");
  const auto& side = layout.side(s);
  const unsigned w = side.locWidth;
  std::vector<std::string> parts;
  for (std::size_t k = 0; k < side.size(); ++k) {
    for (std::size_t j = 0; j < side.components[k]->arity(); ++j) {
      const auto loc = inLocName(s, k, j);
      const auto val = slotName(s, k, j, tag);
      for (unsigned i = 0; i < layout.numInputs; ++i) {
        parts.push_back("(=> (= " + loc + " " + smtLiteral(w, i) + ") (= " + val + " " + inputs[i] + "))");
      }
      for (std::size_t p = 0; p < side.size(); ++p) {
        if (p == k) continue;
        parts.push_back("(=> (= " + loc + " " + outLocName(s, p) + ") (= " + val + " " + valueName(s, p, tag) + "))");
      }
    }
  }
  return conj(parts);
}

std::string resultName(Side s, std::string_view tag) {
  return std::string(1, prefix(s)) + "_r_" + std::string(tag);
}

std::string resultConstraint(const LocationLayout& layout, Side s, std::string_view tag) {
  const auto& side = layout.side(s);
  const auto last = smtLiteral(side.locWidth, layout.outputLocation(s));
  std::vector<std::string> parts;
  for (std::size_t k = 0; k < side.size(); ++k) {
    parts.push_back("(=> (= " + outLocName(s, k) + " " + last + ") (= " + resultName(s, tag) + " " +
                    valueName(s, k, tag) + "))");
  }
  return conj(parts);
}

std::vector<std::string> exampleConstraint(const LocationLayout& layout, std::string_view tag,
                                           std::span<const std::uint64_t> inputs) {
  std::vector<std::string> terms;
  for (auto x : inputs) terms.push_back(smtLiteral(layout.width, x & widthMask(layout.width)));
  std::vector<std::string> out;
  for (Side s : {Side::IR, Side::ISA}) {
    auto d = unrollDeclarations(layout, s, tag);
    out.insert(out.end(), d.begin(), d.end());
  }
  for (Side s : {Side::IR, Side::ISA}) {
    out.push_back("(assert " + componentSemantics(layout, s, tag) + ")");
    out.push_back("(assert " + connectionConstraint(layout, s, tag, terms) + ")");
    out.push_back("(assert " + resultConstraint(layout, s, tag) + ")");
  }
  out.push_back("(assert (= " + resultName(Side::IR, tag) + " " + resultName(Side::ISA, tag) + "))");
  return out;
}

std::string programTerm(const ConcreteProgram& p, std::span<const std::string> inputs) {
  if (inputs.size() != p.numInputs()) throw EncodeError("wrong number of input terms");
  std::string out;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto& l = p.lines()[j];
    std::vector<std::string> args;
    for (const auto& a : l.args) args.push_back(a.isInput() ? inputs[a.index] : "t" + std::to_string(a.index));
    out += "(let ((t" + std::to_string(j) + " " + emitSmtTerm(l.component->semantics(), args) + ")) ";
  }
  out += "t" + std::to_string(p.size() - 1);
  out.append(p.size(), ')');
  return out;
}

ConcreteProgram decodeSide(const LocationLayout& layout, Side s, const SideAssignment& a) {
  const auto& side = layout.side(s);
  const unsigned n = layout.numInputs;
  const std::size_t N = side.size();
  if (a.out.size() != N || a.in.size() != N) throw EncodeError("assignment shape mismatch");
  std::vector<int> lineOf(N, -1);
  for (std::size_t k = 0; k < N; ++k) {
    if (a.out[k] < n || a.out[k] >= n + N) throw EncodeError("output location out of range");
    const auto line = a.out[k] - n;
    if (lineOf[line] >= 0) throw EncodeError("two components share an output location");
    lineOf[line] = static_cast<int>(k);
  }
  std::vector<Line> lines;
  for (std::size_t line = 0; line < N; ++line) {
    const auto k = static_cast<std::size_t>(lineOf[line]);
    const auto& c = side.components[k];
    if (a.in[k].size() != c->arity()) throw EncodeError("assignment arity mismatch");
    Line l{c, {}};
    for (unsigned loc : a.in[k]) {
      if (loc >= a.out[k]) throw EncodeError("input location not before output location");
      l.args.push_back(loc < n ? ValueRef::input(loc) : ValueRef::line(loc - n));
    }
    lines.push_back(std::move(l));
  }
  ConcreteProgram p(n, std::move(lines));
  if (auto why = p.validate()) throw EncodeError("decoded program invalid: " + *why);
  return p;
}

std::pair<ConcreteProgram, ConcreteProgram> decodeModel(const LocationLayout& layout, const Assignment& a) {
  return {decodeSide(layout, Side::IR, a.ir), decodeSide(layout, Side::ISA, a.isa)};
}

std::vector<SideAssignment> encodeProgram(const LocationLayout& layout, Side s, const ConcreteProgram& p) {
  const auto& side = layout.side(s);
  const std::size_t N = side.size();
  const unsigned n = layout.numInputs;
  if (p.size() != N || p.numInputs() != n) throw EncodeError("program does not fit layout");
  if (multisetKey(p.components()) != multisetKey(side.components)) {
    throw EncodeError("program components differ from layout");
  }
  std::vector<SideAssignment> out;
  std::vector<int> instanceOf(N, -1);
  std::vector<bool> taken(N, false);
  std::function<void(std::size_t)> rec = [&](std::size_t line) {
    if (line == N) {
      SideAssignment a;
      a.out.assign(N, 0);
      a.in.assign(N, {});
      for (std::size_t j = 0; j < N; ++j) {
        const auto k = static_cast<std::size_t>(instanceOf[j]);
        a.out[k] = n + static_cast<unsigned>(j);
        for (const auto& r : p.lines()[j].args) a.in[k].push_back(r.isInput() ? r.index : n + r.index);
      }
      out.push_back(std::move(a));
      return;
    }
    for (std::size_t k = 0; k < N; ++k) {
      if (taken[k] || side.components[k]->name() != p.lines()[line].component->name()) continue;
      taken[k] = true;
      instanceOf[line] = static_cast<int>(k);
      rec(line + 1);
      taken[k] = false;
    }
  };
  rec(0);
  return out;
}

std::string sideEquals(const LocationLayout& layout, Side s, const SideAssignment& a) {
  const unsigned w = layout.side(s).locWidth;
  std::vector<std::string> parts;
  for (std::size_t k = 0; k < a.out.size(); ++k) {
    parts.push_back("(= " + outLocName(s, k) + " " + smtLiteral(w, a.out[k]) + ")");
    for (std::size_t j = 0; j < a.in[k].size(); ++j) {
      parts.push_back("(= " + inLocName(s, k, j) + " " + smtLiteral(w, a.in[k][j]) + ")");
    }
  }
  return conj(parts);
}

namespace {

std::string memberOf(const LocationLayout& layout, Side s, const std::set<SideAssignment>& set) {
  std::vector<std::string> parts;
  for (const auto& a : set) parts.push_back(sideEquals(layout, s, a));
  return disj(parts);
}

std::size_t instanceFactor(const Multiset& m) {
  std::map<std::string, std::size_t> counts;
  for (const auto& c : m) ++counts[c->name()];
  std::size_t f = 1;
  for (const auto& [_, r] : counts) {
    for (std::size_t i = 2; i <= r; ++i) f *= i;
  }
  return f;
}

void addUnique(SynthesisQuery& q, std::string clause) {
  if (std::find(q.blocking.begin(), q.blocking.end(), clause) == q.blocking.end()) {
    q.blocking.push_back(std::move(clause));
  }
}

// Locations of every renamed variant; each renaming gets its own set.
std::vector<std::set<SideAssignment>> renamedSets(const LocationLayout& layout, Side s,
                                                  const std::vector<ConcreteProgram>& variants) {
  std::vector<std::set<SideAssignment>> out;
  for (const auto& perm : allPermutations(layout.numInputs)) {
    std::set<SideAssignment> set;
    for (const auto& v : variants) {
      for (auto& a : encodeProgram(layout, s, renameInputs(v, perm))) set.insert(std::move(a));
    }
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace

void blockRule(SynthesisQuery& q, const RewriteRule& r, std::size_t cap) {
  const auto& L = q.layout;
  const auto irV = programVariants(r.ir, cap);
  const auto isaV = programVariants(r.isa, cap);
  if (irV.size() * instanceFactor(L.ir.components) > cap || isaV.size() * instanceFactor(L.isa.components) > cap) {
    throw ClassOverflowError("rule class exceeds cap");
  }
  const auto A = renamedSets(L, Side::IR, irV);
  const auto B = renamedSets(L, Side::ISA, isaV);
  // The class is the union over renamings of (IR variants x ISA variants),
  // so one clause per renaming suffices.
  for (std::size_t i = 0; i < A.size(); ++i) {
    addUnique(q, "(assert (not (and " + memberOf(L, Side::IR, A[i]) + " " + memberOf(L, Side::ISA, B[i]) + ")))");
  }
}

void blockIrProgram(SynthesisQuery& q, const ConcreteProgram& p, std::size_t cap) {
  const auto& L = q.layout;
  const auto variants = programVariants(p, cap);
  if (variants.size() * instanceFactor(L.ir.components) > cap) throw ClassOverflowError("IR class exceeds cap");
  for (const auto& set : renamedSets(L, Side::IR, variants)) {
    addUnique(q, "(assert (not " + memberOf(L, Side::IR, set) + "))");
  }
}

void blockRuleOrbit(SynthesisQuery& q, const RewriteRule& r) {
  const auto& L = q.layout;
  const auto A = renamedSets(L, Side::IR, {r.ir});
  const auto B = renamedSets(L, Side::ISA, {r.isa});
  for (std::size_t i = 0; i < A.size(); ++i) {
    addUnique(q, "(assert (not (and " + memberOf(L, Side::IR, A[i]) + " " + memberOf(L, Side::ISA, B[i]) + ")))");
  }
}

void blockIrOrbit(SynthesisQuery& q, const ConcreteProgram& p) {
  for (const auto& set : renamedSets(q.layout, Side::IR, {p})) {
    addUnique(q, "(assert (not " + memberOf(q.layout, Side::IR, set) + "))");
  }
}

void blockAssignment(SynthesisQuery& q, const Assignment& a) {
  q.blocking.push_back("(assert (not (and " + sideEquals(q.layout, Side::IR, a.ir) + " " +
                       sideEquals(q.layout, Side::ISA, a.isa) + ")))");
}

}  // namespace rulesynth
