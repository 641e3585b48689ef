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

#include "rulesynth/program.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <numeric>
#include <sstream>

namespace rulesynth {

ConcreteProgram::ConcreteProgram(unsigned numInputs, std::vector<Line> lines)
    : numInputs_(numInputs), lines_(std::move(lines)) {
  if (lines_.empty()) throw ProgramError("program has no lines");
  const unsigned w = lines_[0].component->width();
  for (std::size_t j = 0; j < lines_.size(); ++j) {
    const auto& l = lines_[j];
    if (!l.component) throw ProgramError("line without component");
    if (l.component->width() != w) throw ProgramError("mixed widths in program");
    if (l.args.size() != l.component->arity()) {
      throw ProgramError("line " + std::to_string(j) + ": " + l.component->name() + " expects " +
                         std::to_string(l.component->arity()) + " arguments");
    }
    for (const auto& a : l.args) {
      if (a.isInput() ? a.index >= numInputs_ : a.index >= j) {
        throw ProgramError("line " + std::to_string(j) + ": bad reference");
      }
    }
  }
}

unsigned ConcreteProgram::width() const { return lines_.empty() ? kDefaultWidth : lines_[0].component->width(); }

Multiset ConcreteProgram::components() const {
  Multiset m;
  for (const auto& l : lines_) m.push_back(l.component);
  return m;
}

std::optional<std::string> ConcreteProgram::validate() const {
  std::vector<bool> inUsed(numInputs_, false), lineUsed(lines_.size(), false);
  for (const auto& l : lines_) {
    for (const auto& a : l.args) (a.isInput() ? inUsed : lineUsed)[a.index] = true;
  }
  for (unsigned i = 0; i < numInputs_; ++i) {
    if (!inUsed[i]) return "input x" + std::to_string(i) + " unused";
  }
  for (std::size_t j = 0; j + 1 < lines_.size(); ++j) {
    if (!lineUsed[j]) return "line t" + std::to_string(j) + " is dead";
  }
  return std::nullopt;
}

std::string ConcreteProgram::toString() const {
  std::string out;
  for (std::size_t j = 0; j < lines_.size(); ++j) {
    if (j) out += '\n';
    out += 't' + std::to_string(j) + " = " + lines_[j].component->name() + '(';
    for (std::size_t k = 0; k < lines_[j].args.size(); ++k) {
      const auto& a = lines_[j].args[k];
      if (k) out += ", ";
      out += (a.isInput() ? 'x' : 't') + std::to_string(a.index);
    }
    out += ')';
  }
  return out;
}

std::uint64_t evalProgramRaw(const ConcreteProgram& p, std::span<const std::uint64_t> inputs) {
  std::uint64_t vals[16];
  std::vector<std::uint64_t> big;
  std::uint64_t* v = vals;
  if (p.size() > 16) {
    big.resize(p.size());
    v = big.data();
  }
  std::uint64_t args[8];
  std::vector<std::uint64_t> bigArgs;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto& l = p.lines()[j];
    std::uint64_t* a = args;
    if (l.args.size() > 8) {
      bigArgs.resize(l.args.size());
      a = bigArgs.data();
    }
    for (std::size_t k = 0; k < l.args.size(); ++k) {
      const auto& r = l.args[k];
      a[k] = r.isInput() ? inputs[r.index] : v[r.index];
    }
    v[j] = l.component->apply(std::span<const std::uint64_t>(a, l.args.size()));
  }
  return v[p.size() - 1];
}

BVValue evalProgram(const ConcreteProgram& p, std::span<const BVValue> inputs) {
  if (inputs.size() != p.numInputs()) throw ProgramError("wrong number of program inputs");
  const unsigned w = p.width();
  std::vector<std::uint64_t> raw;
  for (const auto& x : inputs) {
    if (x.width != w) throw SemanticsError("input width mismatch");
    raw.push_back(x.value);
  }
  return BVValue::make(w, evalProgramRaw(p, raw));
}

std::vector<std::uint32_t> truthTable(const ConcreteProgram& p) {
  const unsigned w = p.width(), n = p.numInputs();
  if (w * n > 24) throw ProgramError("truth table too large");
  const std::uint64_t rows = std::uint64_t{1} << (w * n);
  std::vector<std::uint32_t> out(rows);
  std::vector<std::uint64_t> in(n);
  for (std::uint64_t r = 0; r < rows; ++r) {
    for (unsigned i = 0; i < n; ++i) in[i] = (r >> (i * w)) & widthMask(w);
    out[r] = static_cast<std::uint32_t>(evalProgramRaw(p, in));
  }
  return out;
}

bool verifyRule(const RewriteRule& r) {
  if (r.ir.size() == 0 || r.isa.size() == 0) return false;
  if (r.ir.numInputs() != r.isa.numInputs() || r.ir.width() != r.isa.width()) return false;
  if (!r.ir.valid() || !r.isa.valid()) return false;
  return truthTable(r.ir) == truthTable(r.isa);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

unsigned parseIndex(std::string_view s, std::string_view whole) {
  unsigned v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ProgramError("bad reference in '" + std::string(whole) + "'");
  }
  return v;
}

struct ParsedLine {
  std::string name;
  std::vector<ValueRef> args;
};

std::vector<ParsedLine> parseLines(std::string_view text) {
  std::vector<ParsedLine> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of("\n;", start);
    if (end == std::string_view::npos) end = text.size();
    auto raw = trim(text.substr(start, end - start));
    start = end + 1;
    if (raw.empty()) continue;
    auto eq = raw.find('=');
    auto open = raw.find('(');
    auto close = raw.rfind(')');
    if (eq == std::string_view::npos || open == std::string_view::npos || close == std::string_view::npos ||
        open < eq || close < open || !trim(raw.substr(close + 1)).empty()) {
      throw ProgramError("malformed program line '" + std::string(raw) + "'");
    }
    auto lhs = trim(raw.substr(0, eq));
    if (lhs.size() < 2 || lhs[0] != 't' || parseIndex(lhs.substr(1), raw) != out.size()) {
      throw ProgramError("expected t" + std::to_string(out.size()) + " in '" + std::string(raw) + "'");
    }
    ParsedLine pl;
    pl.name = std::string(trim(raw.substr(eq + 1, open - eq - 1)));
    auto argText = trim(raw.substr(open + 1, close - open - 1));
    while (!argText.empty()) {
      auto comma = argText.find(',');
      auto a = trim(argText.substr(0, comma));
      if (a.size() < 2 || (a[0] != 'x' && a[0] != 't')) {
        throw ProgramError("bad argument in '" + std::string(raw) + "'");
      }
      const unsigned idx = parseIndex(a.substr(1), raw);
      pl.args.push_back(a[0] == 'x' ? ValueRef::input(idx) : ValueRef::line(idx));
      if (comma == std::string_view::npos) break;
      argText = trim(argText.substr(comma + 1));
      if (argText.empty()) throw ProgramError("trailing comma in '" + std::string(raw) + "'");
    }
    out.push_back(std::move(pl));
  }
  return out;
}

ConcreteProgram buildParsed(std::vector<ParsedLine> parsed, const ComponentLibrary& lib, unsigned n) {
  std::vector<Line> lines;
  for (auto& pl : parsed) {
    auto c = lib.find(pl.name);
    if (!c) throw ProgramError("unknown component '" + pl.name + "'");
    lines.push_back({std::move(c), std::move(pl.args)});
  }
  return ConcreteProgram(n, std::move(lines));
}

}  // namespace

ConcreteProgram parseProgram(std::string_view text, const ComponentLibrary& lib, unsigned numInputs) {
  return buildParsed(parseLines(text), lib, numInputs);
}

ConcreteProgram parseProgram(std::string_view text, const ComponentLibrary& lib) {
  auto parsed = parseLines(text);
  unsigned n = 0;
  for (const auto& pl : parsed) {
    for (const auto& a : pl.args) {
      if (a.isInput()) n = std::max(n, a.index + 1);
    }
  }
  return buildParsed(std::move(parsed), lib, n);
}

namespace {

constexpr std::int32_t kLineBase = 1 << 16;

// Shared machinery for canonical forms and variant enumeration.
struct ProgramShape {
  const ConcreteProgram& p;
  std::vector<std::string> kinds;
  std::vector<std::int32_t> kindOf;
  std::vector<std::vector<unsigned>> preds;

  explicit ProgramShape(const ConcreteProgram& prog) : p(prog) {
    for (const auto& l : p.lines()) kinds.push_back(l.component->name());
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());
    for (const auto& l : p.lines()) {
      kindOf.push_back(static_cast<std::int32_t>(
          std::lower_bound(kinds.begin(), kinds.end(), l.component->name()) - kinds.begin()));
      std::vector<unsigned> pr;
      for (const auto& a : l.args) {
        if (!a.isInput()) pr.push_back(a.index);
      }
      preds.push_back(std::move(pr));
    }
  }

  bool ready(unsigned j, const std::vector<int>& pos, std::size_t placed) const {
    if (pos[j] >= 0) return false;
    if (j + 1 == p.size() && placed + 1 != p.size()) return false;
    for (unsigned q : preds[j]) {
      if (pos[q] < 0) return false;
    }
    return true;
  }

  // Argument codes for line j under the current placement, with symmetric
  // groups sorted.
  void argCodes(unsigned j, const std::vector<int>& pos, std::span<const unsigned> perm,
                std::vector<std::int32_t>& out) const {
    const auto& l = p.lines()[j];
    const std::size_t base = out.size();
    for (const auto& a : l.args) {
      out.push_back(a.isInput() ? static_cast<std::int32_t>(perm[a.index]) : kLineBase + pos[a.index]);
    }
    for (const auto& g : l.component->symmetricGroups()) {
      std::vector<std::int32_t> vals;
      for (unsigned k : g) vals.push_back(out[base + k]);
      std::sort(vals.begin(), vals.end());
      for (std::size_t k = 0; k < g.size(); ++k) out[base + g[k]] = vals[k];
    }
  }

  void minCode(std::vector<int>& pos, std::size_t placed, std::span<const unsigned> perm,
               std::vector<std::int32_t>& prefix, std::vector<std::int32_t>& best, bool& have) const {
    if (placed == p.size()) {
      if (!have || prefix < best) {
        best = prefix;
        have = true;
      }
      return;
    }
    std::vector<std::pair<std::vector<std::int32_t>, unsigned>> cands;
    for (unsigned j = 0; j < p.size(); ++j) {
      if (!ready(j, pos, placed)) continue;
      std::vector<std::int32_t> c{kindOf[j]};
      argCodes(j, pos, perm, c);
      cands.emplace_back(std::move(c), j);
    }
    std::sort(cands.begin(), cands.end());
    for (const auto& [c, j] : cands) {
      if (c != cands.front().first) break;
      const std::size_t mark = prefix.size();
      prefix.insert(prefix.end(), c.begin(), c.end());
      pos[j] = static_cast<int>(placed);
      minCode(pos, placed + 1, perm, prefix, best, have);
      pos[j] = -1;
      prefix.resize(mark);
    }
  }
};

std::vector<unsigned> identityPerm(unsigned n) {
  std::vector<unsigned> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

// All distinct argument vectors reachable by permuting within symmetric groups.
std::vector<std::vector<ValueRef>> argPermutations(const Line& l) {
  std::vector<std::vector<ValueRef>> out{l.args};
  for (const auto& g : l.component->symmetricGroups()) {
    std::vector<std::vector<ValueRef>> next;
    for (const auto& base : out) {
      std::vector<ValueRef> vals;
      for (unsigned k : g) vals.push_back(base[k]);
      std::sort(vals.begin(), vals.end());
      do {
        auto v = base;
        for (std::size_t k = 0; k < g.size(); ++k) v[g[k]] = vals[k];
        next.push_back(std::move(v));
      } while (std::next_permutation(vals.begin(), vals.end()));
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

DepDag canonicalize(const ConcreteProgram& p, std::span<const unsigned> perm) {
  ProgramShape shape(p);
  std::vector<int> pos(p.size(), -1);
  std::vector<std::int32_t> prefix, best;
  bool have = false;
  shape.minCode(pos, 0, perm, prefix, best, have);
  return DepDag{shape.kinds, std::move(best)};
}

DepDag canonicalize(const ConcreteProgram& p) {
  const auto id = identityPerm(p.numInputs());
  return canonicalize(p, id);
}

std::vector<std::vector<unsigned>> allPermutations(unsigned n) {
  std::vector<std::vector<unsigned>> out;
  auto v = identityPerm(n);
  do out.push_back(v);
  while (std::next_permutation(v.begin(), v.end()));
  return out;
}

RuleKey canonicalRule(const RewriteRule& r) {
  std::optional<RuleKey> best;
  for (const auto& perm : allPermutations(r.numInputs())) {
    RuleKey k{canonicalize(r.ir, perm), canonicalize(r.isa, perm)};
    if (!best || k < *best) best = std::move(k);
  }
  return *best;
}

DepDag canonicalIrLc(const ConcreteProgram& p) {
  std::optional<DepDag> best;
  for (const auto& perm : allPermutations(p.numInputs())) {
    auto k = canonicalize(p, perm);
    if (!best || k < *best) best = std::move(k);
  }
  return *best;
}

ConcreteProgram renameInputs(const ConcreteProgram& p, std::span<const unsigned> perm) {
  std::vector<Line> lines = p.lines();
  for (auto& l : lines) {
    for (auto& a : l.args) {
      if (a.isInput()) a.index = perm[a.index];
    }
  }
  return ConcreteProgram(p.numInputs(), std::move(lines));
}

namespace {

using ProgramCode = std::vector<std::int32_t>;

// Exact encoding; only comparable between programs over the same multiset.
ProgramCode exactCode(const ConcreteProgram& p) {
  std::vector<std::string_view> names;
  for (const auto& l : p.lines()) names.push_back(l.component->name());
  std::sort(names.begin(), names.end());
  ProgramCode c;
  for (const auto& l : p.lines()) {
    c.push_back(static_cast<std::int32_t>(std::lower_bound(names.begin(), names.end(), l.component->name()) -
                                          names.begin()));
    for (const auto& a : l.args) c.push_back(a.isInput() ? static_cast<std::int32_t>(a.index) : kLineBase + a.index);
  }
  return c;
}

}  // namespace

std::vector<ConcreteProgram> programVariants(const ConcreteProgram& p, std::size_t cap) {
  ProgramShape shape(p);
  const std::size_t n = p.size();
  std::vector<std::vector<std::vector<ValueRef>>> argChoices;
  for (const auto& l : p.lines()) argChoices.push_back(argPermutations(l));

  std::vector<ConcreteProgram> out;
  std::set<ProgramCode> seen;
  std::vector<int> pos(n, -1);
  std::vector<unsigned> order;

  // For each topological order, every combination of argument orders.
  std::function<void(std::size_t)> place = [&](std::size_t placed) {
    if (placed == n) {
      std::vector<std::size_t> choice(n, 0);
      while (true) {
        std::vector<Line> lines;
        for (unsigned j : order) {
          auto args = argChoices[j][choice[j]];
          for (auto& a : args) {
            if (!a.isInput()) a.index = static_cast<unsigned>(pos[a.index]);
          }
          lines.push_back({p.lines()[j].component, std::move(args)});
        }
        ConcreteProgram v(p.numInputs(), std::move(lines));
        if (seen.insert(exactCode(v)).second) {
          if (out.size() >= cap) throw ClassOverflowError("program class exceeds cap");
          out.push_back(std::move(v));
        }
        std::size_t k = 0;
        while (k < n && ++choice[k] == argChoices[k].size()) choice[k++] = 0;
        if (k == n) break;
      }
      return;
    }
    for (unsigned j = 0; j < n; ++j) {
      if (!shape.ready(j, pos, placed)) continue;
      pos[j] = static_cast<int>(placed);
      order.push_back(j);
      place(placed + 1);
      order.pop_back();
      pos[j] = -1;
    }
  };
  place(0);
  return out;
}

std::vector<ConcreteProgram> enumerateIrClass(const ConcreteProgram& p, std::size_t cap) {
  const auto variants = programVariants(p, cap);
  std::vector<ConcreteProgram> out;
  std::set<ProgramCode> seen;
  for (const auto& perm : allPermutations(p.numInputs())) {
    for (const auto& v : variants) {
      auto r = renameInputs(v, perm);
      if (seen.insert(exactCode(r)).second) {
        if (out.size() >= cap) throw ClassOverflowError("IR class exceeds cap");
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

std::vector<RewriteRule> enumerateRuleClass(const RewriteRule& r, std::size_t cap) {
  if (r.ir.numInputs() != r.isa.numInputs()) throw ProgramError("rule sides disagree on input count");
  const auto irV = programVariants(r.ir, cap);
  const auto isaV = programVariants(r.isa, cap);
  if (irV.size() * isaV.size() > cap) throw ClassOverflowError("rule class exceeds cap");
  std::vector<RewriteRule> out;
  std::set<std::pair<ProgramCode, ProgramCode>> seen;
  for (const auto& perm : allPermutations(r.numInputs())) {
    for (const auto& a : irV) {
      auto ra = renameInputs(a, perm);
      auto ca = exactCode(ra);
      for (const auto& b : isaV) {
        auto rb = renameInputs(b, perm);
        if (seen.emplace(ca, exactCode(rb)).second) {
          if (out.size() >= cap) throw ClassOverflowError("rule class exceeds cap");
          out.push_back({ra, std::move(rb)});
        }
      }
    }
  }
  return out;
}

namespace {

bool subMultiset(const std::vector<std::string>& small, const std::vector<std::string>& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

std::vector<std::string> mergeKeys(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// One tile of a macro program: rule index and argument wiring. Arguments
// refer to macro inputs or to earlier tiles' outputs.
struct Tile {
  std::size_t rule;
  std::vector<ValueRef> args;
};

ConcreteProgram expandSide(std::span<const FoundRule> rules, const std::vector<Tile>& tiles, unsigned n, bool ir) {
  std::vector<Line> lines;
  std::vector<unsigned> outLine;
  for (const auto& t : tiles) {
    const auto& prog = ir ? rules[t.rule].rule.ir : rules[t.rule].rule.isa;
    const unsigned base = static_cast<unsigned>(lines.size());
    for (const auto& l : prog.lines()) {
      Line nl{l.component, {}};
      for (const auto& a : l.args) {
        if (a.isInput()) {
          const auto& m = t.args[a.index];
          nl.args.push_back(m.isInput() ? m : ValueRef::line(outLine[m.index]));
        } else {
          nl.args.push_back(ValueRef::line(base + a.index));
        }
      }
      lines.push_back(std::move(nl));
    }
    outLine.push_back(static_cast<unsigned>(lines.size() - 1));
  }
  return ConcreteProgram(n, std::move(lines));
}

template <typename Emit>
void enumerateComposites(std::span<const FoundRule> rules, const CompositeQuery& q, Emit&& emit) {
  const auto irKey = multisetKey(q.ir);
  const unsigned n = q.numInputs;
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (!subMultiset(rules[i].irKey, irKey)) continue;
    if (q.isaKey && !subMultiset(rules[i].isaKey, *q.isaKey)) continue;
    cand.push_back(i);
  }

  auto wire = [&](const std::vector<std::size_t>& chosen) {
    std::vector<std::size_t> perm = chosen;
    std::sort(perm.begin(), perm.end());
    do {
      std::vector<Tile> tiles(perm.size());
      std::function<void(std::size_t)> rec = [&](std::size_t j) {
        if (j == perm.size()) {
          std::vector<bool> inUsed(n, false), tileUsed(perm.size(), false);
          for (const auto& t : tiles) {
            for (const auto& a : t.args) (a.isInput() ? inUsed : tileUsed)[a.index] = true;
          }
          for (unsigned i = 0; i < n; ++i) {
            if (!inUsed[i]) return;
          }
          for (std::size_t k = 0; k + 1 < perm.size(); ++k) {
            if (!tileUsed[k]) return;
          }
          emit(RewriteRule{expandSide(rules, tiles, n, true), expandSide(rules, tiles, n, false)});
          return;
        }
        const unsigned k = rules[perm[j]].rule.numInputs();
        const unsigned refs = n + static_cast<unsigned>(j);
        tiles[j].rule = perm[j];
        tiles[j].args.assign(k, ValueRef::input(0));
        std::vector<unsigned> idx(k, 0);
        while (true) {
          for (unsigned a = 0; a < k; ++a) {
            tiles[j].args[a] = idx[a] < n ? ValueRef::input(idx[a]) : ValueRef::line(idx[a] - n);
          }
          rec(j + 1);
          unsigned a = 0;
          while (a < k && ++idx[a] == refs) idx[a++] = 0;
          if (a == k) break;
        }
      };
      rec(0);
    } while (std::next_permutation(perm.begin(), perm.end()));
  };

  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, const std::vector<std::string>&)> pick =
      [&](std::size_t start, const std::vector<std::string>& acc) {
        if (acc == irKey) {
          if (q.isaKey) {
            std::vector<std::string> isa;
            for (auto i : chosen) isa = mergeKeys(isa, rules[i].isaKey);
            if (isa != *q.isaKey) return;
          }
          if (q.maxCost) {
            Millicost c = 0;
            for (auto i : chosen) c += rules[i].cost;
            if (c > *q.maxCost) return;
          }
          if (q.policy == SpecializationPolicy::SingleInstruction && chosen.size() == 1 &&
              rules[chosen[0]].irKey.size() > 1 && rules[chosen[0]].rule.numInputs() != n) {
            return;
          }
          wire(chosen);
          return;
        }
        for (std::size_t ii = start; ii < cand.size(); ++ii) {
          auto next = mergeKeys(acc, rules[cand[ii]].irKey);
          if (!subMultiset(next, irKey)) continue;
          chosen.push_back(cand[ii]);
          pick(ii, next);
          chosen.pop_back();
        }
      };
  pick(0, {});
}

}  // namespace

std::map<RuleKey, RewriteRule> composites(std::span<const FoundRule> rules, const CompositeQuery& q) {
  std::map<RuleKey, RewriteRule> out;
  if (q.ir.empty() || q.numInputs == 0) return out;
  enumerateComposites(rules, q, [&](RewriteRule r) {
    auto key = canonicalRule(r);
    out.try_emplace(std::move(key), std::move(r));
  });
  return out;
}

std::map<DepDag, RewriteRule> compositesLc(std::span<const FoundRule> rules, const CompositeQuery& q) {
  std::map<DepDag, RewriteRule> out;
  if (q.ir.empty() || q.numInputs == 0) return out;
  enumerateComposites(rules, q, [&](RewriteRule r) {
    auto key = canonicalIrLc(r.ir);
    out.try_emplace(std::move(key), std::move(r));
  });
  return out;
}

}  // namespace rulesynth
