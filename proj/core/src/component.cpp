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

#include "rulesynth/component.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rulesynth {

namespace {

constexpr unsigned kTableBits = 12;
constexpr std::size_t kSymmetrySamples = 1u << 14;

std::uint64_t packArgs(std::span<const std::uint64_t> args, unsigned width) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < args.size(); ++i) key |= args[i] << (i * width);
  return key;
}

// Calls fn on every argument tuple (or a fixed pseudo-random sample when the
// space is too large) until it returns false.
template <typename Fn>
bool forAllTuples(unsigned arity, unsigned width, Fn&& fn) {
  std::vector<std::uint64_t> args(arity, 0);
  const unsigned bits = arity * width;
  if (bits <= 16) {
    const std::uint64_t rows = std::uint64_t{1} << bits;
    for (std::uint64_t r = 0; r < rows; ++r) {
      for (unsigned i = 0; i < arity; ++i) args[i] = (r >> (i * width)) & widthMask(width);
      if (!fn(std::span<const std::uint64_t>(args))) return false;
    }
    return true;
  }
  std::mt19937_64 rng(0x5eed);
  for (std::size_t s = 0; s < kSymmetrySamples; ++s) {
    for (auto& a : args) a = rng() & widthMask(width);
    if (!fn(std::span<const std::uint64_t>(args))) return false;
  }
  return true;
}

bool invariantUnderSwap(const SemExpr& e, unsigned arity, unsigned i, unsigned j) {
  std::vector<std::uint64_t> swapped(arity);
  return forAllTuples(arity, e.width(), [&](std::span<const std::uint64_t> args) {
    std::copy(args.begin(), args.end(), swapped.begin());
    std::swap(swapped[i], swapped[j]);
    return evalRaw(e, args) == evalRaw(e, swapped);
  });
}

}  // namespace

std::shared_ptr<const Component> Component::make(std::string name, unsigned arity, SemExpr semantics,
                                                 std::vector<std::vector<unsigned>> symmetricGroups,
                                                 std::map<std::string, Millicost> costs) {
  if (name.empty()) throw LibraryError("component with empty name");
  if (semantics.width() > kMaxWidth) throw LibraryError(name + ": width too large");
  const auto used = semantics.inputsUsed();
  if (semantics.arity() != arity || used.size() != arity) {
    throw LibraryError(name + ": semantics must use exactly x0..x" + std::to_string(arity) +
                       "-1 (declared arity " + std::to_string(arity) + ")");
  }
  std::vector<bool> seen(arity, false);
  for (auto& g : symmetricGroups) {
    std::sort(g.begin(), g.end());
    if (g.size() < 2) throw LibraryError(name + ": symmetric group needs two or more arguments");
    for (unsigned a : g) {
      if (a >= arity || seen[a]) throw LibraryError(name + ": bad symmetric group");
      seen[a] = true;
    }
    // Adjacent transpositions generate the full symmetric group.
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
      if (!invariantUnderSwap(semantics, arity, g[k], g[k + 1])) {
        throw LibraryError(name + ": not commutative in arguments " + std::to_string(g[k]) + " and " +
                           std::to_string(g[k + 1]));
      }
    }
  }
  std::sort(symmetricGroups.begin(), symmetricGroups.end());
  for (const auto& [metric, c] : costs) {
    if (c < 0) throw LibraryError(name + ": negative cost for " + metric);
  }

  auto c = std::shared_ptr<Component>(new Component());
  c->name_ = std::move(name);
  c->arity_ = arity;
  c->semantics_ = std::move(semantics);
  c->groups_ = std::move(symmetricGroups);
  c->costs_ = std::move(costs);
  const unsigned w = c->semantics_.width();
  if (arity * w <= kTableBits) {
    c->table_.resize(std::size_t{1} << (arity * w));
    forAllTuples(arity, w, [&](std::span<const std::uint64_t> args) {
      c->table_[packArgs(args, w)] = static_cast<std::uint32_t>(evalRaw(c->semantics_, args));
      return true;
    });
  }
  return c;
}

std::optional<Millicost> Component::cost(std::string_view metric) const {
  auto it = costs_.find(std::string(metric));
  if (it == costs_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Component::apply(std::span<const std::uint64_t> args) const {
  if (!table_.empty()) return table_[packArgs(args, semantics_.width())];
  return evalRaw(semantics_, args);
}

std::vector<std::string> multisetKey(std::span<const ComponentRef> m) {
  std::vector<std::string> key;
  key.reserve(m.size());
  for (const auto& c : m) key.push_back(c->name());
  std::sort(key.begin(), key.end());
  return key;
}

std::string multisetToString(std::span<const ComponentRef> m) {
  std::string out = "{";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ",";
    out += m[i]->name();
  }
  return out + "}";
}

ComponentLibrary::ComponentLibrary(std::string name, unsigned width, std::vector<ComponentRef> components)
    : name_(std::move(name)), width_(width), components_(std::move(components)) {
  std::set<std::string> names;
  for (const auto& c : components_) {
    if (c->width() != width_) throw LibraryError(c->name() + ": width differs from library width");
    if (!names.insert(c->name()).second) throw LibraryError("duplicate component name: " + c->name());
  }
}

ComponentRef ComponentLibrary::find(std::string_view name) const {
  for (const auto& c : components_) {
    if (c->name() == name) return c;
  }
  return nullptr;
}

ComponentRef ComponentLibrary::at(std::string_view name) const {
  auto c = find(name);
  if (!c) throw LibraryError("unknown component '" + std::string(name) + "' in library " + name_);
  return c;
}

std::optional<std::size_t> ComponentLibrary::indexOf(std::string_view name) const {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i]->name() == name) return i;
  }
  return std::nullopt;
}

ComponentLibrary ComponentLibrary::subset(std::string name, std::span<const std::string> keep) const {
  std::vector<ComponentRef> out;
  for (const auto& k : keep) at(k);
  for (const auto& c : components_) {
    if (std::find(keep.begin(), keep.end(), c->name()) != keep.end()) out.push_back(c);
  }
  return ComponentLibrary(std::move(name), width_, std::move(out));
}

CostMetric CostMetric::fromLibrary(const ComponentLibrary& lib, std::string_view metric) {
  CostMetric m{std::string(metric), {}};
  for (const auto& c : lib.components()) {
    auto cost = c->cost(metric);
    if (!cost) throw LibraryError("component " + c->name() + " has no '" + std::string(metric) + "' cost");
    m.perComponent[c->name()] = *cost;
  }
  return m;
}

Millicost multisetCost(const CostMetric& metric, std::span<const ComponentRef> m) {
  Millicost total = 0;
  for (const auto& c : m) {
    auto it = metric.perComponent.find(c->name());
    if (it == metric.perComponent.end()) {
      throw LibraryError("component " + c->name() + " unpriced under metric " + metric.name);
    }
    total += it->second;
  }
  return total;
}

ComponentLibrary loadLibrary(std::string_view document) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw LibraryError(std::string("library JSON: ") + e.what());
  }
  try {
    const unsigned width = doc.value("width", kDefaultWidth);
    if (width == 0 || width > kMaxWidth) throw LibraryError("library width out of range");
    std::vector<ComponentRef> comps;
    for (const auto& e : doc.at("components")) {
      const auto name = e.at("name").get<std::string>();
      const auto arity = e.at("arity").get<unsigned>();
      SemExpr sem = SemExpr::constant(width, 0);
      try {
        sem = parseSemExpr(e.at("semantics").get<std::string>(), width);
      } catch (const SemanticsError& err) {
        throw LibraryError(name + ": " + err.what());
      }
      std::vector<std::vector<unsigned>> groups;
      if (auto it = e.find("commutative"); it != e.end()) {
        if (it->is_boolean()) {
          if (it->get<bool>()) {
            if (arity != 2) throw LibraryError(name + ": boolean commutative flag requires arity 2");
            groups.push_back({0, 1});
          }
        } else {
          groups = it->get<std::vector<std::vector<unsigned>>>();
        }
      }
      std::map<std::string, Millicost> costs;
      if (auto it = e.find("costs"); it != e.end()) {
        for (const auto& [metric, v] : it->items()) {
          const double units = v.get<double>();
          if (!(units >= 0)) throw LibraryError(name + ": negative cost");
          costs[metric] = static_cast<Millicost>(std::llround(units * 1000.0));
        }
      }
      comps.push_back(Component::make(name, arity, std::move(sem), std::move(groups), std::move(costs)));
    }
    return ComponentLibrary(doc.value("name", std::string("library")), width, std::move(comps));
  } catch (const json::exception& e) {
    throw LibraryError(std::string("library JSON: ") + e.what());
  }
}

std::string dumpLibrary(const ComponentLibrary& lib) {
  using nlohmann::json;
  json comps = json::array();
  for (const auto& c : lib.components()) {
    json e{{"name", c->name()}, {"arity", c->arity()}, {"semantics", c->semantics().toString()}};
    const auto& g = c->symmetricGroups();
    if (g.size() == 1 && g[0] == std::vector<unsigned>{0, 1} && c->arity() == 2) {
      e["commutative"] = true;
    } else if (!g.empty()) {
      e["commutative"] = g;
    } else {
      e["commutative"] = false;
    }
    json costs = json::object();
    for (const auto& [m, v] : c->costs()) costs[m] = static_cast<double>(v) / 1000.0;
    e["costs"] = costs;
    comps.push_back(std::move(e));
  }
  return json{{"name", lib.name()}, {"width", lib.width()}, {"components", comps}}.dump(2);
}

std::optional<PresetId> parsePresetId(std::string_view id) {
  static const std::pair<std::string_view, PresetId> kIds[] = {
      {"IR", PresetId::IR},       {"IR-1a", PresetId::IR1a},   {"IR-1b", PresetId::IR1b},
      {"IR-2", PresetId::IR2},    {"ISA1a", PresetId::ISA1a},  {"ISA1b", PresetId::ISA1b},
      {"ISA2", PresetId::ISA2},
  };
  for (const auto& [s, v] : kIds) {
    if (s == id) return v;
  }
  return std::nullopt;
}

std::string_view presetName(PresetId id) {
  switch (id) {
    case PresetId::IR: return "IR";
    case PresetId::IR1a: return "IR-1a";
    case PresetId::IR1b: return "IR-1b";
    case PresetId::IR2: return "IR-2";
    case PresetId::ISA1a: return "ISA1a";
    case PresetId::ISA1b: return "ISA1b";
    case PresetId::ISA2: return "ISA2";
  }
  return "?";
}

namespace {

using Groups = std::vector<std::vector<unsigned>>;

const Groups kComm{{0, 1}};

std::map<std::string, Millicost> prices(Millicost energy) {
  return {{std::string(kCodeSizeMetric), 1000}, {std::string(kEnergyMetric), energy}};
}

ComponentRef mk(std::string_view name, unsigned arity, std::string_view sem, unsigned w, Groups g = {},
                std::map<std::string, Millicost> costs = {}) {
  return Component::make(std::string(name), arity, parseSemExpr(sem, w), std::move(g), std::move(costs));
}

ComponentLibrary fullIr(unsigned w) {
  std::vector<ComponentRef> c;
  c.push_back(Component::make("c0", 0, SemExpr::constant(w, 0), {}, prices(1000)));
  c.push_back(Component::make("c1", 0, SemExpr::constant(w, 1), {}, prices(1000)));
  c.push_back(mk("not", 1, "(bvnot x0)", w, {}, prices(1000)));
  c.push_back(mk("and", 2, "(bvand x0 x1)", w, kComm, prices(1000)));
  c.push_back(mk("or", 2, "(bvor x0 x1)", w, kComm, prices(1000)));
  c.push_back(mk("xor", 2, "(bvxor x0 x1)", w, kComm, prices(1000)));
  c.push_back(mk("neg", 1, "(bvneg x0)", w, {}, prices(1000)));
  c.push_back(mk("add", 2, "(bvadd x0 x1)", w, kComm, prices(1000)));
  c.push_back(mk("sub", 2, "(bvsub x0 x1)", w, {}, prices(1000)));
  c.push_back(mk("mul", 2, "(bvmul x0 x1)", w, kComm, prices(2500)));
  c.push_back(mk("ult", 2, "(bvult x0 x1)", w, {}, prices(1000)));
  c.push_back(mk("ule", 2, "(bvule x0 x1)", w, {}, prices(1000)));
  c.push_back(mk("ugt", 2, "(bvugt x0 x1)", w, {}, prices(1000)));
  c.push_back(mk("uge", 2, "(bvuge x0 x1)", w, {}, prices(1000)));
  c.push_back(mk("eq", 2, "(= x0 x1)", w, kComm, prices(1000)));
  c.push_back(mk("neq", 2, "(distinct x0 x1)", w, kComm, prices(1000)));
  return ComponentLibrary("IR", w, std::move(c));
}

}  // namespace

ComponentLibrary presetLibrary(PresetId id, unsigned w) {
  if (w == 0 || w > kMaxWidth) throw LibraryError("preset width out of range");
  switch (id) {
    case PresetId::IR: return fullIr(w);
    case PresetId::IR1a: {
      const std::vector<std::string> keep{"not", "and", "or", "xor", "neg", "add", "sub"};
      return fullIr(w).subset("IR-1a", keep);
    }
    case PresetId::IR1b: {
      const std::vector<std::string> keep{"c0", "c1", "ult", "ule", "ugt", "uge", "eq", "neq"};
      return fullIr(w).subset("IR-1b", keep);
    }
    case PresetId::IR2: {
      const std::vector<std::string> keep{"c0", "c1", "neg", "add", "sub", "mul"};
      return fullIr(w).subset("IR-2", keep);
    }
    case PresetId::ISA1a:
      return ComponentLibrary("ISA1a", w,
                              {mk("nand", 2, "(bvnot (bvand x0 x1))", w, kComm, prices(1000)),
                               mk("sub", 2, "(bvsub x0 x1)", w, {}, prices(1000))});
    case PresetId::ISA1b: {
      const std::string sign = smtLiteral(w, std::uint64_t{1} << (w - 1));
      const std::string zero = smtLiteral(w, 0);
      const std::string one = smtLiteral(w, 1);
      return ComponentLibrary(
          "ISA1b", w,
          {mk("cmpZ", 2, "(= (bvsub x0 x1) " + zero + ")", w, kComm, prices(1000)),
           mk("cmpN", 2, "(bvuge (bvsub x0 x1) " + sign + ")", w, {}, prices(1000)),
           mk("cmpC", 2, "(bvuge x0 x1)", w, {}, prices(1000)),
           mk("inv", 1, "(bvxor x0 " + one + ")", w, {}, prices(1000))});
    }
    case PresetId::ISA2:
      return ComponentLibrary("ISA2", w,
                              {mk("neg", 1, "(bvneg x0)", w, {}, prices(1000)),
                               mk("add", 2, "(bvadd x0 x1)", w, kComm, prices(1000)),
                               mk("add3", 3, "(bvadd (bvadd x0 x1) x2)", w, {{0, 1, 2}}, prices(2000)),
                               mk("mul", 2, "(bvmul x0 x1)", w, kComm, prices(2500)),
                               mk("mac", 3, "(bvadd (bvmul x0 x1) x2)", w, {{0, 1}}, prices(3500))});
  }
  throw LibraryError("unknown preset");
}

std::optional<PresetId> pairedIrPreset(PresetId isa) {
  switch (isa) {
    case PresetId::ISA1a: return PresetId::IR1a;
    case PresetId::ISA1b: return PresetId::IR1b;
    case PresetId::ISA2: return PresetId::IR2;
    default: return std::nullopt;
  }
}

}  // namespace rulesynth
