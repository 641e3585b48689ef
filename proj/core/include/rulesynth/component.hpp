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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rulesynth/bv.hpp"

namespace rulesynth {

class LibraryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integer cost in thousandths of a metric unit.
using Millicost = std::int64_t;

/// One instruction. `symmetricGroups` lists argument positions that may be
/// permuted freely without changing the result; a plain commutative binary
/// instruction has the single group {0, 1}.
class Component {
 public:
  /// Validates arity against the semantics and checks every symmetry claim
  /// exhaustively (or on a dense sample for wide instructions).
  static std::shared_ptr<const Component> make(std::string name, unsigned arity, SemExpr semantics,
                                               std::vector<std::vector<unsigned>> symmetricGroups,
                                               std::map<std::string, Millicost> costs = {});

  const std::string& name() const { return name_; }
  unsigned arity() const { return arity_; }
  unsigned width() const { return semantics_.width(); }
  const SemExpr& semantics() const { return semantics_; }
  bool commutative() const { return !groups_.empty(); }
  const std::vector<std::vector<unsigned>>& symmetricGroups() const { return groups_; }
  const std::map<std::string, Millicost>& costs() const { return costs_; }
  std::optional<Millicost> cost(std::string_view metric) const;

  /// Evaluates on raw words; uses the precomputed truth table when present.
  std::uint64_t apply(std::span<const std::uint64_t> args) const;

 private:
  Component() = default;

  std::string name_;
  unsigned arity_ = 0;
  SemExpr semantics_ = SemExpr::constant(kDefaultWidth, 0);
  std::vector<std::vector<unsigned>> groups_;
  std::map<std::string, Millicost> costs_;
  std::vector<std::uint32_t> table_;
};

using ComponentRef = std::shared_ptr<const Component>;

/// A multiset of components, kept in library order.
using Multiset = std::vector<ComponentRef>;

/// Component names of a multiset, sorted; equal keys mean equal multisets.
std::vector<std::string> multisetKey(std::span<const ComponentRef> m);
std::string multisetToString(std::span<const ComponentRef> m);

class ComponentLibrary {
 public:
  ComponentLibrary(std::string name, unsigned width, std::vector<ComponentRef> components);

  const std::string& name() const { return name_; }
  unsigned width() const { return width_; }
  const std::vector<ComponentRef>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  ComponentRef find(std::string_view name) const;
  ComponentRef at(std::string_view name) const;
  std::optional<std::size_t> indexOf(std::string_view name) const;

  /// Keeps only the named components, in library order.
  ComponentLibrary subset(std::string name, std::span<const std::string> keep) const;

 private:
  std::string name_;
  unsigned width_;
  std::vector<ComponentRef> components_;
};

struct CostMetric {
  std::string name;
  std::map<std::string, Millicost> perComponent;

  /// Pulls the named metric out of every component of `lib`; throws if any
  /// component is unpriced.
  static CostMetric fromLibrary(const ComponentLibrary& lib, std::string_view metric);
};

Millicost multisetCost(const CostMetric& metric, std::span<const ComponentRef> m);

/// Library JSON (see README for the schema).
ComponentLibrary loadLibrary(std::string_view document);
std::string dumpLibrary(const ComponentLibrary& lib);

enum class PresetId { IR, IR1a, IR1b, IR2, ISA1a, ISA1b, ISA2 };

std::optional<PresetId> parsePresetId(std::string_view id);
std::string_view presetName(PresetId id);

/// The built-in libraries. IR is the full compiler IR; IR1a/IR1b/IR2 are the
/// slices of it that are paired with the corresponding target ISA.
ComponentLibrary presetLibrary(PresetId id, unsigned width = kDefaultWidth);

/// IR slice paired with a target preset, or nullopt for non-target ids.
std::optional<PresetId> pairedIrPreset(PresetId isa);

inline constexpr std::string_view kCodeSizeMetric = "code-size";
inline constexpr std::string_view kEnergyMetric = "energy";

}  // namespace rulesynth
