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

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rulesynth/component.hpp"
#include "rulesynth/program.hpp"
#include "rulesynth/rulegen.hpp"

namespace {

using namespace rulesynth;

constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// `preset:IR` next to a preset target resolves to that target's IR slice;
// `preset:IR-full` always means the whole IR.
ComponentLibrary resolveLibrary(const std::string& spec, unsigned width, const std::string& partner) {
  constexpr std::string_view kPrefix = "preset:";
  if (spec.rfind(kPrefix, 0) != 0) {
    auto lib = loadLibrary(readFile(spec));
    return lib;
  }
  std::string id = spec.substr(kPrefix.size());
  if (id == "IR-full") return presetLibrary(PresetId::IR, width);
  auto preset = parsePresetId(id);
  if (!preset) throw UsageError("unknown preset '" + id + "'");
  if (*preset == PresetId::IR && partner.rfind(kPrefix, 0) == 0) {
    if (auto other = parsePresetId(partner.substr(kPrefix.size()))) {
      if (auto paired = pairedIrPreset(*other)) {
        std::cerr << "note: preset:IR paired with " << presetName(*other) << " uses the " << presetName(*paired)
                  << " slice (preset:IR-full for the whole IR)\n";
        return presetLibrary(*paired, width);
      }
    }
  }
  return presetLibrary(*preset, width);
}

void printTable(std::ostream& os, const std::string& title, const std::map<Cell, unsigned>& counts, unsigned maxIR,
                unsigned maxISA) {
  os << title << "\n";
  os << std::setw(8) << "ISA\\IR";
  for (unsigned a = 1; a <= maxIR; ++a) os << std::setw(8) << a;
  os << "\n";
  for (unsigned b = 1; b <= maxISA; ++b) {
    os << std::setw(8) << b;
    for (unsigned a = 1; a <= maxIR; ++a) {
      auto it = counts.find({a, b});
      os << std::setw(8) << (it == counts.end() ? 0 : it->second);
    }
    os << "\n";
  }
}

struct GenArgs {
  std::string ir = "preset:IR";
  std::string isa;
  unsigned maxIR = 1;
  unsigned maxISA = 1;
  std::string mode = "unique";
  std::string metric;
  long timeoutMs = kDefaultTimeout.count();
  std::uint64_t seed = 0;
  std::string solver;
  std::string out;
  unsigned width = kDefaultWidth;
  std::string specializations = "single-instruction";
  bool verbose = false;
};

int runGen(const GenArgs& a) {
  auto mode = parseMode(a.mode);
  if (!mode) throw UsageError("--mode must be all, unique or lowest-cost");
  if (*mode == GenMode::LowestCost && a.metric.empty()) throw UsageError("--metric is required with lowest-cost");
  if (*mode != GenMode::LowestCost && !a.metric.empty()) throw UsageError("--metric only applies to lowest-cost");
  if (a.specializations != "single-instruction" && a.specializations != "strict") {
    throw UsageError("--specializations must be single-instruction or strict");
  }

  const auto ir = resolveLibrary(a.ir, a.width, a.isa);
  const auto isa = resolveLibrary(a.isa, a.width, a.ir);

  GenConfig cfg;
  cfg.maxIR = a.maxIR;
  cfg.maxISA = a.maxISA;
  cfg.mode = *mode;
  if (!a.metric.empty()) cfg.metric = CostMetric::fromLibrary(isa, a.metric);
  cfg.timeout = std::chrono::milliseconds(a.timeoutMs);
  cfg.seed = a.seed;
  cfg.policy = a.specializations == "strict" ? SpecializationPolicy::Strict : SpecializationPolicy::SingleInstruction;
  if (!a.solver.empty()) cfg.solver = SolverConfig::forBinary(a.solver);
  if (!cfg.solver.available()) {
    std::cerr << "error: solver not found: " << cfg.solver.path << "\n";
    return 1;
  }
  if (a.verbose) {
    cfg.progress = [](const QueryRecord& q) {
      std::cerr << "  [";
      for (const auto& s : q.ir) std::cerr << s << ' ';
      std::cerr << "| ";
      for (const auto& s : q.isa) std::cerr << s << ' ';
      std::cerr << "] n=" << q.numInputs << " found=" << q.found << " composites=" << q.composites
                << (q.timedOut ? " TIMEOUT" : "") << " " << std::fixed << std::setprecision(1) << q.millis << "ms\n";
    };
  }

  const auto report = generate(ir, isa, cfg);
  if (!a.out.empty()) {
    std::ofstream os(a.out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + a.out);
    os << report.toJson();
  }

  std::cout << "libraries: " << ir.name() << " -> " << isa.name() << ", mode " << modeName(*mode);
  if (report.metric) std::cout << ", metric " << *report.metric;
  std::cout << "\n";
  if (*mode == GenMode::All) {
    printTable(std::cout, "all rules (raw)", report.rawCounts, a.maxIR, a.maxISA);
    printTable(std::cout, "after post-filter", report.counts, a.maxIR, a.maxISA);
  } else {
    printTable(std::cout, *mode == GenMode::Unique ? "only unique" : "only lowest-cost", report.counts, a.maxIR,
               a.maxISA);
  }
  const auto timeouts = report.timeouts();
  std::cout << "rules: " << report.rules.size() << ", redundant returns: " << report.redundantReturns
            << ", timeouts: " << timeouts.size() << "\n";
  for (const auto& t : timeouts) {
    std::cout << "  timeout: {";
    for (const auto& s : t.ir) std::cout << s << ' ';
    std::cout << "} -> {";
    for (const auto& s : t.isa) std::cout << s << ' ';
    std::cout << "} inputs " << t.numInputs << "\n";
  }
  return 0;
}

int runVerify(const std::string& path) {
  const auto report = RuleLibraryReport::fromJson(readFile(path));
  std::size_t ok = 0;
  for (std::size_t i = 0; i < report.rules.size(); ++i) {
    const auto& r = report.rules[i].rule;
    if (verifyRule(r)) {
      ++ok;
    } else {
      std::cout << "FAIL rule " << i << ":\n" << r.ir.toString() << "\n  ->\n" << r.isa.toString() << "\n";
    }
  }
  std::cout << ok << "/" << report.rules.size() << " rules valid\n";
  return ok == report.rules.size() ? 0 : 1;
}

int runCount(const std::string& path, const std::string& by) {
  if (by != "irsize" && by != "isasize" && by != "cost") throw UsageError("--by must be irsize, isasize or cost");
  const auto report = RuleLibraryReport::fromJson(readFile(path));
  std::map<long long, std::pair<unsigned, unsigned>> agg;
  for (const auto& r : report.rules) {
    const long long key = by == "irsize" ? r.irSize : by == "isasize" ? r.isaSize : r.cost;
    auto& [all, kept] = agg[key];
    ++all;
    if (r.kept) ++kept;
  }
  const bool baseline = report.mode == GenMode::All;
  std::cout << std::setw(10) << by << std::setw(10) << "rules";
  if (baseline) std::cout << std::setw(10) << "kept";
  std::cout << "\n";
  for (const auto& [key, v] : agg) {
    if (by == "cost") {
      std::ostringstream c;
      c << std::fixed << std::setprecision(3) << static_cast<double>(key) / 1000.0;
      std::cout << std::setw(10) << c.str();
    } else {
      std::cout << std::setw(10) << key;
    }
    std::cout << std::setw(10) << v.first;
    if (baseline) std::cout << std::setw(10) << v.second;
    std::cout << "\n";
  }
  std::cout << std::setw(10) << "total" << std::setw(10) << report.rules.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rewrite-rule synthesis for instruction selection"};
  app.require_subcommand(1);

  GenArgs g;
  auto* gen = app.add_subcommand("gen", "Synthesize a rule library");
  gen->add_option("--ir", g.ir, "IR library: JSON file or preset:NAME")->capture_default_str();
  gen->add_option("--isa", g.isa, "ISA library: JSON file or preset:NAME")->required();
  gen->add_option("--max-ir", g.maxIR, "Largest IR program")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--max-isa", g.maxISA, "Largest ISA program")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--mode", g.mode, "all | unique | lowest-cost")->capture_default_str();
  gen->add_option("--metric", g.metric, "Cost metric for lowest-cost mode");
  gen->add_option("--timeout", g.timeoutMs, "Per-CEGIS timeout in ms")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--seed", g.seed, "Counterexample seed")->capture_default_str();
  gen->add_option("--solver", g.solver, "SMT solver binary (default $RULESYNTH_SOLVER or z3)");
  gen->add_option("--out", g.out, "Write the report JSON here");
  gen->add_option("--width", g.width, "Bit width for presets")->check(CLI::Range(1u, kMaxWidth))->capture_default_str();
  gen->add_option("--specializations", g.specializations, "single-instruction | strict")->capture_default_str();
  gen->add_flag("-v,--verbose", g.verbose, "Log every query");

  std::string verifyPath;
  auto* verify = app.add_subcommand("verify", "Re-verify every rule of a report exhaustively");
  verify->add_option("rules", verifyPath, "Report JSON")->required();

  std::string countPath, countBy = "irsize";
  auto* count = app.add_subcommand("count", "Aggregate rule counts of a report");
  count->add_option("rules", countPath, "Report JSON")->required();
  count->add_option("--by", countBy, "irsize | isasize | cost")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return runGen(g);
    if (*verify) return runVerify(verifyPath);
    if (*count) return runCount(countPath, countBy);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
