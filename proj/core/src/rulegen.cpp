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

#include "rulesynth/rulegen.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace rulesynth {

std::string_view modeName(GenMode m) {
  switch (m) {
    case GenMode::All: return "all";
    case GenMode::Unique: return "unique";
    case GenMode::LowestCost: return "lowest-cost";
  }
  return "?";
}

std::optional<GenMode> parseMode(std::string_view s) {
  if (s == "all") return GenMode::All;
  if (s == "unique") return GenMode::Unique;
  if (s == "lowest-cost") return GenMode::LowestCost;
  return std::nullopt;
}

std::vector<Multiset> multicomb(const ComponentLibrary& lib, unsigned n) {
  std::vector<Multiset> out;
  const auto& comps = lib.components();
  if (n == 0 || comps.empty()) return out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Multiset m;
    for (auto i : idx) m.push_back(comps[i]);
    out.push_back(std::move(m));
    // Advance the rightmost index that can still grow, then reset the tail
    // to it so indices stay non-decreasing.
    std::size_t k = n;
    while (k > 0 && idx[k - 1] == comps.size() - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < n; ++j) idx[j] = idx[k - 1];
  }
  return out;
}

std::vector<unsigned> allInputs(std::span<const ComponentRef> ir, std::span<const ComponentRef> isa) {
  std::vector<unsigned> out;
  if (ir.empty() || isa.empty()) return out;
  for (unsigned n = std::min(inputBound(ir), inputBound(isa)); n >= 1; --n) out.push_back(n);
  return out;
}

std::vector<Cell> cellOrder(unsigned maxIR, unsigned maxISA) {
  std::vector<Cell> cells;
  for (unsigned a = 1; a <= maxIR; ++a) {
    for (unsigned b = 1; b <= maxISA; ++b) cells.emplace_back(a, b);
  }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) {
    return std::pair(x.first + x.second, x.first) < std::pair(y.first + y.second, y.first);
  });
  return cells;
}

std::vector<Multiset> isaMultisetsByCost(const ComponentLibrary& isa, unsigned maxSize, const CostMetric& metric) {
  std::vector<Multiset> all;
  for (unsigned k = 1; k <= maxSize; ++k) {
    for (auto& m : multicomb(isa, k)) all.push_back(std::move(m));
  }
  std::stable_sort(all.begin(), all.end(), [&](const Multiset& a, const Multiset& b) {
    return std::tuple(multisetCost(metric, a), a.size(), multisetKey(a)) <
           std::tuple(multisetCost(metric, b), b.size(), multisetKey(b));
  });
  return all;
}

std::vector<QueryRecord> RuleLibraryReport::timeouts() const {
  std::vector<QueryRecord> out;
  for (const auto& q : queries) {
    if (q.timedOut) out.push_back(q);
  }
  return out;
}

unsigned RuleLibraryReport::cumulative(Cell cell, bool raw) const {
  unsigned total = 0;
  for (const auto& [c, v] : raw ? rawCounts : counts) {
    if (c.first <= cell.first && c.second <= cell.second) total += v;
  }
  return total;
}

namespace {

struct Driver {
  const ComponentLibrary& ir;
  const ComponentLibrary& isa;
  const GenConfig& cfg;
  SolverBackend backend;
  RuleLibraryReport report;
  std::vector<FoundRule> found;

  Driver(const ComponentLibrary& irLib, const ComponentLibrary& isaLib, const GenConfig& c)
      : ir(irLib), isa(isaLib), cfg(c), backend(c.solver) {
    if (cfg.maxIR == 0 || cfg.maxISA == 0) throw std::invalid_argument("maximum sizes must be at least 1");
    if (ir.width() != isa.width()) throw std::invalid_argument("IR and ISA widths differ");
    report.irLibrary = ir.name();
    report.isaLibrary = isa.name();
    report.irLibraryJson = dumpLibrary(ir);
    report.isaLibraryJson = dumpLibrary(isa);
    report.mode = cfg.mode;
    if (cfg.metric) report.metric = cfg.metric->name;
    report.seed = cfg.seed;
    report.width = ir.width();
    report.timeoutMs = cfg.timeout.count();
    report.policy = cfg.policy;
  }

  Millicost ruleCost(const Multiset& m) const {
    if (cfg.metric) return multisetCost(*cfg.metric, m);
    for (const auto& c : m) {
      if (!c->cost(kCodeSizeMetric)) return 0;
    }
    return multisetCost(CostMetric::fromLibrary(isa, kCodeSizeMetric), m);
  }

  CegisOptions options(std::size_t queryIndex) const {
    CegisOptions o;
    o.timeout = cfg.timeout;
    o.seed = cfg.seed * 0x9e3779b97f4a7c15ULL + queryIndex;
    return o;
  }

  void finish(QueryRecord& rec, const CegisAllResult& res, Clock::time_point start) {
    rec.invocations = res.invocations;
    rec.iterations = res.iterations;
    rec.overflows = res.overflows;
    rec.timedOut = res.timedOut;
    rec.millis = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    report.queries.push_back(rec);
    if (cfg.progress) cfg.progress(rec);
  }

  void record(const RewriteRule& r, const Multiset& mi, const Multiset& ma, Cell cell) {
    const auto cost = ruleCost(ma);
    found.push_back({r, multisetKey(mi), multisetKey(ma), cost});
    report.rules.push_back({r, cell.first, cell.second, cost, true});
    ++report.counts[cell];
  }

  void runUnique() {
    for (const auto& cell : cellOrder(cfg.maxIR, cfg.maxISA)) {
      for (const auto& mi : multicomb(ir, cell.first)) {
        for (const auto& ma : multicomb(isa, cell.second)) {
          for (const unsigned n : allInputs(mi, ma)) {
            const auto start = Clock::now();
            QueryRecord rec{multisetKey(mi), multisetKey(ma), n};
            auto q = buildQuery(mi, ma, n);
            CompositeQuery cq{mi, n, multisetKey(ma), std::nullopt, cfg.policy};
            KnownClasses known;
            for (auto& [key, rule] : composites(found, cq)) {
              try {
                blockRule(q, rule);
              } catch (const ClassOverflowError&) {
                ++rec.overflows;
              }
              known.rules.insert(key);
            }
            rec.composites = static_cast<unsigned>(known.rules.size());
            auto res = cegisAll(q, backend, BlockPolicy::FullRule, options(report.queries.size()), &known);
            for (const auto& s : res.rules) record(s.rule, mi, ma, cell);
            rec.found = static_cast<unsigned>(res.rules.size());
            rec.redundant = res.redundant;
            report.redundantReturns += res.redundant;
            finish(rec, res, start);
          }
        }
      }
    }
  }

  void runLowestCost() {
    if (!cfg.metric) throw std::invalid_argument("lowest-cost mode needs a cost metric");
    const auto isams = isaMultisetsByCost(isa, cfg.maxISA, *cfg.metric);
    for (unsigned n1 = 1; n1 <= cfg.maxIR; ++n1) {
      for (const auto& mi : multicomb(ir, n1)) {
        for (const auto& ma : isams) {
          const auto cost = multisetCost(*cfg.metric, ma);
          const Cell cell{n1, static_cast<unsigned>(ma.size())};
          for (const unsigned n : allInputs(mi, ma)) {
            const auto start = Clock::now();
            QueryRecord rec{multisetKey(mi), multisetKey(ma), n};
            auto q = buildQuery(mi, ma, n);
            CompositeQuery cq{mi, n, std::nullopt, cost, cfg.policy};
            KnownClasses known;
            for (auto& [key, rule] : compositesLc(found, cq)) {
              try {
                blockIrProgram(q, rule.ir);
              } catch (const ClassOverflowError&) {
                ++rec.overflows;
              }
              known.ir.insert(key);
            }
            rec.composites = static_cast<unsigned>(known.ir.size());
            auto res = cegisAll(q, backend, BlockPolicy::IrOnly, options(report.queries.size()), &known);
            for (const auto& s : res.rules) record(s.rule, mi, ma, cell);
            rec.found = static_cast<unsigned>(res.rules.size());
            rec.redundant = res.redundant;
            report.redundantReturns += res.redundant;
            finish(rec, res, start);
          }
        }
      }
    }
  }

  void runBaseline() {
    for (const auto& cell : cellOrder(cfg.maxIR, cfg.maxISA)) {
      for (const auto& mi : multicomb(ir, cell.first)) {
        for (const auto& ma : multicomb(isa, cell.second)) {
          for (const unsigned n : allInputs(mi, ma)) {
            const auto start = Clock::now();
            QueryRecord rec{multisetKey(mi), multisetKey(ma), n};
            auto q = buildQuery(mi, ma, n);
            auto res = cegisAll(q, backend, BlockPolicy::Exact, options(report.queries.size()));
            // Post-synthesis filter: drop duplicates and composites of the
            // rules kept so far.
            const auto comps = composites(found, CompositeQuery{mi, n, multisetKey(ma), std::nullopt, cfg.policy});
            std::set<RuleKey> seen;
            for (const auto& s : res.rules) {
              auto key = canonicalRule(s.rule);
              const bool fresh = !comps.count(key) && seen.insert(key).second;
              const auto cost = ruleCost(ma);
              if (fresh) {
                found.push_back({s.rule, multisetKey(mi), multisetKey(ma), cost});
                ++report.counts[cell];
              } else {
                ++rec.redundant;
              }
              report.rules.push_back({s.rule, cell.first, cell.second, cost, fresh});
              ++report.rawCounts[cell];
            }
            rec.found = static_cast<unsigned>(res.rules.size());
            rec.composites = static_cast<unsigned>(comps.size());
            report.redundantReturns += rec.redundant;
            finish(rec, res, start);
          }
        }
      }
    }
  }
};

}  // namespace

RuleLibraryReport genAll(const ComponentLibrary& ir, const ComponentLibrary& isa, const GenConfig& cfg) {
  Driver d(ir, isa, cfg);
  d.report.mode = GenMode::Unique;
  d.runUnique();
  return std::move(d.report);
}

RuleLibraryReport genAllLC(const ComponentLibrary& ir, const ComponentLibrary& isa, const GenConfig& cfg) {
  Driver d(ir, isa, cfg);
  d.report.mode = GenMode::LowestCost;
  d.runLowestCost();
  return std::move(d.report);
}

RuleLibraryReport iterativeBaseline(const ComponentLibrary& ir, const ComponentLibrary& isa, const GenConfig& cfg) {
  Driver d(ir, isa, cfg);
  d.report.mode = GenMode::All;
  d.runBaseline();
  return std::move(d.report);
}

RuleLibraryReport generate(const ComponentLibrary& ir, const ComponentLibrary& isa, const GenConfig& cfg) {
  switch (cfg.mode) {
    case GenMode::All: return iterativeBaseline(ir, isa, cfg);
    case GenMode::Unique: return genAll(ir, isa, cfg);
    case GenMode::LowestCost: return genAllLC(ir, isa, cfg);
  }
  throw std::invalid_argument("unknown mode");
}

namespace {

using nlohmann::ordered_json;

std::string cellName(Cell c) { return std::to_string(c.first) + "x" + std::to_string(c.second); }

Cell parseCell(const std::string& s) {
  auto x = s.find('x');
  if (x == std::string::npos) throw std::invalid_argument("bad cell key " + s);
  return {static_cast<unsigned>(std::stoul(s.substr(0, x))), static_cast<unsigned>(std::stoul(s.substr(x + 1)))};
}

ordered_json cellsJson(const std::map<Cell, unsigned>& m) {
  ordered_json j = ordered_json::object();
  for (const auto& [c, v] : m) j[cellName(c)] = v;
  return j;
}

ordered_json queryJson(const QueryRecord& q, bool timing) {
  ordered_json j{{"ir", q.ir}, {"isa", q.isa}, {"inputs", q.numInputs}};
  if (timing) {
    j["found"] = q.found;
    j["invocations"] = q.invocations;
    j["redundant"] = q.redundant;
    j["iterations"] = q.iterations;
    j["composites"] = q.composites;
    j["overflows"] = q.overflows;
    j["ms"] = q.millis;
  }
  return j;
}

}  // namespace

std::string RuleLibraryReport::toJson(bool withTiming) const {
  ordered_json meta{
      {"libs", {{"ir", irLibrary}, {"isa", isaLibrary}}},
      {"mode", modeName(mode)},
      {"metric", metric ? ordered_json(*metric) : ordered_json(nullptr)},
      {"seed", seed},
      {"widths", {{"ir", width}, {"isa", width}}},
      {"timeoutMs", timeoutMs},
      {"specializations", policy == SpecializationPolicy::Strict ? "strict" : "single-instruction"},
      {"libraries", {{"ir", ordered_json::parse(irLibraryJson)}, {"isa", ordered_json::parse(isaLibraryJson)}}},
  };
  ordered_json rs = ordered_json::array();
  for (const auto& r : rules) {
    ordered_json j{{"inputs", r.rule.numInputs()}, {"ir", r.rule.ir.toString()}, {"isa", r.rule.isa.toString()},
                   {"cost", r.cost},         {"irSize", r.irSize},            {"isaSize", r.isaSize}};
    if (mode == GenMode::All) j["kept"] = r.kept;
    rs.push_back(std::move(j));
  }
  ordered_json timeoutList = ordered_json::array();
  for (const auto& q : timeouts()) timeoutList.push_back(queryJson(q, false));
  ordered_json doc{{"meta", meta}, {"rules", rs}, {"counts", cellsJson(counts)}};
  if (mode == GenMode::All) doc["rawCounts"] = cellsJson(rawCounts);
  doc["redundantReturns"] = redundantReturns;
  doc["timeouts"] = timeoutList;
  if (withTiming) {
    ordered_json t = ordered_json::array();
    for (const auto& q : queries) t.push_back(queryJson(q, true));
    doc["timing"] = t;
  }
  return doc.dump(2) + "\n";
}

RuleLibraryReport RuleLibraryReport::fromJson(std::string_view text) {
  auto doc = ordered_json::parse(text);
  RuleLibraryReport r;
  const auto& meta = doc.at("meta");
  r.irLibrary = meta.at("libs").at("ir").get<std::string>();
  r.isaLibrary = meta.at("libs").at("isa").get<std::string>();
  r.irLibraryJson = meta.at("libraries").at("ir").dump();
  r.isaLibraryJson = meta.at("libraries").at("isa").dump();
  auto mode = parseMode(meta.at("mode").get<std::string>());
  if (!mode) throw std::invalid_argument("unknown mode in report");
  r.mode = *mode;
  if (!meta.at("metric").is_null()) r.metric = meta.at("metric").get<std::string>();
  r.seed = meta.value("seed", std::uint64_t{0});
  r.width = meta.at("widths").at("ir").get<unsigned>();
  r.timeoutMs = meta.value("timeoutMs", std::int64_t{0});
  if (meta.value("specializations", std::string("single-instruction")) == "strict") {
    r.policy = SpecializationPolicy::Strict;
  }
  const auto irLib = loadLibrary(r.irLibraryJson);
  const auto isaLib = loadLibrary(r.isaLibraryJson);
  for (const auto& j : doc.at("rules")) {
    const unsigned n = j.at("inputs").get<unsigned>();
    RuleRecord rec;
    rec.rule.ir = parseProgram(j.at("ir").get<std::string>(), irLib, n);
    rec.rule.isa = parseProgram(j.at("isa").get<std::string>(), isaLib, n);
    rec.cost = j.value("cost", Millicost{0});
    rec.irSize = j.value("irSize", static_cast<unsigned>(rec.rule.ir.size()));
    rec.isaSize = j.value("isaSize", static_cast<unsigned>(rec.rule.isa.size()));
    rec.kept = j.value("kept", true);
    r.rules.push_back(std::move(rec));
  }
  for (const auto& [k, v] : doc.at("counts").items()) r.counts[parseCell(k)] = v.get<unsigned>();
  if (doc.contains("rawCounts")) {
    for (const auto& [k, v] : doc.at("rawCounts").items()) r.rawCounts[parseCell(k)] = v.get<unsigned>();
  }
  r.redundantReturns = doc.value("redundantReturns", 0u);
  for (const auto& t : doc.value("timeouts", ordered_json::array())) {
    QueryRecord q;
    q.ir = t.at("ir").get<std::vector<std::string>>();
    q.isa = t.at("isa").get<std::vector<std::string>>();
    q.numInputs = t.at("inputs").get<unsigned>();
    q.timedOut = true;
    r.queries.push_back(std::move(q));
  }
  return r;
}

}  // namespace rulesynth
