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

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rulesynth {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

struct SolverConfig {
  std::string path;
  std::vector<std::string> args;

  /// Path from RULESYNTH_SOLVER (default `z3` on PATH) and arguments from
  /// RULESYNTH_SOLVER_ARGS, else chosen from the binary name.
  static SolverConfig fromEnvironment();
  /// Arguments for a known solver binary speaking SMT-LIB 2 on stdin.
  static SolverConfig forBinary(std::string path);

  /// True if the binary can be found and executed.
  bool available() const;
};

enum class SatResult { Sat, Unsat, Unknown };

/// One SMT-LIB 2 solver child process talking over pipes. Calls that take a
/// deadline return nullopt if it passes; the process is then killed and
/// must be restarted before further use.
class SmtSolver {
 public:
  explicit SmtSolver(SolverConfig config);
  ~SmtSolver();
  SmtSolver(const SmtSolver&) = delete;
  SmtSolver& operator=(const SmtSolver&) = delete;

  /// Sends commands that produce no output.
  void send(std::string_view commands);
  std::optional<SatResult> checkSat(Clock::time_point deadline);
  /// Bit-vector values of the named constants.
  std::optional<std::map<std::string, std::uint64_t>> getValues(std::span<const std::string> names,
                                                                Clock::time_point deadline);
  void push() { send("(push 1)\n"); }
  void pop() { send("(pop 1)\n"); }
  /// Clears all assertions and declarations and sets logic QF_BV.
  void reset();
  /// Kills the process (if running) and starts a fresh one.
  void restart();
  bool alive() const { return pid_ > 0; }

  /// Complete transcript of sent commands when tracing is on.
  void setTrace(bool on) { trace_ = on; }
  const std::string& transcript() const { return transcript_; }

 private:
  void start();
  void kill();
  std::optional<std::string> readResponse(Clock::time_point deadline);

  SolverConfig config_;
  int pid_ = -1;
  int toChild_ = -1;
  int fromChild_ = -1;
  std::string buffer_;
  bool trace_ = false;
  std::string transcript_;
};

/// Parses `((name value) ...)` as printed by get-value.
std::map<std::string, std::uint64_t> parseValueList(std::string_view text);
/// Parses `#b..`, `#x..` or `(_ bvN w)`.
std::uint64_t parseBvLiteral(std::string_view text);

}  // namespace rulesynth
