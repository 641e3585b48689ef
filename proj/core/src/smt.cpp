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

#include "rulesynth/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <sstream>

namespace rulesynth {

namespace {

bool executable(const std::string& path) { return ::access(path.c_str(), X_OK) == 0; }

std::string basename(const std::string& path) {
  auto slash = path.rfind('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::vector<std::string> splitArgs(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string a; in >> a;) out.push_back(a);
  return out;
}

// Length of the first complete response in `buf`, or 0 if more input is
// needed. Leading whitespace is counted in the returned length.
std::size_t completeResponse(std::string_view buf, std::size_t& begin) {
  std::size_t i = 0;
  while (i < buf.size() && std::isspace(static_cast<unsigned char>(buf[i]))) ++i;
  begin = i;
  if (i == buf.size()) return 0;
  if (buf[i] != '(') {
    while (i < buf.size() && !std::isspace(static_cast<unsigned char>(buf[i]))) ++i;
    return i < buf.size() ? i : 0;
  }
  int depth = 0;
  for (; i < buf.size(); ++i) {
    const char c = buf[i];
    if (c == '"') {
      for (++i; i < buf.size(); ++i) {
        if (buf[i] == '"') {
          if (i + 1 < buf.size() && buf[i + 1] == '"') {
            ++i;
            continue;
          }
          break;
        }
      }
      if (i == buf.size()) return 0;
    } else if (c == '|') {
      i = buf.find('|', i + 1);
      if (i == std::string_view::npos) return 0;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth == 0) return i + 1;
    }
  }
  return 0;
}

}  // namespace

SolverConfig SolverConfig::forBinary(std::string path) {
  SolverConfig c{std::move(path), {}};
  const auto name = basename(c.path);
  if (name.find("z3") != std::string::npos) {
    c.args = {"-in", "-smt2"};
  } else if (name.find("cvc5") != std::string::npos || name.find("cvc4") != std::string::npos) {
    c.args = {"--lang=smt2", "--incremental", "--produce-models"};
  } else if (name.find("boolector") != std::string::npos) {
    c.args = {"--smt2", "-i", "-m"};
  } else if (name.find("bitwuzla") != std::string::npos) {
    c.args = {"--lang", "smt2", "-m"};
  }
  return c;
}

SolverConfig SolverConfig::fromEnvironment() {
  const char* path = std::getenv("RULESYNTH_SOLVER");
  auto c = forBinary(path && *path ? path : "z3");
  if (const char* args = std::getenv("RULESYNTH_SOLVER_ARGS"); args && *args) c.args = splitArgs(args);
  return c;
}

bool SolverConfig::available() const {
  if (path.empty()) return false;
  if (path.find('/') != std::string::npos) return executable(path);
  const char* env = std::getenv("PATH");
  std::string dirs = env ? env : "/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= dirs.size()) {
    auto end = dirs.find(':', start);
    if (end == std::string::npos) end = dirs.size();
    auto dir = dirs.substr(start, end - start);
    if (executable((dir.empty() ? "." : dir) + "/" + path)) return true;
    start = end + 1;
  }
  return false;
}

SmtSolver::SmtSolver(SolverConfig config) : config_(std::move(config)) { start(); }

SmtSolver::~SmtSolver() { kill(); }

void SmtSolver::start() {
  if (!config_.available()) throw SolverError("solver binary not found: " + config_.path);
  int fds[2];
  // A socket pair lets writes use MSG_NOSIGNAL, so a dead child surfaces as
  // an error code instead of SIGPIPE.
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0) {
    throw SolverError(std::string("socketpair: ") + std::strerror(errno));
  }
  std::vector<std::string> argv{config_.path};
  argv.insert(argv.end(), config_.args.begin(), config_.args.end());
  std::vector<char*> cargv;
  for (auto& a : argv) cargv.push_back(a.data());
  cargv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw SolverError(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(fds[1], STDIN_FILENO);
    ::dup2(fds[1], STDOUT_FILENO);
    if (int devnull = ::open("/dev/null", O_WRONLY); devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    ::execvp(cargv[0], cargv.data());
    ::_exit(127);
  }
  ::close(fds[1]);
  pid_ = pid;
  toChild_ = fromChild_ = fds[0];
  buffer_.clear();
  send("(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic QF_BV)\n");
}

void SmtSolver::kill() {
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
  if (toChild_ >= 0) ::close(toChild_);
  pid_ = -1;
  toChild_ = fromChild_ = -1;
  buffer_.clear();
}

void SmtSolver::restart() {
  kill();
  start();
}

void SmtSolver::reset() {
  if (!alive()) {
    start();
    return;
  }
  send("(reset)\n(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic QF_BV)\n");
}

void SmtSolver::send(std::string_view commands) {
  if (!alive()) throw SolverError("solver process is not running");
  if (trace_) transcript_.append(commands);
  while (!commands.empty()) {
    const ssize_t n = ::send(toChild_, commands.data(), commands.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      kill();
      throw SolverError(std::string("write to solver failed: ") + std::strerror(errno));
    }
    commands.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::optional<std::string> SmtSolver::readResponse(Clock::time_point deadline) {
  while (true) {
    std::size_t begin = 0;
    if (const auto len = completeResponse(buffer_, begin); len > 0) {
      std::string r = buffer_.substr(begin, len - begin);
      buffer_.erase(0, len);
      return r;
    }
    const auto now = Clock::now();
    if (now >= deadline) {
      kill();
      return std::nullopt;
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd pfd{fromChild_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(ms + 1, 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      kill();
      throw SolverError(std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(fromChild_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      std::string tail = buffer_;
      kill();
      throw SolverError("solver process exited unexpectedly" + (tail.empty() ? "" : ": " + tail));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::optional<SatResult> SmtSolver::checkSat(Clock::time_point deadline) {
  send("(check-sat)\n");
  auto r = readResponse(deadline);
  if (!r) return std::nullopt;
  if (*r == "sat") return SatResult::Sat;
  if (*r == "unsat") return SatResult::Unsat;
  if (*r == "unknown") return SatResult::Unknown;
  throw SolverError("unexpected check-sat response: " + *r);
}

std::optional<std::map<std::string, std::uint64_t>> SmtSolver::getValues(std::span<const std::string> names,
                                                                         Clock::time_point deadline) {
  if (names.empty()) return std::map<std::string, std::uint64_t>{};
  std::string cmd = "(get-value (";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) cmd += ' ';
    cmd += names[i];
  }
  send(cmd + "))\n");
  auto r = readResponse(deadline);
  if (!r) return std::nullopt;
  if (r->rfind("(error", 0) == 0) throw SolverError("solver error: " + *r);
  return parseValueList(*r);
}

std::uint64_t parseBvLiteral(std::string_view t) {
  auto fail = [&]() -> std::uint64_t { throw SolverError("bad bit-vector literal: " + std::string(t)); };
  std::uint64_t v = 0;
  if (t.size() > 2 && t[0] == '#' && (t[1] == 'b' || t[1] == 'x')) {
    const unsigned base = t[1] == 'b' ? 2 : 16;
    for (char c : t.substr(2)) {
      unsigned d;
      if (c >= '0' && c <= '9') d = static_cast<unsigned>(c - '0');
      else if (c >= 'a' && c <= 'f') d = static_cast<unsigned>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') d = static_cast<unsigned>(c - 'A' + 10);
      else return fail();
      if (d >= base) return fail();
      v = v * base + d;
    }
    return v;
  }
  // (_ bvN w)
  auto p = t.find("bv");
  if (t.rfind("(_", 0) != 0 || p == std::string_view::npos) return fail();
  std::size_t i = p + 2;
  if (i >= t.size() || !std::isdigit(static_cast<unsigned char>(t[i]))) return fail();
  for (; i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])); ++i) v = v * 10 + static_cast<unsigned>(t[i] - '0');
  return v;
}

std::map<std::string, std::uint64_t> parseValueList(std::string_view text) {
  std::map<std::string, std::uint64_t> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto expect = [&](char c) {
    skip();
    if (i >= text.size() || text[i] != c) throw SolverError("malformed get-value response: " + std::string(text));
    ++i;
  };
  expect('(');
  while (true) {
    skip();
    if (i < text.size() && text[i] == ')') break;
    expect('(');
    skip();
    const std::size_t ns = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ')') ++i;
    std::string name(text.substr(ns, i - ns));
    skip();
    std::size_t vs = i;
    if (i < text.size() && text[i] == '(') {
      i = text.find(')', i);
      if (i == std::string_view::npos) throw SolverError("malformed get-value response");
      ++i;
    } else {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ')') ++i;
    }
    out[name] = parseBvLiteral(text.substr(vs, i - vs));
    expect(')');
  }
  return out;
}

}  // namespace rulesynth
