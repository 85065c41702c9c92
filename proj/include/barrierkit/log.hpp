// Copyright 2026 The barrierkit Authors
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

#ifndef BARRIERKIT_LOG_HPP
#define BARRIERKIT_LOG_HPP

// Structured logging: one JSON object per line.

#include <atomic>
#include <iostream>
#include <mutex>
#include <string>

#include "json.hpp"

namespace barrierkit::log {

enum class Level { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

inline const char* to_string(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    case Level::Off: return "off";
  }
  return "unknown";
}

namespace detail {
struct State {
  std::mutex mutex;
  std::ostream* sink = &std::cerr;
  std::atomic<int> threshold{static_cast<int>(Level::Warn)};
  std::atomic<long> warnings{0};
};
inline State& state() {
  static State s;
  return s;
}
}  // namespace detail

inline void set_level(Level level) {
  detail::state().threshold = static_cast<int>(level);
}

inline Level level() {
  return static_cast<Level>(detail::state().threshold.load());
}

/// Redirects log output; the stream must outlive all logging calls.
inline void set_sink(std::ostream& os) {
  std::lock_guard lock(detail::state().mutex);
  detail::state().sink = &os;
}

/// Number of warnings emitted (or suppressed by the threshold) so far.
inline long warning_count() { return detail::state().warnings.load(); }

inline void emit(Level lvl, const std::string& event,
                 nlohmann::json fields = nlohmann::json::object()) {
  auto& s = detail::state();
  if (lvl >= Level::Warn) ++s.warnings;
  if (static_cast<int>(lvl) < s.threshold.load()) return;
  fields["level"] = to_string(lvl);
  fields["event"] = event;
  const std::string line = fields.dump();
  std::lock_guard lock(s.mutex);
  (*s.sink) << line << '\n';
}

inline void debug(const std::string& e, nlohmann::json f = nlohmann::json::object()) {
  emit(Level::Debug, e, std::move(f));
}
inline void info(const std::string& e, nlohmann::json f = nlohmann::json::object()) {
  emit(Level::Info, e, std::move(f));
}
inline void warn(const std::string& e, nlohmann::json f = nlohmann::json::object()) {
  emit(Level::Warn, e, std::move(f));
}
inline void error(const std::string& e, nlohmann::json f = nlohmann::json::object()) {
  emit(Level::Error, e, std::move(f));
}

}  // namespace barrierkit::log

#endif  // BARRIERKIT_LOG_HPP
