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

#ifndef BARRIERKIT_PARALLEL_HPP
#define BARRIERKIT_PARALLEL_HPP

// Order-preserving parallel map over independent jobs. The worker count is
// capped by the BARRIERKIT_THREADS environment variable.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace barrierkit {

inline unsigned worker_count(std::size_t jobs) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BARRIERKIT_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

/// out[k] = fn(in[k]). The first exception (by index) is rethrown after all
/// workers finish.
template <class T, class F>
auto parallel_map(const std::vector<T>& in, F fn) -> std::vector<decltype(fn(in.front()))> {
  using R = decltype(fn(in.front()));
  std::vector<std::optional<R>> slots(in.size());
  std::vector<std::exception_ptr> errors(in.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < in.size(); k = next++) {
      try {
        slots[k].emplace(fn(in[k]));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n = worker_count(in.size());
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> out;
  out.reserve(in.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace barrierkit

#endif  // BARRIERKIT_PARALLEL_HPP
