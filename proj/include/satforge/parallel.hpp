// satforge/parallel.hpp
//
// Copyright 2026  The SATForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace satforge {

// SATFORGE_THREADS caps internal parallelism; the default is 1.
inline std::size_t thread_cap() {
  const char* env = std::getenv("SATFORGE_THREADS");
  if (!env) return 1;
  const long value = std::strtol(env, nullptr, 10);
  return value > 1 ? static_cast<std::size_t>(value) : 1;
}

// Static sharding over [0, count). Only used where tasks write disjoint
// outputs, so the result is identical to the sequential order.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min(thread_cap(), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace satforge
