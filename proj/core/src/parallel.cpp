/*
 * Copyright 2026 The oodkit authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "oodkit/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace oodkit {

namespace {

int resolve_default() {
  if (const char* env = std::getenv("OODKIT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

std::atomic<int>& thread_count_slot() {
  static std::atomic<int> count{resolve_default()};
  return count;
}

}  // namespace

int thread_count() { return thread_count_slot().load(std::memory_order_relaxed); }

void set_thread_count(int n) {
  thread_count_slot().store(n >= 1 ? n : 1, std::memory_order_relaxed);
}

void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& fn) {
  if (n <= 0) return;
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    fn(0, n);
    return;
  }
  const int used = static_cast<int>(std::min<std::int64_t>(workers, n));
  const std::int64_t chunk = (n + used - 1) / used;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(used - 1));
  for (int w = 1; w < used; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min<std::int64_t>(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  fn(0, std::min<std::int64_t>(n, chunk));
  for (auto& t : pool) t.join();
}

}  // namespace oodkit
