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

#ifndef OODKIT_PARALLEL_HPP_
#define OODKIT_PARALLEL_HPP_

#include <cstdint>
#include <functional>

namespace oodkit {

// Number of worker threads the compute kernels may use. Resolution order:
// explicit set_thread_count(), then the OODKIT_THREADS environment variable,
// then 1. Parallel loops partition output elements only and never reorder a
// reduction, so results are bitwise identical for every thread count; the
// single-threaded default is still the reference mode for tests.
int thread_count();
void set_thread_count(int n);

// Runs fn(begin, end) over a partition of [0, n). Each index is visited by
// exactly one worker. Falls back to a direct call when n is small or one
// thread is configured.
void parallel_for(std::int64_t n,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace oodkit

#endif  // OODKIT_PARALLEL_HPP_
