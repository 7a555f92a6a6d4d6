/*
 * Copyright 2026 The hajj-densd Authors.
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

#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace densd {

// Bounds the OpenMP team size for all subsequent parallel regions.
inline void SetJobs(int jobs) {
  if (jobs >= 1) omp_set_num_threads(jobs);
}

inline int Jobs() { return omp_get_max_threads(); }

// Runs fn(i) for i in [0, n) across the OpenMP team. Exceptions cannot cross
// the parallel region, so they are captured per index and the one with the
// lowest index is rethrown; the reported error does not depend on scheduling.
template <typename Fn>
void ParallelFor(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  bool failed = false;
#pragma omp parallel for schedule(dynamic) reduction(|| : failed)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
      failed = true;
    }
  }
  if (!failed) return;
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace densd
