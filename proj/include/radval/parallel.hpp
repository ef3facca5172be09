// Copyright (c) 2026 The radval authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

namespace radval {

// Worker count: RADVAL_THREADS if set (clamped to [1, 64]), else the
// hardware concurrency. Read once per process.
int worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks, one per
// worker. fn must only write to per-index slots; callers that reduce must do
// so afterwards in index order, which keeps results bit-exact for any worker
// count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

}  // namespace radval
