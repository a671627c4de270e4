#pragma once

#include <cstddef>
#include <functional>

namespace rkhs {

// Number of worker threads: the RKHS_KIT_THREADS environment variable when
// set (values < 1 mean serial), otherwise the hardware concurrency.
int worker_threads();

// Runs fn(i) for i in [0, count).  Each index is processed exactly once;
// callers keep determinism by writing only to per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace rkhs
