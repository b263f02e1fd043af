#pragma once

#include <cstddef>
#include <functional>

namespace johnfield {

/// Worker count: hardware concurrency, capped by JOHNFIELD_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one worker
/// and results must be written to per-index slots, so output does not depend
/// on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace johnfield
