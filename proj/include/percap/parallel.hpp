#pragma once

#include <cstddef>
#include <functional>

namespace percap {

/// Worker count from PERCAP_THREADS (unset or 0 means hardware concurrency).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads.
/// Each index is visited exactly once; the first exception thrown is rethrown
/// after all workers have joined. Callers write results into slot i, so the
/// outcome does not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace percap
