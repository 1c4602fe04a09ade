#pragma once

#include <cstddef>
#include <functional>

namespace ace {

/// Worker count for internal loops. Reads ACE_THREADS on every call; unset or
/// invalid falls back to the hardware concurrency. ACE_THREADS=1 runs every
/// loop inline on the calling thread.
std::size_t thread_count();

/// Runs body(i) for i in [begin, end), split into contiguous chunks across
/// thread_count() workers. Each index must write only to its own output slot,
/// which keeps the result independent of the thread count.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace ace
