#pragma once

#include <cstddef>
#include <functional>

namespace helimag {

/// Worker count: HELIMAG_THREADS if set to a positive integer, else the
/// number of available cores.
unsigned thread_count();

/// Runs body(begin, end) over [0, n) in contiguous chunks. Each index is
/// handled by exactly one worker, so results do not depend on the count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace helimag
