#pragma once

#include <cstddef>
#include <functional>

namespace specoarse {

/// Number of worker threads, capped by the SPECOARSE_THREADS environment
/// variable when set (values < 1 are treated as 1).
std::size_t thread_count();

/// Runs body(i) for i in [begin, end) split into contiguous chunks. The body
/// must only write to locations owned by index i.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace specoarse
