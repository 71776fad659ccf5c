#pragma once

#include <cstddef>
#include <functional>

namespace richkde {

// Worker budget: RICHKDE_THREADS if set (clamped to >= 1), otherwise
// the hardware concurrency.
int max_threads();

// Runs chunk_fn(begin, end) over a contiguous partition of [0, count).
// Workers write disjoint ranges; as long as chunk_fn fills each index
// as a pure function of that index, results are bitwise independent of
// the thread count. The first failing chunk's exception is rethrown.
// Nested calls run serially.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& chunk_fn);

}  // namespace richkde
