#include "richkde/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace richkde {

namespace {
thread_local bool inside_parallel_region = false;
}

int max_threads() {
  if (const char* env = std::getenv("RICHKDE_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested >= 1) return requested;
    } catch (const std::exception&) {
      // fall through to hardware default
    }
  }
  const unsigned hardware = std::thread::hardware_concurrency();
  return hardware > 0 ? static_cast<int>(hardware) : 1;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
  if (count == 0) return;
  const std::size_t workers = inside_parallel_region
      ? 1
      : std::min<std::size_t>(static_cast<std::size_t>(max_threads()), count);
  if (workers <= 1) {
    const bool was_inside = inside_parallel_region;
    inside_parallel_region = true;
    try {
      chunk_fn(0, count);
    } catch (...) {
      inside_parallel_region = was_inside;
      throw;
    }
    inside_parallel_region = was_inside;
    return;
  }

  const std::size_t base = count / workers;
  const std::size_t extra = count % workers;
  std::vector<std::exception_ptr> failures(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);

  std::size_t begin = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ranges(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t size = base + (w < extra ? 1 : 0);
    ranges[w] = {begin, begin + size};
    begin += size;
  }

  auto run_chunk = [&](std::size_t w) {
    inside_parallel_region = true;
    try {
      chunk_fn(ranges[w].first, ranges[w].second);
    } catch (...) {
      failures[w] = std::current_exception();
    }
    inside_parallel_region = false;
  };

  for (std::size_t w = 1; w < workers; ++w)
    threads.emplace_back(run_chunk, w);
  run_chunk(0);
  for (auto& t : threads) t.join();

  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);
}

}  // namespace richkde
