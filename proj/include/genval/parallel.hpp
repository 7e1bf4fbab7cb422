#ifndef GENVAL_PARALLEL_HPP
#define GENVAL_PARALLEL_HPP

#include "genval/types.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace genval {

/// Runs body(i) for i in [0, count) on up to `threads` workers using static
/// contiguous chunks. The body must only write state owned by index i; the
/// first exception thrown by any worker is rethrown on the caller.
template <typename Body>
void parallel_for(Index count, int threads, Body&& body) {
  const Index workers = std::clamp<Index>(threads, 1, std::max<Index>(count, 1));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (count + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(count, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        for (Index i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace genval

#endif  // GENVAL_PARALLEL_HPP
