#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace rppl {

/// Run fn(begin, end) over [0, n) split into contiguous chunks across up to
/// `jobs` threads. Chunk boundaries depend only on n and jobs, and callers
/// must write disjoint outputs, so results are identical for any job count
/// unless the caller reduces across chunks itself.
inline void parallel_chunks(size_t n, int jobs, const std::function<void(size_t, size_t)>& fn) {
  if (n == 0) return;
  const size_t workers = std::max<size_t>(1, std::min<size_t>(jobs > 0 ? jobs : 1, n));
  if (workers == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  const size_t chunk = (n + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    const size_t begin = w * chunk;
    const size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace rppl
