#ifndef VWAVE_PARALLEL_UTIL_HPP
#define VWAVE_PARALLEL_UTIL_HPP

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace vwave::detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

// Runs fn(begin, end, slot) over a static partition of [0, n). Slots are
// 0..threads-1 so callers can keep per-thread scratch and merge it in a fixed
// order afterwards. Exceptions are rethrown on the calling thread.
inline void parallel_for_chunks(int n, int threads,
                                const std::function<void(int, int, int)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 2 * threads) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(threads);
  int chunk = (n + threads - 1) / threads;
  for (int s = 0; s < threads; ++s) {
    int b = s * chunk;
    int e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e, s] {
      try {
        fn(b, e, s);
      } catch (...) {
        errs[s] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errs)
    if (err) std::rethrow_exception(err);
}

}  // namespace vwave::detail

#endif
