#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ssctm {

// Runs fn(i) for every i in [0, n) on up to `jobs` threads (jobs <= 0 means
// hardware concurrency).  Work is assigned statically (thread t takes the
// indices congruent to t), so callers that write results into preallocated
// per-index slots get output independent of the worker count.  The first
// exception thrown by any task is rethrown after all threads join.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  if (jobs > n) jobs = n;

  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> threads;
  threads.reserve(jobs);
  for (int t = 0; t < jobs; ++t) {
    threads.emplace_back([&, t]() {
      try {
        for (int i = t; i < n; i += jobs) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ssctm
