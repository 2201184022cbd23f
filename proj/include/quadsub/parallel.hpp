#pragma once

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace quadsub {

// Worker count: hardware concurrency, capped by QUADSUB_THREADS.
inline int max_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("QUADSUB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

// Runs body(i) for i in [0, count). Each index is processed exactly once;
// bodies must write only to their own output slots.
template <typename F>
void parallel_for(int count, F&& body) {
  const int workers = std::min(count, max_threads());
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next(0);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace quadsub
