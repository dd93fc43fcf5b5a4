#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace hypodecay {

// Number of worker threads to use for grid-parallel work.
// HYPODECAY_THREADS caps the hardware concurrency when set.
inline int thread_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("HYPODECAY_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

// Evaluates fn(i) for i in [0, n) with each result written to its own slot,
// so the output is bit-identical to a sequential loop regardless of the
// thread count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_budget(), n > 0 ? n : 1);
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([=, &fn] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace hypodecay
