#include "tsmc/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tsmc {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t env_threads() {
  static const std::size_t n = [] {
    const char* env = std::getenv("TSMC_THREADS");
    if (env == nullptr) return std::size_t{1};
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    return v > 0 ? static_cast<std::size_t>(v) : std::size_t{1};
  }();
  return n;
}

}  // namespace

std::size_t thread_count() {
  const std::size_t o = g_override.load();
  return o > 0 ? o : env_threads();
}

void set_thread_count(std::size_t n) { g_override.store(n); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first;
  std::mutex mu;
  auto run = [&](std::size_t lo, std::size_t hi) {
    try {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    } catch (...) {
      std::lock_guard lock(mu);
      if (!first) first = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo < hi) pool.emplace_back(run, lo, hi);
  }
  run(0, std::min(n, chunk));
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace tsmc
