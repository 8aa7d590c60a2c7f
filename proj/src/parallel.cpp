#include "mflda/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mflda {

namespace {
std::atomic<int> g_threads{1};
thread_local bool t_in_parallel = false;
}  // namespace

void set_threads(int n) { g_threads.store(n < 1 ? 1 : n); }

int threads() { return g_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int budget = g_threads.load();
  if (n == 0) return;
  if (budget <= 1 || n == 1 || t_in_parallel) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t workers = static_cast<std::size_t>(budget);
  if (workers > n) workers = n;

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;

  auto run = [&]() {
    t_in_parallel = true;
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
    t_in_parallel = false;
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mflda
