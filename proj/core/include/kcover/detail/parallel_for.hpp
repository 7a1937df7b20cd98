#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace kcover::detail {

inline int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Static contiguous partition of [0, n) over `jobs` workers.
/// body(begin, end, worker) must write only to slots it owns; the caller does
/// any reduction sequentially afterwards, so results never depend on jobs.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t, std::size_t, int)>& body) {
  jobs = resolve_jobs(jobs);
  if (n == 0) return;
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    body(0, n, 0);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  std::size_t chunk = (n + workers - 1) / workers;
  auto run = [&](std::size_t begin, std::size_t end, int worker) {
    try {
      body(begin, end, worker);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  };
  for (std::size_t w = 1; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back(run, begin, end, static_cast<int>(w));
  }
  run(0, std::min(chunk, n), 0);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace kcover::detail
