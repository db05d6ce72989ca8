#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tsplab {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Items are
/// claimed dynamically. The first exception thrown by any body is rethrown
/// after every thread has joined.
template <class Body>
void parallel_for(std::size_t count, int workers, Body&& body) {
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)),
                                             count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count || failed.load()) return;
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace tsplab
