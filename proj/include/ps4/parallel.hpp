#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ps4 {

// Process-wide worker count honoured by every parallel routine. 0 means
// "use std::thread::hardware_concurrency()".
void set_thread_count(unsigned n);
unsigned thread_count();

// Splits [0, n) into at most thread_count() contiguous ranges and calls
// body(begin, end, shard) for each, shard numbered in range order. Callers that
// merge per-shard results in shard order get output independent of the worker
// count. The first exception thrown by any shard is rethrown here.
template <class Body>
void parallel_ranges(std::size_t n, Body&& body) {
  if (n == 0) return;
  const std::size_t shards = std::min<std::size_t>(thread_count(), n);
  if (shards <= 1) {
    body(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(shards);
    for (std::size_t s = 0; s < shards; ++s) {
      std::size_t begin = n * s / shards;
      std::size_t end = n * (s + 1) / shards;
      pool.emplace_back([&, begin, end, s] {
        try {
          body(begin, end, s);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!error) error = std::current_exception();
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace ps4
