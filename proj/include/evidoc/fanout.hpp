// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace evidoc {

/// Runs `tasks` on up to `concurrency` threads. With concurrency <= 1 tasks run
/// inline in order. If tasks throw, the exception of the lowest-indexed failing
/// task is rethrown after all tasks finish.
inline void run_tasks(const std::vector<std::function<void()>>& tasks, int concurrency) {
  std::vector<std::exception_ptr> errors(tasks.size());
  if (concurrency <= 1 || tasks.size() <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      try {
        tasks[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
        try {
          tasks[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(concurrency), tasks.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace evidoc
