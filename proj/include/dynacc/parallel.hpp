#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace dynacc {

class RoutingWorkspace;

/// Runs fn(task_index, workspace) for every index in [0, task_count) across
/// `threads` workers (0 = hardware concurrency). Each worker owns one
/// workspace. Tasks must write to disjoint output slots; then results do not
/// depend on the interleaving and runs are reproducible at any thread count.
template <typename Workspace, typename Fn>
void parallel_for_with(std::size_t task_count, unsigned threads, Fn&& fn) {
  if (threads == 0) {
    threads = std::thread::hardware_concurrency();
    if (threads == 0) {
      threads = 1;
    }
  }
  if (threads == 1 || task_count <= 1) {
    Workspace ws;
    for (std::size_t i = 0; i < task_count; ++i) {
      fn(i, ws);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::thread> workers;
  workers.reserve(threads);
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      Workspace ws;
      try {
        while (!failed.load(std::memory_order_relaxed)) {
          const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
          if (i >= task_count) {
            break;
          }
          fn(i, ws);
        }
      } catch (...) {
        errors[w] = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    });
  }
  for (std::thread& t : workers) {
    t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

/// Convenience wrapper with a routing workspace per worker.
template <typename Fn>
void parallel_for(std::size_t task_count, unsigned threads, Fn&& fn) {
  parallel_for_with<RoutingWorkspace>(task_count, threads, std::forward<Fn>(fn));
}

}  // namespace dynacc
