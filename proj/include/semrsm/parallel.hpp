#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace semrsm {

/// Fixed-size pool of worker threads. `parallel_for` hands out indices
/// dynamically and blocks until every index has run; the calling thread
/// participates, so a pool of size 1 owns no extra threads.
///
/// Callers write results into per-index slots, which keeps output
/// independent of the number of workers.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t threads = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const noexcept { return workers_.size() + 1; }

  /// Runs body(i) for i in [0, count). The first exception thrown by any
  /// body is rethrown here after all workers have stopped.
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

 private:
  struct Job;
  void worker_loop();
  static void drain(Job& job);

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  Job* job_ = nullptr;
  std::size_t generation_ = 0;
  std::size_t active_ = 0;
  bool stopping_ = false;
};

/// SEMRSM_THREADS when set to a positive integer, else hardware concurrency.
std::size_t default_thread_count();

/// Runs serially when `pool` is null.
void parallel_for(WorkerPool* pool, std::size_t count,
                  const std::function<void(std::size_t)>& body);

}  // namespace semrsm
