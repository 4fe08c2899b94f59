#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gkde {

//! Fixed-size worker pool for index-parallel loops. Work items are identified
//! by index and write to disjoint outputs, so results never depend on the
//! number of threads or the order in which items run.
class ThreadPool
{
public:
  //! threads == 0 picks std::thread::hardware_concurrency().
  explicit ThreadPool(std::size_t threads = 0);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  std::size_t size() const { return workers_.size() + 1; }

  //! Calls body(i) for every i in [0, count). The calling thread takes part.
  //! The first exception thrown by any item is rethrown after all items ran.
  void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

private:
  void worker_loop();
  void drain();

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t count_ = 0;
  std::size_t next_ = 0;
  std::size_t finished_ = 0;
  std::size_t generation_ = 0;
  std::exception_ptr error_;
  bool stop_ = false;
};

//! Runs body over [0, count) on `pool` when given, serially otherwise.
void parallel_for(ThreadPool* pool, std::size_t count,
                  const std::function<void(std::size_t)>& body);

} // namespace gkde
