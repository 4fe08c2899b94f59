#include "gkde/parallel.hpp"

#include <algorithm>
#include <exception>
#include <utility>

namespace gkde {

ThreadPool::ThreadPool(std::size_t threads)
{
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  workers_.reserve(threads - 1);
  for (std::size_t i = 0; i + 1 < threads; ++i)
    workers_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool()
{
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& w : workers_)
    w.join();
}

void ThreadPool::drain()
{
  for (;;) {
    std::size_t i;
    const std::function<void(std::size_t)>* body;
    {
      std::lock_guard lock(mutex_);
      if (next_ >= count_)
        return;
      i = next_++;
      body = body_;
    }
    try {
      (*body)(i);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_)
        error_ = std::current_exception();
    }
    std::lock_guard lock(mutex_);
    if (++finished_ == count_)
      done_.notify_all();
  }
}

void ThreadPool::worker_loop()
{
  std::size_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_)
        return;
      seen = generation_;
    }
    drain();
  }
}

void ThreadPool::parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
  if (count == 0)
    return;
  {
    std::lock_guard lock(mutex_);
    body_ = &body;
    count_ = count;
    next_ = 0;
    finished_ = 0;
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();
  drain();
  std::unique_lock lock(mutex_);
  done_.wait(lock, [&] { return finished_ == count_; });
  body_ = nullptr;
  count_ = 0;
  if (error_)
    std::rethrow_exception(std::exchange(error_, nullptr));
}

void parallel_for(ThreadPool* pool, std::size_t count,
                  const std::function<void(std::size_t)>& body)
{
  if (pool != nullptr && pool->size() > 1) {
    pool->parallel_for(count, body);
    return;
  }
  for (std::size_t i = 0; i < count; ++i)
    body(i);
}

} // namespace gkde
