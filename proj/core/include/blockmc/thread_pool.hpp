#ifndef BLOCKMC_THREAD_POOL_HPP
#define BLOCKMC_THREAD_POOL_HPP

#include <atomic>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace blockmc {

// Persistent pool for per-epoch chain updates. run() hands out task indices
// to the workers and blocks until every task finished. With fewer than two
// workers everything executes inline on the caller.
class ThreadPool {
 public:
  explicit ThreadPool(int workers) {
    if (workers < 2) return;
    threads_.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int workers() const { return threads_.empty() ? 1 : static_cast<int>(threads_.size()); }

  void run(int count, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    if (threads_.empty()) {
      for (int i = 0; i < count; ++i) fn(i);
      return;
    }
    {
      std::lock_guard<std::mutex> lk(mu_);
      fn_ = &fn;
      count_ = count;
      next_.store(0, std::memory_order_relaxed);
      done_ = 0;
      ++generation_;
    }
    cv_.notify_all();
    std::unique_lock<std::mutex> lk(mu_);
    cv_done_.wait(lk, [this] { return done_ == count_; });
    fn_ = nullptr;
  }

 private:
  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* fn = nullptr;
      int count = 0;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        fn = fn_;
        count = count_;
      }
      if (!fn) continue;
      int finished = 0;
      for (;;) {
        const int idx = next_.fetch_add(1, std::memory_order_relaxed);
        if (idx >= count) break;
        (*fn)(idx);
        ++finished;
      }
      if (finished > 0) {
        std::lock_guard<std::mutex> lk(mu_);
        done_ += finished;
        if (done_ == count_) cv_done_.notify_one();
      } else {
        // Still need to report in case this worker saw no work at all but the
        // epoch is finishing; done_ is only advanced by workers that ran
        // tasks, so nothing to do here.
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_, cv_done_;
  const std::function<void(int)>* fn_ = nullptr;
  int count_ = 0;
  int done_ = 0;
  std::atomic<int> next_{0};
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

}  // namespace blockmc

#endif
