#include "hres/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace hres {
namespace {

thread_local bool t_inside_worker = false;

class Pool {
 public:
  explicit Pool(int workers) {
    for (int i = 0; i < workers; ++i) threads_.emplace_back([this] { loop(); });
  }

  ~Pool() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int size() const { return static_cast<int>(threads_.size()); }

  void run(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::unique_lock lock(mutex_);
    body_ = &body;
    count_ = n;
    next_.store(0);
    active_ = static_cast<int>(threads_.size());
    error_ = nullptr;
    ++generation_;
    wake_.notify_all();
    lock.unlock();

    // The calling thread takes part as well.
    drain();

    lock.lock();
    done_.wait(lock, [this] { return active_ == 0; });
    body_ = nullptr;
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void drain() {
    bool saved = t_inside_worker;
    t_inside_worker = true;
    for (;;) {
      std::size_t i = next_.fetch_add(1);
      if (i >= count_) break;
      try {
        (*body_)(i);
      } catch (...) {
        std::lock_guard lock(mutex_);
        if (!error_) error_ = std::current_exception();
      }
    }
    t_inside_worker = saved;
  }

  void loop() {
    std::size_t seen = 0;
    for (;;) {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      lock.unlock();
      drain();
      lock.lock();
      if (--active_ == 0) done_.notify_all();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* body_ = nullptr;
  std::size_t count_ = 0;
  std::atomic<std::size_t> next_{0};
  std::size_t generation_ = 0;
  int active_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

std::mutex g_config_mutex;
std::mutex g_run_mutex;
int g_threads = 1;
std::unique_ptr<Pool> g_pool;

}  // namespace

void set_thread_count(int n) {
  std::lock_guard run_lock(g_run_mutex);
  std::lock_guard lock(g_config_mutex);
  g_threads = std::max(1, n);
  g_pool.reset();
  if (g_threads > 1) g_pool = std::make_unique<Pool>(g_threads - 1);
}

int thread_count() {
  std::lock_guard lock(g_config_mutex);
  return g_threads;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  if (t_inside_worker || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::unique_lock run_lock(g_run_mutex, std::try_to_lock);
  if (!run_lock.owns_lock() || !g_pool) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  g_pool->run(n, body);
}

}  // namespace hres
