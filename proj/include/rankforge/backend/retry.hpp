#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>

namespace rankforge::backend {

struct BackoffPolicy {
  std::chrono::milliseconds base{1000};
  double factor = 2.0;
  double jitter = 0.2;  // delay scaled by a uniform factor in [1 - jitter, 1 + jitter]
  std::chrono::milliseconds max_delay{60000};
};

// Delay before retry number `retry` (1-based). `unit` is a uniform draw in
// [0, 1) that positions the jitter.
std::chrono::milliseconds backoff_delay(const BackoffPolicy& policy, int retry, double unit);

bool is_retryable_status(int status);

// Counting semaphore with a runtime limit; bounds outstanding wire requests.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(std::size_t limit);

  void acquire();
  void release();
  std::size_t limit() const { return limit_; }

  class Slot {
   public:
    explicit Slot(InFlightLimiter& limiter) : limiter_(limiter) { limiter_.acquire(); }
    ~Slot() { limiter_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    InFlightLimiter& limiter_;
  };

 private:
  std::size_t limit_;
  std::size_t in_use_ = 0;
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace rankforge::backend
