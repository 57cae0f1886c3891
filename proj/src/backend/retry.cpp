#include "rankforge/backend/retry.hpp"

#include <algorithm>
#include <cmath>

#include "rankforge/core/error.hpp"

namespace rankforge::backend {

std::chrono::milliseconds backoff_delay(const BackoffPolicy& policy, int retry, double unit) {
  const double base = static_cast<double>(policy.base.count()) *
                      std::pow(policy.factor, std::max(0, retry - 1));
  const double scale = 1.0 - policy.jitter + 2.0 * policy.jitter * unit;
  const double ms = std::min(base * scale, static_cast<double>(policy.max_delay.count()));
  return std::chrono::milliseconds{std::llround(std::max(0.0, ms))};
}

bool is_retryable_status(int status) { return status == 429 || (status >= 500 && status <= 599); }

InFlightLimiter::InFlightLimiter(std::size_t limit) : limit_(limit) {
  if (limit_ < 1) throw ConfigError("in-flight limit must be >= 1");
}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return in_use_ < limit_; });
  ++in_use_;
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --in_use_;
  }
  cv_.notify_one();
}

}  // namespace rankforge::backend
