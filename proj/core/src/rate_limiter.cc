#include "dhbb/rate_limiter.h"

#include <algorithm>
#include <thread>

namespace dhbb {

Clock::time_point SystemClock::now() {
  return std::chrono::time_point_cast<duration>(std::chrono::steady_clock::now());
}

void SystemClock::sleep_until(time_point t) { std::this_thread::sleep_until(t); }

std::int64_t SystemClock::unix_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Clock::time_point SimulatedClock::now() {
  std::lock_guard<std::mutex> lock(mu_);
  return now_;
}

void SimulatedClock::sleep_until(time_point t) {
  std::lock_guard<std::mutex> lock(mu_);
  now_ = std::max(now_, t);
}

std::int64_t SimulatedClock::unix_seconds() {
  std::lock_guard<std::mutex> lock(mu_);
  return unix_start_ +
         std::chrono::duration_cast<std::chrono::seconds>(now_.time_since_epoch()).count();
}

void SimulatedClock::advance(duration d) {
  std::lock_guard<std::mutex> lock(mu_);
  now_ += d;
}

RateLimiter::Permit &RateLimiter::Permit::operator=(Permit &&other) noexcept {
  if (this != &other) {
    release();
    owner_ = std::exchange(other.owner_, nullptr);
  }
  return *this;
}

void RateLimiter::Permit::release() {
  if (owner_) std::exchange(owner_, nullptr)->release_one();
}

RateLimiter::RateLimiter(RateLimitOptions options, std::shared_ptr<Clock> clock)
    : options_(options), clock_(std::move(clock)) {
  options_.max_in_flight = std::max(options_.max_in_flight, 1);
  Clock::duration per_request = std::chrono::seconds(0);
  if (options_.requests_per_second > 0) {
    per_request = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(1.0 / options_.requests_per_second));
  }
  interval_ = std::max<Clock::duration>(per_request, options_.min_interval);
}

RateLimiter::Permit RateLimiter::acquire() {
  std::unique_lock<std::mutex> lock(mu_);
  for (;;) {
    cv_.wait(lock, [this] { return in_flight_ < options_.max_in_flight; });
    Clock::time_point now = clock_->now();
    if (!dispatched_ || now >= next_slot_) {
      dispatched_ = true;
      next_slot_ = now + interval_;
      ++in_flight_;
      return Permit(this);
    }
    Clock::time_point wake = next_slot_;
    lock.unlock();
    clock_->sleep_until(wake);
    lock.lock();
  }
}

void RateLimiter::release_one() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

}  // namespace dhbb
