#ifndef DHBB_RATE_LIMITER_H_
#define DHBB_RATE_LIMITER_H_

#include <chrono>
#include <cstdint>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <utility>

namespace dhbb {

// Time source used by the rate limiter and the response cache. Tests swap
// in SimulatedClock so that pacing is checked without sleeping.
class Clock {
 public:
  using duration = std::chrono::nanoseconds;
  using time_point = std::chrono::time_point<std::chrono::steady_clock, duration>;

  virtual ~Clock() = default;
  virtual time_point now() = 0;
  virtual void sleep_until(time_point t) = 0;
  // Wall-clock seconds since the epoch (cache staleness, record timestamps).
  virtual std::int64_t unix_seconds() = 0;
};

class SystemClock : public Clock {
 public:
  time_point now() override;
  void sleep_until(time_point t) override;
  std::int64_t unix_seconds() override;
};

// Time moves only when someone sleeps or advance() is called.
class SimulatedClock : public Clock {
 public:
  explicit SimulatedClock(std::int64_t unix_start = 1'700'000'000) : unix_start_(unix_start) {}

  time_point now() override;
  void sleep_until(time_point t) override;
  std::int64_t unix_seconds() override;
  void advance(duration d);

 private:
  std::mutex mu_;
  time_point now_{};
  std::int64_t unix_start_;
};

struct RateLimitOptions {
  double requests_per_second = 5.0;
  int max_in_flight = 1;
  std::chrono::milliseconds min_interval{200};
};

// Serializes dispatch: consecutive permits are at least
// max(min_interval, 1s / requests_per_second) apart, and at most
// max_in_flight permits are alive at once.
class RateLimiter {
 public:
  class Permit {
   public:
    Permit() = default;
    explicit Permit(RateLimiter *owner) : owner_(owner) {}
    Permit(Permit &&other) noexcept : owner_(std::exchange(other.owner_, nullptr)) {}
    Permit &operator=(Permit &&other) noexcept;
    Permit(const Permit &) = delete;
    Permit &operator=(const Permit &) = delete;
    ~Permit() { release(); }

    void release();

   private:
    RateLimiter *owner_ = nullptr;
  };

  RateLimiter(RateLimitOptions options, std::shared_ptr<Clock> clock);

  Permit acquire();

  const RateLimitOptions &options() const { return options_; }
  Clock &clock() { return *clock_; }

 private:
  void release_one();

  RateLimitOptions options_;
  std::shared_ptr<Clock> clock_;
  Clock::duration interval_;
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  bool dispatched_ = false;
  Clock::time_point next_slot_{};
};

}  // namespace dhbb

#endif  // DHBB_RATE_LIMITER_H_
