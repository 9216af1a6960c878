#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>

#include "knowada/backends/backend.hpp"

namespace knowada {

class Clock {
public:
    using duration = std::chrono::nanoseconds;
    using time_point = std::chrono::time_point<std::chrono::steady_clock, duration>;

    virtual ~Clock() = default;
    virtual time_point now() = 0;
    virtual void sleep_until(time_point t) = 0;
};

class SteadyClock final : public Clock {
public:
    time_point now() override { return std::chrono::steady_clock::now(); }
    void sleep_until(time_point t) override;
};

// Time only moves when someone sleeps; used to test the limiter exactly.
class VirtualClock final : public Clock {
public:
    time_point now() override { return time_point(duration(ticks_.load())); }
    void sleep_until(time_point t) override;
    void advance(duration d) { ticks_ += d.count(); }

private:
    std::atomic<duration::rep> ticks_{0};
};

// Sliding-window limiter: at most max_per_window = max(1, floor(rps))
// acquisitions in any half-open window of window() length, which is one
// second, or 1/rps seconds when rps < 1.
class RateLimiter {
public:
    RateLimiter(double requests_per_second, std::shared_ptr<Clock> clock);

    // Blocks until a slot is free, then returns the time the slot was taken.
    Clock::time_point acquire();

    std::size_t max_per_window() const noexcept { return max_per_window_; }
    Clock::duration window() const noexcept { return window_; }

private:
    std::size_t max_per_window_;
    Clock::duration window_;
    std::shared_ptr<Clock> clock_;
    std::mutex mutex_;
    std::deque<Clock::time_point> recent_;
};

class RateLimitedBackend final : public Backend {
public:
    RateLimitedBackend(std::shared_ptr<Backend> inner, std::shared_ptr<RateLimiter> limiter)
        : inner_(std::move(inner)), limiter_(std::move(limiter)) {}

    BackendResponse complete(const BackendRequest& request) override {
        limiter_->acquire();
        return inner_->complete(request);
    }

private:
    std::shared_ptr<Backend> inner_;
    std::shared_ptr<RateLimiter> limiter_;
};

}  // namespace knowada
