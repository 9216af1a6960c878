#include "knowada/backends/rate_limiter.hpp"

#include <cmath>
#include <thread>

#include "knowada/core/error.hpp"

namespace knowada {

void SteadyClock::sleep_until(time_point t) { std::this_thread::sleep_until(t); }

void VirtualClock::sleep_until(time_point t) {
    auto current = ticks_.load();
    while (current < t.time_since_epoch().count() &&
           !ticks_.compare_exchange_weak(current, t.time_since_epoch().count())) {
    }
}

RateLimiter::RateLimiter(double requests_per_second, std::shared_ptr<Clock> clock)
    : clock_(std::move(clock)) {
    if (!(requests_per_second > 0)) throw Error(ErrorKind::validation, "requests_per_second must be positive");
    max_per_window_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(requests_per_second)));
    // Below one request per second a single slot is spread over 1/rps seconds.
    window_ = requests_per_second >= 1.0
                  ? Clock::duration(std::chrono::seconds(1))
                  : Clock::duration(static_cast<Clock::duration::rep>(std::ceil(1e9 / requests_per_second)));
}

Clock::time_point RateLimiter::acquire() {
    std::lock_guard lock(mutex_);
    for (;;) {
        const auto now = clock_->now();
        while (!recent_.empty() && recent_.front() + window_ <= now) recent_.pop_front();
        if (recent_.size() < max_per_window_) {
            recent_.push_back(now);
            return now;
        }
        clock_->sleep_until(recent_.front() + window_);
    }
}

}  // namespace knowada
