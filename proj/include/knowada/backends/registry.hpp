#pragma once

#include <map>
#include <memory>

#include "knowada/backends/backend.hpp"
#include "knowada/backends/cache.hpp"
#include "knowada/backends/rate_limiter.hpp"

namespace knowada {

// One backend chain per role:
//   CachingBackend -> [RateLimitedBackend] -> CountingBackend -> mock | http
// and the role's configured model id is stamped on requests that carry none.
class BackendSet {
public:
    static BackendSet from_config(const RunConfig& config, std::shared_ptr<Clock> clock = nullptr);

    // Installs `inner` for `role` behind a counter and (if given) a cache.
    void set(Role role, std::shared_ptr<Backend> inner, std::string model_id = {},
             std::shared_ptr<ResponseCache> cache = nullptr);

    Backend& operator[](Role role) const;
    const std::string& model(Role role) const;

    // Calls that reached a concrete backend (cache misses), across roles.
    std::uint64_t backend_calls() const;
    std::uint64_t backend_calls(Role role) const;

private:
    struct Slot {
        std::shared_ptr<Backend> front;
        std::shared_ptr<CountingBackend> counter;
        std::string model;
    };
    std::map<Role, Slot> slots_;
};

}  // namespace knowada
