#include "knowada/backends/registry.hpp"

#include "knowada/backends/http_backend.hpp"
#include "knowada/backends/mock_backend.hpp"
#include "knowada/core/error.hpp"

namespace knowada {

namespace {

class ModelStamp final : public Backend {
public:
    ModelStamp(std::shared_ptr<Backend> inner, std::string model) : inner_(std::move(inner)), model_(std::move(model)) {}
    BackendResponse complete(const BackendRequest& request) override {
        if (!request.model_id.empty() || model_.empty()) return inner_->complete(request);
        BackendRequest stamped = request;
        stamped.model_id = model_;
        return inner_->complete(stamped);
    }

private:
    std::shared_ptr<Backend> inner_;
    std::string model_;
};

}  // namespace

void BackendSet::set(Role role, std::shared_ptr<Backend> inner, std::string model_id,
                     std::shared_ptr<ResponseCache> cache) {
    Slot slot;
    slot.counter = std::make_shared<CountingBackend>(std::move(inner));
    std::shared_ptr<Backend> chain = slot.counter;
    if (cache) chain = std::make_shared<CachingBackend>(chain, std::move(cache));
    slot.front = std::make_shared<ModelStamp>(chain, model_id);
    slot.model = std::move(model_id);
    slots_[role] = std::move(slot);
}

BackendSet BackendSet::from_config(const RunConfig& config, std::shared_ptr<Clock> clock) {
    if (!clock) clock = std::make_shared<SteadyClock>();
    auto cache = std::make_shared<ResponseCache>(config.cache_dir);
    BackendSet set;
    // Roles that share one endpoint also share one limiter.
    std::map<std::string, std::shared_ptr<RateLimiter>> limiters;
    std::map<std::string, std::shared_ptr<Backend>> mocks;
    for (Role role : all_roles) {
        const BackendSpec& spec = config.backends.at(role);
        std::shared_ptr<Backend> inner;
        if (spec.kind == BackendKind::mock) {
            auto& mock = mocks[spec.script.string()];
            if (!mock) mock = std::make_shared<MockBackend>(MockBackend::from_file(spec.script));
            inner = mock;
        } else {
            inner = std::make_shared<HttpBackend>(spec);
            if (spec.requests_per_second > 0) {
                auto& limiter = limiters[spec.base_url + spec.path];
                if (!limiter) limiter = std::make_shared<RateLimiter>(spec.requests_per_second, clock);
                inner = std::make_shared<RateLimitedBackend>(inner, limiter);
            }
        }
        set.set(role, std::move(inner), spec.model, cache);
    }
    return set;
}

Backend& BackendSet::operator[](Role role) const {
    const auto it = slots_.find(role);
    if (it == slots_.end())
        throw Error(ErrorKind::validation, "no backend configured for role '" + std::string(to_string(role)) + "'");
    return *it->second.front;
}

const std::string& BackendSet::model(Role role) const {
    static const std::string none;
    const auto it = slots_.find(role);
    return it == slots_.end() ? none : it->second.model;
}

std::uint64_t BackendSet::backend_calls() const {
    std::uint64_t total = 0;
    for (const auto& [role, slot] : slots_) total += slot.counter->calls();
    return total;
}

std::uint64_t BackendSet::backend_calls(Role role) const {
    const auto it = slots_.find(role);
    return it == slots_.end() ? 0 : it->second.counter->calls();
}

}  // namespace knowada
