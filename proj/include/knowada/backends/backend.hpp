#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "knowada/core/config.hpp"

namespace knowada {

struct BackendRequest {
    Role role = Role::judge;
    std::string prompt;
    std::optional<std::string> image_ref;
    double temperature = 0.0;
    int sample_index = 0;
    std::string model_id;
};

struct BackendResponse {
    std::string text;
    bool cached = false;
    std::int64_t latency_ms = 0;
};

// Every model call in the toolkit goes through this interface. Implementations
// must be safe to call from several threads at once.
class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendResponse complete(const BackendRequest& request) = 0;
};

// Canonical, versioned byte serialisation of the fields that identify a call.
std::string canonical_request(const BackendRequest& request);

// Hex SHA-256 of canonical_request(). No whitespace or case normalisation.
std::string cache_key(const BackendRequest& request);

// Adapts a callable; handy for embedding and tests.
class CallbackBackend final : public Backend {
public:
    using Fn = std::function<std::string(const BackendRequest&)>;
    explicit CallbackBackend(Fn fn) : fn_(std::move(fn)) {}
    BackendResponse complete(const BackendRequest& request) override { return {fn_(request), false, 0}; }

private:
    Fn fn_;
};

// Counts calls that reach the wrapped backend.
class CountingBackend final : public Backend {
public:
    explicit CountingBackend(std::shared_ptr<Backend> inner) : inner_(std::move(inner)) {}
    BackendResponse complete(const BackendRequest& request) override {
        ++calls_;
        return inner_->complete(request);
    }
    std::uint64_t calls() const noexcept { return calls_.load(); }

private:
    std::shared_ptr<Backend> inner_;
    std::atomic<std::uint64_t> calls_{0};
};

}  // namespace knowada
