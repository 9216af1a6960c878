#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>

#include "knowada/backends/backend.hpp"

namespace knowada {

// Content-addressed response store: one file per cache_key under `dir`,
// sharded by the first two hex digits. Entries are write-once; a concurrent
// second writer loses the race and its file is discarded.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> get(const std::string& key) const;
    // Returns false when the key already existed (nothing is overwritten).
    bool put(const std::string& key, const BackendRequest& request, const std::string& text);

    std::filesystem::path entry_path(const std::string& key) const;
    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
};

class CachingBackend final : public Backend {
public:
    CachingBackend(std::shared_ptr<Backend> inner, std::shared_ptr<ResponseCache> cache)
        : inner_(std::move(inner)), cache_(std::move(cache)) {}

    BackendResponse complete(const BackendRequest& request) override;

    std::uint64_t hits() const noexcept { return hits_.load(); }
    std::uint64_t misses() const noexcept { return misses_.load(); }

private:
    std::shared_ptr<Backend> inner_;
    std::shared_ptr<ResponseCache> cache_;
    std::atomic<std::uint64_t> hits_{0};
    std::atomic<std::uint64_t> misses_{0};
};

}  // namespace knowada
