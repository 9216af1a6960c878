#include "knowada/backends/cache.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "knowada/core/error.hpp"
#include "knowada/core/records.hpp"

namespace knowada {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create cache dir " + dir_.string() + ": " + ec.message());
}

fs::path ResponseCache::entry_path(const std::string& key) const {
    return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    const fs::path path = entry_path(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    try {
        const Json j = Json::parse(in);
        return j.at("text").get<std::string>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::io, "corrupt cache entry " + path.string() + ": " + e.what());
    }
}

bool ResponseCache::put(const std::string& key, const BackendRequest& request, const std::string& text) {
    const fs::path path = entry_path(key);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (fs::exists(path)) return false;

    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
             << std::chrono::steady_clock::now().time_since_epoch().count();
    const fs::path tmp = path.parent_path() / tmp_name.str();
    {
        const Json entry{{"key", key},
                         {"role", to_string(request.role)},
                         {"model_id", request.model_id},
                         {"sample_index", request.sample_index},
                         {"text", text}};
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(ErrorKind::io, "cannot write cache entry " + tmp.string());
        out << entry.dump() << '\n';
        if (!out) throw Error(ErrorKind::io, "cannot write cache entry " + tmp.string());
    }
    // A hard link never replaces an existing name, so the first writer wins.
    fs::create_hard_link(tmp, path, ec);
    fs::remove(tmp);
    if (ec) {
        if (ec == std::errc::file_exists) return false;
        throw Error(ErrorKind::io, "cannot publish cache entry " + path.string() + ": " + ec.message());
    }
    return true;
}

BackendResponse CachingBackend::complete(const BackendRequest& request) {
    const std::string key = cache_key(request);
    if (auto text = cache_->get(key)) {
        ++hits_;
        return {std::move(*text), true, 0};
    }
    ++misses_;
    BackendResponse response = inner_->complete(request);
    cache_->put(key, request, response.text);
    response.cached = false;
    return response;
}

}  // namespace knowada
