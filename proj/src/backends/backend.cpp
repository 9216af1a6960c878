#include "knowada/backends/backend.hpp"

#include <charconv>

#include "knowada/core/hashing.hpp"

namespace knowada {

namespace {

void put_field(std::string& out, std::string_view name, std::string_view value) {
    out += name;
    out += ':';
    out += std::to_string(value.size());
    out += ':';
    out += value;
    out += '\n';
}

}  // namespace

std::string canonical_request(const BackendRequest& request) {
    // Shortest round-trip decimal form; identical on every conforming platform.
    char temp[64];
    const auto res = std::to_chars(temp, temp + sizeof temp, request.temperature);
    std::string out = "knowada-request-v1\n";
    put_field(out, "role", to_string(request.role));
    put_field(out, "model_id", request.model_id);
    put_field(out, "prompt", request.prompt);
    if (request.image_ref) {
        put_field(out, "image_ref", *request.image_ref);
    } else {
        out += "image_ref:none\n";
    }
    put_field(out, "temperature", std::string_view(temp, static_cast<std::size_t>(res.ptr - temp)));
    put_field(out, "sample_index", std::to_string(request.sample_index));
    return out;
}

std::string cache_key(const BackendRequest& request) { return sha256_hex(canonical_request(request)); }

}  // namespace knowada
