#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "knowada/backends/http_backend.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "knowada/core/error.hpp"
#include "knowada/core/records.hpp"

namespace knowada {

namespace {

constexpr std::size_t excerpt_limit = 512;

std::string excerpt(const std::string& body) {
    return body.size() <= excerpt_limit ? body : body.substr(0, excerpt_limit) + "...";
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackend::HttpBackend(BackendSpec spec, Sleeper sleeper) : spec_(std::move(spec)), sleep_(std::move(sleeper)) {
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };

    // Split "scheme://host[:port][/prefix]" into the client target and a path prefix.
    const std::string& url = spec_.base_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(ErrorKind::validation, "base_url needs a scheme: '" + url + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    scheme_host_port_ = url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + (spec_.path.empty() || spec_.path.front() == '/' ? spec_.path : "/" + spec_.path);

    if (!spec_.api_key_env.empty()) {
        const char* value = std::getenv(spec_.api_key_env.c_str());
        if (value == nullptr || *value == '\0')
            throw Error(ErrorKind::validation, "environment variable " + spec_.api_key_env + " is not set");
        bearer_ = value;
    }
}

std::string HttpBackend::request_body(const BackendRequest& request, const std::string& model) {
    Json content;
    if (request.image_ref) {
        content = Json::array({Json{{"type", "text"}, {"text", request.prompt}},
                               Json{{"type", "image_url"}, {"image_url", {{"url", *request.image_ref}}}}});
    } else {
        content = request.prompt;
    }
    const Json body{{"model", request.model_id.empty() ? model : request.model_id},
                    {"temperature", request.temperature},
                    {"seed", request.sample_index},
                    {"messages", Json::array({Json{{"role", "user"}, {"content", content}}})}};
    return body.dump();
}

std::string HttpBackend::parse_response_text(const std::string& body) {
    try {
        const Json j = Json::parse(body);
        const Json& content = j.at("choices").at(0).at("message").at("content");
        if (content.is_null()) return {};
        return content.get<std::string>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::structured_output, std::string("unexpected response body: ") + e.what(),
                    excerpt(body));
    }
}

BackendResponse HttpBackend::complete(const BackendRequest& request) {
    const auto started = std::chrono::steady_clock::now();
    const std::string body = request_body(request, spec_.model);

    httplib::Client client(scheme_host_port_);
    const auto timeout = std::chrono::milliseconds(spec_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    if (!bearer_.empty()) client.set_bearer_token_auth(bearer_);

    std::string last_failure;
    for (int attempt = 0; attempt <= spec_.max_retries; ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(static_cast<long long>(spec_.backoff_ms) << (attempt - 1));
            spdlog::debug("retrying {} in {} ms ({})", scheme_host_port_ + path_, delay.count(), last_failure);
            sleep_(delay);
        }
        auto result = client.Post(path_, body, "application/json");
        if (!result) {
            last_failure = httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 200 && result->status < 300) {
            BackendResponse response;
            response.text = parse_response_text(result->body);
            response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::steady_clock::now() - started)
                                      .count();
            return response;
        }
        const std::string message = "HTTP " + std::to_string(result->status) + " from " + scheme_host_port_ + path_;
        if (!retryable_status(result->status) || attempt == spec_.max_retries)
            throw Error(ErrorKind::status, message + ": " + excerpt(result->body), excerpt(result->body));
        last_failure = message;
    }
    throw Error(ErrorKind::transport, "endpoint " + scheme_host_port_ + path_ + " unreachable after " +
                                          std::to_string(spec_.max_retries + 1) + " attempts: " + last_failure);
}

}  // namespace knowada
