#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "knowada/backends/backend.hpp"

namespace knowada {

// OpenAI-style chat-completions client.
//
// Request body:  {"model", "temperature", "seed": sample_index,
//                 "messages": [{"role": "user", "content": ...}]}
// where content is the prompt string, or for requests with an image_ref a
// [{"type": "text"}, {"type": "image_url"}] part list.
// Response text: choices[0].message.content.
//
// Transport failures, 429 and 5xx are retried with exponential backoff
// (backoff_ms * 2^attempt) up to max_retries; any other non-2xx status fails
// immediately.
class HttpBackend final : public Backend {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpBackend(BackendSpec spec, Sleeper sleeper = {});

    BackendResponse complete(const BackendRequest& request) override;

    static std::string request_body(const BackendRequest& request, const std::string& model);
    static std::string parse_response_text(const std::string& body);

private:
    BackendSpec spec_;
    std::string scheme_host_port_;
    std::string path_;
    std::string bearer_;
    Sleeper sleep_;
};

}  // namespace knowada
