#include "knowada/backends/mock_backend.hpp"

#include "knowada/core/error.hpp"

namespace knowada {

bool MockPattern::matches(const BackendRequest& request) const {
    if (role && *role != request.role) return false;
    if (sample_index && *sample_index != request.sample_index) return false;
    if (image_ref && (!request.image_ref || *image_ref != *request.image_ref)) return false;
    for (const auto& needle : contains)
        if (request.prompt.find(needle) == std::string::npos) return false;
    return true;
}

MockBackend MockBackend::from_json(const Json& script) {
    MockBackend mock;
    if (!script.is_object()) throw Error(ErrorKind::validation, "mock script must be a JSON object");
    try {
        if (script.contains("responses"))
            for (const auto& [key, text] : script.at("responses").items()) mock.add_response(key, text.get<std::string>());
        if (script.contains("patterns")) {
            for (const auto& p : script.at("patterns")) {
                MockPattern pattern;
                if (p.contains("role")) pattern.role = parse_role(p.at("role").get<std::string>());
                if (p.contains("contains")) {
                    const Json& c = p.at("contains");
                    if (c.is_string()) {
                        pattern.contains.push_back(c.get<std::string>());
                    } else {
                        for (const auto& s : c) pattern.contains.push_back(s.get<std::string>());
                    }
                }
                if (p.contains("regex")) pattern.regex = p.at("regex").get<std::string>();
                if (p.contains("sample_index")) pattern.sample_index = p.at("sample_index").get<int>();
                if (p.contains("image_ref")) pattern.image_ref = p.at("image_ref").get<std::string>();
                pattern.response = p.at("response").get<std::string>();
                mock.add_pattern(std::move(pattern));
            }
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::validation, std::string("malformed mock script: ") + e.what());
    }
    return mock;
}

MockBackend MockBackend::from_file(const std::filesystem::path& script) {
    try {
        return from_json(read_json(script));
    } catch (const Error& e) {
        throw Error(ErrorKind::validation, script.string() + ": " + e.what());
    }
}

void MockBackend::add_response(const std::string& key, std::string text) { responses_[key] = std::move(text); }

void MockBackend::add_response(const BackendRequest& request, std::string text) {
    add_response(cache_key(request), std::move(text));
}

void MockBackend::add_pattern(MockPattern pattern) {
    CompiledPattern compiled{std::move(pattern), std::nullopt};
    if (compiled.pattern.regex) {
        try {
            compiled.re.emplace(*compiled.pattern.regex, std::regex::ECMAScript);
        } catch (const std::regex_error& e) {
            throw Error(ErrorKind::validation, "bad mock regex '" + *compiled.pattern.regex + "': " + e.what());
        }
    }
    patterns_.push_back(std::move(compiled));
}

BackendResponse MockBackend::complete(const BackendRequest& request) {
    const std::string key = cache_key(request);
    if (const auto it = responses_.find(key); it != responses_.end()) return {it->second, false, 0};
    for (const auto& p : patterns_) {
        if (!p.pattern.matches(request)) continue;
        if (p.re && !std::regex_search(request.prompt, *p.re)) continue;
        return {p.pattern.response, false, 0};
    }
    throw Error(ErrorKind::unscripted, "unscripted request " + key + " (role " +
                                           std::string(to_string(request.role)) + ", sample " +
                                           std::to_string(request.sample_index) + ")");
}

}  // namespace knowada
