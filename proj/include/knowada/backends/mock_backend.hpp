#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "knowada/backends/backend.hpp"

namespace knowada {

// A fixture rule: every present condition must hold for the rule to fire.
struct MockPattern {
    std::optional<Role> role;
    std::vector<std::string> contains;  // substrings of the prompt
    std::optional<std::string> regex;   // ECMAScript, searched in the prompt
    std::optional<int> sample_index;
    std::optional<std::string> image_ref;
    std::string response;

    bool matches(const BackendRequest& request) const;
};

// Scripted backend. Exact cache_key matches win, then the first matching
// pattern. Anything else raises Error(unscripted) naming the key.
//
// Script file format:
//   {"responses": {"<cache_key>": "text", ...},
//    "patterns":  [{"role": "judge", "contains": ["..."], "regex": "...",
//                   "sample_index": 3, "image_ref": "...", "response": "..."}]}
class MockBackend final : public Backend {
public:
    MockBackend() = default;
    static MockBackend from_file(const std::filesystem::path& script);
    static MockBackend from_json(const Json& script);

    void add_response(const std::string& key, std::string text);
    void add_response(const BackendRequest& request, std::string text);
    void add_pattern(MockPattern pattern);

    BackendResponse complete(const BackendRequest& request) override;

private:
    struct CompiledPattern {
        MockPattern pattern;
        std::optional<std::regex> re;
    };
    std::map<std::string, std::string> responses_;
    std::vector<CompiledPattern> patterns_;
};

}  // namespace knowada
