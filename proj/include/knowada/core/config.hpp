#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "knowada/core/rational.hpp"
#include "knowada/core/records.hpp"

namespace knowada {

enum class Role { question_gen, vlm, judge, rewriter, decomposer, nli };
inline constexpr std::array<Role, 6> all_roles = {Role::question_gen, Role::vlm,        Role::judge,
                                                  Role::rewriter,     Role::decomposer, Role::nli};

std::string_view to_string(Role role);
Role parse_role(std::string_view s);

enum class BackendKind { mock, http };

struct BackendSpec {
    BackendKind kind = BackendKind::mock;
    std::string model;
    // mock
    std::filesystem::path script;
    // http
    std::string base_url;
    std::string path = "/v1/chat/completions";
    std::string api_key_env;  // name of the variable, never the key itself
    int timeout_ms = 60000;
    int max_retries = 3;
    int backoff_ms = 500;
    double requests_per_second = 0.0;  // 0 disables rate limiting
};

enum class ContradictionOrientation { formula, prose };

struct RunConfig {
    int sampling_m = 10;
    double sampling_temperature = 0.4;
    Rational threshold = Rational(1, 5);
    std::uint64_t seed = 0;
    std::size_t max_questions_per_caption = 32;
    std::filesystem::path cache_dir = ".knowada-cache";
    std::optional<std::filesystem::path> prompts_dir;
    ContradictionOrientation contradiction_orientation = ContradictionOrientation::formula;
    std::size_t jobs = 1;
    std::map<Role, BackendSpec> backends;

    // Resolved JSON form; its SHA-256 is the config hash recorded in manifests.
    Json to_json() const;
    std::string hash() const;
};

// Relative paths are resolved against `base_dir`. Rejects inline secrets,
// out-of-range values and roles without a backend (a "default" entry fills
// any role not listed).
RunConfig parse_config(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

std::string_view to_string(ContradictionOrientation o);
ContradictionOrientation parse_orientation(std::string_view s);

}  // namespace knowada
