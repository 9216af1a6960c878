#include "knowada/core/config.hpp"

#include "knowada/core/error.hpp"
#include "knowada/core/hashing.hpp"

namespace knowada {

namespace fs = std::filesystem;

std::string_view to_string(Role role) {
    switch (role) {
        case Role::question_gen: return "question_gen";
        case Role::vlm: return "vlm";
        case Role::judge: return "judge";
        case Role::rewriter: return "rewriter";
        case Role::decomposer: return "decomposer";
        case Role::nli: return "nli";
    }
    return "?";
}

Role parse_role(std::string_view s) {
    for (Role r : all_roles)
        if (to_string(r) == s) return r;
    throw Error(ErrorKind::validation, "unknown backend role '" + std::string(s) + "'");
}

std::string_view to_string(ContradictionOrientation o) {
    return o == ContradictionOrientation::formula ? "formula" : "prose";
}

ContradictionOrientation parse_orientation(std::string_view s) {
    if (s == "formula") return ContradictionOrientation::formula;
    if (s == "prose") return ContradictionOrientation::prose;
    throw Error(ErrorKind::validation, "unknown contradiction_orientation '" + std::string(s) + "'");
}

namespace {

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorKind::validation, "config: " + message); }

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const Json::exception&) {
        invalid(std::string("wrong type for '") + key + "'");
    }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return (base / p).lexically_normal();
}

BackendSpec parse_backend(const Json& j, const fs::path& base, std::string_view name) {
    if (!j.is_object()) invalid("backend '" + std::string(name) + "' must be an object");
    for (const char* secret : {"api_key", "key", "token", "bearer"})
        if (j.contains(secret))
            invalid("backend '" + std::string(name) + "' stores a credential inline; use api_key_env");
    BackendSpec spec;
    const auto type = get_or<std::string>(j, "type", "mock");
    if (type == "mock") {
        spec.kind = BackendKind::mock;
    } else if (type == "http") {
        spec.kind = BackendKind::http;
    } else {
        invalid("backend '" + std::string(name) + "' has unknown type '" + type + "'");
    }
    spec.model = get_or<std::string>(j, "model", "");
    spec.script = resolve(base, get_or<std::string>(j, "script", ""));
    spec.base_url = get_or<std::string>(j, "base_url", "");
    spec.path = get_or<std::string>(j, "path", spec.path);
    spec.api_key_env = get_or<std::string>(j, "api_key_env", "");
    spec.timeout_ms = get_or<int>(j, "timeout_ms", spec.timeout_ms);
    spec.max_retries = get_or<int>(j, "max_retries", spec.max_retries);
    spec.backoff_ms = get_or<int>(j, "backoff_ms", spec.backoff_ms);
    spec.requests_per_second = get_or<double>(j, "requests_per_second", 0.0);

    if (spec.kind == BackendKind::mock && spec.script.empty())
        invalid("mock backend '" + std::string(name) + "' needs a 'script'");
    if (spec.kind == BackendKind::http && spec.base_url.empty())
        invalid("http backend '" + std::string(name) + "' needs a 'base_url'");
    if (spec.timeout_ms <= 0 || spec.max_retries < 0 || spec.backoff_ms < 0 || spec.requests_per_second < 0)
        invalid("backend '" + std::string(name) + "' has a negative timeout, retry or rate setting");
    return spec;
}

Json backend_json(const BackendSpec& s) {
    Json j{{"type", s.kind == BackendKind::mock ? "mock" : "http"}, {"model", s.model}};
    if (s.kind == BackendKind::mock) {
        j["script"] = s.script.string();
    } else {
        j["base_url"] = s.base_url;
        j["path"] = s.path;
        j["api_key_env"] = s.api_key_env;
        j["timeout_ms"] = s.timeout_ms;
        j["max_retries"] = s.max_retries;
        j["backoff_ms"] = s.backoff_ms;
        j["requests_per_second"] = s.requests_per_second;
    }
    return j;
}

}  // namespace

RunConfig parse_config(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) invalid("top level must be an object");
    RunConfig c;
    if (j.contains("sampling")) {
        const Json& s = j.at("sampling");
        c.sampling_m = get_or<int>(s, "m", c.sampling_m);
        c.sampling_temperature = get_or<double>(s, "temperature", c.sampling_temperature);
    }
    if (c.sampling_m < 1) invalid("sampling.m must be >= 1");
    if (c.sampling_temperature < 0) invalid("sampling.temperature must be >= 0");

    if (j.contains("threshold")) {
        const Json& t = j.at("threshold");
        if (t.is_string()) {
            c.threshold = Rational::parse(t.get<std::string>());
        } else if (t.is_number()) {
            c.threshold = Rational::parse(t.dump());
        } else {
            invalid("threshold must be a string or number");
        }
    }
    if (c.threshold < Rational(0, 1) || c.threshold > Rational(1, 1)) invalid("threshold must be in [0, 1]");

    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.max_questions_per_caption = get_or<std::size_t>(j, "max_questions_per_caption", c.max_questions_per_caption);
    if (c.max_questions_per_caption < 1) invalid("max_questions_per_caption must be >= 1");
    c.jobs = get_or<std::size_t>(j, "jobs", c.jobs);
    if (c.jobs < 1) invalid("jobs must be >= 1");

    if (j.contains("cache")) c.cache_dir = get_or<std::string>(j.at("cache"), "dir", c.cache_dir.string());
    c.cache_dir = resolve(base_dir, c.cache_dir);
    if (j.contains("prompts") && j.at("prompts").contains("dir"))
        c.prompts_dir = resolve(base_dir, j.at("prompts").at("dir").get<std::string>());
    if (j.contains("metrics"))
        c.contradiction_orientation =
            parse_orientation(get_or<std::string>(j.at("metrics"), "contradiction_orientation", "formula"));

    if (!j.contains("backends") || !j.at("backends").is_object()) invalid("missing 'backends' object");
    const Json& backends = j.at("backends");
    std::optional<BackendSpec> fallback;
    for (const auto& [name, value] : backends.items()) {
        if (name == "default") {
            fallback = parse_backend(value, base_dir, name);
            continue;
        }
        c.backends[parse_role(name)] = parse_backend(value, base_dir, name);
    }
    for (Role r : all_roles) {
        if (c.backends.count(r) != 0) continue;
        if (!fallback) invalid("no backend for role '" + std::string(to_string(r)) + "' and no 'default'");
        c.backends[r] = *fallback;
    }
    return c;
}

RunConfig load_config(const fs::path& path) {
    const Json j = read_json(path);
    return parse_config(j, path.parent_path());
}

Json RunConfig::to_json() const {
    Json backends_json = Json::object();
    for (Role r : all_roles) backends_json[std::string(knowada::to_string(r))] = backend_json(backends.at(r));
    return Json{{"sampling", {{"m", sampling_m}, {"temperature", sampling_temperature}}},
                {"threshold", threshold.to_string()},
                {"seed", seed},
                {"max_questions_per_caption", max_questions_per_caption},
                {"cache", {{"dir", cache_dir.string()}}},
                {"prompts", {{"dir", prompts_dir ? prompts_dir->string() : std::string()}}},
                {"metrics", {{"contradiction_orientation", knowada::to_string(contradiction_orientation)}}},
                {"jobs", jobs},
                {"backends", backends_json}};
}

std::string RunConfig::hash() const {
    // Cache location and worker count do not change results.
    Json j = to_json();
    j.erase("cache");
    j.erase("jobs");
    // Mock scripts are part of the behaviour, so their bytes count too.
    for (Role r : all_roles) {
        const BackendSpec& spec = backends.at(r);
        if (spec.kind == BackendKind::mock && fs::exists(spec.script))
            j["backends"][std::string(knowada::to_string(r))]["script_digest"] = file_digest(spec.script);
    }
    return sha256_hex(j.dump());
}

}  // namespace knowada
