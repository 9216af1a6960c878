#include "knowada/cli/manifest.hpp"

#include <chrono>

#include <spdlog/spdlog.h>

#include "knowada/core/error.hpp"
#include "knowada/core/hashing.hpp"

namespace knowada {

namespace fs = std::filesystem;

Json to_json(const RunManifest& m) {
    Json stages = Json::array();
    for (const auto& s : m.stages) {
        Json outputs = Json::object();
        for (const auto& [file, digest] : s.outputs) outputs[file] = digest;
        Json j{{"name", s.name}, {"status", s.status}, {"elapsed_ms", s.elapsed_ms}, {"outputs", outputs}};
        if (!s.error.empty()) j["error"] = s.error;
        stages.push_back(std::move(j));
    }
    Json inputs = Json::object();
    for (const auto& [label, digest] : m.inputs) inputs[label] = digest;
    Json skipped = Json::array();
    for (const auto& s : m.skipped) skipped.push_back(to_json(s));
    return Json{{"run_id", m.run_id},
                {"preset", m.preset},
                {"config_hash", m.config_hash},
                {"tool_version", m.tool_version},
                {"inputs", inputs},
                {"stages", stages},
                {"skipped", skipped},
                {"warnings", m.warnings},
                {"backend_calls", m.backend_calls},
                {"completed", m.completed}};
}

std::string derive_run_id(const std::string& preset, const std::string& config_hash,
                          const std::map<std::string, std::string>& inputs) {
    std::string material = preset + "\n" + config_hash + "\n";
    for (const auto& [label, digest] : inputs) material += label + "=" + digest + "\n";
    return "run-" + sha256_hex(material).substr(0, 16);
}

fs::path StageRunner::sidecar(const fs::path& output) { return fs::path(output.string() + ".meta.json"); }

bool StageRunner::reusable(const std::string& name, const std::map<std::string, std::string>& digests,
                           const Outputs& outputs) const {
    if (force_) return false;
    for (const auto& out : outputs) {
        const fs::path meta = sidecar(out);
        if (!fs::exists(out) || !fs::exists(meta)) return false;
        try {
            const Json j = read_json(meta);
            if (j.at("stage").get<std::string>() != name) return false;
            if (j.at("config_hash").get<std::string>() != manifest_.config_hash) return false;
            if (j.at("output_digest").get<std::string>() != file_digest(out)) return false;
            std::map<std::string, std::string> recorded;
            for (const auto& [label, digest] : j.at("inputs").items()) recorded[label] = digest.get<std::string>();
            if (recorded != digests) return false;
        } catch (const std::exception&) {
            return false;
        }
    }
    return true;
}

bool StageRunner::run(const std::string& name, const Inputs& inputs, const Outputs& outputs,
                      const std::function<void()>& body) {
    std::map<std::string, std::string> digests;
    for (const auto& [label, path] : inputs) digests[label] = file_digest(path);

    StageRecord record;
    record.name = name;
    const auto started = std::chrono::steady_clock::now();
    const bool reuse = reusable(name, digests, outputs);
    if (reuse) {
        spdlog::info("stage {}: outputs up to date, reusing", name);
        record.status = "reused";
    } else {
        spdlog::info("stage {}: running", name);
        try {
            body();
        } catch (const std::exception& e) {
            record.status = "failed";
            record.error = e.what();
            manifest_.stages.push_back(std::move(record));
            throw;
        }
        record.status = "completed";
    }
    for (const auto& out : outputs) {
        const std::string digest = file_digest(out);
        record.outputs[out.filename().string()] = digest;
        if (reuse) continue;
        Json inputs_json = Json::object();
        for (const auto& [label, d] : digests) inputs_json[label] = d;
        write_json(sidecar(out), Json{{"run_id", manifest_.run_id},
                                      {"stage", name},
                                      {"config_hash", manifest_.config_hash},
                                      {"inputs", inputs_json},
                                      {"output_digest", digest}});
    }
    record.elapsed_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
    manifest_.stages.push_back(std::move(record));
    return !reuse;
}

}  // namespace knowada
