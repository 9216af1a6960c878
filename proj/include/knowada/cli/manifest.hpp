#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "knowada/core/records.hpp"
#include "knowada/probe/probe.hpp"

namespace knowada {

inline constexpr const char* tool_version = "0.1.0";

struct StageRecord {
    std::string name;
    std::string status;  // "completed", "reused" or "failed"
    std::int64_t elapsed_ms = 0;
    std::map<std::string, std::string> outputs;  // file name -> digest
    std::string error;
};

struct RunManifest {
    std::string run_id;
    std::string preset;
    std::string config_hash;
    std::string tool_version = knowada::tool_version;
    std::map<std::string, std::string> inputs;  // label -> digest
    std::vector<StageRecord> stages;
    std::vector<SkipEntry> skipped;
    std::vector<std::string> warnings;
    std::uint64_t backend_calls = 0;
    bool completed = false;
};

Json to_json(const RunManifest& m);

// Derived from preset, config hash and input digests, so a rerun over the
// same inputs and config gets the same id.
std::string derive_run_id(const std::string& preset, const std::string& config_hash,
                          const std::map<std::string, std::string>& inputs);

// Runs pipeline stages, skipping those whose outputs are still valid. Each
// output gets a "<file>.meta.json" sidecar naming the run, the stage, the
// input digests, the config hash and its own digest; a stage is reused only
// when every output's sidecar still matches.
class StageRunner {
public:
    StageRunner(RunManifest& manifest, bool force) : manifest_(manifest), force_(force) {}

    using Inputs = std::map<std::string, std::filesystem::path>;
    using Outputs = std::vector<std::filesystem::path>;

    // Returns true when the stage ran, false when it was reused. Exceptions
    // from `body` are recorded as a failed stage and rethrown.
    bool run(const std::string& name, const Inputs& inputs, const Outputs& outputs, const std::function<void()>& body);

    static std::filesystem::path sidecar(const std::filesystem::path& output);

private:
    bool reusable(const std::string& name, const std::map<std::string, std::string>& digests, const Outputs& outputs) const;

    RunManifest& manifest_;
    bool force_;
};

}  // namespace knowada
