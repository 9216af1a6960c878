#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "knowada/cli/commands.hpp"
#include "knowada/cli/manifest.hpp"

namespace knowada::cli {

enum class Preset { curate, evaluate };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view s);

struct PipelineArgs {
    Preset preset = Preset::curate;
    fs::path workdir;
    // curate input
    std::optional<fs::path> captions;
    // evaluate inputs (caption records joined by record_id)
    std::optional<fs::path> generated;
    std::optional<fs::path> reference;
    // optional curation artifacts for the evaluate stats table
    std::optional<fs::path> adapted;
    std::optional<fs::path> classification;
    std::optional<std::string> model;
    std::string caption_set = "generated";
};

struct PipelineResult {
    RunManifest manifest;
    int exit_code = 0;
};

// curate:   questions -> probe -> classify -> adapt -> verify
// evaluate: decompose -> entail -> score -> report
// Outputs land in `workdir` next to manifest.json. A stage error writes the
// manifest with the stages done so far and is rethrown.
PipelineResult run_pipeline(Session& s, const PipelineArgs& args);

}  // namespace knowada::cli
