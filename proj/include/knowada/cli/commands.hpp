#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "knowada/analysis/analysis.hpp"
#include "knowada/backends/prompts.hpp"
#include "knowada/backends/registry.hpp"
#include "knowada/core/config.hpp"
#include "knowada/probe/probe.hpp"

namespace knowada::cli {

namespace fs = std::filesystem;

struct GlobalOptions {
    std::optional<fs::path> config;
    std::optional<std::size_t> jobs;
    bool force = false;
    std::optional<fs::path> cache_dir;
    std::optional<std::uint64_t> seed;
};

// Everything a backend-using command needs.
struct Session {
    RunConfig config;
    std::shared_ptr<BackendSet> backends;
    PromptLibrary prompts = PromptLibrary::builtin();
    std::size_t jobs = 1;
    bool force = false;
};

// Loads the config, applies global overrides and builds the backend chains.
Session open_session(const GlobalOptions& options);

// Applies --jobs/--force/--cache-dir/--seed to an already-built config.
void apply_overrides(RunConfig& config, const GlobalOptions& options);

// Writes `<out>.skips.jsonl` (always, possibly empty) and returns
// exit_code::partial when anything was skipped.
int finish_with_skips(const fs::path& out, const std::vector<SkipEntry>& skipped);
std::vector<SkipEntry> load_skips(const fs::path& path);

// ---- KnowAda curation --------------------------------------------------------

int cmd_questions(Session& s, const fs::path& in, const fs::path& out);

struct ProbeArgs {
    fs::path questions;
    fs::path captions;
    fs::path answers_out;
    fs::path difficulty_out;
    std::optional<int> m;
    std::optional<double> temperature;
};
int cmd_probe(Session& s, const ProbeArgs& args);

int cmd_classify(const fs::path& difficulty, const fs::path& questions, const Rational& threshold, const fs::path& out);

struct AdaptArgs {
    std::string mode = "knowada";
    fs::path in;
    std::optional<fs::path> classification;
    std::optional<fs::path> questions;
    fs::path out;
    std::optional<std::size_t> k;  // random: questions to drop (default: unknown-set size); trim: sentences
    int degree = 1;
};
int cmd_adapt(Session& s, const AdaptArgs& args);

struct VerifyArgs {
    fs::path original;
    fs::path adapted;
    fs::path questions;
    fs::path classification;
    fs::path out;
};
int cmd_verify(Session& s, const VerifyArgs& args);

// ---- DNLI evaluation ---------------------------------------------------------

int cmd_decompose(Session& s, const fs::path& in, const fs::path& out);
int cmd_entail(Session& s, const fs::path& props, const fs::path& premises, const fs::path& out);

struct ScoreArgs {
    fs::path generated;
    fs::path reference;
    fs::path out;
    fs::path aggregate;
    // When both are given the labelled propositions are scored directly.
    std::optional<fs::path> generated_labeled;
    std::optional<fs::path> reference_labeled;
    std::string model = "model";
    std::string caption_set = "captions";
    std::optional<Rational> threshold;
};
// `session` may be null when labelled inputs are supplied.
int cmd_score(Session* s, const ScoreArgs& args, ContradictionOrientation orientation);

// ---- analysis ----------------------------------------------------------------

int cmd_agree(const fs::path& annotations, const fs::path& automatic, const fs::path& out);
int cmd_stats(const fs::path& captions, const fs::path& adapted, const fs::path& classification,
              const std::string& model, const fs::path& out);
int cmd_overlap(const std::map<std::string, fs::path>& classification_by_model, const fs::path& out);
int cmd_sweep(const fs::path& difficulty, const fs::path& questions, const std::vector<Rational>& thresholds,
              const std::vector<fs::path>& summaries, const fs::path& out);
int cmd_locations(const fs::path& labeled, const fs::path& out);
int cmd_report(const std::vector<fs::path>& summaries, const std::optional<fs::path>& stats, const fs::path& out_dir);

std::vector<DatasetStatsRow> read_stats_csv(const fs::path& path);

}  // namespace knowada::cli
