#include "knowada/cli/pipeline.hpp"

#include <spdlog/spdlog.h>

#include "knowada/core/error.hpp"
#include "knowada/core/hashing.hpp"

namespace knowada::cli {

std::string_view to_string(Preset p) { return p == Preset::curate ? "curate" : "evaluate"; }

Preset parse_preset(std::string_view s) {
    if (s == "curate") return Preset::curate;
    if (s == "evaluate") return Preset::evaluate;
    throw Error(ErrorKind::validation, "unknown preset '" + std::string(s) + "' (expected curate or evaluate)");
}

namespace {

fs::path skips_of(const fs::path& out) { return fs::path(out.string() + ".skips.jsonl"); }

const fs::path& require(const std::optional<fs::path>& p, const char* flag) {
    if (!p) throw Error(ErrorKind::validation, std::string("this preset needs ") + flag);
    if (!fs::exists(*p)) throw Error(ErrorKind::validation, "input not found: " + p->string());
    return *p;
}

void run_curate(Session& s, const PipelineArgs& args, StageRunner& runner, std::vector<fs::path>& skip_files) {
    const fs::path captions = require(args.captions, "--captions");
    const fs::path& dir = args.workdir;
    const fs::path questions = dir / "questions.jsonl";
    const fs::path answers = dir / "answers.jsonl";
    const fs::path difficulty = dir / "difficulty.jsonl";
    const fs::path classification = dir / "classification.jsonl";
    const fs::path adapted = dir / "adapted.jsonl";
    const fs::path robustness = dir / "robustness.jsonl";

    runner.run("questions", {{"captions", captions}}, {questions, skips_of(questions)},
               [&] { cmd_questions(s, captions, questions); });
    runner.run("probe", {{"captions", captions}, {"questions", questions}},
               {answers, difficulty, skips_of(difficulty)}, [&] {
                   cmd_probe(s, ProbeArgs{questions, captions, answers, difficulty, std::nullopt, std::nullopt});
               });
    runner.run("classify", {{"difficulty", difficulty}, {"questions", questions}}, {classification},
               [&] { cmd_classify(difficulty, questions, s.config.threshold, classification); });
    runner.run("adapt", {{"captions", captions}, {"classification", classification}, {"questions", questions}},
               {adapted, skips_of(adapted)}, [&] {
                   AdaptArgs a;
                   a.in = captions;
                   a.classification = classification;
                   a.questions = questions;
                   a.out = adapted;
                   cmd_adapt(s, a);
               });
    runner.run("verify",
               {{"captions", captions}, {"adapted", adapted}, {"questions", questions}, {"classification", classification}},
               {robustness, fs::path(robustness.string() + ".summary.json"), skips_of(robustness)},
               [&] { cmd_verify(s, VerifyArgs{captions, adapted, questions, classification, robustness}); });
    skip_files = {skips_of(questions), skips_of(difficulty), skips_of(adapted), skips_of(robustness)};
}

void run_evaluate(Session& s, const PipelineArgs& args, StageRunner& runner, RunManifest& manifest,
                  std::vector<fs::path>& skip_files) {
    const fs::path generated = require(args.generated, "--generated");
    const fs::path reference = require(args.reference, "--reference");
    const fs::path& dir = args.workdir;
    const fs::path props_gen = dir / "props_generated.jsonl";
    const fs::path props_ref = dir / "props_reference.jsonl";
    const fs::path labeled_gen = dir / "labeled_generated.jsonl";
    const fs::path labeled_ref = dir / "labeled_reference.jsonl";
    const fs::path scores = dir / "scores.jsonl";
    const fs::path summary = dir / "summary.json";
    const fs::path stats = dir / "stats.csv";

    runner.run("decompose_generated", {{"generated", generated}}, {props_gen, skips_of(props_gen)},
               [&] { cmd_decompose(s, generated, props_gen); });
    runner.run("decompose_reference", {{"reference", reference}}, {props_ref, skips_of(props_ref)},
               [&] { cmd_decompose(s, reference, props_ref); });
    // Generated propositions are judged against the reference and vice versa.
    runner.run("entail_generated", {{"props", props_gen}, {"premises", reference}}, {labeled_gen, skips_of(labeled_gen)},
               [&] { cmd_entail(s, props_gen, reference, labeled_gen); });
    runner.run("entail_reference", {{"props", props_ref}, {"premises", generated}}, {labeled_ref, skips_of(labeled_ref)},
               [&] { cmd_entail(s, props_ref, generated, labeled_ref); });

    const std::string model = args.model.value_or(s.backends->model(Role::vlm).empty() ? "model"
                                                                                         : s.backends->model(Role::vlm));
    runner.run("score",
               {{"generated", generated}, {"reference", reference}, {"labeled_generated", labeled_gen},
                {"labeled_reference", labeled_ref}},
               {scores, summary, skips_of(scores)}, [&] {
                   ScoreArgs a;
                   a.generated = generated;
                   a.reference = reference;
                   a.out = scores;
                   a.aggregate = summary;
                   a.generated_labeled = labeled_gen;
                   a.reference_labeled = labeled_ref;
                   a.model = model;
                   a.caption_set = args.caption_set;
                   cmd_score(&s, a, s.config.contradiction_orientation);
               });

    StageRunner::Inputs report_inputs{{"summary", summary}};
    const bool have_stats = args.captions && args.adapted && args.classification;
    if (have_stats) {
        report_inputs["captions"] = require(args.captions, "--captions");
        report_inputs["adapted"] = require(args.adapted, "--adapted");
        report_inputs["classification"] = require(args.classification, "--classification");
    } else {
        manifest.warnings.push_back("stats.csv has no rows: pass --captions, --adapted and --classification to fill it");
        spdlog::warn("{}", manifest.warnings.back());
    }
    runner.run("report", report_inputs,
               {stats, dir / "results.csv", dir / "results.md", dir / "pr_curve.csv", dir / "summary.txt"}, [&] {
                   if (have_stats)
                       cmd_stats(*args.captions, *args.adapted, *args.classification, model, stats);
                   else
                       write_text(stats, stats_csv({}));
                   cmd_report({summary}, stats, dir);
               });
    skip_files = {skips_of(props_gen), skips_of(props_ref), skips_of(labeled_gen), skips_of(labeled_ref),
                  skips_of(scores)};
}

}  // namespace

PipelineResult run_pipeline(Session& s, const PipelineArgs& args) {
    PipelineResult result;
    RunManifest& manifest = result.manifest;
    manifest.preset = std::string(to_string(args.preset));
    manifest.config_hash = s.config.hash();

    std::map<std::string, fs::path> inputs;
    if (args.captions) inputs["captions"] = *args.captions;
    if (args.preset == Preset::evaluate) {
        if (args.generated) inputs["generated"] = *args.generated;
        if (args.reference) inputs["reference"] = *args.reference;
        if (args.adapted) inputs["adapted"] = *args.adapted;
        if (args.classification) inputs["classification"] = *args.classification;
    }
    for (const auto& [label, path] : inputs) {
        if (!fs::exists(path)) throw Error(ErrorKind::validation, "input not found: " + path.string());
        manifest.inputs[label] = file_digest(path);
    }
    manifest.run_id = derive_run_id(manifest.preset, manifest.config_hash, manifest.inputs);
    fs::create_directories(args.workdir);

    const fs::path manifest_path = args.workdir / "manifest.json";
    StageRunner runner(manifest, s.force);
    std::vector<fs::path> skip_files;
    try {
        if (args.preset == Preset::curate)
            run_curate(s, args, runner, skip_files);
        else
            run_evaluate(s, args, runner, manifest, skip_files);
    } catch (...) {
        manifest.backend_calls = s.backends->backend_calls();
        write_json(manifest_path, to_json(manifest));
        throw;
    }
    for (const auto& f : skip_files) {
        const auto skips = load_skips(f);
        manifest.skipped.insert(manifest.skipped.end(), skips.begin(), skips.end());
    }
    manifest.backend_calls = s.backends->backend_calls();
    manifest.completed = true;
    write_json(manifest_path, to_json(manifest));
    result.exit_code = manifest.skipped.empty() ? exit_code::success : exit_code::partial;
    spdlog::info("{} finished: run {} with {} backend calls, {} skipped", manifest.preset, manifest.run_id,
                 manifest.backend_calls, manifest.skipped.size());
    return result;
}

}  // namespace knowada::cli
