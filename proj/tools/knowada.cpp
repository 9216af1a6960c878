// knowada: command-line entry point. Exit codes: 0 success, 1 validation
// error, 2 backend/transport error, 3 partial completion (items skipped).

#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "knowada/cli/commands.hpp"
#include "knowada/cli/pipeline.hpp"
#include "knowada/core/error.hpp"

using namespace knowada;
using namespace knowada::cli;

namespace {

Rational threshold_or_default(const std::string& text, const GlobalOptions& g) {
    if (!text.empty()) return Rational::parse(text);
    if (g.config) return load_config(*g.config).threshold;
    return Rational(1, 5);
}

std::pair<std::string, fs::path> split_assignment(const std::string& s) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
        throw Error(ErrorKind::validation, "expected MODEL=PATH, got '" + s + "'");
    return {s.substr(0, eq), fs::path(s.substr(eq + 1))};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-gap probing, caption adaptation and proposition-level caption evaluation"};
    app.set_version_flag("--version", std::string(tool_version));
    app.require_subcommand(1);

    GlobalOptions g;
    std::string config, cache_dir, log_level = "info";
    std::size_t jobs = 0;
    std::uint64_t seed = 0;
    auto* config_opt = app.add_option("--config", config, "Run configuration (JSON)");
    auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--force", g.force, "Re-run stages even when outputs are up to date");
    auto* cache_opt = app.add_option("--cache-dir", cache_dir, "Response cache directory");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for randomised baselines");
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

    std::function<int()> action;

    // questions
    auto* questions = app.add_subcommand("questions", "Generate probe questions for each caption");
    std::string q_in, q_out;
    questions->add_option("--in", q_in, "Caption records")->required();
    questions->add_option("--out", q_out, "Question records")->required();
    questions->callback([&] { action = [&] { auto s = open_session(g); return cmd_questions(s, q_in, q_out); }; });

    // probe
    auto* probe = app.add_subcommand("probe", "Sample and judge VLM answers; compute difficulty");
    ProbeArgs pa;
    int m = 0;
    double temperature = 0;
    probe->add_option("--questions", pa.questions)->required();
    probe->add_option("--captions", pa.captions)->required();
    probe->add_option("--answers-out", pa.answers_out)->required();
    probe->add_option("--difficulty-out", pa.difficulty_out)->required();
    auto* m_opt = probe->add_option("-m,--samples", m, "Answers sampled per question");
    auto* t_opt = probe->add_option("--temperature", temperature, "Sampling temperature");
    probe->callback([&] {
        if (*m_opt) pa.m = m;
        if (*t_opt) pa.temperature = temperature;
        action = [&] { auto s = open_session(g); return cmd_probe(s, pa); };
    });

    // classify
    auto* classify = app.add_subcommand("classify", "Split questions into known and unknown at a threshold");
    std::string c_diff, c_questions, c_out, c_threshold;
    classify->add_option("--difficulty", c_diff)->required();
    classify->add_option("--questions", c_questions)->required();
    classify->add_option("--threshold", c_threshold, "e.g. 20% or 0.2 (default: config, else 20%)");
    classify->add_option("--out", c_out)->required();
    classify->callback([&] {
        action = [&] { return cmd_classify(c_diff, c_questions, threshold_or_default(c_threshold, g), c_out); };
    });

    // adapt
    auto* adapt = app.add_subcommand("adapt", "Rewrite captions (knowada, random, trim or simplify)");
    AdaptArgs aa;
    std::string a_class, a_questions;
    std::size_t a_k = 0;
    adapt->add_option("--mode", aa.mode)->check(CLI::IsMember({"knowada", "random", "trim", "simplify"}));
    adapt->add_option("--in", aa.in)->required();
    auto* a_class_opt = adapt->add_option("--classification", a_class);
    auto* a_q_opt = adapt->add_option("--questions", a_questions);
    adapt->add_option("--out", aa.out)->required();
    auto* a_k_opt = adapt->add_option("--k", a_k, "random: questions to drop; trim: sentences to drop");
    adapt->add_option("--degree", aa.degree, "simplify degree 1..5");
    adapt->callback([&] {
        if (*a_class_opt) aa.classification = a_class;
        if (*a_q_opt) aa.questions = a_questions;
        if (*a_k_opt) aa.k = a_k;
        action = [&] { auto s = open_session(g); return cmd_adapt(s, aa); };
    });

    // verify
    auto* verify = app.add_subcommand("verify", "Check that unknown content was removed and known content kept");
    VerifyArgs va;
    verify->add_option("--original", va.original)->required();
    verify->add_option("--adapted", va.adapted)->required();
    verify->add_option("--questions", va.questions)->required();
    verify->add_option("--classification", va.classification)->required();
    verify->add_option("--out", va.out)->required();
    verify->callback([&] { action = [&] { auto s = open_session(g); return cmd_verify(s, va); }; });

    // decompose
    auto* decomp = app.add_subcommand("decompose", "Split captions into atomic propositions");
    std::string d_in, d_out;
    decomp->add_option("--in", d_in)->required();
    decomp->add_option("--out", d_out)->required();
    decomp->callback([&] { action = [&] { auto s = open_session(g); return cmd_decompose(s, d_in, d_out); }; });

    // entail
    auto* entail = app.add_subcommand("entail", "Label propositions against premise captions");
    std::string e_props, e_premises, e_out;
    entail->add_option("--props", e_props)->required();
    entail->add_option("--premises", e_premises, "Caption records keyed by the propositions' parent id")->required();
    entail->add_option("--out", e_out)->required();
    entail->callback([&] { action = [&] { auto s = open_session(g); return cmd_entail(s, e_props, e_premises, e_out); }; });

    // score
    auto* score = app.add_subcommand("score", "Compute descriptiveness and contradiction precision/recall");
    ScoreArgs sa;
    std::string s_gl, s_rl, s_threshold, s_orientation;
    score->add_option("--generated", sa.generated)->required();
    score->add_option("--reference", sa.reference)->required();
    score->add_option("--out", sa.out, "Per-pair scores")->required();
    score->add_option("--summary", sa.aggregate, "Corpus summary JSON")->required();
    auto* gl_opt = score->add_option("--generated-labeled", s_gl);
    auto* rl_opt = score->add_option("--reference-labeled", s_rl);
    score->add_option("--model", sa.model);
    score->add_option("--caption-set", sa.caption_set);
    score->add_option("--threshold", s_threshold, "Threshold the captions were adapted at (for PR curves)");
    score->add_option("--orientation", s_orientation)->check(CLI::IsMember({"formula", "prose"}));
    gl_opt->needs(rl_opt);
    rl_opt->needs(gl_opt);
    score->callback([&] {
        if (*gl_opt) sa.generated_labeled = s_gl;
        if (*rl_opt) sa.reference_labeled = s_rl;
        if (!s_threshold.empty()) sa.threshold = Rational::parse(s_threshold);
        action = [&] {
            std::optional<Session> s;
            if (g.config) s = open_session(g);
            ContradictionOrientation o = s ? s->config.contradiction_orientation : ContradictionOrientation::formula;
            if (!s_orientation.empty()) o = parse_orientation(s_orientation);
            return cmd_score(s ? &*s : nullptr, sa, o);
        };
    });

    // agree
    auto* agree = app.add_subcommand("agree", "Human agreement and phi against automatic labels");
    std::string ag_ann, ag_auto, ag_out;
    agree->add_option("--annotations", ag_ann)->required();
    agree->add_option("--automatic", ag_auto, "Labelled propositions")->required();
    agree->add_option("--out", ag_out)->required();
    agree->callback([&] { action = [&] { return cmd_agree(ag_ann, ag_auto, ag_out); }; });

    // stats
    auto* stats = app.add_subcommand("stats", "Caption length and unknown-question statistics");
    std::string st_captions, st_adapted, st_class, st_model, st_out;
    stats->add_option("--captions", st_captions)->required();
    stats->add_option("--adapted", st_adapted)->required();
    stats->add_option("--classification", st_class)->required();
    stats->add_option("--model", st_model)->required();
    stats->add_option("--out", st_out)->required();
    stats->callback([&] { action = [&] { return cmd_stats(st_captions, st_adapted, st_class, st_model, st_out); }; });

    // overlap
    auto* overlap = app.add_subcommand("overlap", "Overlap of unknown questions across models");
    std::vector<std::string> ov_pairs;
    std::string ov_out;
    overlap->add_option("--classification", ov_pairs, "MODEL=PATH, repeatable")->required();
    overlap->add_option("--out", ov_out)->required();
    overlap->callback([&] {
        action = [&] {
            std::map<std::string, fs::path> by_model;
            for (const auto& p : ov_pairs) {
                auto [model, path] = split_assignment(p);
                if (!by_model.emplace(model, path).second)
                    throw Error(ErrorKind::validation, "model '" + model + "' given twice");
            }
            return cmd_overlap(by_model, ov_out);
        };
    });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Classification sizes and PR points across thresholds");
    std::string sw_diff, sw_questions, sw_out;
    std::vector<std::string> sw_thresholds;
    std::vector<std::string> sw_summaries;
    sweep->add_option("--difficulty", sw_diff)->required();
    sweep->add_option("--questions", sw_questions)->required();
    sweep->add_option("--thresholds", sw_thresholds, "Ascending, e.g. 0% 20% 40%")->required();
    sweep->add_option("--summary", sw_summaries, "Score summaries carrying a threshold, repeatable");
    sweep->add_option("--out", sw_out)->required();
    sweep->callback([&] {
        action = [&] {
            std::vector<Rational> ts;
            for (const auto& t : sw_thresholds) ts.push_back(Rational::parse(t));
            std::vector<fs::path> sums(sw_summaries.begin(), sw_summaries.end());
            return cmd_sweep(sw_diff, sw_questions, ts, sums, sw_out);
        };
    });

    // locations
    auto* loc = app.add_subcommand("locations", "Histogram of contradiction positions within captions");
    std::string lo_in, lo_out;
    loc->add_option("--labeled", lo_in)->required();
    loc->add_option("--out", lo_out)->required();
    loc->callback([&] { action = [&] { return cmd_locations(lo_in, lo_out); }; });

    // report
    auto* report = app.add_subcommand("report", "Results table, PR-curve CSV and summary");
    std::vector<std::string> rp_summaries;
    std::string rp_stats, rp_out;
    report->add_option("--summary", rp_summaries, "Score summaries, repeatable")->required();
    auto* rp_stats_opt = report->add_option("--stats", rp_stats, "Stats CSV");
    report->add_option("--out-dir", rp_out)->required();
    report->callback([&] {
        action = [&] {
            std::optional<fs::path> st;
            if (*rp_stats_opt) st = rp_stats;
            std::vector<fs::path> sums(rp_summaries.begin(), rp_summaries.end());
            return cmd_report(sums, st, rp_out);
        };
    });

    // run
    auto* run = app.add_subcommand("run", "Run a pipeline preset (curate or evaluate)");
    PipelineArgs pl;
    std::string preset, pl_captions, pl_gen, pl_ref, pl_adapted, pl_class, pl_model;
    run->add_option("preset", preset, "curate | evaluate")->required()->check(CLI::IsMember({"curate", "evaluate"}));
    run->add_option("--workdir", pl.workdir, "Directory for stage outputs and manifest.json")->required();
    auto* pl_captions_opt = run->add_option("--captions", pl_captions, "Caption records (curate input; evaluate stats)");
    auto* pl_gen_opt = run->add_option("--generated", pl_gen, "Generated captions (evaluate)");
    auto* pl_ref_opt = run->add_option("--reference", pl_ref, "Reference captions (evaluate)");
    auto* pl_adapted_opt = run->add_option("--adapted", pl_adapted, "Adapted captions (evaluate stats)");
    auto* pl_class_opt = run->add_option("--classification", pl_class, "Classification (evaluate stats)");
    auto* pl_model_opt = run->add_option("--model", pl_model, "Model name in reports (default: vlm model)");
    run->add_option("--caption-set", pl.caption_set, "Caption-set name in reports");
    run->callback([&] {
        pl.preset = parse_preset(preset);
        if (*pl_captions_opt) pl.captions = pl_captions;
        if (*pl_gen_opt) pl.generated = pl_gen;
        if (*pl_ref_opt) pl.reference = pl_ref;
        if (*pl_adapted_opt) pl.adapted = pl_adapted;
        if (*pl_class_opt) pl.classification = pl_class;
        if (*pl_model_opt) pl.model = pl_model;
        action = [&] {
            auto s = open_session(g);
            return run_pipeline(s, pl).exit_code;
        };
    });

    spdlog::set_default_logger(spdlog::stderr_color_mt("knowada"));
    spdlog::set_pattern("%Y-%m-%dT%H:%M:%S.%e %^%l%$ %v");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_code::success : exit_code::validation;
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return exit_code_for(e);
    }
    spdlog::set_level(spdlog::level::from_str(log_level));

    if (*config_opt) g.config = config;
    if (*jobs_opt) g.jobs = jobs;
    if (*cache_opt) g.cache_dir = cache_dir;
    if (*seed_opt) g.seed = seed;

    try {
        return action();
    } catch (const Error& e) {
        spdlog::error("{}", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_code::validation;
    }
}
