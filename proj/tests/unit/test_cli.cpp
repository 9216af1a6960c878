#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "knowada/cli/commands.hpp"
#include "knowada/cli/pipeline.hpp"
#include "knowada/cli/report.hpp"
#include "knowada/core/error.hpp"
#include "knowada/core/hashing.hpp"
#include "knowada/core/text.hpp"
#include "support/fixtures.hpp"

using namespace knowada;
using namespace knowada::cli;
using knowada::testing::TempDir;

namespace {

Session session_for(const fs::path& config, bool force = false) {
    GlobalOptions g;
    g.config = config;
    g.force = force;
    return open_session(g);
}

std::map<std::string, std::string> digests(const fs::path& dir, std::initializer_list<const char*> names) {
    std::map<std::string, std::string> out;
    for (const char* n : names) out[n] = file_digest(dir / n);
    return out;
}

const StageRecord& stage(const RunManifest& m, const std::string& name) {
    for (const auto& s : m.stages)
        if (s.name == name) return s;
    FAIL("no stage " << name);
    return m.stages.front();
}

}  // namespace

TEST_CASE("curate preset on a 3-record fixture") {
    TempDir dir;
    const auto f = knowada::testing::make_curate_fixture(dir.path(), 3);
    Session s = session_for(f.config);
    PipelineArgs args;
    args.preset = Preset::curate;
    args.workdir = dir / "run";
    args.captions = f.captions;
    const auto result = run_pipeline(s, args);
    CHECK(result.exit_code == exit_code::success);
    CHECK(result.manifest.completed);
    CHECK(result.manifest.stages.size() == 5);
    CHECK(result.manifest.backend_calls > 0);

    const auto questions = load_questions(args.workdir / "questions.jsonl");
    CHECK(questions.size() == 9);
    const auto reports = load_difficulty(args.workdir / "difficulty.jsonl");
    CHECK(reports.size() == 9);
    CHECK(load_answers(args.workdir / "answers.jsonl").size() == 90);
    const auto classes = load_classifications(args.workdir / "classification.jsonl");
    REQUIRE(classes.size() == 3);
    for (const auto& k : classes) {
        CHECK(k.unknown_question_ids.size() == 1);
        CHECK(k.known_question_ids.size() == 2);
    }
    const auto adapted = load_adapted(args.workdir / "adapted.jsonl");
    REQUIRE(adapted.size() == 3);
    CHECK(adapted[0].text == "Scene-00 shows a red kite. The sky is blue.");
    CHECK(adapted[0].removed_question_ids == classes[0].unknown_question_ids);

    const Json total = read_json(args.workdir / "robustness.jsonl.summary.json");
    CHECK(total["unknown_removed_count"] == 3);
    CHECK(total["known_retained_count"] == 6);

    const Json manifest = read_json(args.workdir / "manifest.json");
    CHECK(manifest["run_id"] == result.manifest.run_id);
    CHECK(read_json(StageRunner::sidecar(args.workdir / "adapted.jsonl"))["run_id"] == result.manifest.run_id);
}

TEST_CASE("resume reuses valid stages and reruns after an input change") {
    TempDir dir;
    const auto f = knowada::testing::make_curate_fixture(dir.path(), 2);
    PipelineArgs args;
    args.preset = Preset::curate;
    args.workdir = dir / "run";
    args.captions = f.captions;
    {
        Session s = session_for(f.config);
        run_pipeline(s, args);
    }
    const auto before = digests(args.workdir, {"questions.jsonl", "difficulty.jsonl", "adapted.jsonl", "robustness.jsonl"});

    Session again = session_for(f.config);
    const auto resumed = run_pipeline(again, args);
    for (const auto& st : resumed.manifest.stages) CHECK(st.status == "reused");
    CHECK(resumed.manifest.backend_calls == 0);
    CHECK(digests(args.workdir, {"questions.jsonl", "difficulty.jsonl", "adapted.jsonl", "robustness.jsonl"}) == before);

    // Hand-editing an intermediate output invalidates that stage only.
    auto lines = knowada::testing::read_file(args.workdir / "classification.jsonl");
    knowada::testing::write_file(args.workdir / "classification.jsonl", lines + "\n");
    Session third = session_for(f.config);
    const auto partial = run_pipeline(third, args);
    CHECK(stage(partial.manifest, "questions").status == "reused");
    CHECK(stage(partial.manifest, "classify").status == "completed");

    Session forced = session_for(f.config, true);
    const auto all = run_pipeline(forced, args);
    for (const auto& st : all.manifest.stages) CHECK(st.status == "completed");
    CHECK(all.manifest.backend_calls == 0);  // warm cache
    CHECK(digests(args.workdir, {"questions.jsonl", "difficulty.jsonl", "adapted.jsonl", "robustness.jsonl"}) == before);
}

TEST_CASE("a failing stage halts the preset and records what completed") {
    TempDir dir;
    const auto f = knowada::testing::make_curate_fixture(dir.path(), 2);
    // A missing input is rejected before any stage runs.
    Session s = session_for(f.config);
    PipelineArgs args;
    args.preset = Preset::curate;
    args.workdir = dir / "run";
    args.captions = dir / "missing.jsonl";
    CHECK_THROWS_AS(run_pipeline(s, args), Error);

    // An HTTP backend pointing nowhere fails the questions stage with a backend error.
    write_json(f.config, Json{{"cache", {{"dir", (dir / "cache2").string()}}},
                              {"backends",
                               {{"default", {{"type", "http"}, {"base_url", "http://127.0.0.1:9"}, {"max_retries", 0},
                                             {"timeout_ms", 200}}}}}});
    Session broken = session_for(f.config);
    args.captions = f.captions;
    try {
        run_pipeline(broken, args);
        FAIL("unreachable backend succeeded");
    } catch (const Error& e) {
        CHECK(exit_code_for(e) == exit_code::backend);
    }
    const Json manifest = read_json(args.workdir / "manifest.json");
    CHECK(manifest["completed"] == false);
    REQUIRE(manifest["stages"].size() == 1);
    CHECK(manifest["stages"][0]["status"] == "failed");
}

TEST_CASE("skipped items give a partial exit code and are listed") {
    TempDir dir;
    const auto f = knowada::testing::make_curate_fixture(dir.path(), 2);
    // A third record the question generator has no script for.
    auto text = knowada::testing::read_file(f.captions);
    text += Json{{"record_id", "rec-x"}, {"image_ref", "x"}, {"caption", "Unscripted scene."}, {"split", "train"},
                 {"source", "human"}}
                .dump() +
            "\n";
    knowada::testing::write_file(f.captions, text);
    Session s = session_for(f.config);
    PipelineArgs args;
    args.preset = Preset::curate;
    args.workdir = dir / "run";
    args.captions = f.captions;
    const auto result = run_pipeline(s, args);
    CHECK(result.exit_code == exit_code::partial);
    REQUIRE_FALSE(result.manifest.skipped.empty());
    CHECK(result.manifest.skipped[0].id == "rec-x");
    CHECK(result.manifest.skipped[0].stage == "questions");
    // The unprobed record is still adapted, unchanged.
    const auto adapted = load_adapted(args.workdir / "adapted.jsonl");
    CHECK(adapted.size() == 3);
}

TEST_CASE("evaluate preset: identical captions score perfectly") {
    TempDir dir;
    knowada::testing::write_evaluate_world(dir.path(), {{"A red kite flies. The sky is blue.", "A red kite flies. The sky is blue."},
                               {"Two dogs run. A ball rolls.", "Two dogs run. A ball rolls."}});
    Session s = session_for(dir / "config.json");
    PipelineArgs args;
    args.preset = Preset::evaluate;
    args.workdir = dir / "eval";
    args.generated = dir / "generated.jsonl";
    args.reference = dir / "reference.jsonl";
    const auto result = run_pipeline(s, args);
    CHECK(result.exit_code == exit_code::success);
    const Json summary = read_json(args.workdir / "summary.json");
    CHECK(summary["micro"]["desc_precision_exact"] == "1");
    CHECK(summary["micro"]["desc_recall_exact"] == "1");
    CHECK(summary["micro"]["contra_precision_exact"] == "0");
    CHECK(summary["micro"]["contra_recall_exact"] == "0");
    CHECK(summary["model"] == "eval-model");

    const std::string results = knowada::testing::read_file(args.workdir / "results.csv");
    CHECK(results.rfind(std::string(results_header) + "\n", 0) == 0);
    CHECK(results.find("eval-model,generated,0.0000,0.0000,1.0000,1.0000,") != std::string::npos);
    CHECK(knowada::testing::read_file(args.workdir / "stats.csv") == "source,model,records,C_o,C_r,Q_unk\n");
    CHECK_FALSE(result.manifest.warnings.empty());
}

TEST_CASE("evaluate preset: partial overlap is scored from labelled files") {
    TempDir dir;
    knowada::testing::write_evaluate_world(dir.path(), {{"A red kite flies. A dog barks.", "A red kite flies. The sky is blue. Birds sing."}});
    Session s = session_for(dir / "config.json");
    PipelineArgs args;
    args.preset = Preset::evaluate;
    args.workdir = dir / "eval";
    args.generated = dir / "generated.jsonl";
    args.reference = dir / "reference.jsonl";
    run_pipeline(s, args);
    const Json summary = read_json(args.workdir / "summary.json");
    CHECK(summary["micro"]["desc_precision_exact"] == "0.5");
    CHECK(summary["micro"]["desc_recall_exact"] == "1/3");
    CHECK(summary["mean_word_count"] == 7.0);
}

TEST_CASE("report: one row per summary, PR points per threshold, empty input rejected") {
    TempDir dir;
    auto summary = [&](const std::string& name, const char* threshold, double p, double r) {
        Json j{{"model", "m"},
               {"caption_set", "knowada"},
               {"threshold", threshold ? Json(threshold) : Json(nullptr)},
               {"pairs", 4},
               {"mean_word_count", 50.5},
               {"micro", {{"desc_precision", p}, {"desc_recall", r}, {"contra_precision", 0.1}, {"contra_recall", 0.2}}}};
        write_json(dir / name, j);
        return dir / name;
    };
    const std::vector<fs::path> sums{summary("a.json", "0.2", 0.8, 0.5), summary("b.json", "0.4", 0.9, 0.4)};
    CHECK(cmd_report(sums, std::nullopt, dir / "out") == exit_code::success);
    const std::string csv = knowada::testing::read_file(dir / "out" / "results.csv");
    CHECK(csv == std::string(results_header) +
                     "\nm,knowada,0.1000,0.2000,0.8000,0.5000,50.5\nm,knowada,0.1000,0.2000,0.9000,0.4000,50.5\n");
    const std::string pr = knowada::testing::read_file(dir / "out" / "pr_curve.csv");
    CHECK(std::count(pr.begin(), pr.end(), '\n') == 3);
    CHECK(fs::exists(dir / "out" / "summary.txt"));
    CHECK(fs::exists(dir / "out" / "results.md"));
    CHECK_THROWS_AS(cmd_report({}, std::nullopt, dir / "out"), Error);
}

TEST_CASE("stats csv round-trips through the reader") {
    TempDir dir;
    const std::vector<DatasetStatsRow> rows{{"human", "m", 3, 100.5, 80.25, 2.0}};
    write_text(dir / "stats.csv", stats_csv(rows));
    const auto back = read_stats_csv(dir / "stats.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].records == 3);
    CHECK(back[0].mean_adapted_words == 80.25);
}

TEST_CASE("agree command writes phi for every binarisation") {
    TempDir dir;
    std::vector<Json> ann, props;
    const std::vector<std::pair<std::array<const char*, 3>, const char*>> rows{
        {{"contradicted", "contradicted", "entailed"}, "contradicted"},
        {{"entailed", "entailed", "entailed"}, "entailed"},
        {{"entailed", "neutral", "contradicted"}, "neutral"},
        {{"contradicted", "contradicted", "contradicted"}, "entailed"},
        {{"entailed", "entailed", "neutral"}, "entailed"}};
    int i = 0;
    for (const auto& [labels, automatic] : rows) {
        const std::string id = "x/p" + std::to_string(i);
        ann.push_back({{"prop_id", id}, {"annotator_labels", {labels[0], labels[1], labels[2]}}});
        props.push_back({{"prop_id", id}, {"parent_id", "x"}, {"ordinal", i}, {"text", "t"}, {"label", automatic}});
        ++i;
    }
    write_jsonl(dir / "ann.jsonl", ann);
    write_jsonl(dir / "auto.jsonl", props);
    CHECK(cmd_agree(dir / "ann.jsonl", dir / "auto.jsonl", dir / "agree.json") == exit_code::success);
    const Json j = read_json(dir / "agree.json");
    CHECK(j["matched"] == 5);
    CHECK(j["no_majority"] == 1);
    // drop_neutral keeps rows 0, 1, 3, 4: human C,E,C,E vs auto C,E,E,E.
    const Json& dn = j["phi"]["drop_neutral"];
    CHECK(dn["table"]["a"] == 1);
    CHECK(dn["table"]["b"] == 1);
    CHECK(dn["table"]["c"] == 0);
    CHECK(dn["table"]["d"] == 2);
    CHECK(dn["phi"].get<double>() == doctest::Approx(1.0 / std::sqrt(3.0)));
}
