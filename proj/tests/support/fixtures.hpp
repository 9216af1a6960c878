#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "knowada/core/records.hpp"
#include "knowada/core/text.hpp"

namespace knowada::testing {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = fs::temp_directory_path() /
                ("knowada-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::string pad2(int i) { return (i < 10 ? "0" : "") + std::to_string(i); }

// Scripted curation world. Record i has three questions:
//   kite colour: every VLM sample right          -> df 0, known
//   bird count:  3 + i % 5 of m=10 samples wrong  -> df > 0.2, unknown
//   sky colour:  exactly 2 of 10 wrong            -> df = 0.2, known (boundary)
// The rewriter drops the bird sentence; the caption answerer then says
// "unknown" for the bird question, so the unknown question counts as removed
// and both known questions as retained.
struct CurateFixture {
    fs::path captions;
    fs::path script;
    fs::path config;
    fs::path cache;
    int records = 0;
};

inline int wrong_bird_samples(int i) { return 3 + i % 5; }

inline CurateFixture make_curate_fixture(const fs::path& dir, int n) {
    CurateFixture f;
    f.records = n;
    f.captions = dir / "captions.jsonl";
    f.script = dir / "mock.json";
    f.config = dir / "config.json";
    f.cache = dir / "cache";

    std::vector<Json> rows;
    Json patterns = Json::array();
    auto pattern = [&](const char* role, std::vector<std::string> contains, const std::string& response,
                       std::optional<int> sample = std::nullopt) {
        Json p{{"role", role}, {"contains", contains}, {"response", response}};
        if (sample) p["sample_index"] = *sample;
        patterns.push_back(p);
    };

    for (int i = 0; i < n; ++i) {
        const std::string tag = "Scene-" + pad2(i);
        const std::string birds = "It has " + std::to_string(2 + i) + " birds.";
        const std::string caption = tag + " shows a red kite. " + birds + " The sky is blue.";
        rows.push_back(Json{{"record_id", "rec-" + pad2(i)},
                            {"image_ref", "images/" + pad2(i) + ".jpg"},
                            {"caption", caption},
                            {"split", "train"},
                            {"source", i % 2 == 0 ? "human" : "synthetic"}});

        const std::string q_kite = "What color is the kite in scene " + pad2(i) + "?";
        const std::string q_birds = "How many birds are in scene " + pad2(i) + "?";
        const std::string q_sky = "What color is the sky in scene " + pad2(i) + "?";
        pattern("question_gen", {tag}, Json::array({q_kite, q_birds, q_sky}).dump());
        for (int s = 0; s < wrong_bird_samples(i); ++s) pattern("vlm", {q_birds}, "wrong", s);
        for (int s = 0; s < 2; ++s) pattern("vlm", {q_sky}, "wrong", s);
        pattern("rewriter", {"Description: " + tag}, tag + " shows a red kite. The sky is blue.");
        pattern("judge", {"using only the image description", q_birds, birds}, std::to_string(2 + i) + " birds");
    }
    pattern("vlm", {}, "right");
    pattern("judge", {"You are grading", "Model answer: wrong"}, "INCORRECT");
    pattern("judge", {"You are grading", "Model answer: right"}, "CORRECT");
    pattern("judge", {"using only the image description", "How many birds"}, "unknown");
    pattern("judge", {"using only the image description", "kite"}, "red");
    pattern("judge", {"using only the image description", "sky"}, "blue");
    pattern("nli", {"Premise: unknown"}, "0.1");
    pattern("nli", {"Hypothesis: unknown"}, "0.1");
    pattern("nli", {}, "0.95");

    write_jsonl(f.captions, rows);
    write_json(f.script, Json{{"responses", Json::object()}, {"patterns", patterns}});
    write_json(f.config, Json{{"sampling", {{"m", 10}, {"temperature", 0.4}}},
                              {"threshold", "20%"},
                              {"seed", 7},
                              {"cache", {{"dir", f.cache.string()}}},
                              {"jobs", 2},
                              {"backends", {{"default", {{"type", "mock"}, {"model", "mock-vlm"}, {"script", "mock.json"}}}}}});
    return f;
}

// Writes an evaluate world: every sentence is a proposition, and the judge
// answers ENTAILED when the premise contains the statement, else NEUTRAL.
inline void write_evaluate_world(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& gen_ref) {
    std::vector<Json> gen_rows, ref_rows;
    Json patterns = Json::array();
    auto decomposition = [&](const std::string& caption) {
        Json list = Json::array();
        std::string sentence;
        for (char c : caption) {
            sentence.push_back(c);
            if (c == '.') {
                list.push_back(std::string(trim(sentence)));
                sentence.clear();
            }
        }
        patterns.push_back({{"role", "decomposer"}, {"contains", {"Description:\n" + caption + "\n"}}, {"response", list.dump()}});
        return list;
    };
    int i = 0;
    for (const auto& [gen, ref] : gen_ref) {
        const std::string id = "rec-" + std::to_string(i++);
        gen_rows.push_back({{"record_id", id}, {"image_ref", "x"}, {"caption", gen}, {"split", "test"}, {"source", "human"}});
        ref_rows.push_back({{"record_id", id}, {"image_ref", "x"}, {"caption", ref}, {"split", "test"}, {"source", "human"}});
        const Json g = decomposition(gen);
        const Json r = decomposition(ref);
        for (const auto& [props, premise] : {std::pair{g, ref}, std::pair{r, gen}})
            for (const auto& p : props) {
                const std::string text = p.get<std::string>();
                patterns.push_back({{"role", "nli"},
                                    {"contains", {"(premise):\n" + premise + "\n", "(hypothesis):\n" + text + "\n"}},
                                    {"response", premise.find(text) != std::string::npos ? "ENTAILED" : "NEUTRAL"}});
            }
    }
    write_jsonl(dir / "generated.jsonl", gen_rows);
    write_jsonl(dir / "reference.jsonl", ref_rows);
    write_json(dir / "mock.json", Json{{"patterns", patterns}});
    write_json(dir / "config.json",
               Json{{"cache", {{"dir", (dir / "cache").string()}}},
                    {"backends", {{"default", {{"type", "mock"}, {"model", "eval-model"}, {"script", "mock.json"}}}}}});
}


}  // namespace knowada::testing
