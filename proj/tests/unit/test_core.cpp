#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <set>

#include "knowada/core/config.hpp"
#include "knowada/core/error.hpp"
#include "knowada/core/hashing.hpp"
#include "knowada/core/parallel.hpp"
#include "knowada/core/random.hpp"
#include "knowada/core/rational.hpp"
#include "knowada/core/records.hpp"
#include "knowada/core/text.hpp"
#include "support/fixtures.hpp"

using namespace knowada;
using knowada::testing::TempDir;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::validation;
}

}  // namespace

TEST_CASE("rational normalises and compares exactly") {
    CHECK(Rational(2, 10) == Rational(1, 5));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(0, 7) == Rational(0, 1));
    CHECK(Rational(1, 3) < Rational(34, 100));
    CHECK(Rational(2, 10) <= Rational(1, 5));
    CHECK_FALSE(Rational(2, 10) > Rational(1, 5));
    CHECK(kind_of([] { Rational(1, 0); }) == ErrorKind::contract);
}

TEST_CASE("rational parses percentages, decimals and fractions") {
    CHECK(Rational::parse("20%") == Rational(1, 5));
    CHECK(Rational::parse("12.5%") == Rational(1, 8));
    CHECK(Rational::parse("0.2") == Rational(1, 5));
    CHECK(Rational::parse(" 1/5 ") == Rational(1, 5));
    CHECK(Rational::parse("1") == Rational(1, 1));
    CHECK(Rational::parse("-0.5") == Rational(-1, 2));
    CHECK(Rational::parse(".25") == Rational(1, 4));
    CHECK(kind_of([] { Rational::parse("abc"); }) == ErrorKind::validation);
    CHECK(kind_of([] { Rational::parse(""); }) == ErrorKind::validation);
    CHECK(kind_of([] { Rational::parse("1/0"); }) == ErrorKind::contract);
}

TEST_CASE("rational renders finite decimals as decimals") {
    CHECK(Rational(1, 5).to_string() == "0.2");
    CHECK(Rational(3, 8).to_string() == "0.375");
    CHECK(Rational(2, 1).to_string() == "2");
    CHECK(Rational(1, 3).to_string() == "1/3");
    CHECK(Rational(-1, 4).to_string() == "-0.25");
    CHECK(Rational::parse(Rational(7, 40).to_string()) == Rational(7, 40));
}

TEST_CASE("sentence splitting") {
    CHECK(split_sentences("A dog runs. A cat sleeps!  Is it raining?") ==
          std::vector<std::string>{"A dog runs.", "A cat sleeps!", "Is it raining?"});
    CHECK(split_sentences("He said \"stop.\" Then left.") ==
          std::vector<std::string>{"He said \"stop.\"", "Then left."});
    CHECK(split_sentences("Dr. Smith waves, e.g. at a bus. Done") ==
          std::vector<std::string>{"Dr. Smith waves, e.g. at a bus.", "Done"});
    CHECK(split_sentences("The price is 3.50 dollars. Cheap.") ==
          std::vector<std::string>{"The price is 3.50 dollars.", "Cheap."});
    CHECK(split_sentences("   ").empty());
}

TEST_CASE("whitespace helpers") {
    CHECK(trim("  a b \n") == "a b");
    CHECK(normalize_whitespace(" a \t b\n\nc ") == "a b c");
    CHECK(word_count("A red kite,  flying high.") == 5);
    CHECK(word_count("") == 0);
    CHECK(upper_words("A red-kite, 2 birds") == std::vector<std::string>{"A", "RED", "KITE", "BIRDS"});
    CHECK(strip_code_fence("```json\n[1]\n```") == "[1]");
    CHECK(strip_code_fence("[1]") == "[1]");
}

TEST_CASE("sha256 matches the published test vector") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("records round-trip through JSON") {
    CaptionRecord c{"r1", "img/1.jpg", "A kite.", Split::eval, Source::synthetic};
    CHECK(caption_from_json(to_json(c)) == c);
    ProbeQuestion q{"q1", "r1", "What is it?"};
    CHECK(question_from_json(to_json(q)) == q);
    AnswerSample a{"q1", 3, "a kite", Verdict::correct};
    CHECK(answer_from_json(to_json(a)) == a);
    DifficultyReport d{"q1", 6, 4};
    CHECK(difficulty_from_json(to_json(d)) == d);
    KnowledgeClassification k{"r1", Rational(1, 5), {"q2"}, {"q1"}};
    CHECK(classification_from_json(to_json(k)) == k);
    AdaptedCaption ad{"r1", AdaptMethod::random, "A thing.", {"q2"}, {{"seed", "7"}}};
    CHECK(adapted_from_json(to_json(ad)) == ad);
    Proposition p{"r1/p0", "r1", 0, "There is a kite.", Label::contradicted};
    CHECK(proposition_from_json(to_json(p)) == p);
}

TEST_CASE("record validation") {
    CHECK(kind_of([] { question_from_json(Json{{"question_id", "q"}, {"record_id", "r"}, {"text", "no mark"}}); }) ==
          ErrorKind::parse);
    CHECK(kind_of([] { difficulty_from_json(Json{{"question_id", "q"}, {"num_correct", 0}, {"num_incorrect", 0}}); }) ==
          ErrorKind::parse);
    CHECK(kind_of([] {
              classification_from_json(Json{{"record_id", "r"},
                                            {"threshold", "0.2"},
                                            {"unknown_question_ids", {"q"}},
                                            {"known_question_ids", {"q"}}});
          }) == ErrorKind::parse);
    CHECK(kind_of([] {
              classification_from_json(Json{{"record_id", "r"},
                                            {"threshold", "1.5"},
                                            {"unknown_question_ids", Json::array()},
                                            {"known_question_ids", Json::array()}});
          }) == ErrorKind::parse);
    CHECK(kind_of([] { caption_from_json(Json{{"record_id", "r"}}); }) == ErrorKind::parse);
    CHECK_THROWS(DifficultyReport{"q", 0, 0}.difficulty());
    CHECK(DifficultyReport{"q", 6, 4}.difficulty() == Rational(2, 5));
}

TEST_CASE("jsonl files: blank lines, duplicates and line numbers") {
    TempDir dir;
    const auto path = dir / "captions.jsonl";
    knowada::testing::write_file(
        path,
        R"({"record_id":"a","image_ref":"x","caption":"c","split":"train","source":"human"})"
        "\n\n"
        R"({"record_id":"b","image_ref":"y","caption":"d","split":"test","source":"synthetic"})"
        "\n");
    const auto rows = load_dataset(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].split == Split::test);

    knowada::testing::write_file(
        path, R"({"record_id":"a","image_ref":"x","caption":"c","split":"train","source":"human"})"
              "\n"
              R"({"record_id":"a","image_ref":"x","caption":"c","split":"train","source":"human"})"
              "\n");
    try {
        load_dataset(path);
        FAIL("duplicate accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
    }

    knowada::testing::write_file(path, "{not json}\n");
    try {
        load_dataset(path);
        FAIL("bad json accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
}

TEST_CASE("config parsing") {
    TempDir dir;
    const Json j{{"threshold", "20%"},
                 {"backends",
                  {{"default", {{"type", "mock"}, {"script", "m.json"}, {"model", "m"}}},
                   {"vlm", {{"type", "http"}, {"base_url", "http://localhost:1"}, {"model", "v"},
                            {"api_key_env", "VLM_KEY"}}}}}};
    const RunConfig c = parse_config(j, dir.path());
    CHECK(c.threshold == Rational(1, 5));
    CHECK(c.sampling_m == 10);
    CHECK(c.backends.size() == all_roles.size());
    CHECK(c.backends.at(Role::vlm).kind == BackendKind::http);
    CHECK(c.backends.at(Role::judge).script == dir.path() / "m.json");

    Json secret = j;
    secret["backends"]["vlm"]["api_key"] = "sk-123";
    CHECK(kind_of([&] { parse_config(secret, dir.path()); }) == ErrorKind::validation);

    Json missing{{"backends", {{"vlm", {{"type", "mock"}, {"script", "m.json"}}}}}};
    CHECK(kind_of([&] { parse_config(missing, dir.path()); }) == ErrorKind::validation);

    Json bad_t = j;
    bad_t["threshold"] = "120%";
    CHECK(kind_of([&] { parse_config(bad_t, dir.path()); }) == ErrorKind::validation);

    // The hash covers semantics, not where the cache lives.
    RunConfig other = c;
    other.cache_dir = "/elsewhere";
    other.jobs = 8;
    CHECK(other.hash() == c.hash());
    other.threshold = Rational(2, 5);
    CHECK(other.hash() != c.hash());
}

TEST_CASE("seeded sampling is deterministic and in range") {
    auto e1 = seeded_engine(7, "rec-1");
    auto e2 = seeded_engine(7, "rec-1");
    auto e3 = seeded_engine(7, "rec-2");
    CHECK(e1() == e2());
    CHECK(e1() != e3());

    auto e = seeded_engine(1, "x");
    for (int i = 0; i < 1000; ++i) CHECK(uniform_below(e, 7) < 7);
    CHECK(uniform_below(e, 1) == 0);

    for (int trial = 0; trial < 50; ++trial) {
        const auto picks = sample_without_replacement(e, 10, 4);
        REQUIRE(picks.size() == 4);
        CHECK(std::is_sorted(picks.begin(), picks.end()));
        CHECK(std::set<std::size_t>(picks.begin(), picks.end()).size() == 4);
        CHECK(picks.back() < 10);
    }
    CHECK(sample_without_replacement(e, 3, 3) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("uniform_below is unbiased over a small bound") {
    auto e = seeded_engine(3, "hist");
    std::array<int, 3> hist{};
    for (int i = 0; i < 30000; ++i) ++hist[uniform_below(e, 3)];
    for (int h : hist) CHECK(std::abs(h - 10000) < 500);
}

TEST_CASE("parallel_for captures exceptions per index") {
    std::atomic<int> sum{0};
    const auto errors = parallel_for(100, 4, [&](std::size_t i) {
        if (i % 10 == 3) throw std::runtime_error("boom");
        sum += static_cast<int>(i);
    });
    REQUIRE(errors.size() == 100);
    int failed = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        CHECK(static_cast<bool>(errors[i]) == (i % 10 == 3));
        failed += errors[i] ? 1 : 0;
    }
    CHECK(failed == 10);
    CHECK(sum == 4950 - (3 + 13 + 23 + 33 + 43 + 53 + 63 + 73 + 83 + 93));
}

TEST_CASE("exit codes follow the error kind") {
    CHECK(exit_code_for(Error(ErrorKind::validation, "x")) == exit_code::validation);
    CHECK(exit_code_for(Error(ErrorKind::parse, "x")) == exit_code::validation);
    CHECK(exit_code_for(Error(ErrorKind::transport, "x")) == exit_code::backend);
    CHECK(exit_code_for(Error(ErrorKind::status, "x")) == exit_code::backend);
}
