#include "knowada/probe/probe.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include <spdlog/spdlog.h>

#include "knowada/core/error.hpp"
#include "knowada/core/hashing.hpp"
#include "knowada/core/parallel.hpp"
#include "knowada/core/records.hpp"
#include "knowada/core/text.hpp"

namespace knowada {

Json to_json(const SkipEntry& s) { return Json{{"id", s.id}, {"stage", s.stage}, {"reason", s.reason}}; }

std::string question_id_for(std::string_view record_id, std::size_t ordinal) {
    return "q-" + sha256_hex(std::string(record_id) + '\n' + std::to_string(ordinal)).substr(0, 16);
}

namespace {

std::optional<std::string> item_text(const Json& item) {
    if (item.is_string()) return item.get<std::string>();
    if (item.is_object())
        for (const char* key : {"text", "question", "proposition"})
            if (item.contains(key) && item.at(key).is_string()) return item.at(key).get<std::string>();
    return std::nullopt;
}

std::optional<std::vector<std::string>> list_of_text(const Json& arr) {
    if (!arr.is_array()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& item : arr) {
        auto text = item_text(item);
        if (!text) return std::nullopt;
        out.push_back(std::move(*text));
    }
    return out;
}

}  // namespace

std::vector<std::string> parse_string_list(const std::string& raw) {
    const std::string body = strip_code_fence(raw);
    Json j;
    try {
        j = Json::parse(body);
    } catch (const Json::exception&) {
        throw Error(ErrorKind::structured_output, "backend response is not JSON", raw);
    }
    if (auto list = list_of_text(j)) return *list;
    if (j.is_object())
        for (const auto& [key, value] : j.items())
            if (auto list = list_of_text(value)) return *list;
    throw Error(ErrorKind::structured_output, "backend response is not a list of strings", raw);
}

std::vector<ProbeQuestion> generate_questions(const CaptionRecord& record, Backend& backend, std::size_t cap,
                                              const PromptLibrary& prompts) {
    if (trim(record.caption).empty())
        throw Error(ErrorKind::contract, "record '" + record.record_id + "' has an empty caption");
    if (cap == 0) throw Error(ErrorKind::contract, "question cap must be positive");

    BackendRequest request;
    request.role = Role::question_gen;
    request.prompt = prompts.render(prompt_names::question_generation, {{"caption", record.caption}});
    const auto response = backend.complete(request);

    std::vector<ProbeQuestion> questions;
    std::set<std::string> seen;
    for (const auto& raw : parse_string_list(response.text)) {
        const std::string text(trim(raw));
        if (text.empty() || text.back() != '?') {
            spdlog::warn("record {}: dropping generated item without '?': {}", record.record_id, text);
            continue;
        }
        if (!seen.insert(text).second) continue;
        if (questions.size() == cap) break;
        questions.push_back({question_id_for(record.record_id, questions.size()), record.record_id, text});
    }
    if (questions.empty()) spdlog::warn("record {}: no questions parsed; it will be skipped", record.record_id);
    return questions;
}

std::vector<AnswerSample> sample_answers(const ProbeQuestion& question, const std::string& image_ref,
                                         Backend& backend, int m, double temperature, const PromptLibrary& prompts) {
    if (m < 1) throw Error(ErrorKind::contract, "m must be >= 1");
    BackendRequest request;
    request.role = Role::vlm;
    request.prompt = prompts.render(prompt_names::vlm_answer, {{"question", question.text}});
    request.image_ref = image_ref;
    request.temperature = temperature;

    std::vector<AnswerSample> samples;
    samples.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        request.sample_index = i;
        samples.push_back({question.question_id, i, backend.complete(request).text, Verdict::unjudged});
    }
    return samples;
}

Verdict parse_verdict_token(const std::string& reply) {
    for (const auto& word : upper_words(reply)) {
        if (word == "CORRECT") return Verdict::correct;
        if (word == "INCORRECT") return Verdict::incorrect;
    }
    return Verdict::unjudged;
}

Verdict judge_answer(const ProbeQuestion& question, const AnswerSample& answer, const std::string& ground_truth_caption,
                     Backend& judge, const PromptLibrary& prompts) {
    if (answer.verdict != Verdict::unjudged)
        throw Error(ErrorKind::contract, "answer " + answer.question_id + "#" + std::to_string(answer.sample_index) +
                                             " is already judged");
    BackendRequest request;
    request.role = Role::judge;
    request.prompt = prompts.render(prompt_names::judge_answer,
                                    {{"caption", ground_truth_caption}, {"question", question.text}, {"answer", answer.text}});
    const std::string reply = judge.complete(request).text;
    const Verdict verdict = parse_verdict_token(reply);
    if (verdict == Verdict::unjudged)
        spdlog::warn("question {} sample {}: judge reply has no CORRECT/INCORRECT token: {}", question.question_id,
                     answer.sample_index, reply);
    return verdict;
}

DifficultyReport compute_difficulty(std::span<const AnswerSample> samples) {
    DifficultyReport report;
    if (!samples.empty()) report.question_id = samples.front().question_id;
    for (const auto& s : samples) {
        if (s.question_id != report.question_id)
            throw Error(ErrorKind::contract, "samples from different questions passed to compute_difficulty");
        if (s.verdict == Verdict::correct) ++report.num_correct;
        if (s.verdict == Verdict::incorrect) ++report.num_incorrect;
    }
    if (report.num_correct + report.num_incorrect == 0)
        throw Error(ErrorKind::contract, "no judgeable samples for question '" + report.question_id + "'");
    return report;
}

bool is_unknown(const DifficultyReport& report, const Rational& threshold) { return report.difficulty() > threshold; }

KnowledgeClassification classify_unknown(const std::string& record_id, std::span<const DifficultyReport> reports,
                                         const Rational& threshold) {
    if (threshold < Rational(0, 1) || threshold > Rational(1, 1))
        throw Error(ErrorKind::contract, "threshold must be in [0, 1]");
    KnowledgeClassification k;
    k.record_id = record_id;
    k.threshold = threshold;
    for (const auto& r : reports) (is_unknown(r, threshold) ? k.unknown_question_ids : k.known_question_ids).insert(r.question_id);
    return k;
}

std::vector<KnowledgeClassification> classify_records(std::span<const ProbeQuestion> questions,
                                                      std::span<const DifficultyReport> reports,
                                                      const Rational& threshold) {
    std::map<std::string, const DifficultyReport*> by_question;
    for (const auto& r : reports) by_question[r.question_id] = &r;

    std::vector<std::string> order;
    std::map<std::string, std::vector<DifficultyReport>> grouped;
    for (const auto& q : questions) {
        auto [it, inserted] = grouped.try_emplace(q.record_id);
        if (inserted) order.push_back(q.record_id);
        if (const auto r = by_question.find(q.question_id); r != by_question.end()) it->second.push_back(*r->second);
    }
    std::vector<KnowledgeClassification> out;
    out.reserve(order.size());
    for (const auto& record_id : order) out.push_back(classify_unknown(record_id, grouped[record_id], threshold));
    return out;
}

std::pair<std::vector<ProbeQuestion>, std::vector<ProbeQuestion>> filter_known_qa(
    std::span<const ProbeQuestion> questions, std::span<const DifficultyReport> reports, const Rational& threshold) {
    if (threshold < Rational(0, 1) || threshold > Rational(1, 1))
        throw Error(ErrorKind::contract, "threshold must be in [0, 1]");
    std::map<std::string, const DifficultyReport*> by_question;
    for (const auto& r : reports) by_question[r.question_id] = &r;
    std::pair<std::vector<ProbeQuestion>, std::vector<ProbeQuestion>> out;
    for (const auto& q : questions) {
        const auto it = by_question.find(q.question_id);
        if (it == by_question.end())
            throw Error(ErrorKind::validation, "question '" + q.question_id + "' has no difficulty report");
        (is_unknown(*it->second, threshold) ? out.second : out.first).push_back(q);
    }
    return out;
}

ProbeOutcome run_probe(std::span<const ProbeQuestion> questions, const std::map<std::string, CaptionRecord>& captions,
                       Backend& vlm, Backend& judge, const ProbeSettings& settings, const PromptLibrary& prompts) {
    struct Slot {
        std::vector<AnswerSample> answers;
        std::optional<DifficultyReport> report;
        std::optional<SkipEntry> skip;
    };
    std::vector<Slot> slots(questions.size());

    const auto errors = parallel_for(questions.size(), settings.jobs, [&](std::size_t i) {
        const ProbeQuestion& q = questions[i];
        Slot& slot = slots[i];
        const auto caption = captions.find(q.record_id);
        if (caption == captions.end()) {
            slot.skip = SkipEntry{q.question_id, "probe", "no caption for record '" + q.record_id + "'"};
            return;
        }
        std::vector<AnswerSample> samples;
        try {
            samples = sample_answers(q, caption->second.image_ref, vlm, settings.m, settings.temperature, prompts);
            for (auto& s : samples) s.verdict = judge_answer(q, s, caption->second.caption, judge, prompts);
        } catch (const Error& e) {
            spdlog::error("question {} failed: {}", q.question_id, e.what());
            slot.skip = SkipEntry{q.question_id, "probe", e.what()};
            return;
        }
        slot.answers = samples;
        try {
            slot.report = compute_difficulty(samples);
        } catch (const Error& e) {
            spdlog::warn("question {} dropped: {}", q.question_id, e.what());
            slot.skip = SkipEntry{q.question_id, "probe", e.what()};
        }
    });

    ProbeOutcome out;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                out.skipped.push_back({questions[i].question_id, "probe", e.what()});
            }
            continue;
        }
        auto& slot = slots[i];
        out.answers.insert(out.answers.end(), slot.answers.begin(), slot.answers.end());
        if (slot.report) out.reports.push_back(*slot.report);
        if (slot.skip) out.skipped.push_back(*slot.skip);
    }
    std::sort(out.answers.begin(), out.answers.end(), [](const auto& a, const auto& b) {
        return std::tie(a.question_id, a.sample_index) < std::tie(b.question_id, b.sample_index);
    });
    std::sort(out.reports.begin(), out.reports.end(),
              [](const auto& a, const auto& b) { return a.question_id < b.question_id; });
    std::sort(out.skipped.begin(), out.skipped.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

}  // namespace knowada
