#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "knowada/backends/backend.hpp"
#include "knowada/backends/prompts.hpp"
#include "knowada/core/types.hpp"

namespace knowada {

// A question or record that fell out of a stage, with the reason.
struct SkipEntry {
    std::string id;
    std::string stage;
    std::string reason;

    bool operator==(const SkipEntry&) const = default;
};

Json to_json(const SkipEntry& s);

// Deterministic id derived from (record_id, ordinal).
std::string question_id_for(std::string_view record_id, std::size_t ordinal);

// Parses a model's list answer: a JSON array of strings, an array of objects
// with a "text"/"question"/"proposition" string, or an object holding such an
// array. Code fences are tolerated. Throws Error(structured_output) with the
// raw text otherwise.
std::vector<std::string> parse_string_list(const std::string& raw);

// Asks the question generator for visual questions about the caption. Items
// that do not end in '?' are dropped, exact duplicates keep their first
// occurrence, and at most `cap` survive in response order. An empty result
// is logged as a warning.
std::vector<ProbeQuestion> generate_questions(const CaptionRecord& record, Backend& backend, std::size_t cap,
                                              const PromptLibrary& prompts = PromptLibrary::builtin());

// m independent VLM calls, sample_index 0..m-1. Any failure discards the
// partial set and propagates.
std::vector<AnswerSample> sample_answers(const ProbeQuestion& question, const std::string& image_ref,
                                         Backend& backend, int m, double temperature,
                                         const PromptLibrary& prompts = PromptLibrary::builtin());

// First CORRECT/INCORRECT word (case-insensitive) in the judge's reply, or
// unjudged when neither appears.
Verdict parse_verdict_token(const std::string& reply);

Verdict judge_answer(const ProbeQuestion& question, const AnswerSample& answer,
                     const std::string& ground_truth_caption, Backend& judge,
                     const PromptLibrary& prompts = PromptLibrary::builtin());

// Throws Error(contract) "no judgeable samples" when every sample is unjudged.
DifficultyReport compute_difficulty(std::span<const AnswerSample> samples);

// Exact df > T test by cross-multiplication.
bool is_unknown(const DifficultyReport& report, const Rational& threshold);

KnowledgeClassification classify_unknown(const std::string& record_id, std::span<const DifficultyReport> reports,
                                         const Rational& threshold);

// One classification per record in `questions` (order of first appearance).
// Questions without a report are in neither set.
std::vector<KnowledgeClassification> classify_records(std::span<const ProbeQuestion> questions,
                                                      std::span<const DifficultyReport> reports,
                                                      const Rational& threshold);

// Splits QA items into (known, unknown) by the same rule. Every question
// needs a report.
std::pair<std::vector<ProbeQuestion>, std::vector<ProbeQuestion>> filter_known_qa(
    std::span<const ProbeQuestion> questions, std::span<const DifficultyReport> reports, const Rational& threshold);

struct ProbeSettings {
    int m = 10;
    double temperature = 0.4;
    std::size_t jobs = 1;
};

struct ProbeOutcome {
    std::vector<AnswerSample> answers;       // sorted by (question_id, sample_index)
    std::vector<DifficultyReport> reports;   // sorted by question_id
    std::vector<SkipEntry> skipped;          // sorted by id
};

// Sample, judge and score every question. Backend failures and questions with
// no judgeable sample are skipped and listed, never scored.
ProbeOutcome run_probe(std::span<const ProbeQuestion> questions, const std::map<std::string, CaptionRecord>& captions,
                       Backend& vlm, Backend& judge, const ProbeSettings& settings,
                       const PromptLibrary& prompts = PromptLibrary::builtin());

}  // namespace knowada
