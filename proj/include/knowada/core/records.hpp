#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "knowada/core/types.hpp"

namespace knowada {

using Json = nlohmann::ordered_json;

// Field names are the on-disk schema; keep them bit-exact.
Json to_json(const CaptionRecord& r);
Json to_json(const ProbeQuestion& q);
Json to_json(const AnswerSample& a);
Json to_json(const DifficultyReport& d);
Json to_json(const KnowledgeClassification& k);
Json to_json(const AdaptedCaption& a);
Json to_json(const Proposition& p);

// Each validates the type's invariants and throws Error(parse) on violation.
CaptionRecord caption_from_json(const Json& j);
ProbeQuestion question_from_json(const Json& j);
AnswerSample answer_from_json(const Json& j);
DifficultyReport difficulty_from_json(const Json& j);
KnowledgeClassification classification_from_json(const Json& j);
AdaptedCaption adapted_from_json(const Json& j);
Proposition proposition_from_json(const Json& j);

// Calls on_line(object, line_number) for every non-blank line. Parse failures
// are rethrown as Error(parse) prefixed with "<path>:<line>:".
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, std::size_t)>& on_line);

// Writes one compact object per line through a temp file + rename.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);
void write_json(const std::filesystem::path& path, const Json& value);
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Dataset files: order is preserved and ids are checked for uniqueness.
std::vector<CaptionRecord> load_dataset(const std::filesystem::path& path);
std::vector<ProbeQuestion> load_questions(const std::filesystem::path& path);
std::vector<AnswerSample> load_answers(const std::filesystem::path& path);
std::vector<DifficultyReport> load_difficulty(const std::filesystem::path& path);
std::vector<KnowledgeClassification> load_classifications(const std::filesystem::path& path);
std::vector<AdaptedCaption> load_adapted(const std::filesystem::path& path);
std::vector<Proposition> load_propositions(const std::filesystem::path& path);

template <typename T>
std::vector<Json> to_json_rows(const std::vector<T>& items) {
    std::vector<Json> rows;
    rows.reserve(items.size());
    for (const auto& item : items) rows.push_back(to_json(item));
    return rows;
}

template <typename T>
void save_records(const std::vector<T>& items, const std::filesystem::path& path) {
    write_jsonl(path, to_json_rows(items));
}

}  // namespace knowada
