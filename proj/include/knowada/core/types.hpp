#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "knowada/core/rational.hpp"

namespace knowada {

enum class Split { train, eval, test };
enum class Source { human, synthetic };
enum class Verdict { correct, incorrect, unjudged };
enum class AdaptMethod { knowada, random, trim, simplify };
enum class Label { entailed, contradicted, neutral, unlabeled };

std::string_view to_string(Split v);
std::string_view to_string(Source v);
std::string_view to_string(Verdict v);
std::string_view to_string(AdaptMethod v);
std::string_view to_string(Label v);

// Each throws Error(validation) on an unknown name.
Split parse_split(std::string_view s);
Source parse_source(std::string_view s);
Verdict parse_verdict(std::string_view s);
AdaptMethod parse_adapt_method(std::string_view s);
Label parse_label(std::string_view s);

struct CaptionRecord {
    std::string record_id;
    std::string image_ref;
    std::string caption;
    Split split = Split::train;
    Source source = Source::human;

    bool operator==(const CaptionRecord&) const = default;
};

struct ProbeQuestion {
    std::string question_id;
    std::string record_id;
    std::string text;

    bool operator==(const ProbeQuestion&) const = default;
};

struct AnswerSample {
    std::string question_id;
    int sample_index = 0;
    std::string text;
    Verdict verdict = Verdict::unjudged;

    bool operator==(const AnswerSample&) const = default;
};

// Stores |C_i| and |I_i|; the difficulty ratio is always derived.
struct DifficultyReport {
    std::string question_id;
    std::int64_t num_correct = 0;
    std::int64_t num_incorrect = 0;

    Rational difficulty() const;
    bool operator==(const DifficultyReport&) const = default;
};

struct KnowledgeClassification {
    std::string record_id;
    Rational threshold;
    std::set<std::string> unknown_question_ids;
    std::set<std::string> known_question_ids;

    bool operator==(const KnowledgeClassification&) const = default;
};

struct AdaptedCaption {
    std::string record_id;
    AdaptMethod method = AdaptMethod::knowada;
    std::string text;
    std::set<std::string> removed_question_ids;
    std::map<std::string, std::string> params;

    bool operator==(const AdaptedCaption&) const = default;
};

struct Proposition {
    std::string prop_id;
    std::string parent_id;
    int ordinal = 0;
    std::string text;
    Label label = Label::unlabeled;

    bool operator==(const Proposition&) const = default;
};

}  // namespace knowada
