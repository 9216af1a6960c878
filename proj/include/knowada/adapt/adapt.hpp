#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "knowada/backends/backend.hpp"
#include "knowada/backends/prompts.hpp"
#include "knowada/core/records.hpp"
#include "knowada/core/types.hpp"

namespace knowada {

// Rewrites the caption to drop whatever answers `remove`. An empty set returns
// the caption verbatim without calling the backend. Used by both the KnowAda
// and the random-removal paths.
std::string rewrite_caption(const std::string& caption, std::span<const ProbeQuestion> remove, Backend& rewriter,
                            const PromptLibrary& prompts = PromptLibrary::builtin());

AdaptedCaption adapt_knowada(const CaptionRecord& record, const KnowledgeClassification& classification,
                             std::span<const ProbeQuestion> questions, Backend& rewriter,
                             const PromptLibrary& prompts = PromptLibrary::builtin());

// Removes k questions drawn uniformly (seeded by seed and record_id) from all
// of the record's questions. A pure function of its inputs.
AdaptedCaption adapt_random(const CaptionRecord& record, std::span<const ProbeQuestion> questions, std::size_t k,
                            std::uint64_t seed, Backend& rewriter,
                            const PromptLibrary& prompts = PromptLibrary::builtin());

// Drops the last k sentences, always keeping the first one.
AdaptedCaption adapt_trim(const CaptionRecord& record, std::size_t k_sentences);

inline constexpr int min_simplify_degree = 1;
inline constexpr int max_simplify_degree = 5;

AdaptedCaption adapt_simplify(const CaptionRecord& record, int degree, Backend& rewriter,
                              const PromptLibrary& prompts = PromptLibrary::builtin());

// Information is lost when p_entail is below this in both directions.
inline constexpr double information_loss_cutoff = 0.5;

class EntailmentScorer {
public:
    virtual ~EntailmentScorer() = default;
    // Probability that premise entails hypothesis, in [0, 1].
    virtual double p_entail(const std::string& premise, const std::string& hypothesis) = 0;
};

// Asks the `nli` backend for a probability and reads the first number in the
// reply ("85%" reads as 0.85). Out-of-range values are a contract error.
class BackendEntailmentScorer final : public EntailmentScorer {
public:
    explicit BackendEntailmentScorer(Backend& nli, const PromptLibrary& prompts = PromptLibrary::builtin())
        : nli_(nli), prompts_(prompts) {}
    double p_entail(const std::string& premise, const std::string& hypothesis) override;

private:
    Backend& nli_;
    const PromptLibrary& prompts_;
};

class CallbackEntailmentScorer final : public EntailmentScorer {
public:
    using Fn = std::function<double(const std::string&, const std::string&)>;
    explicit CallbackEntailmentScorer(Fn fn) : fn_(std::move(fn)) {}
    double p_entail(const std::string& premise, const std::string& hypothesis) override {
        return fn_(premise, hypothesis);
    }

private:
    Fn fn_;
};

double parse_probability(const std::string& reply);

bool information_lost(double forward, double backward);

struct RobustnessReport {
    std::string record_id;
    std::int64_t unknown_removed_count = 0;
    std::int64_t unknown_total = 0;
    std::int64_t known_retained_count = 0;
    std::int64_t known_total = 0;

    // Empty when the corresponding total is zero.
    std::optional<Rational> removal_rate() const;
    std::optional<Rational> retention_rate() const;

    bool operator==(const RobustnessReport&) const = default;
};

Json to_json(const RobustnessReport& r);

// Answers each question from the original and from the rewritten caption
// (temperature 0), then scores entailment both ways between the two answers.
RobustnessReport verify_rewrite(const std::string& record_id, const std::string& original, const std::string& rewritten,
                                std::span<const ProbeQuestion> known_questions,
                                std::span<const ProbeQuestion> unknown_questions, Backend& answerer,
                                EntailmentScorer& scorer, const PromptLibrary& prompts = PromptLibrary::builtin());

// Corpus-level rates from summed counts.
RobustnessReport sum_reports(std::span<const RobustnessReport> reports);

}  // namespace knowada
