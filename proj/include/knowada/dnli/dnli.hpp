#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "knowada/backends/backend.hpp"
#include "knowada/backends/prompts.hpp"
#include "knowada/core/config.hpp"
#include "knowada/core/records.hpp"
#include "knowada/core/types.hpp"
#include "knowada/probe/probe.hpp"

namespace knowada {

// Label counts for one side of a comparison. Unlabeled propositions are not
// counted anywhere.
struct LabelCounts {
    std::int64_t total = 0;
    std::int64_t entailed = 0;
    std::int64_t contradicted = 0;
    std::int64_t neutral = 0;

    static LabelCounts of(std::span<const Proposition> props);
    LabelCounts& operator+=(const LabelCounts& o);
    bool operator==(const LabelCounts&) const = default;
};

// gen: generated-caption propositions labelled against the ground truth.
// gt:  ground-truth propositions labelled against the generated caption.
struct DnliScore {
    std::string pair_id;
    LabelCounts gen;
    LabelCounts gt;
    std::int64_t word_count = 0;
    ContradictionOrientation orientation = ContradictionOrientation::formula;

    Rational desc_precision() const;  // gen.entailed / gen.total
    Rational desc_recall() const;     // gt.entailed / gt.total
    // formula: gt.contradicted / gt.total; prose: gen.contradicted / gen.total
    Rational contra_precision() const;
    // formula: gen.contradicted / gen.total; prose: gt.contradicted / gt.total
    Rational contra_recall() const;

    bool operator==(const DnliScore&) const = default;
};

Json to_json(const DnliScore& s);

struct DnliBackends {
    Backend& decomposer;
    Backend& nli;
};

// Proposition ids are "<parent_id>/p<ordinal>".
std::vector<Proposition> decompose(const std::string& parent_id, const std::string& caption, Backend& decomposer,
                                   const PromptLibrary& prompts = PromptLibrary::builtin());

// First ENTAILED / CONTRADICTED / NEUTRAL word, case-insensitive.
Label parse_label_token(const std::string& reply);

Label classify_proposition(const Proposition& prop, const std::string& premise, Backend& nli,
                           const PromptLibrary& prompts = PromptLibrary::builtin());

// Labels every proposition against `premise` on up to `jobs` threads.
void label_propositions(std::vector<Proposition>& props, const std::string& premise, Backend& nli, std::size_t jobs = 1,
                        const PromptLibrary& prompts = PromptLibrary::builtin());

// The counting step of score_pair over already-labelled propositions. Throws
// Error(validation) when either side has no labelled proposition.
DnliScore score_labeled(std::string pair_id, std::span<const Proposition> generated_props,
                        std::span<const Proposition> ground_truth_props, std::int64_t word_count,
                        ContradictionOrientation orientation = ContradictionOrientation::formula);

DnliScore score_pair(const std::string& generated_caption, const std::string& ground_truth_caption,
                     const DnliBackends& backends,
                     ContradictionOrientation orientation = ContradictionOrientation::formula,
                     const PromptLibrary& prompts = PromptLibrary::builtin(), std::string pair_id = "pair");

struct CaptionPair {
    std::string pair_id;
    std::string generated;
    std::string ground_truth;
};

struct MacroAverages {
    double desc_precision = 0;
    double desc_recall = 0;
    double contra_precision = 0;
    double contra_recall = 0;
};

struct CorpusScore {
    DnliScore micro;  // counts summed across pairs; word_count is the sum
    MacroAverages macro;
    double mean_word_count = 0;
    std::vector<DnliScore> pairs;
    std::vector<SkipEntry> skipped;
};

// Micro aggregate over already-scored pairs. Throws when `pairs` is empty.
CorpusScore aggregate_scores(std::vector<DnliScore> pairs, std::vector<SkipEntry> skipped = {});

// Scores every pair; failing pairs are skipped and listed. Throws when no pair
// survives.
CorpusScore score_corpus(std::span<const CaptionPair> pairs, const DnliBackends& backends,
                         ContradictionOrientation orientation = ContradictionOrientation::formula,
                         std::size_t jobs = 1, const PromptLibrary& prompts = PromptLibrary::builtin());

Json to_json(const CorpusScore& c);

}  // namespace knowada
