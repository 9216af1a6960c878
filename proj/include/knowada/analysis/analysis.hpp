#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "knowada/core/records.hpp"
#include "knowada/core/types.hpp"

namespace knowada {

// ---- human annotation -------------------------------------------------------

struct AnnotationRecord {
    std::string prop_id;
    std::array<Label, 3> annotator_labels{};
};

AnnotationRecord annotation_from_json(const Json& j);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

struct MajorityVote {
    Label label = Label::neutral;
    Rational agreement;
    bool no_majority = false;
};

// Label held by at least two annotators; all-distinct resolves to neutral
// with agreement 1/3 and the flag set.
MajorityVote majority_vote(const AnnotationRecord& record);

// Mean agreement fraction per majority label.
std::map<Label, Rational> agreement_stats(std::span<const AnnotationRecord> records);

// ---- phi -------------------------------------------------------------------

// Rows are the human bit (1, 0), columns the automatic bit (1, 0):
//   a = (1,1)  b = (1,0)
//   c = (0,1)  d = (0,0)
struct ContingencyTable2x2 {
    std::int64_t a = 0, b = 0, c = 0, d = 0;

    void add(bool human, bool automatic);
    std::int64_t total() const { return a + b + c + d; }
    bool operator==(const ContingencyTable2x2&) const = default;
};

// (ad - bc) / sqrt((a+b)(c+d)(a+c)(b+d)); a zero marginal is Error(validation).
double phi_coefficient(const ContingencyTable2x2& t);

enum class BinarizeMode { contradicted_vs_rest, entailed_vs_rest, drop_neutral };
inline constexpr std::array<BinarizeMode, 3> all_binarize_modes = {
    BinarizeMode::contradicted_vs_rest, BinarizeMode::entailed_vs_rest, BinarizeMode::drop_neutral};

std::string_view to_string(BinarizeMode m);

// drop_neutral maps contradicted -> 1, entailed -> 0 and excludes any pair
// with a neutral. Unlabeled labels exclude the pair in every mode.
std::optional<std::pair<bool, bool>> binarize_labels(Label human, Label automatic, BinarizeMode mode);

// ---- dataset statistics -----------------------------------------------------

struct DatasetStatsRow {
    std::string source;
    std::string model;
    std::int64_t records = 0;
    double mean_original_words = 0;  // C_o
    double mean_adapted_words = 0;   // C_r
    double mean_unknown = 0;         // Q_unk
};

// Records present in all three inputs, grouped by source.
std::vector<DatasetStatsRow> dataset_stats(std::span<const CaptionRecord> captions,
                                           std::span<const AdaptedCaption> adapted,
                                           std::span<const KnowledgeClassification> classifications,
                                           const std::string& model);

std::string stats_csv(std::span<const DatasetStatsRow> rows);

// ---- unknown-question overlap ----------------------------------------------

struct OverlapReport {
    std::vector<std::string> models;
    // Key: sorted model names joined with '&'; value: items in exactly that subset.
    // Only filled for up to three models.
    std::map<std::string, std::int64_t> regions;
    std::map<std::pair<std::string, std::string>, std::int64_t> pairwise;
    std::int64_t union_size = 0;
    std::int64_t shared_by_all = 0;
    double shared_fraction = 0;  // shared_by_all / union_size, 0 for an empty union
    std::optional<std::string> notice;
};

OverlapReport unknown_overlap(const std::map<std::string, std::set<std::string>>& unknown_by_model);

Json to_json(const OverlapReport& r);

// ---- threshold sweep --------------------------------------------------------

struct PrPoint {
    double desc_precision = 0;
    double desc_recall = 0;
};

struct SweepRow {
    Rational threshold;
    std::int64_t known = 0;
    std::int64_t unknown = 0;
    std::int64_t records_with_unknown = 0;
    double mean_unknown_per_record = 0;
    std::optional<PrPoint> point;
};

// `question_record` maps question_id -> record_id. Thresholds must be
// ascending. `points` supplies DNLI results measured at a threshold.
std::vector<SweepRow> threshold_sweep(std::span<const DifficultyReport> reports,
                                      const std::map<std::string, std::string>& question_record,
                                      std::span<const Rational> thresholds,
                                      const std::map<Rational, PrPoint>& points = {});

std::string sweep_csv(std::span<const SweepRow> rows);

// ---- contradiction location ------------------------------------------------

struct LocationHistogram {
    std::array<std::int64_t, 10> bins{};  // bin k covers (k/10, (k+1)/10]
    std::int64_t contradicted = 0;
};

// location = (ordinal + 1) / n where n counts every proposition of the parent.
Rational relative_location(int ordinal, std::int64_t parent_total);

LocationHistogram contradiction_locations(std::span<const Proposition> props);

std::string locations_csv(const LocationHistogram& h);

}  // namespace knowada
