#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "knowada/analysis/analysis.hpp"
#include "knowada/core/records.hpp"

namespace knowada {

// One evaluated (model, caption set) combination, read from a score summary.
struct ReportEntry {
    std::string model;
    std::string caption_set;
    std::optional<Rational> threshold;
    double contra_precision = 0;
    double contra_recall = 0;
    double desc_precision = 0;
    double desc_recall = 0;
    double words = 0;
    std::int64_t pairs = 0;
};

ReportEntry report_entry_from_summary(const Json& summary);

struct ReportFiles {
    std::filesystem::path results_csv;
    std::filesystem::path results_md;
    std::filesystem::path pr_curve_csv;
    std::filesystem::path summary_txt;
};

// Results columns: Contradiction P/R, Descriptiveness P/R, # Words.
inline constexpr const char* results_header =
    "model,caption_set,contradiction_precision,contradiction_recall,descriptiveness_precision,"
    "descriptiveness_recall,words";

std::string results_csv(std::span<const ReportEntry> entries);
std::string results_markdown(std::span<const ReportEntry> entries);
// Rows only for entries that carry a threshold, ordered by (model, set, threshold).
std::string pr_curve_csv(std::span<const ReportEntry> entries);

// Throws Error(validation) when `entries` is empty.
ReportFiles write_report(std::span<const ReportEntry> entries, std::span<const DatasetStatsRow> stats,
                         const std::filesystem::path& out_dir);

}  // namespace knowada
