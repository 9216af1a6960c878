#include "knowada/cli/report.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "knowada/core/error.hpp"

namespace knowada {

ReportEntry report_entry_from_summary(const Json& summary) {
    ReportEntry e;
    try {
        e.model = summary.value("model", std::string("model"));
        e.caption_set = summary.value("caption_set", std::string("captions"));
        if (summary.contains("threshold") && !summary.at("threshold").is_null())
            e.threshold = Rational::parse(summary.at("threshold").get<std::string>());
        const Json& micro = summary.at("micro");
        e.contra_precision = micro.at("contra_precision").get<double>();
        e.contra_recall = micro.at("contra_recall").get<double>();
        e.desc_precision = micro.at("desc_precision").get<double>();
        e.desc_recall = micro.at("desc_recall").get<double>();
        e.words = summary.at("mean_word_count").get<double>();
        e.pairs = summary.at("pairs").get<std::int64_t>();
    } catch (const Json::exception& ex) {
        throw Error(ErrorKind::validation, std::string("malformed score summary: ") + ex.what());
    }
    return e;
}

std::string results_csv(std::span<const ReportEntry> entries) {
    std::string out = std::string(results_header) + "\n";
    for (const auto& e : entries)
        out += fmt::format("{},{},{:.4f},{:.4f},{:.4f},{:.4f},{:.1f}\n", e.model, e.caption_set, e.contra_precision,
                           e.contra_recall, e.desc_precision, e.desc_recall, e.words);
    return out;
}

std::string results_markdown(std::span<const ReportEntry> entries) {
    std::string out =
        "| Model | Captions | Contradiction P | Contradiction R | Descriptiveness P | Descriptiveness R | # Words |\n"
        "|---|---|---:|---:|---:|---:|---:|\n";
    for (const auto& e : entries)
        out += fmt::format("| {} | {} | {:.1f} | {:.1f} | {:.1f} | {:.1f} | {:.1f} |\n", e.model, e.caption_set,
                           100 * e.contra_precision, 100 * e.contra_recall, 100 * e.desc_precision,
                           100 * e.desc_recall, e.words);
    return out;
}

std::string pr_curve_csv(std::span<const ReportEntry> entries) {
    std::vector<const ReportEntry*> points;
    for (const auto& e : entries)
        if (e.threshold) points.push_back(&e);
    std::stable_sort(points.begin(), points.end(), [](const ReportEntry* a, const ReportEntry* b) {
        return std::tie(a->model, a->caption_set, *a->threshold) < std::tie(b->model, b->caption_set, *b->threshold);
    });
    std::string out = "model,caption_set,threshold,descriptiveness_precision,descriptiveness_recall\n";
    for (const auto* e : points)
        out += fmt::format("{},{},{},{:.6f},{:.6f}\n", e->model, e->caption_set, e->threshold->to_string(),
                           e->desc_precision, e->desc_recall);
    return out;
}

ReportFiles write_report(std::span<const ReportEntry> entries, std::span<const DatasetStatsRow> stats,
                         const std::filesystem::path& out_dir) {
    if (entries.empty()) throw Error(ErrorKind::validation, "report needs at least one score summary");
    ReportFiles files{out_dir / "results.csv", out_dir / "results.md", out_dir / "pr_curve.csv",
                      out_dir / "summary.txt"};
    write_text(files.results_csv, results_csv(entries));
    write_text(files.results_md, results_markdown(entries));
    write_text(files.pr_curve_csv, pr_curve_csv(entries));

    std::string text = "Dense caption evaluation\n========================\n\n";
    for (const auto& e : entries) {
        text += fmt::format("{} / {}{}: {} pairs, {:.1f} words on average\n", e.model, e.caption_set,
                            e.threshold ? " (T=" + e.threshold->to_string() + ")" : "", e.pairs, e.words);
        text += fmt::format("  descriptiveness precision {:.1f}%  recall {:.1f}%\n", 100 * e.desc_precision,
                            100 * e.desc_recall);
        text += fmt::format("  contradiction   precision {:.1f}%  recall {:.1f}%\n", 100 * e.contra_precision,
                            100 * e.contra_recall);
    }
    if (!stats.empty()) {
        text += "\nDataset statistics (C_o original words, C_r adapted words, Q_unk unknown questions)\n";
        for (const auto& s : stats)
            text += fmt::format("  {} / {}: {} records, C_o {:.1f}, C_r {:.1f}, Q_unk {:.2f}\n", s.source, s.model,
                                s.records, s.mean_original_words, s.mean_adapted_words, s.mean_unknown);
    }
    write_text(files.summary_txt, text);
    return files;
}

}  // namespace knowada
