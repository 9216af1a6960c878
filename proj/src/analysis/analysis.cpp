#include "knowada/analysis/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "knowada/core/error.hpp"
#include "knowada/core/text.hpp"

namespace knowada {

AnnotationRecord annotation_from_json(const Json& j) {
    AnnotationRecord r;
    try {
        r.prop_id = j.at("prop_id").get<std::string>();
        const Json& labels = j.at("annotator_labels");
        if (!labels.is_array() || labels.size() != 3)
            throw Error(ErrorKind::parse, "annotator_labels must hold exactly 3 labels");
        for (std::size_t i = 0; i < 3; ++i) {
            const Label l = parse_label(labels.at(i).get<std::string>());
            if (l == Label::unlabeled) throw Error(ErrorKind::parse, "annotator label cannot be 'unlabeled'");
            r.annotator_labels[i] = l;
        }
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::parse, e.what());
    } catch (const Error& e) {
        throw Error(ErrorKind::parse, e.what());
    }
    if (r.prop_id.empty()) throw Error(ErrorKind::parse, "empty prop_id");
    return r;
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
    std::vector<AnnotationRecord> out;
    for_each_jsonl(path, [&](const Json& j, std::size_t) { out.push_back(annotation_from_json(j)); });
    return out;
}

MajorityVote majority_vote(const AnnotationRecord& record) {
    const auto& l = record.annotator_labels;
    if (std::count(l.begin(), l.end(), Label::unlabeled) != 0)
        throw Error(ErrorKind::contract, "annotation '" + record.prop_id + "' has an unlabeled vote");
    for (Label candidate : l) {
        const auto n = std::count(l.begin(), l.end(), candidate);
        if (n >= 2) return {candidate, Rational(n, 3), false};
    }
    return {Label::neutral, Rational(1, 3), true};
}

std::map<Label, Rational> agreement_stats(std::span<const AnnotationRecord> records) {
    if (records.empty()) throw Error(ErrorKind::validation, "agreement_stats needs at least one record");
    // Sum of agreements is (sum of counts)/3, so keep integer counts per label.
    std::map<Label, std::pair<std::int64_t, std::int64_t>> acc;  // label -> (sum of votes, records)
    for (const auto& r : records) {
        const MajorityVote v = majority_vote(r);
        auto& [votes, n] = acc[v.label];
        votes += v.agreement.num() * (3 / v.agreement.den());
        ++n;
    }
    std::map<Label, Rational> out;
    for (const auto& [label, sums] : acc) out.emplace(label, Rational(sums.first, 3 * sums.second));
    return out;
}

void ContingencyTable2x2::add(bool human, bool automatic) {
    if (human) {
        automatic ? ++a : ++b;
    } else {
        automatic ? ++c : ++d;
    }
}

double phi_coefficient(const ContingencyTable2x2& t) {
    if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) throw Error(ErrorKind::validation, "negative contingency cell");
    const long double r1 = t.a + t.b, r0 = t.c + t.d, c1 = t.a + t.c, c0 = t.b + t.d;
    if (r1 == 0 || r0 == 0 || c1 == 0 || c0 == 0)
        throw Error(ErrorKind::validation, "phi undefined: a row or column of the 2x2 table is empty");
    const long double num = static_cast<long double>(t.a) * t.d - static_cast<long double>(t.b) * t.c;
    return static_cast<double>(num / std::sqrt(r1 * r0 * c1 * c0));
}

std::string_view to_string(BinarizeMode m) {
    switch (m) {
        case BinarizeMode::contradicted_vs_rest: return "contradicted_vs_rest";
        case BinarizeMode::entailed_vs_rest: return "entailed_vs_rest";
        case BinarizeMode::drop_neutral: return "drop_neutral";
    }
    return "?";
}

std::optional<std::pair<bool, bool>> binarize_labels(Label human, Label automatic, BinarizeMode mode) {
    if (human == Label::unlabeled || automatic == Label::unlabeled) return std::nullopt;
    switch (mode) {
        case BinarizeMode::contradicted_vs_rest:
            return std::pair{human == Label::contradicted, automatic == Label::contradicted};
        case BinarizeMode::entailed_vs_rest:
            return std::pair{human == Label::entailed, automatic == Label::entailed};
        case BinarizeMode::drop_neutral:
            if (human == Label::neutral || automatic == Label::neutral) return std::nullopt;
            return std::pair{human == Label::contradicted, automatic == Label::contradicted};
    }
    return std::nullopt;
}

std::vector<DatasetStatsRow> dataset_stats(std::span<const CaptionRecord> captions,
                                           std::span<const AdaptedCaption> adapted,
                                           std::span<const KnowledgeClassification> classifications,
                                           const std::string& model) {
    std::map<std::string, const AdaptedCaption*> adapted_by_id;
    for (const auto& a : adapted) adapted_by_id[a.record_id] = &a;
    std::map<std::string, const KnowledgeClassification*> class_by_id;
    for (const auto& k : classifications) class_by_id[k.record_id] = &k;

    struct Acc {
        std::int64_t n = 0, original = 0, rewritten = 0, unknown = 0;
    };
    std::map<std::string, Acc> groups;
    for (const auto& c : captions) {
        const auto a = adapted_by_id.find(c.record_id);
        const auto k = class_by_id.find(c.record_id);
        if (a == adapted_by_id.end() || k == class_by_id.end()) continue;
        Acc& acc = groups[std::string(to_string(c.source))];
        ++acc.n;
        acc.original += static_cast<std::int64_t>(word_count(c.caption));
        acc.rewritten += static_cast<std::int64_t>(word_count(a->second->text));
        acc.unknown += static_cast<std::int64_t>(k->second->unknown_question_ids.size());
    }
    std::vector<DatasetStatsRow> rows;
    for (const auto& [source, acc] : groups) {
        const auto n = static_cast<double>(acc.n);
        rows.push_back({source, model, acc.n, static_cast<double>(acc.original) / n,
                        static_cast<double>(acc.rewritten) / n, static_cast<double>(acc.unknown) / n});
    }
    return rows;
}

std::string stats_csv(std::span<const DatasetStatsRow> rows) {
    std::string out = "source,model,records,C_o,C_r,Q_unk\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f}\n", r.source, r.model, r.records, r.mean_original_words,
                           r.mean_adapted_words, r.mean_unknown);
    return out;
}

OverlapReport unknown_overlap(const std::map<std::string, std::set<std::string>>& unknown_by_model) {
    OverlapReport r;
    for (const auto& [model, set] : unknown_by_model) r.models.push_back(model);

    std::set<std::string> all;
    for (const auto& [model, set] : unknown_by_model) all.insert(set.begin(), set.end());
    r.union_size = static_cast<std::int64_t>(all.size());

    for (auto i = unknown_by_model.begin(); i != unknown_by_model.end(); ++i)
        for (auto j = std::next(i); j != unknown_by_model.end(); ++j) {
            std::int64_t n = 0;
            for (const auto& id : i->second) n += j->second.count(id);
            r.pairwise[{i->first, j->first}] = n;
        }

    for (const auto& id : all) {
        bool everywhere = true;
        for (const auto& [model, set] : unknown_by_model) everywhere = everywhere && set.count(id) != 0;
        if (everywhere) ++r.shared_by_all;
    }
    r.shared_fraction = r.union_size == 0 ? 0.0 : static_cast<double>(r.shared_by_all) / static_cast<double>(r.union_size);

    if (unknown_by_model.size() > 3) {
        r.notice = "more than three models: only pairwise overlaps are reported";
        return r;
    }
    for (const auto& id : all) {
        std::string key;
        for (const auto& [model, set] : unknown_by_model) {
            if (set.count(id) == 0) continue;
            if (!key.empty()) key += '&';
            key += model;
        }
        ++r.regions[key];
    }
    return r;
}

Json to_json(const OverlapReport& r) {
    Json regions = Json::object();
    for (const auto& [key, n] : r.regions) regions[key] = n;
    Json pairwise = Json::array();
    for (const auto& [models, n] : r.pairwise) pairwise.push_back({{"a", models.first}, {"b", models.second}, {"shared", n}});
    Json j{{"models", r.models},
           {"union", r.union_size},
           {"shared_by_all", r.shared_by_all},
           {"shared_fraction", r.shared_fraction},
           {"regions", regions},
           {"pairwise", pairwise}};
    if (r.notice) j["notice"] = *r.notice;
    return j;
}

std::vector<SweepRow> threshold_sweep(std::span<const DifficultyReport> reports,
                                      const std::map<std::string, std::string>& question_record,
                                      std::span<const Rational> thresholds, const std::map<Rational, PrPoint>& points) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw Error(ErrorKind::validation, "sweep thresholds must be ascending");
    std::set<std::string> records;
    for (const auto& r : reports) {
        const auto it = question_record.find(r.question_id);
        if (it == question_record.end())
            throw Error(ErrorKind::validation, "question '" + r.question_id + "' has no record");
        records.insert(it->second);
    }
    std::vector<SweepRow> rows;
    for (const Rational& t : thresholds) {
        if (t < Rational(0, 1) || t > Rational(1, 1)) throw Error(ErrorKind::validation, "threshold outside [0, 1]");
        SweepRow row;
        row.threshold = t;
        std::set<std::string> with_unknown;
        for (const auto& r : reports) {
            if (r.difficulty() > t) {
                ++row.unknown;
                with_unknown.insert(question_record.at(r.question_id));
            } else {
                ++row.known;
            }
        }
        row.records_with_unknown = static_cast<std::int64_t>(with_unknown.size());
        row.mean_unknown_per_record =
            records.empty() ? 0.0 : static_cast<double>(row.unknown) / static_cast<double>(records.size());
        if (const auto p = points.find(t); p != points.end()) row.point = p->second;
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
    std::string out = "threshold,known,unknown,records_with_unknown,mean_unknown_per_record,desc_precision,desc_recall\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{:.4f},", r.threshold.to_string(), r.known, r.unknown, r.records_with_unknown,
                           r.mean_unknown_per_record);
        out += r.point ? fmt::format("{:.6f},{:.6f}\n", r.point->desc_precision, r.point->desc_recall) : ",\n";
    }
    return out;
}

Rational relative_location(int ordinal, std::int64_t parent_total) {
    if (ordinal < 0 || parent_total < 1 || ordinal >= parent_total)
        throw Error(ErrorKind::contract, "ordinal outside its parent's proposition range");
    return Rational(ordinal + 1, parent_total);
}

LocationHistogram contradiction_locations(std::span<const Proposition> props) {
    std::map<std::string, std::int64_t> totals;
    for (const auto& p : props) ++totals[p.parent_id];
    LocationHistogram h;
    for (const auto& p : props) {
        if (p.label != Label::contradicted) continue;
        const Rational loc = relative_location(p.ordinal, totals[p.parent_id]);
        // Smallest k with loc <= (k+1)/10.
        const std::int64_t k = (10 * loc.num() + loc.den() - 1) / loc.den() - 1;
        ++h.bins[static_cast<std::size_t>(std::clamp<std::int64_t>(k, 0, 9))];
        ++h.contradicted;
    }
    return h;
}

std::string locations_csv(const LocationHistogram& h) {
    std::string out = "bin,lower,upper,count,fraction\n";
    for (std::size_t k = 0; k < h.bins.size(); ++k) {
        const double fraction = h.contradicted == 0 ? 0.0 : static_cast<double>(h.bins[k]) / static_cast<double>(h.contradicted);
        out += fmt::format("{},{:.1f},{:.1f},{},{:.6f}\n", k + 1, static_cast<double>(k) / 10.0,
                           static_cast<double>(k + 1) / 10.0, h.bins[k], fraction);
    }
    return out;
}

}  // namespace knowada
