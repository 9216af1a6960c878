#include "knowada/cli/commands.hpp"

#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "knowada/adapt/adapt.hpp"
#include "knowada/cli/report.hpp"
#include "knowada/core/error.hpp"
#include "knowada/core/parallel.hpp"
#include "knowada/core/text.hpp"
#include "knowada/dnli/dnli.hpp"

namespace knowada::cli {

namespace {

std::string what_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

// Backend failures stop the command; per-item data problems are skipped.
void rethrow_if_backend(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::transport || err.kind() == ErrorKind::status) throw;
    } catch (...) {
    }
}

template <typename T>
std::map<std::string, T> index_by_record(const std::vector<T>& items) {
    std::map<std::string, T> out;
    for (const auto& item : items) out.emplace(item.record_id, item);
    return out;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) { return fs::path(p.string() + suffix); }

}  // namespace

void apply_overrides(RunConfig& config, const GlobalOptions& options) {
    if (options.jobs) {
        if (*options.jobs < 1) throw Error(ErrorKind::validation, "--jobs must be >= 1");
        config.jobs = *options.jobs;
    }
    if (options.cache_dir) config.cache_dir = *options.cache_dir;
    if (options.seed) config.seed = *options.seed;
}

Session open_session(const GlobalOptions& options) {
    if (!options.config) throw Error(ErrorKind::validation, "this command needs --config");
    Session s;
    s.config = load_config(*options.config);
    apply_overrides(s.config, options);
    s.backends = std::make_shared<BackendSet>(BackendSet::from_config(s.config));
    s.prompts = s.config.prompts_dir ? PromptLibrary::with_overrides(*s.config.prompts_dir) : PromptLibrary::builtin();
    s.jobs = s.config.jobs;
    s.force = options.force;
    return s;
}

int finish_with_skips(const fs::path& out, const std::vector<SkipEntry>& skipped) {
    write_jsonl(with_suffix(out, ".skips.jsonl"), to_json_rows(skipped));
    if (skipped.empty()) return exit_code::success;
    spdlog::warn("{} item(s) skipped; see {}", skipped.size(), with_suffix(out, ".skips.jsonl").string());
    return exit_code::partial;
}

std::vector<SkipEntry> load_skips(const fs::path& path) {
    std::vector<SkipEntry> out;
    if (!fs::exists(path)) return out;
    for_each_jsonl(path, [&](const Json& j, std::size_t) {
        out.push_back({j.at("id").get<std::string>(), j.at("stage").get<std::string>(), j.at("reason").get<std::string>()});
    });
    return out;
}

int cmd_questions(Session& s, const fs::path& in, const fs::path& out) {
    const auto captions = load_dataset(in);
    std::vector<std::vector<ProbeQuestion>> per_record(captions.size());
    Backend& generator = (*s.backends)[Role::question_gen];
    const auto errors = parallel_for(captions.size(), s.jobs, [&](std::size_t i) {
        per_record[i] = generate_questions(captions[i], generator, s.config.max_questions_per_caption, s.prompts);
    });
    std::vector<ProbeQuestion> questions;
    std::vector<SkipEntry> skipped;
    for (std::size_t i = 0; i < captions.size(); ++i) {
        if (errors[i]) {
            rethrow_if_backend(errors[i]);
            skipped.push_back({captions[i].record_id, "questions", what_of(errors[i])});
            continue;
        }
        if (per_record[i].empty()) skipped.push_back({captions[i].record_id, "questions", "no questions parsed"});
        questions.insert(questions.end(), per_record[i].begin(), per_record[i].end());
    }
    save_records(questions, out);
    spdlog::info("questions: {} questions for {} records", questions.size(), captions.size());
    return finish_with_skips(out, skipped);
}

int cmd_probe(Session& s, const ProbeArgs& args) {
    const auto questions = load_questions(args.questions);
    const auto captions = index_by_record(load_dataset(args.captions));
    ProbeSettings settings{args.m.value_or(s.config.sampling_m),
                           args.temperature.value_or(s.config.sampling_temperature), s.jobs};
    if (settings.m < 1) throw Error(ErrorKind::validation, "-m must be >= 1");
    const auto outcome = run_probe(questions, captions, (*s.backends)[Role::vlm], (*s.backends)[Role::judge],
                                   settings, s.prompts);
    save_records(outcome.answers, args.answers_out);
    save_records(outcome.reports, args.difficulty_out);
    spdlog::info("probe: {} difficulty reports, {} skipped", outcome.reports.size(), outcome.skipped.size());
    return finish_with_skips(args.difficulty_out, outcome.skipped);
}

int cmd_classify(const fs::path& difficulty, const fs::path& questions, const Rational& threshold, const fs::path& out) {
    const auto reports = load_difficulty(difficulty);
    const auto qs = load_questions(questions);
    const auto classes = classify_records(qs, reports, threshold);
    save_records(classes, out);
    std::size_t unknown = 0;
    for (const auto& k : classes) unknown += k.unknown_question_ids.size();
    spdlog::info("classify: {} records, {} unknown questions at T={}", classes.size(), unknown, threshold.to_string());
    return exit_code::success;
}

int cmd_adapt(Session& s, const AdaptArgs& args) {
    const auto captions = load_dataset(args.in);
    const AdaptMethod method = parse_adapt_method(args.mode);
    std::vector<ProbeQuestion> questions;
    if (args.questions) questions = load_questions(*args.questions);
    std::map<std::string, KnowledgeClassification> classes;
    if (args.classification) classes = index_by_record(load_classifications(*args.classification));

    if (method == AdaptMethod::knowada && (!args.classification || !args.questions))
        throw Error(ErrorKind::validation, "--mode knowada needs --classification and --questions");
    if (method == AdaptMethod::random && !args.questions)
        throw Error(ErrorKind::validation, "--mode random needs --questions");
    if (method == AdaptMethod::random && !args.k && !args.classification)
        throw Error(ErrorKind::validation, "--mode random needs --k or --classification to size the removal");
    if (method == AdaptMethod::trim && !args.k) throw Error(ErrorKind::validation, "--mode trim needs --k");

    Backend& rewriter = (*s.backends)[Role::rewriter];
    std::vector<std::optional<AdaptedCaption>> results(captions.size());
    const auto errors = parallel_for(captions.size(), s.jobs, [&](std::size_t i) {
        const CaptionRecord& record = captions[i];
        switch (method) {
            case AdaptMethod::knowada: {
                const auto k = classes.find(record.record_id);
                if (k == classes.end()) {
                    spdlog::warn("record {}: no classification, caption kept unchanged", record.record_id);
                    AdaptedCaption same{record.record_id, AdaptMethod::knowada, record.caption, {}, {{"unprobed", "true"}}};
                    results[i] = same;
                    return;
                }
                results[i] = adapt_knowada(record, k->second, questions, rewriter, s.prompts);
                return;
            }
            case AdaptMethod::random: {
                std::size_t k = 0;
                if (args.k) {
                    k = *args.k;
                } else if (const auto c = classes.find(record.record_id); c != classes.end()) {
                    k = c->second.unknown_question_ids.size();
                }
                results[i] = adapt_random(record, questions, k, s.config.seed, rewriter, s.prompts);
                return;
            }
            case AdaptMethod::trim: results[i] = adapt_trim(record, *args.k); return;
            case AdaptMethod::simplify: results[i] = adapt_simplify(record, args.degree, rewriter, s.prompts); return;
        }
    });
    std::vector<AdaptedCaption> adapted;
    std::vector<SkipEntry> skipped;
    for (std::size_t i = 0; i < captions.size(); ++i) {
        if (errors[i]) {
            rethrow_if_backend(errors[i]);
            try {
                std::rethrow_exception(errors[i]);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::validation && method == AdaptMethod::simplify) throw;
            } catch (...) {
            }
            skipped.push_back({captions[i].record_id, "adapt", what_of(errors[i])});
            continue;
        }
        adapted.push_back(std::move(*results[i]));
    }
    save_records(adapted, args.out);
    spdlog::info("adapt ({}): {} captions written", args.mode, adapted.size());
    return finish_with_skips(args.out, skipped);
}

int cmd_verify(Session& s, const VerifyArgs& args) {
    const auto originals = index_by_record(load_dataset(args.original));
    const auto adapted = load_adapted(args.adapted);
    const auto questions = load_questions(args.questions);
    const auto classes = index_by_record(load_classifications(args.classification));

    Backend& answerer = (*s.backends)[Role::judge];
    BackendEntailmentScorer scorer((*s.backends)[Role::nli], s.prompts);
    std::vector<std::optional<RobustnessReport>> results(adapted.size());
    const auto errors = parallel_for(adapted.size(), s.jobs, [&](std::size_t i) {
        const AdaptedCaption& a = adapted[i];
        const auto original = originals.find(a.record_id);
        if (original == originals.end()) throw Error(ErrorKind::validation, "no original caption");
        std::vector<ProbeQuestion> known, unknown;
        if (const auto k = classes.find(a.record_id); k != classes.end()) {
            for (const auto& q : questions) {
                if (q.record_id != a.record_id) continue;
                if (k->second.unknown_question_ids.count(q.question_id)) unknown.push_back(q);
                if (k->second.known_question_ids.count(q.question_id)) known.push_back(q);
            }
        }
        results[i] = verify_rewrite(a.record_id, original->second.caption, a.text, known, unknown, answerer, scorer,
                                    s.prompts);
    });
    std::vector<RobustnessReport> reports;
    std::vector<SkipEntry> skipped;
    for (std::size_t i = 0; i < adapted.size(); ++i) {
        if (errors[i]) {
            rethrow_if_backend(errors[i]);
            skipped.push_back({adapted[i].record_id, "verify", what_of(errors[i])});
            continue;
        }
        reports.push_back(*results[i]);
    }
    std::vector<Json> rows;
    for (const auto& r : reports) rows.push_back(to_json(r));
    write_jsonl(args.out, rows);

    const RobustnessReport total = sum_reports(reports);
    write_json(with_suffix(args.out, ".summary.json"), to_json(total));
    spdlog::info("verify: removal {} retention {}",
                 total.removal_rate() ? total.removal_rate()->to_string() : "n/a",
                 total.retention_rate() ? total.retention_rate()->to_string() : "n/a");
    return finish_with_skips(args.out, skipped);
}

int cmd_decompose(Session& s, const fs::path& in, const fs::path& out) {
    const auto captions = load_dataset(in);
    std::vector<std::vector<Proposition>> per_record(captions.size());
    Backend& decomposer = (*s.backends)[Role::decomposer];
    const auto errors = parallel_for(captions.size(), s.jobs, [&](std::size_t i) {
        per_record[i] = decompose(captions[i].record_id, captions[i].caption, decomposer, s.prompts);
    });
    std::vector<Proposition> props;
    std::vector<SkipEntry> skipped;
    for (std::size_t i = 0; i < captions.size(); ++i) {
        if (errors[i]) {
            rethrow_if_backend(errors[i]);
            skipped.push_back({captions[i].record_id, "decompose", what_of(errors[i])});
            continue;
        }
        props.insert(props.end(), per_record[i].begin(), per_record[i].end());
    }
    save_records(props, out);
    spdlog::info("decompose: {} propositions from {} captions", props.size(), captions.size());
    return finish_with_skips(out, skipped);
}

int cmd_entail(Session& s, const fs::path& props_path, const fs::path& premises_path, const fs::path& out) {
    auto props = load_propositions(props_path);
    const auto premises = index_by_record(load_dataset(premises_path));
    Backend& nli = (*s.backends)[Role::nli];
    const auto errors = parallel_for(props.size(), s.jobs, [&](std::size_t i) {
        Proposition& p = props[i];
        if (p.label != Label::unlabeled) return;
        const auto premise = premises.find(p.parent_id);
        if (premise == premises.end()) throw Error(ErrorKind::validation, "no premise for parent '" + p.parent_id + "'");
        p.label = classify_proposition(p, premise->second.caption, nli, s.prompts);
    });
    std::vector<SkipEntry> skipped;
    for (std::size_t i = 0; i < props.size(); ++i) {
        if (errors[i]) {
            rethrow_if_backend(errors[i]);
            skipped.push_back({props[i].prop_id, "entail", what_of(errors[i])});
        } else if (props[i].label == Label::unlabeled) {
            skipped.push_back({props[i].prop_id, "entail", "unrecognised NLI reply"});
        }
    }
    save_records(props, out);
    return finish_with_skips(out, skipped);
}

namespace {

std::map<std::string, std::vector<Proposition>> group_by_parent(const std::vector<Proposition>& props) {
    std::map<std::string, std::vector<Proposition>> out;
    for (const auto& p : props) out[p.parent_id].push_back(p);
    for (auto& [parent, list] : out)
        std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.ordinal < b.ordinal; });
    return out;
}

}  // namespace

int cmd_score(Session* s, const ScoreArgs& args, ContradictionOrientation orientation) {
    const auto generated = index_by_record(load_dataset(args.generated));
    const auto reference = load_dataset(args.reference);

    std::vector<CaptionPair> pairs;
    std::vector<SkipEntry> skipped;
    for (const auto& ref : reference) {
        const auto gen = generated.find(ref.record_id);
        if (gen == generated.end()) {
            skipped.push_back({ref.record_id, "score", "no generated caption"});
            continue;
        }
        pairs.push_back({ref.record_id, gen->second.caption, ref.caption});
    }

    CorpusScore corpus;
    if (args.generated_labeled && args.reference_labeled) {
        const auto gen_props = group_by_parent(load_propositions(*args.generated_labeled));
        const auto ref_props = group_by_parent(load_propositions(*args.reference_labeled));
        std::vector<DnliScore> scores;
        for (const auto& pair : pairs) {
            const auto g = gen_props.find(pair.pair_id);
            const auto r = ref_props.find(pair.pair_id);
            if (g == gen_props.end() || r == ref_props.end()) {
                skipped.push_back({pair.pair_id, "score", "missing labelled propositions"});
                continue;
            }
            try {
                scores.push_back(score_labeled(pair.pair_id, g->second, r->second,
                                               static_cast<std::int64_t>(word_count(pair.generated)), orientation));
            } catch (const Error& e) {
                skipped.push_back({pair.pair_id, "score", e.what()});
            }
        }
        corpus = aggregate_scores(std::move(scores), {});
    } else {
        if (s == nullptr) throw Error(ErrorKind::validation, "scoring raw captions needs --config");
        const DnliBackends backends{(*s->backends)[Role::decomposer], (*s->backends)[Role::nli]};
        corpus = score_corpus(pairs, backends, orientation, s->jobs, s->prompts);
    }
    corpus.skipped.insert(corpus.skipped.end(), skipped.begin(), skipped.end());
    std::sort(corpus.skipped.begin(), corpus.skipped.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    write_jsonl(args.out, to_json_rows(corpus.pairs));
    Json summary = to_json(corpus);
    summary["model"] = args.model;
    summary["caption_set"] = args.caption_set;
    summary["threshold"] = args.threshold ? Json(args.threshold->to_string()) : Json(nullptr);
    write_json(args.aggregate, summary);
    spdlog::info("score: {} pairs, desc P {} R {}", corpus.pairs.size(), corpus.micro.desc_precision().to_string(),
                 corpus.micro.desc_recall().to_string());
    return finish_with_skips(args.out, corpus.skipped);
}

int cmd_agree(const fs::path& annotations_path, const fs::path& automatic, const fs::path& out) {
    const auto annotations = load_annotations(annotations_path);
    std::map<std::string, Label> auto_labels;
    for (const auto& p : load_propositions(automatic)) auto_labels[p.prop_id] = p.label;

    Json per_label = Json::object();
    for (const auto& [label, mean] : agreement_stats(annotations))
        per_label[std::string(to_string(label))] = {{"mean_agreement", mean.to_double()}, {"exact", mean.to_string()}};

    std::int64_t no_majority = 0;
    std::int64_t matched = 0;
    std::map<BinarizeMode, ContingencyTable2x2> tables;
    for (const auto& a : annotations) {
        const MajorityVote vote = majority_vote(a);
        if (vote.no_majority) ++no_majority;
        const auto it = auto_labels.find(a.prop_id);
        if (it == auto_labels.end()) continue;
        ++matched;
        for (BinarizeMode mode : all_binarize_modes)
            if (const auto bits = binarize_labels(vote.label, it->second, mode)) tables[mode].add(bits->first, bits->second);
    }
    Json phi = Json::object();
    for (BinarizeMode mode : all_binarize_modes) {
        const ContingencyTable2x2& t = tables[mode];
        Json entry{{"table", {{"a", t.a}, {"b", t.b}, {"c", t.c}, {"d", t.d}}}, {"n", t.total()}};
        try {
            entry["phi"] = phi_coefficient(t);
        } catch (const Error& e) {
            entry["phi"] = nullptr;
            entry["error"] = e.what();
        }
        phi[std::string(to_string(mode))] = entry;
    }
    write_json(out, Json{{"annotations", annotations.size()},
                         {"matched", matched},
                         {"no_majority", no_majority},
                         {"per_label", per_label},
                         {"default_mode", to_string(BinarizeMode::drop_neutral)},
                         {"phi", phi}});
    return exit_code::success;
}

int cmd_stats(const fs::path& captions, const fs::path& adapted, const fs::path& classification,
              const std::string& model, const fs::path& out) {
    const auto rows = dataset_stats(load_dataset(captions), load_adapted(adapted), load_classifications(classification), model);
    write_text(out, stats_csv(rows));
    return exit_code::success;
}

int cmd_overlap(const std::map<std::string, fs::path>& classification_by_model, const fs::path& out) {
    std::map<std::string, std::set<std::string>> unknown;
    for (const auto& [model, path] : classification_by_model) {
        auto& set = unknown[model];
        for (const auto& k : load_classifications(path)) set.insert(k.unknown_question_ids.begin(), k.unknown_question_ids.end());
    }
    const OverlapReport report = unknown_overlap(unknown);
    if (report.notice) spdlog::warn("overlap: {}", *report.notice);
    write_json(out, to_json(report));
    return exit_code::success;
}

int cmd_sweep(const fs::path& difficulty, const fs::path& questions, const std::vector<Rational>& thresholds,
              const std::vector<fs::path>& summaries, const fs::path& out) {
    std::map<std::string, std::string> question_record;
    for (const auto& q : load_questions(questions)) question_record[q.question_id] = q.record_id;
    std::map<Rational, PrPoint> points;
    for (const auto& path : summaries) {
        const ReportEntry e = report_entry_from_summary(read_json(path));
        if (!e.threshold) throw Error(ErrorKind::validation, path.string() + " has no threshold");
        points[*e.threshold] = {e.desc_precision, e.desc_recall};
    }
    const auto rows = threshold_sweep(load_difficulty(difficulty), question_record, thresholds, points);
    write_text(out, sweep_csv(rows));
    return exit_code::success;
}

int cmd_locations(const fs::path& labeled, const fs::path& out) {
    write_text(out, locations_csv(contradiction_locations(load_propositions(labeled))));
    return exit_code::success;
}

std::vector<DatasetStatsRow> read_stats_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::vector<DatasetStatsRow> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 6) throw Error(ErrorKind::parse, path.string() + ": expected 6 columns");
        try {
            rows.push_back({cells[0], cells[1], std::stoll(cells[2]), std::stod(cells[3]), std::stod(cells[4]),
                            std::stod(cells[5])});
        } catch (const std::exception&) {
            throw Error(ErrorKind::parse, path.string() + ": bad number in '" + line + "'");
        }
    }
    return rows;
}

int cmd_report(const std::vector<fs::path>& summaries, const std::optional<fs::path>& stats, const fs::path& out_dir) {
    std::vector<ReportEntry> entries;
    for (const auto& path : summaries) entries.push_back(report_entry_from_summary(read_json(path)));
    std::vector<DatasetStatsRow> rows;
    if (stats) rows = read_stats_csv(*stats);
    write_report(entries, rows, out_dir);
    return exit_code::success;
}

}  // namespace knowada::cli
