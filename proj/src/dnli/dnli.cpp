#include "knowada/dnli/dnli.hpp"

#include <set>

#include <spdlog/spdlog.h>

#include "knowada/core/error.hpp"
#include "knowada/core/parallel.hpp"
#include "knowada/core/text.hpp"

namespace knowada {

LabelCounts LabelCounts::of(std::span<const Proposition> props) {
    LabelCounts c;
    for (const auto& p : props) {
        switch (p.label) {
            case Label::entailed: ++c.entailed; break;
            case Label::contradicted: ++c.contradicted; break;
            case Label::neutral: ++c.neutral; break;
            case Label::unlabeled: continue;
        }
        ++c.total;
    }
    return c;
}

LabelCounts& LabelCounts::operator+=(const LabelCounts& o) {
    total += o.total;
    entailed += o.entailed;
    contradicted += o.contradicted;
    neutral += o.neutral;
    return *this;
}

Rational DnliScore::desc_precision() const { return ratio(gen.entailed, gen.total); }
Rational DnliScore::desc_recall() const { return ratio(gt.entailed, gt.total); }

Rational DnliScore::contra_precision() const {
    return orientation == ContradictionOrientation::formula ? ratio(gt.contradicted, gt.total)
                                                            : ratio(gen.contradicted, gen.total);
}

Rational DnliScore::contra_recall() const {
    return orientation == ContradictionOrientation::formula ? ratio(gen.contradicted, gen.total)
                                                            : ratio(gt.contradicted, gt.total);
}

namespace {

Json counts_json(const LabelCounts& c) {
    return Json{{"total", c.total}, {"entailed", c.entailed}, {"contradicted", c.contradicted}, {"neutral", c.neutral}};
}

}  // namespace

Json to_json(const DnliScore& s) {
    return Json{{"pair_id", s.pair_id},
                {"gen_total", s.gen.total},
                {"gen_entailed", s.gen.entailed},
                {"gen_contradicted", s.gen.contradicted},
                {"gen_neutral", s.gen.neutral},
                {"gt_total", s.gt.total},
                {"gt_entailed", s.gt.entailed},
                {"gt_contradicted", s.gt.contradicted},
                {"gt_neutral", s.gt.neutral},
                {"desc_precision", s.desc_precision().to_double()},
                {"desc_recall", s.desc_recall().to_double()},
                {"contra_precision", s.contra_precision().to_double()},
                {"contra_recall", s.contra_recall().to_double()},
                {"word_count", s.word_count},
                {"contradiction_orientation", to_string(s.orientation)}};
}

std::vector<Proposition> decompose(const std::string& parent_id, const std::string& caption, Backend& decomposer,
                                   const PromptLibrary& prompts) {
    if (trim(caption).empty()) throw Error(ErrorKind::contract, "cannot decompose an empty caption");
    BackendRequest request;
    request.role = Role::decomposer;
    request.prompt = prompts.render(prompt_names::proposition_extraction, {{"caption", caption}});
    const std::string raw = decomposer.complete(request).text;

    std::vector<Proposition> props;
    std::set<std::string> seen;
    for (const auto& item : parse_string_list(raw)) {
        std::string text(trim(item));
        if (text.empty() || !seen.insert(text).second) continue;
        const int ordinal = static_cast<int>(props.size());
        props.push_back({parent_id + "/p" + std::to_string(ordinal), parent_id, ordinal, std::move(text),
                         Label::unlabeled});
    }
    if (props.empty()) throw Error(ErrorKind::structured_output, "decomposition of '" + parent_id + "' is empty", raw);
    return props;
}

Label parse_label_token(const std::string& reply) {
    for (const auto& word : upper_words(reply)) {
        if (word == "ENTAILED") return Label::entailed;
        if (word == "CONTRADICTED") return Label::contradicted;
        if (word == "NEUTRAL") return Label::neutral;
    }
    return Label::unlabeled;
}

Label classify_proposition(const Proposition& prop, const std::string& premise, Backend& nli,
                           const PromptLibrary& prompts) {
    if (prop.label != Label::unlabeled)
        throw Error(ErrorKind::contract, "proposition " + prop.prop_id + " is already labelled");
    if (trim(premise).empty()) throw Error(ErrorKind::contract, "empty premise for " + prop.prop_id);
    BackendRequest request;
    request.role = Role::nli;
    request.prompt = prompts.render(prompt_names::proposition_judgement, {{"premise", premise}, {"hypothesis", prop.text}});
    const std::string reply = nli.complete(request).text;
    const Label label = parse_label_token(reply);
    if (label == Label::unlabeled) spdlog::warn("proposition {}: unrecognised NLI reply: {}", prop.prop_id, reply);
    return label;
}

void label_propositions(std::vector<Proposition>& props, const std::string& premise, Backend& nli, std::size_t jobs,
                        const PromptLibrary& prompts) {
    const auto errors = parallel_for(props.size(), jobs, [&](std::size_t i) {
        props[i].label = classify_proposition(props[i], premise, nli, prompts);
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

DnliScore score_labeled(std::string pair_id, std::span<const Proposition> generated_props,
                        std::span<const Proposition> ground_truth_props, std::int64_t word_count,
                        ContradictionOrientation orientation) {
    DnliScore s;
    s.pair_id = std::move(pair_id);
    s.gen = LabelCounts::of(generated_props);
    s.gt = LabelCounts::of(ground_truth_props);
    s.word_count = word_count;
    s.orientation = orientation;
    if (s.gen.total == 0) throw Error(ErrorKind::validation, s.pair_id + ": no labelled generated propositions");
    if (s.gt.total == 0) throw Error(ErrorKind::validation, s.pair_id + ": no labelled ground-truth propositions");
    return s;
}

DnliScore score_pair(const std::string& generated_caption, const std::string& ground_truth_caption,
                     const DnliBackends& backends, ContradictionOrientation orientation, const PromptLibrary& prompts,
                     std::string pair_id) {
    if (trim(generated_caption).empty() || trim(ground_truth_caption).empty())
        throw Error(ErrorKind::contract, pair_id + ": both captions must be non-empty");
    auto gen = decompose(pair_id + "/gen", generated_caption, backends.decomposer, prompts);
    auto gt = decompose(pair_id + "/ref", ground_truth_caption, backends.decomposer, prompts);
    label_propositions(gen, ground_truth_caption, backends.nli, 1, prompts);
    label_propositions(gt, generated_caption, backends.nli, 1, prompts);
    return score_labeled(std::move(pair_id), gen, gt, static_cast<std::int64_t>(word_count(generated_caption)),
                         orientation);
}

CorpusScore aggregate_scores(std::vector<DnliScore> pairs, std::vector<SkipEntry> skipped) {
    if (pairs.empty()) throw Error(ErrorKind::validation, "no scored pairs to aggregate");
    CorpusScore c;
    c.micro.pair_id = "*";
    c.micro.orientation = pairs.front().orientation;
    double words = 0;
    for (const auto& p : pairs) {
        c.micro.gen += p.gen;
        c.micro.gt += p.gt;
        c.micro.word_count += p.word_count;
        words += static_cast<double>(p.word_count);
        c.macro.desc_precision += p.desc_precision().to_double();
        c.macro.desc_recall += p.desc_recall().to_double();
        c.macro.contra_precision += p.contra_precision().to_double();
        c.macro.contra_recall += p.contra_recall().to_double();
    }
    const auto n = static_cast<double>(pairs.size());
    c.macro.desc_precision /= n;
    c.macro.desc_recall /= n;
    c.macro.contra_precision /= n;
    c.macro.contra_recall /= n;
    c.mean_word_count = words / n;
    c.pairs = std::move(pairs);
    c.skipped = std::move(skipped);
    return c;
}

CorpusScore score_corpus(std::span<const CaptionPair> pairs, const DnliBackends& backends,
                         ContradictionOrientation orientation, std::size_t jobs, const PromptLibrary& prompts) {
    if (pairs.empty()) throw Error(ErrorKind::validation, "score_corpus needs at least one pair");
    std::vector<std::optional<DnliScore>> scores(pairs.size());
    const auto errors = parallel_for(pairs.size(), jobs, [&](std::size_t i) {
        scores[i] = score_pair(pairs[i].generated, pairs[i].ground_truth, backends, orientation, prompts, pairs[i].pair_id);
    });
    std::vector<DnliScore> ok;
    std::vector<SkipEntry> skipped;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                spdlog::warn("pair {} skipped: {}", pairs[i].pair_id, e.what());
                skipped.push_back({pairs[i].pair_id, "score", e.what()});
            }
            continue;
        }
        ok.push_back(std::move(*scores[i]));
    }
    if (ok.empty()) throw Error(ErrorKind::validation, "every pair failed; nothing to aggregate");
    return aggregate_scores(std::move(ok), std::move(skipped));
}

Json to_json(const CorpusScore& c) {
    Json skipped = Json::array();
    for (const auto& s : c.skipped) skipped.push_back(to_json(s));
    const DnliScore& m = c.micro;
    return Json{{"pairs", c.pairs.size()},
                {"contradiction_orientation", to_string(m.orientation)},
                {"micro",
                 {{"desc_precision", m.desc_precision().to_double()},
                  {"desc_recall", m.desc_recall().to_double()},
                  {"contra_precision", m.contra_precision().to_double()},
                  {"contra_recall", m.contra_recall().to_double()},
                  {"desc_precision_exact", m.desc_precision().to_string()},
                  {"desc_recall_exact", m.desc_recall().to_string()},
                  {"contra_precision_exact", m.contra_precision().to_string()},
                  {"contra_recall_exact", m.contra_recall().to_string()},
                  {"gen", counts_json(m.gen)},
                  {"gt", counts_json(m.gt)}}},
                {"macro",
                 {{"desc_precision", c.macro.desc_precision},
                  {"desc_recall", c.macro.desc_recall},
                  {"contra_precision", c.macro.contra_precision},
                  {"contra_recall", c.macro.contra_recall}}},
                {"mean_word_count", c.mean_word_count},
                {"skipped", skipped}};
}

}  // namespace knowada
