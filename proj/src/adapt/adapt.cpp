#include "knowada/adapt/adapt.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "knowada/core/error.hpp"
#include "knowada/core/random.hpp"
#include "knowada/core/text.hpp"

namespace knowada {

std::string rewrite_caption(const std::string& caption, std::span<const ProbeQuestion> remove, Backend& rewriter,
                            const PromptLibrary& prompts) {
    if (remove.empty()) return caption;
    std::string list;
    for (const auto& q : remove) list += "- " + q.text + "\n";
    if (!list.empty()) list.pop_back();

    BackendRequest request;
    request.role = Role::rewriter;
    request.prompt = prompts.render(prompt_names::rewrite, {{"caption", caption}, {"questions", list}});
    std::string text(trim(rewriter.complete(request).text));
    if (text.empty()) throw Error(ErrorKind::structured_output, "rewriter returned an empty caption");
    return text;
}

namespace {

std::vector<ProbeQuestion> of_record(const std::string& record_id, std::span<const ProbeQuestion> questions) {
    std::vector<ProbeQuestion> out;
    for (const auto& q : questions)
        if (q.record_id == record_id) out.push_back(q);
    return out;
}

std::string join_ids(const std::vector<ProbeQuestion>& qs) {
    std::string out;
    for (const auto& q : qs) {
        if (!out.empty()) out += ',';
        out += q.question_id;
    }
    return out;
}

}  // namespace

AdaptedCaption adapt_knowada(const CaptionRecord& record, const KnowledgeClassification& classification,
                             std::span<const ProbeQuestion> questions, Backend& rewriter, const PromptLibrary& prompts) {
    if (classification.record_id != record.record_id)
        throw Error(ErrorKind::contract, "classification for '" + classification.record_id + "' applied to '" +
                                             record.record_id + "'");
    std::vector<ProbeQuestion> unknown;
    for (const auto& q : of_record(record.record_id, questions))
        if (classification.unknown_question_ids.count(q.question_id) != 0) unknown.push_back(q);
    if (unknown.size() != classification.unknown_question_ids.size())
        throw Error(ErrorKind::validation, "record '" + record.record_id + "': unknown questions missing from the question set");

    AdaptedCaption out;
    out.record_id = record.record_id;
    out.method = AdaptMethod::knowada;
    out.text = rewrite_caption(record.caption, unknown, rewriter, prompts);
    out.removed_question_ids = classification.unknown_question_ids;
    out.params["threshold"] = classification.threshold.to_string();
    return out;
}

AdaptedCaption adapt_random(const CaptionRecord& record, std::span<const ProbeQuestion> questions, std::size_t k,
                            std::uint64_t seed, Backend& rewriter, const PromptLibrary& prompts) {
    const auto pool = of_record(record.record_id, questions);
    if (k > pool.size())
        throw Error(ErrorKind::contract, "record '" + record.record_id + "': k=" + std::to_string(k) + " exceeds " +
                                             std::to_string(pool.size()) + " questions");
    auto engine = seeded_engine(seed, record.record_id);
    std::vector<ProbeQuestion> chosen;
    for (std::size_t i : sample_without_replacement(engine, pool.size(), k)) chosen.push_back(pool[i]);

    AdaptedCaption out;
    out.record_id = record.record_id;
    out.method = AdaptMethod::random;
    out.text = rewrite_caption(record.caption, chosen, rewriter, prompts);
    for (const auto& q : chosen) out.removed_question_ids.insert(q.question_id);
    out.params["seed"] = std::to_string(seed);
    out.params["k"] = std::to_string(k);
    out.params["chosen"] = join_ids(chosen);
    return out;
}

AdaptedCaption adapt_trim(const CaptionRecord& record, std::size_t k_sentences) {
    const auto sentences = split_sentences(record.caption);
    const std::size_t s = sentences.size();
    const std::size_t removed = s == 0 ? 0 : std::min(k_sentences, s - 1);
    std::string text;
    for (std::size_t i = 0; i < s - removed; ++i) {
        if (!text.empty()) text.push_back(' ');
        text += sentences[i];
    }
    AdaptedCaption out;
    out.record_id = record.record_id;
    out.method = AdaptMethod::trim;
    // Nothing removed means the caption is returned exactly as given.
    out.text = removed == 0 ? record.caption : text;
    out.params["k_sentences"] = std::to_string(k_sentences);
    out.params["removed_sentences"] = std::to_string(removed);
    return out;
}

AdaptedCaption adapt_simplify(const CaptionRecord& record, int degree, Backend& rewriter, const PromptLibrary& prompts) {
    if (degree < min_simplify_degree || degree > max_simplify_degree)
        throw Error(ErrorKind::validation, "simplify degree must be in [1, 5], got " + std::to_string(degree));
    BackendRequest request;
    request.role = Role::rewriter;
    request.prompt =
        prompts.render(prompt_names::simplify, {{"caption", record.caption}, {"degree", std::to_string(degree)}});
    std::string text(trim(rewriter.complete(request).text));
    if (text.empty()) throw Error(ErrorKind::structured_output, "rewriter returned an empty caption");

    AdaptedCaption out;
    out.record_id = record.record_id;
    out.method = AdaptMethod::simplify;
    out.text = std::move(text);
    out.params["degree"] = std::to_string(degree);
    return out;
}

double parse_probability(const std::string& reply) {
    for (std::size_t i = 0; i < reply.size(); ++i) {
        const char c = reply[i];
        const bool starts_number = std::isdigit(static_cast<unsigned char>(c)) ||
                                   (c == '.' && i + 1 < reply.size() && std::isdigit(static_cast<unsigned char>(reply[i + 1])));
        if (!starts_number) continue;
        const bool negative = i > 0 && reply[i - 1] == '-';
        double value = 0;
        const auto [ptr, ec] = std::from_chars(reply.data() + i, reply.data() + reply.size(), value);
        if (ec != std::errc()) break;
        if (negative) value = -value;
        if (ptr < reply.data() + reply.size() && *ptr == '%') value /= 100.0;
        if (!(value >= 0.0 && value <= 1.0))
            throw Error(ErrorKind::contract, "entailment probability outside [0, 1]: " + std::to_string(value), reply);
        return value;
    }
    throw Error(ErrorKind::structured_output, "no probability in entailment reply", reply);
}

double BackendEntailmentScorer::p_entail(const std::string& premise, const std::string& hypothesis) {
    BackendRequest request;
    request.role = Role::nli;
    request.prompt = prompts_.render(prompt_names::p_entail, {{"premise", premise}, {"hypothesis", hypothesis}});
    return parse_probability(nli_.complete(request).text);
}

bool information_lost(double forward, double backward) {
    return forward < information_loss_cutoff && backward < information_loss_cutoff;
}

std::optional<Rational> RobustnessReport::removal_rate() const {
    if (unknown_total == 0) return std::nullopt;
    return Rational(unknown_removed_count, unknown_total);
}

std::optional<Rational> RobustnessReport::retention_rate() const {
    if (known_total == 0) return std::nullopt;
    return Rational(known_retained_count, known_total);
}

Json to_json(const RobustnessReport& r) {
    Json j{{"record_id", r.record_id},
           {"unknown_removed_count", r.unknown_removed_count},
           {"unknown_total", r.unknown_total},
           {"known_retained_count", r.known_retained_count},
           {"known_total", r.known_total}};
    if (const auto rate = r.removal_rate()) j["removal_rate"] = rate->to_double();
    if (const auto rate = r.retention_rate()) j["retention_rate"] = rate->to_double();
    return j;
}

namespace {

std::string answer_from(const std::string& caption, const ProbeQuestion& q, Backend& answerer,
                        const PromptLibrary& prompts) {
    BackendRequest request;
    request.role = Role::judge;
    request.temperature = 0.0;
    request.prompt = prompts.render(prompt_names::caption_answer, {{"caption", caption}, {"question", q.text}});
    return answerer.complete(request).text;
}

double checked(double p) {
    if (!(p >= 0.0 && p <= 1.0))
        throw Error(ErrorKind::contract, "entailment scorer returned " + std::to_string(p) + ", outside [0, 1]");
    return p;
}

bool lost(const std::string& original, const std::string& rewritten, const ProbeQuestion& q, Backend& answerer,
          EntailmentScorer& scorer, const PromptLibrary& prompts) {
    const std::string before = answer_from(original, q, answerer, prompts);
    const std::string after = answer_from(rewritten, q, answerer, prompts);
    const double forward = checked(scorer.p_entail(before, after));
    const double backward = checked(scorer.p_entail(after, before));
    return information_lost(forward, backward);
}

}  // namespace

RobustnessReport verify_rewrite(const std::string& record_id, const std::string& original, const std::string& rewritten,
                                std::span<const ProbeQuestion> known_questions,
                                std::span<const ProbeQuestion> unknown_questions, Backend& answerer,
                                EntailmentScorer& scorer, const PromptLibrary& prompts) {
    RobustnessReport r;
    r.record_id = record_id;
    for (const auto& q : unknown_questions) {
        ++r.unknown_total;
        if (lost(original, rewritten, q, answerer, scorer, prompts)) ++r.unknown_removed_count;
    }
    for (const auto& q : known_questions) {
        ++r.known_total;
        if (!lost(original, rewritten, q, answerer, scorer, prompts)) ++r.known_retained_count;
    }
    return r;
}

RobustnessReport sum_reports(std::span<const RobustnessReport> reports) {
    RobustnessReport total;
    total.record_id = "*";
    for (const auto& r : reports) {
        total.unknown_removed_count += r.unknown_removed_count;
        total.unknown_total += r.unknown_total;
        total.known_retained_count += r.known_retained_count;
        total.known_total += r.known_total;
    }
    return total;
}

}  // namespace knowada
