#include "knowada/core/types.hpp"

#include <array>
#include <utility>

#include "knowada/core/error.hpp"

namespace knowada {

namespace {

template <typename E, std::size_t N>
E lookup(const std::array<std::pair<std::string_view, E>, N>& table, std::string_view name,
         std::string_view what) {
    for (const auto& [key, value] : table)
        if (key == name) return value;
    throw Error(ErrorKind::validation, "unknown " + std::string(what) + " '" + std::string(name) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, E>, N>& table, E value) {
    for (const auto& [key, v] : table)
        if (v == value) return key;
    return "?";
}

constexpr std::array<std::pair<std::string_view, Split>, 3> split_names{{
    {"train", Split::train}, {"eval", Split::eval}, {"test", Split::test}}};
constexpr std::array<std::pair<std::string_view, Source>, 2> source_names{{
    {"human", Source::human}, {"synthetic", Source::synthetic}}};
constexpr std::array<std::pair<std::string_view, Verdict>, 3> verdict_names{{
    {"correct", Verdict::correct}, {"incorrect", Verdict::incorrect}, {"unjudged", Verdict::unjudged}}};
constexpr std::array<std::pair<std::string_view, AdaptMethod>, 4> method_names{{
    {"knowada", AdaptMethod::knowada},
    {"random", AdaptMethod::random},
    {"trim", AdaptMethod::trim},
    {"simplify", AdaptMethod::simplify}}};
constexpr std::array<std::pair<std::string_view, Label>, 4> label_names{{
    {"entailed", Label::entailed},
    {"contradicted", Label::contradicted},
    {"neutral", Label::neutral},
    {"unlabeled", Label::unlabeled}}};

}  // namespace

std::string_view to_string(Split v) { return name_of(split_names, v); }
std::string_view to_string(Source v) { return name_of(source_names, v); }
std::string_view to_string(Verdict v) { return name_of(verdict_names, v); }
std::string_view to_string(AdaptMethod v) { return name_of(method_names, v); }
std::string_view to_string(Label v) { return name_of(label_names, v); }

Split parse_split(std::string_view s) { return lookup(split_names, s, "split"); }
Source parse_source(std::string_view s) { return lookup(source_names, s, "source"); }
Verdict parse_verdict(std::string_view s) { return lookup(verdict_names, s, "verdict"); }
AdaptMethod parse_adapt_method(std::string_view s) { return lookup(method_names, s, "method"); }
Label parse_label(std::string_view s) { return lookup(label_names, s, "label"); }

Rational DifficultyReport::difficulty() const {
    if (num_correct < 0 || num_incorrect < 0 || num_correct + num_incorrect < 1)
        throw Error(ErrorKind::contract, "difficulty of '" + question_id + "' has no judged samples");
    return Rational(num_incorrect, num_correct + num_incorrect);
}

}  // namespace knowada
