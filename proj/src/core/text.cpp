#include "knowada/core/text.hpp"

#include <algorithm>
#include <cctype>

namespace knowada {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']' || c == '}'; }

}  // namespace

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_whitespace(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        const std::size_t start = i;
        while (i < s.size() && !is_space(s[i])) ++i;
        if (i > start) out.emplace_back(s.substr(start, i - start));
    }
    return out;
}

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    for (const auto& word : split_whitespace(s)) {
        if (!out.empty()) out.push_back(' ');
        out += word;
    }
    return out;
}

std::size_t word_count(std::string_view s) { return split_whitespace(s).size(); }

const std::vector<std::string_view>& sentence_abbreviations() {
    static const std::vector<std::string_view> list = {
        "e.g.", "i.e.", "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "St.", "Jr.", "Sr.", "vs.", "approx.", "cf.",
    };
    return list;
}

std::vector<std::string> split_sentences(std::string_view text) {
    const std::vector<std::string> words = split_whitespace(text);
    const auto& abbreviations = sentence_abbreviations();

    std::vector<std::string> sentences;
    std::string current;
    for (const auto& word : words) {
        if (!current.empty()) current.push_back(' ');
        current += word;

        std::size_t end = word.size();
        while (end > 0 && is_closer(word[end - 1])) --end;
        if (end == 0 || !is_terminator(word[end - 1])) continue;
        // Abbreviations are matched on the bare token, before any closer.
        const std::string_view bare(word.data(), end);
        if (std::find(abbreviations.begin(), abbreviations.end(), bare) != abbreviations.end()) continue;

        sentences.push_back(std::move(current));
        current.clear();
    }
    if (!current.empty()) sentences.push_back(std::move(current));
    return sentences;
}

std::vector<std::string> upper_words(std::string_view s) {
    std::vector<std::string> out;
    std::string word;
    for (char c : s) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            word.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        } else if (!word.empty()) {
            out.push_back(std::move(word));
            word.clear();
        }
    }
    if (!word.empty()) out.push_back(std::move(word));
    return out;
}

std::string strip_code_fence(std::string_view s) {
    std::string_view t = trim(s);
    if (t.substr(0, 3) != "```") return std::string(t);
    t.remove_prefix(3);
    const auto newline = t.find('\n');
    if (newline == std::string_view::npos) return std::string(t);
    t.remove_prefix(newline + 1);
    t = trim(t);
    if (t.size() >= 3 && t.substr(t.size() - 3) == "```") t.remove_suffix(3);
    return std::string(trim(t));
}

}  // namespace knowada
