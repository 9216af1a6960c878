#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace knowada {

std::string_view trim(std::string_view s);

// Collapses whitespace runs to a single space and trims the ends.
std::string normalize_whitespace(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);

std::size_t word_count(std::string_view s);

// Splits at '.', '!' or '?' followed by whitespace or end of text. Closing
// quotes and brackets directly after the terminator stay with the sentence.
// Tokens in sentence_abbreviations() never end a sentence.
std::vector<std::string> split_sentences(std::string_view text);

const std::vector<std::string_view>& sentence_abbreviations();

// Alphabetic words of `s`, upper-cased (ASCII only).
std::vector<std::string> upper_words(std::string_view s);

// Strips a surrounding ``` / ```json fence if present.
std::string strip_code_fence(std::string_view s);

}  // namespace knowada
