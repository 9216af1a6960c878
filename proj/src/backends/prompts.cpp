#include "knowada/backends/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "knowada/core/error.hpp"
#include "knowada/core/hashing.hpp"

namespace knowada {

namespace {

// Walks `text`, calling on_literal for plain text and on_slot for {name}.
template <typename Literal, typename Slot>
void scan(const std::string& name, const std::string& text, Literal on_literal, Slot on_slot) {
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '{' && i + 1 < text.size() && text[i + 1] == '{') {
            on_literal('{');
            i += 2;
        } else if (c == '}' && i + 1 < text.size() && text[i + 1] == '}') {
            on_literal('}');
            i += 2;
        } else if (c == '{') {
            const auto close = text.find('}', i + 1);
            if (close == std::string::npos)
                throw Error(ErrorKind::validation, "template '" + name + "': unterminated placeholder");
            const std::string slot = text.substr(i + 1, close - i - 1);
            if (slot.empty() || !std::all_of(slot.begin(), slot.end(), [](char ch) {
                    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
                }))
                throw Error(ErrorKind::validation, "template '" + name + "': bad placeholder '{" + slot + "}'");
            on_slot(slot);
            i = close + 1;
        } else if (c == '}') {
            throw Error(ErrorKind::validation, "template '" + name + "': stray '}'");
        } else {
            on_literal(c);
            ++i;
        }
    }
}

const char* const question_generation_v1 = R"(You will be given a detailed description of an image.
Write visual questions that can be answered by looking at the image, where each answer is stated in the description.
Cover every distinct visual detail: objects, counts, colors, materials, positions, text, and actions.
Each question must be self-contained, ask about one detail, and end with a question mark.
Do not ask about anything that is not in the description. Write more questions for longer descriptions.

Description:
{caption}

Respond with a JSON array of strings and nothing else.)";

const char* const vlm_answer_v1 = R"(Look at the image and answer the question with a short phrase.

Question: {question}
Answer:)";

const char* const judge_answer_v1 = R"(You are grading an answer given by a vision-language model about an image.
The image description below is the ground truth. Decide whether the model's answer to the question agrees with the description.
Minor wording differences are fine; a wrong detail, wrong count, or refusal is incorrect.

Description:
{caption}

Question: {question}
Model answer: {answer}

Reply with exactly one word: CORRECT or INCORRECT.)";

const char* const rewrite_v1 = R"(You edit image descriptions. You receive a description and a list of questions.
Remove or generalise every part of the description that answers one of the questions, and keep all other details unchanged.
Keep the original style. Do not add new information. Return only the edited description.

Example 1
Description: A red bicycle leans against a brick wall. Two pigeons stand on the sidewalk next to its front wheel. A sign above reads "Bakery".
Questions:
- How many pigeons are on the sidewalk?
- What does the sign above the bicycle say?
Edited description: A red bicycle leans against a brick wall. Birds stand on the sidewalk next to its front wheel. A sign hangs above it.

Example 2
Description: A white ceramic mug sits on a wooden desk beside an open laptop. Steam rises from the mug. A yellow sticky note is attached to the laptop screen.
Questions:
- What color is the sticky note?
Edited description: A white ceramic mug sits on a wooden desk beside an open laptop. Steam rises from the mug. A sticky note is attached to the laptop screen.

Now edit this one.
Description: {caption}
Questions:
{questions}
Edited description:)";

const char* const simplify_v1 = R"(Simplify the following image description by removing details that are hard to perceive in the image,
such as small text, exact counts, fine-grained colors, and distant objects.
Simplification level: {degree} on a scale from 1 (remove only the hardest details) to 5 (keep only the main subject and setting).
Do not add information. Return only the simplified description.

Description:
{caption}

Simplified description:)";

const char* const caption_answer_v1 = R"(Answer the question using only the image description below.
If the description does not contain the answer, reply "unknown".

Description:
{caption}

Question: {question}
Answer:)";

const char* const p_entail_v1 = R"(Premise: {premise}
Hypothesis: {hypothesis}

What is the probability that the premise entails the hypothesis?
Reply with a single number between 0 and 1.)";

const char* const proposition_extraction_v1 = R"(Break the image description below into atomic propositions.
Each proposition states exactly one verifiable fact about the image (an object, attribute, count, relation, or action) and must be understandable on its own.
Keep the order in which facts appear in the description. Include only unique propositions.

Description:
{caption}

Respond with a JSON array of strings and nothing else.)";

const char* const proposition_judgement_v1 = R"(You judge whether a statement about an image follows from a reference description of the same image.

Reference description (premise):
{premise}

Statement (hypothesis):
{hypothesis}

Answer ENTAILED if the description supports the statement, CONTRADICTED if the description conflicts with it, and NEUTRAL if the description does not say.
Reply with one word: ENTAILED, CONTRADICTED, or NEUTRAL.)";

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string text) : name_(std::move(name)), text_(std::move(text)) {
    scan(
        name_, text_, [](char) {},
        [&](const std::string& slot) {
            if (std::find(placeholders_.begin(), placeholders_.end(), slot) == placeholders_.end())
                placeholders_.push_back(slot);
        });
}

std::string PromptTemplate::hash() const { return sha256_hex(name_ + '\n' + text_); }

std::string PromptTemplate::render(const std::map<std::string, std::string>& vars) const {
    for (const auto& [key, value] : vars)
        if (std::find(placeholders_.begin(), placeholders_.end(), key) == placeholders_.end())
            throw Error(ErrorKind::contract, "template '" + name_ + "' has no placeholder {" + key + "}");
    std::string out;
    out.reserve(text_.size());
    scan(
        name_, text_, [&](char c) { out.push_back(c); },
        [&](const std::string& slot) {
            const auto it = vars.find(slot);
            if (it == vars.end())
                throw Error(ErrorKind::contract, "template '" + name_ + "' is missing a value for {" + slot + "}");
            out += it->second;
        });
    return out;
}

const PromptLibrary& PromptLibrary::builtin() {
    static const PromptLibrary lib = [] {
        PromptLibrary l;
        const std::pair<std::string_view, const char*> entries[] = {
            {prompt_names::question_generation, question_generation_v1},
            {prompt_names::vlm_answer, vlm_answer_v1},
            {prompt_names::judge_answer, judge_answer_v1},
            {prompt_names::rewrite, rewrite_v1},
            {prompt_names::simplify, simplify_v1},
            {prompt_names::caption_answer, caption_answer_v1},
            {prompt_names::p_entail, p_entail_v1},
            {prompt_names::proposition_extraction, proposition_extraction_v1},
            {prompt_names::proposition_judgement, proposition_judgement_v1},
        };
        for (const auto& [name, text] : entries)
            l.templates_.emplace(std::string(name), PromptTemplate(std::string(name) + ".v1", text));
        return l;
    }();
    return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& dir) {
    PromptLibrary lib = builtin();
    for (auto& [name, tmpl] : lib.templates_) {
        const auto path = dir / (name + ".txt");
        std::ifstream in(path, std::ios::binary);
        if (!in) continue;
        std::ostringstream text;
        text << in.rdbuf();
        PromptTemplate replacement(name + ".file-" + path.filename().string(), text.str());
        auto want = tmpl.placeholders();
        auto got = replacement.placeholders();
        std::sort(want.begin(), want.end());
        std::sort(got.begin(), got.end());
        if (want != got)
            throw Error(ErrorKind::validation, "prompt override " + path.string() + " must use placeholders of '" +
                                                   name + "'");
        tmpl = std::move(replacement);
    }
    return lib;
}

const PromptTemplate& PromptLibrary::get(std::string_view name) const {
    const auto it = templates_.find(name);
    if (it == templates_.end()) throw Error(ErrorKind::validation, "no prompt template '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> PromptLibrary::names() const {
    std::vector<std::string> out;
    for (const auto& [name, t] : templates_) out.push_back(name);
    return out;
}

}  // namespace knowada
