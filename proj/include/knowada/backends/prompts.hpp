#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace knowada {

// A named text template with {placeholder} slots. "{{" and "}}" render as
// literal braces. Rendering fails on unknown or missing placeholders.
class PromptTemplate {
public:
    PromptTemplate() = default;
    PromptTemplate(std::string name, std::string text);

    const std::string& name() const noexcept { return name_; }
    const std::string& text() const noexcept { return text_; }
    const std::vector<std::string>& placeholders() const noexcept { return placeholders_; }
    std::string hash() const;

    std::string render(const std::map<std::string, std::string>& vars) const;

private:
    std::string name_;
    std::string text_;
    std::vector<std::string> placeholders_;
};

namespace prompt_names {
inline constexpr std::string_view question_generation = "question_generation";
inline constexpr std::string_view vlm_answer = "vlm_answer";
inline constexpr std::string_view judge_answer = "judge_answer";
inline constexpr std::string_view rewrite = "rewrite";
inline constexpr std::string_view simplify = "simplify";
inline constexpr std::string_view caption_answer = "caption_answer";
inline constexpr std::string_view p_entail = "p_entail";
inline constexpr std::string_view proposition_extraction = "proposition_extraction";
inline constexpr std::string_view proposition_judgement = "proposition_judgement";
}  // namespace prompt_names

class PromptLibrary {
public:
    // The built-in templates, version "v1".
    static const PromptLibrary& builtin();

    // Built-ins overridden by any <name>.txt found in `dir`; an override must
    // use the same placeholder set as the template it replaces.
    static PromptLibrary with_overrides(const std::filesystem::path& dir);

    const PromptTemplate& get(std::string_view name) const;
    std::string render(std::string_view name, const std::map<std::string, std::string>& vars) const {
        return get(name).render(vars);
    }
    std::vector<std::string> names() const;

private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace knowada
