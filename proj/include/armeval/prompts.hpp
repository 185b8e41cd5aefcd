#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace armeval {

/// A named system+user prompt pair. Slots are written `{name}` in the user
/// text; `slot_names` lists them in order of appearance.
struct PromptTemplate {
    std::string name;
    std::string system;
    std::string user;
    std::vector<std::string> slot_names;

    /// Scans `user` for `{identifier}` placeholders.
    static PromptTemplate make(std::string name, std::string system, std::string user);
};

struct RenderedPrompt {
    std::string system;
    std::string user;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

/// Pure single-pass substitution: bound values are never rescanned.
/// Throws UsageError naming the first unbound slot.
RenderedPrompt render(const PromptTemplate& tmpl, const Bindings& bindings);

namespace prompt_names {
inline constexpr std::string_view zero_shot = "baseline_zero_shot";
inline constexpr std::string_view few_shot = "baseline_few_shot";
inline constexpr std::string_view self_consistency = "baseline_self_consistency";
inline constexpr std::string_view rewrite_subjectivity = "rewrite_subjectivity";
inline constexpr std::string_view rewrite_inconsistency = "rewrite_inconsistency";
inline constexpr std::string_view rewrite_both = "rewrite_both";
inline constexpr std::string_view explanation_parse = "explanation_parse";
inline constexpr std::string_view explanation_request = "explanation_request";

/// "synth_to_objective_type3" etc.
std::string synth(bool to_subjective, int ambiguity_type);
}  // namespace prompt_names

/// Template set. `builtin()` uses the copies of prompts/ compiled into the
/// library; `from_directory()` reads `<name>.user.txt` and optional
/// `<name>.system.txt` files, overriding nothing else.
class PromptLibrary {
  public:
    static const PromptLibrary& builtin();
    static PromptLibrary from_directory(const std::filesystem::path& dir);

    [[nodiscard]] const PromptTemplate& get(std::string_view name) const;
    [[nodiscard]] std::vector<std::string> names() const;
    void add(PromptTemplate t);

  private:
    std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace armeval
