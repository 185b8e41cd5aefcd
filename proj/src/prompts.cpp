#include "armeval/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "armeval/errors.hpp"
#include "embedded_prompts.hpp"

namespace armeval {

namespace {

bool is_slot_char(char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
}

// Length of a `{identifier}` placeholder starting at `pos`, 0 if none.
std::size_t slot_at(std::string_view text, std::size_t pos) {
    if (text[pos] != '{') return 0;
    std::size_t j = pos + 1;
    while (j < text.size() && is_slot_char(text[j])) ++j;
    if (j == pos + 1 || j >= text.size() || text[j] != '}') return 0;
    return j - pos + 1;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw UsageError("cannot read prompt file '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

PromptTemplate PromptTemplate::make(std::string name, std::string system, std::string user) {
    PromptTemplate t{std::move(name), std::move(system), std::move(user), {}};
    for (std::size_t i = 0; i < t.user.size(); ++i) {
        if (std::size_t n = slot_at(t.user, i)) {
            t.slot_names.push_back(t.user.substr(i + 1, n - 2));
            i += n - 1;
        }
    }
    return t;
}

RenderedPrompt render(const PromptTemplate& tmpl, const Bindings& bindings) {
    RenderedPrompt out{tmpl.system, {}};
    out.user.reserve(tmpl.user.size());
    const std::string_view user = tmpl.user;
    for (std::size_t i = 0; i < user.size();) {
        if (std::size_t n = slot_at(user, i)) {
            const std::string_view slot = user.substr(i + 1, n - 2);
            auto it = bindings.find(slot);
            if (it == bindings.end())
                throw UsageError("prompt '" + tmpl.name + "': missing binding for slot '" + std::string(slot) + "'");
            out.user += it->second;
            i += n;
        } else {
            out.user += user[i++];
        }
    }
    return out;
}

std::string prompt_names::synth(bool to_subjective, int ambiguity_type) {
    if (ambiguity_type < 1 || ambiguity_type > 4)
        throw UsageError("synthetic prompts exist for ambiguity types 1-4 only");
    return std::string(to_subjective ? "synth_to_subjective_type" : "synth_to_objective_type") +
           std::to_string(ambiguity_type);
}

const PromptLibrary& PromptLibrary::builtin() {
    static const PromptLibrary lib = [] {
        PromptLibrary l;
        for (const auto& p : detail::embedded_prompts())
            l.add(PromptTemplate::make(std::string(p.name), std::string(p.system), std::string(p.user)));
        return l;
    }();
    return lib;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw UsageError("prompt directory '" + dir.string() + "' not found");
    PromptLibrary lib;
    constexpr std::string_view suffix = ".user.txt";
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string fname = entry.path().filename().string();
        if (fname.size() <= suffix.size() || fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) != 0)
            continue;
        const std::string name = fname.substr(0, fname.size() - suffix.size());
        const auto sys_path = dir / (name + ".system.txt");
        std::string system = std::filesystem::exists(sys_path) ? read_file(sys_path) : std::string{};
        lib.add(PromptTemplate::make(name, std::move(system), read_file(entry.path())));
    }
    return lib;
}

const PromptTemplate& PromptLibrary::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw UsageError("unknown prompt template '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> PromptLibrary::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : templates_) out.push_back(k);
    return out;
}

void PromptLibrary::add(PromptTemplate t) {
    std::string key = t.name;
    templates_.insert_or_assign(std::move(key), std::move(t));
}

}  // namespace armeval
