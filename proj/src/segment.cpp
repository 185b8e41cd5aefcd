#include <algorithm>
#include <array>
#include <cctype>
#include <string>

#include "armeval/corpus.hpp"
#include "armeval/textproc.hpp"

namespace armeval {

namespace {

// Lowercased, without the trailing period.
constexpr std::array<std::string_view, 24> kAbbreviations{
    "mr",  "mrs",  "ms",   "dr",   "prof", "sr",  "jr",   "st",  "mt",  "rev",  "gen", "col",
    "lt",  "capt", "sgt",  "gov",  "sen",  "rep", "hon",  "vs",  "e.g", "i.e",  "fr",  "messrs",
};

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Length of a closing quote/bracket at `pos`, 0 if none.
std::size_t closer_len(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) return 0;
    const char c = text[pos];
    if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
    for (std::string_view q : {std::string_view("”"), std::string_view("’")})
        if (text.substr(pos, q.size()) == q) return q.size();
    return 0;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// The whitespace-delimited word ending right before `dot` (exclusive),
// with leading quotes/brackets stripped.
std::string_view word_before(std::string_view text, std::size_t dot) {
    std::size_t b = dot;
    while (b > 0 && !is_ws(text[b - 1])) --b;
    std::string_view w = text.substr(b, dot - b);
    while (!w.empty() && (w.front() == '"' || w.front() == '\'' || w.front() == '(')) w.remove_prefix(1);
    return w;
}

bool is_initial(std::string_view word) {
    return word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]));
}

// Next whitespace-delimited token starting at or after `pos`.
std::string_view next_token(std::string_view text, std::size_t pos, std::size_t* end = nullptr) {
    while (pos < text.size() && is_ws(text[pos])) ++pos;
    std::size_t e = pos;
    while (e < text.size() && !is_ws(text[e])) ++e;
    if (end) *end = e;
    return text.substr(pos, e - pos);
}

// An initial counts as part of a name when a chain of further initials
// ends in a capitalized word, e.g. "J. K. Rowling".
bool initial_continues_name(std::string_view text, std::size_t after) {
    std::size_t pos = after;
    while (true) {
        std::size_t end = 0;
        const std::string_view tok = next_token(text, pos, &end);
        if (tok.empty()) return false;
        if (tok.size() == 2 && std::isupper(static_cast<unsigned char>(tok[0])) && tok[1] == '.') {
            pos = end;
            continue;
        }
        if (tok.size() < 2 || !std::isupper(static_cast<unsigned char>(tok[0]))) return false;
        return std::all_of(tok.begin() + 1, tok.end(), [](unsigned char c) {
            return std::isalpha(c) || c == '\'' || c == '-' || c == ',' || c == '.';
        });
    }
}

bool is_boundary(std::string_view text, std::size_t punct_start, std::size_t punct_end,
                 std::size_t end) {
    if (end >= text.size()) return true;
    if (!is_ws(text[end])) return false;
    const std::string_view nxt = next_token(text, end);
    if (nxt.empty()) return true;
    if (std::islower(static_cast<unsigned char>(nxt.front()))) return false;

    // Abbreviation checks apply only to a lone period.
    if (punct_end - punct_start != 1 || text[punct_start] != '.') return true;
    const std::string_view w = word_before(text, punct_start);
    if (w.empty()) return true;
    const std::string lw = lower(w);
    if (std::find(kAbbreviations.begin(), kAbbreviations.end(), lw) != kAbbreviations.end())
        return false;
    if (is_initial(w) && initial_continues_name(text, end)) return false;
    return true;
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    std::size_t i = 0;
    auto push = [&](std::size_t a, std::size_t b) {
        const std::string_view seg = trim(text.substr(a, b - a));
        if (!seg.empty()) out.emplace_back(seg);
    };
    while (i < text.size()) {
        if (!is_terminal(text[i])) {
            ++i;
            continue;
        }
        const std::size_t punct_start = i;
        while (i < text.size() && is_terminal(text[i])) ++i;
        const std::size_t punct_end = i;
        while (std::size_t n = closer_len(text, i)) i += n;
        if (is_boundary(text, punct_start, punct_end, i)) {
            push(start, i);
            start = i;
        }
    }
    push(start, text.size());
    return out;
}

}  // namespace armeval
