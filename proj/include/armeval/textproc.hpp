#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace armeval {

/// Normalized word tokens: lowercased, Porter-stemmed, no empty tokens.
using TokenSeq = std::vector<std::string>;

/// Stem a single lowercase word with the original Porter (1980) algorithm.
/// Words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

/// Whitespace split followed by stripping leading/trailing punctuation
/// (ASCII and common UTF-8 quote/dash/ellipsis marks). No case folding.
std::vector<std::string> tokenize_words(std::string_view text);

TokenSeq normalize(std::string_view text);

/// Unit-cost Levenshtein distance with whole tokens as the atomic units.
std::size_t word_edit_distance(const TokenSeq& a, const TokenSeq& b);

/// word_edit_distance / max(|a|, |b|); 0 when both are empty.
double normalized_edit_distance(const TokenSeq& a, const TokenSeq& b);

enum class RewriteEquality {
    normalized,  // compare normalize(original) with normalize(rewrite)
    raw,         // byte comparison after trimming surrounding whitespace
};

bool is_rewritten(std::string_view original, std::string_view rewrite,
                  RewriteEquality mode = RewriteEquality::normalized);

/// Trim ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace armeval
