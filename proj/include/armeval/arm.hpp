#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "armeval/corpus.hpp"
#include "armeval/llmgw.hpp"
#include "armeval/textproc.hpp"

namespace armeval {

enum class RewriteVariant { subjectivity_focused, inconsistency_focused, both };

std::string_view to_string(RewriteVariant v);
/// Accepts "subjectivity"/"subj", "inconsistency"/"inconsist", "both".
RewriteVariant parse_rewrite_variant(std::string_view s);
std::string_view template_name(RewriteVariant v);

enum class ResultStatus { ok, parse_failed };
std::string_view to_string(ResultStatus s);

enum class ExplanationSource {
    rewrite_response,  // text of the rewrite reply outside the <answer> span
    separate_call,     // an extra request asking the model to explain the edit
};

enum class ExplanationStatus { ok, skipped, empty, parse_failed };
std::string_view to_string(ExplanationStatus s);

struct ArmConfig {
    std::string model;
    RewriteVariant variant = RewriteVariant::both;
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    double temperature = 0.0;
    int max_tokens = 2048;
    bool explain = true;
    ExplanationSource explanation_source = ExplanationSource::rewrite_response;
    RewriteEquality equality = RewriteEquality::normalized;
};

struct RewriteResult {
    std::string claim_id;
    RewriteVariant variant = RewriteVariant::both;
    ResultStatus status = ResultStatus::ok;
    bool in_scope = true;  // false for gold N/A claims: rewritten but never scored
    std::string original_text;
    std::string rewrite_text;
    bool rewritten = false;
    std::size_t edit_distance = 0;
    double normalized_edit_distance = 0.0;
    std::vector<std::string> explanation_points;
    ExplanationStatus explanation_status = ExplanationStatus::skipped;
    std::vector<std::string> raw_responses;
};

struct ArmRun {
    std::string run_id;
    std::string model;
    RewriteVariant variant = RewriteVariant::both;
    std::uint64_t seed = 0;
    std::vector<RewriteResult> results;  // corpus order, failures included
    std::size_t failure_count = 0;

    [[nodiscard]] std::size_t rewrite_count() const;
    /// Mean normalized edit distance over rewritten claims (0 if none).
    [[nodiscard]] double mean_edit_distance_rewrites() const;
    /// Mean normalized edit distance over every parsed claim.
    [[nodiscard]] double mean_edit_distance_all() const;
};

struct RewriteOutcome {
    std::optional<std::string> rewrite_text;  // nullopt: parse_failed
    std::vector<std::string> raw_responses;
};

/// Ask for a rewrite of one claim with the variant's template; the answer
/// is read from the <answer> span, with one re-ask on a malformed reply.
RewriteOutcome rewrite_claim(Backend& backend, const PromptLibrary& prompts, const ArmConfig& cfg,
                             const Story& story, const SummaryRecord& summary, const Claim& claim);

struct ExplanationOutcome {
    ExplanationStatus status = ExplanationStatus::skipped;
    std::vector<std::string> points;
    std::vector<std::string> raw_responses;
};

/// Split an explanation into points with the <item> parsing prompt.
ExplanationOutcome explain_rewrite(Backend& backend, const PromptLibrary& prompts, const ArmConfig& cfg,
                                   std::string_view explanation);

/// Derive every signal for one claim from an already-extracted rewrite.
RewriteResult make_rewrite_result(const Claim& claim, RewriteVariant variant, std::string rewrite_text,
                                  RewriteEquality equality);

/// Rewrite every claim in corpus order. Per-claim parse failures are
/// recorded, never fatal; backend errors propagate.
ArmRun run_arm(const Corpus& corpus, Backend& backend, const PromptLibrary& prompts, const ArmConfig& cfg);

struct Predictions {
    std::map<std::string, bool> labels;  // claim id -> detection-positive
    std::size_t excluded_failures = 0;
};

/// rewritten => positive. Only in-scope, successfully parsed claims.
Predictions arm_predictions(const ArmRun& run);

nlohmann::json to_json(const RewriteResult& r);
nlohmann::json to_json(const ArmRun& run);
ArmRun arm_run_from_json(const nlohmann::json& doc);

}  // namespace armeval
