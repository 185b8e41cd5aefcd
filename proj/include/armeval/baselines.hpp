#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "armeval/arm.hpp"
#include "armeval/corpus.hpp"
#include "armeval/llmgw.hpp"

namespace armeval {

enum class BaselineKind { zero_shot, few_shot, self_consistency };

std::string_view to_string(BaselineKind k);
BaselineKind parse_baseline_kind(std::string_view s);

/// Zero/few-shot ask "Is this claim objective?" once at temperature 0.
/// Self-consistency asks the consistency question three times at 0.7.
struct BaselineMethod {
    BaselineKind kind = BaselineKind::zero_shot;
    int sample_count = 1;
    double temperature = 0.0;

    static BaselineMethod make(BaselineKind kind);
    [[nodiscard]] std::string_view template_name() const;
};

struct Classification {
    ResultStatus status = ResultStatus::ok;
    bool positive = false;  // detection-positive: subjective / inconsistent
    std::vector<std::optional<bool>> answers;  // parsed Yes/No per sample
    bool tie = false;  // self-consistency with one Yes, one No, one failure
    std::vector<std::string> raw_responses;
};

/// Majority vote over parsed Yes/No answers for the consistency question.
/// Needs at least two parsed answers; "No" (inconsistent) wins a tie.
Classification vote_self_consistency(const std::vector<std::optional<bool>>& answers);

Classification classify_claim(Backend& backend, const PromptLibrary& prompts, const BaselineMethod& method,
                              const std::string& model, int max_tokens, const Story& story,
                              const SummaryRecord& summary, const Claim& claim);

struct BaselineRecord {
    std::string claim_id;
    bool in_scope = true;
    Classification result;
};

struct BaselineRun {
    std::string run_id;
    std::string model;
    BaselineMethod method;
    std::uint64_t seed = 0;
    std::vector<BaselineRecord> records;
    std::size_t failure_count = 0;
    std::size_t tie_count = 0;
};

struct BaselineConfig {
    std::string model;
    BaselineMethod method;
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    int max_tokens = 2048;
};

BaselineRun run_baseline(const Corpus& corpus, Backend& backend, const PromptLibrary& prompts,
                         const BaselineConfig& cfg);

Predictions baseline_predictions(const BaselineRun& run);

nlohmann::json to_json(const BaselineRun& run);

}  // namespace armeval
