#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "armeval/corpus.hpp"
#include "armeval/llmgw.hpp"

namespace armeval {

enum class Direction { to_objective, to_subjective };

std::string_view to_string(Direction d);

enum class VariantStatus {
    ok,
    unchanged,     // to_subjective output still equal to the source after the retry
    parse_failed,  // no <sentence> span after the retry
};

std::string_view to_string(VariantStatus s);

struct SyntheticVariant {
    std::string source_claim_id;
    Direction direction = Direction::to_subjective;
    int ambiguity_type = 1;
    std::string text;
    std::string template_name;
    VariantStatus status = VariantStatus::ok;
    std::vector<std::string> raw_responses;

    [[nodiscard]] bool accepted() const { return status == VariantStatus::ok; }
    [[nodiscard]] Subjectivity polarity() const {
        return direction == Direction::to_subjective ? Subjectivity::subjective : Subjectivity::objective;
    }
};

struct SynthConfig {
    std::string model;
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    int max_tokens = 1024;
    /// Generate all four to_subjective types per objective claim instead of
    /// one seeded type.
    bool all_types = false;
};

/// Preconditions: non-empty claim text; to_objective needs a subjective
/// claim of the same type, to_subjective an objective claim. A
/// to_subjective answer that normalizes equal to the source is re-asked
/// once and then flagged `unchanged`.
SyntheticVariant generate_variant(Backend& backend, const PromptLibrary& prompts, const SynthConfig& cfg,
                                  const Story& story, const SummaryRecord& summary, const Claim& claim,
                                  Direction direction, int ambiguity_type);

/// One planned generation job.
struct VariantJob {
    const Story* story;
    const SummaryRecord* summary;
    const Claim* claim;
    Direction direction;
    int ambiguity_type;
};

/// Objective claims get to_subjective jobs (one seeded type, or all four);
/// subjective claims typed 1-4 get a to_objective job of their own type.
/// N/A claims and type-5 claims are skipped.
std::vector<VariantJob> plan_variants(const Corpus& corpus, const SynthConfig& cfg);

std::vector<SyntheticVariant> generate_variants(const Corpus& corpus, Backend& backend, const PromptLibrary& prompts,
                                                const SynthConfig& cfg);

struct SplicedClaim {
    std::size_t position = 0;
    std::string source_claim_id;
    std::optional<Subjectivity> polarity;  // expected label; none for N/A claims
    std::string variant;  // "original", "to_objective", "to_subjective"
    std::string text;
    std::string template_name;
    std::optional<int> ambiguity_type;
};

struct SplicedSummary {
    std::string summary_id;  // source summary
    std::string story_id;
    std::uint64_t seed = 0;
    std::vector<SplicedClaim> claims;
};

/// Per position, a fair coin drawn from one seeded stream (summaries and
/// positions in corpus order) picks the objective or subjective candidate.
/// The objective candidate is an accepted to_objective variant, else the
/// original claim if it is objective; symmetrically for subjective.
/// Claims with a gold N/A label pass through unchanged with no polarity.
/// Throws DataError naming the first position lacking either polarity.
std::vector<SplicedSummary> splice(const Corpus& corpus, const std::vector<SyntheticVariant>& variants,
                                   std::uint64_t seed);

/// Spliced summaries as a corpus (same stories), with per-claim provenance.
Corpus spliced_corpus(const Corpus& source, const std::vector<SplicedSummary>& splices);

/// JSON-lines, one accepted variant per line:
/// {"story", "summary", "claim", "label"} with the summary text carrying
/// the variant in place of its source claim.
void export_finetune_corpus(const Corpus& corpus, const std::vector<SyntheticVariant>& variants,
                            const std::filesystem::path& path);

nlohmann::json to_json(const SyntheticVariant& v);

}  // namespace armeval
