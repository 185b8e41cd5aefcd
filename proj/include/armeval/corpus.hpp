#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace armeval {

inline constexpr std::string_view kCorpusSchemaVersion = "1";

enum class FaithStatus { supported, unsupported, ambiguous, not_applicable };
enum class Subjectivity { objective, subjective };
enum class WriterKind { llm, human };

std::string_view to_string(FaithStatus s);
std::string_view to_string(Subjectivity s);
std::string_view to_string(WriterKind w);

/// Parses the four native statuses plus the StorySumm source vocabulary
/// (faithful/unfaithful/N/A, and 1/0 flags via the adapter).
FaithStatus parse_faith_status(std::string_view s);
Subjectivity parse_subjectivity(std::string_view s);

struct FaithLabel {
    std::string annotator_id;
    FaithStatus value = FaithStatus::supported;

    bool operator==(const FaithLabel&) const = default;
};

/// Where a synthetic or spliced claim came from.
struct ClaimProvenance {
    std::string source_claim_id;
    std::string variant;  // "original", "to_objective", "to_subjective"
    std::optional<Subjectivity> expected;  // none for N/A commentary claims
    std::optional<int> ambiguity_type;
    std::string template_name;

    bool operator==(const ClaimProvenance&) const = default;
};

struct Claim {
    std::string id;
    std::string text;
    std::vector<FaithLabel> faithfulness_labels;
    std::optional<FaithStatus> gold_faithfulness;
    std::optional<Subjectivity> subjectivity;
    std::optional<int> ambiguity_type;  // 1..5, only on subjective claims
    std::optional<ClaimProvenance> provenance;

    /// Gold label if present, else the strict majority of annotator labels
    /// (no majority resolves to ambiguous). Empty when there are no labels.
    [[nodiscard]] std::optional<FaithStatus> resolved_faithfulness() const;

    bool operator==(const Claim&) const = default;
};

struct SummaryRecord {
    std::string id;
    std::string story_id;
    WriterKind writer_kind = WriterKind::llm;
    std::string writer;  // model name or human author id
    std::vector<Claim> claims;

    /// Claims joined with single spaces, in order.
    [[nodiscard]] std::string text() const;

    bool operator==(const SummaryRecord&) const = default;
};

struct Story {
    std::string id;
    std::string title;
    std::string text;

    bool operator==(const Story&) const = default;
};

struct CorpusProvenance {
    std::string source_path;
    std::string schema_version{kCorpusSchemaVersion};
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const CorpusProvenance&) const = default;
};

struct Corpus {
    std::vector<Story> stories;
    std::vector<SummaryRecord> summaries;
    CorpusProvenance provenance;

    [[nodiscard]] const Story& story(std::string_view id) const;
    [[nodiscard]] std::size_t claim_count() const;

    bool operator==(const Corpus&) const = default;
};

/// Check every structural invariant; throws DataError naming the record.
void validate_corpus(const Corpus& corpus);

/// `schema_version`: "1" (native), "storysumm" (release adapter) or "auto".
Corpus load_corpus(const std::filesystem::path& path, std::string_view schema_version = "auto");
Corpus corpus_from_json(const nlohmann::json& doc, std::string_view schema_version = "auto");
nlohmann::json corpus_to_json(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Rule-based sentence splitter on . ! ? with an abbreviation list.
/// Never returns an empty segment; text without a boundary is one segment.
std::vector<std::string> segment_sentences(std::string_view text);

enum class LabelAxis { faith_by_subjectivity, ambiguity_type };

struct CountTable {
    LabelAxis axis = LabelAxis::faith_by_subjectivity;
    /// faith_by_subjectivity keys look like "faithful/objective";
    /// ambiguity_type keys are "1".."5".
    std::map<std::string, std::size_t> cells;
    std::vector<std::string> unlabeled;  // claim ids missing the layer
    std::size_t excluded = 0;             // N/A claims skipped by the faith axis

    [[nodiscard]] std::size_t at(const std::string& key) const;
    [[nodiscard]] std::size_t total() const;
};

/// Strict by default: any claim missing the requested layer raises
/// DataError listing their ids. With `allow_partial` they are reported in
/// `unlabeled` instead.
CountTable count_labels(const Corpus& corpus, LabelAxis axis, bool allow_partial = false);

}  // namespace armeval
